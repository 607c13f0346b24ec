#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "geophase/error.hpp"
#include "geophase/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counter-diabatic Berry phase simulator"};

  std::string experiment;
  std::string config_path;
  std::string out_dir;
  unsigned workers = 0;
  std::optional<std::uint64_t> seed;
  bool check_only = false;

  app.add_option("experiment", experiment,
                 "berry-sweep | trajectory | noise-ensemble | fidelity-table | compile-iq | rwa-check")
      ->required();
  app.add_option("--config,-c", config_path, "JSON configuration file");
  app.add_option("--out,-o", out_dir, "Output directory (default: $GEOPHASE_OUT or .)");
  app.add_option("--workers,-j", workers, "Worker threads (0 = hardware concurrency)");
  app.add_option("--seed", seed, "Base seed, overrides the configuration");
  app.add_flag("--validate", check_only, "Only validate the configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const auto kind = geophase::parse_experiment(experiment);
    nlohmann::json doc = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "error: cannot open " << config_path << "\n";
        return kExitUsage;
      }
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "error: " << config_path << ": " << e.what() << "\n";
        return kExitUsage;
      }
    }
    if (doc.contains("experiment") && doc["experiment"] != experiment) {
      std::cerr << "error: config is for '" << doc["experiment"].get<std::string>() << "', not '" << experiment
                << "'\n";
      return kExitUsage;
    }
    auto cfg = geophase::config_from_json(doc, kind);
    if (seed) cfg.seed = *seed;

    const auto violations = geophase::validate(cfg);
    if (!violations.empty()) {
      for (const auto& v : violations) std::cerr << "invalid: " << v << "\n";
      return kExitUsage;
    }
    if (check_only) {
      std::cout << "configuration is valid\n";
      return kExitOk;
    }

    geophase::RunOptions opts;
    opts.workers = workers;
    if (!out_dir.empty()) {
      opts.out_dir = out_dir;
    } else if (const char* env = std::getenv("GEOPHASE_OUT")) {
      opts.out_dir = env;
    }
    const auto summary = geophase::run_experiment(cfg, opts);
    std::cout << summary["results"].dump(2) << "\n";
    std::cerr << "wrote " << (opts.out_dir / "summary.json").string() << "\n";
    return kExitOk;
  } catch (const geophase::ValidationError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitUsage;
  } catch (const geophase::DomainError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitUsage;
  } catch (const geophase::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
