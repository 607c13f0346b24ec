#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "geophase/noise_ensemble.hpp"
#include "geophase/process_fidelity.hpp"
#include "geophase/pulse_schedule.hpp"

namespace geophase {

enum class ExperimentKind { berry_sweep, trajectory, noise_ensemble, fidelity_table, compile_iq, rwa_check };

std::string to_string(ExperimentKind kind);
/// Throws ValidationError for unknown names.
ExperimentKind parse_experiment(const std::string& name);

struct LabOptions {
  double f10_ghz = 1.0;
  double dt_fine = 0.002;
  std::vector<double> f10_scan_ghz{0.5, 1.0, 2.0};
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::berry_sweep;
  double dt = 0.01;
  double delta0 = rad_per_ns_from_mhz(7.0);
  double t_ramp = 10.0;
  std::vector<double> theta0_grid;
  std::vector<double> t_rot_grid{30.0};
  EchoVariant variant = EchoVariant::plus_minus;
  Loop direction = Loop::plus;
  bool sta = true;
  PulseOptions pulses;
  std::optional<DissipationParams> dissipation;
  OUParams noise{0.1, 0.01, NoiseKind::amplitude};
  std::vector<double> c_grid{0.1};
  std::vector<double> s_grid;
  std::size_t n_traj = 300;
  std::uint64_t seed = 1;
  double probe_step = 0.5;
  std::size_t histogram_bins = 30;
  std::vector<QubitSpec> qubits = default_qubits();
  std::vector<ProtocolSpec> protocols = default_protocols();
  LabOptions lab;
  /// Explicit program for compile-iq; otherwise an echo with resonant pulses is built.
  std::optional<nlohmann::json> program;
  nlohmann::json raw;
};

/// Evenly spaced interior points a + (i+1)(b-a)/(n+1) of (a, b).
std::vector<double> interior_grid(double a, double b, std::size_t n);
/// theta0 with 2 pi (1 - cos theta0) = s.
double theta0_for_solid_angle(double s);
double solid_angle_for_theta0(double theta0);

/// Defaults for the named experiment, overridden by the document.
/// Type errors raise ValidationError naming the offending path.
ExperimentConfig config_from_json(const nlohmann::json& doc, std::optional<ExperimentKind> experiment = {});

/// Every invariant violation as "<path>: <message>"; empty when runnable.
std::vector<std::string> validate(const ExperimentConfig& cfg);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  unsigned workers = 0;
};

/// Runs the experiment, writes its CSV files and summary.json into out_dir
/// and returns the summary document.
nlohmann::json run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace geophase
