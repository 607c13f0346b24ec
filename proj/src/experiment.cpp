#include "geophase/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "geophase/error.hpp"
#include "geophase/frame_compiler.hpp"
#include "geophase/program_io.hpp"
#include "geophase/simd/su2_batch.hpp"
#include "geophase/tomography.hpp"

namespace geophase {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// -- parsing ----------------------------------------------------------------

template <class T>
T read(const json& doc, const char* key, T fallback, const std::string& parent = "") {
  if (!doc.is_object()) throw ValidationError((parent.empty() ? "/" : parent) + ": expected an object");
  if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(parent + "/" + key + ": wrong type");
  }
}

double read_number(const json& node, const std::string& path) {
  if (!node.is_number()) throw ValidationError(path + ": expected a number");
  return node.get<double>();
}

std::vector<double> read_list(const json& doc, const char* key, std::vector<double> fallback,
                              const std::string& parent = "") {
  if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
  const json& v = doc.at(key);
  const std::string path = parent + "/" + key;
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ValidationError(path + ": expected a number or a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_number(v[i], path + "/" + std::to_string(i)));
  return out;
}

ExperimentConfig defaults_for(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::berry_sweep:
      c.theta0_grid = interior_grid(0.1, kPi / 2 - 0.1, 10);
      c.t_rot_grid = {20.0, 30.0, 40.0, 60.0};
      break;
    case ExperimentKind::trajectory:
      c.theta0_grid = {kPi / 6, kPi / 4};
      break;
    case ExperimentKind::noise_ensemble:
      c.s_grid = {kPi / 40, 3 * kPi / 16, 3 * kPi / 8, kPi};
      break;
    case ExperimentKind::fidelity_table:
      break;
    case ExperimentKind::compile_iq:
    case ExperimentKind::rwa_check:
      c.theta0_grid = {kPi / 6};
      c.pulses.model = PulseModel::resonant;
      c.pulses.duration = 20.0;
      break;
  }
  return c;
}

// -- output -----------------------------------------------------------------

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) : os_(path) {
    if (!os_) throw Error("cannot write " + path.string());
    os_ << header << '\n';
  }
  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
    os_ << '\n';
  }

 private:
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  std::ofstream os_;
};

template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

BerryVariant echo_variant(EchoVariant v) {
  return v == EchoVariant::plus_minus ? BerryVariant::echo_plus_minus : BerryVariant::echo_minus_plus;
}

Complex final_coherence(const PulseProgram& prog, const std::optional<DissipationParams>& dis) {
  if (dis) return evolve_lindblad_final(prog, density(ket0()), *dis)(1, 0);
  const PureState psi = evolve_unitary_final(prog, ket0());
  return psi(1) * std::conj(psi(0));
}

// -- experiments ------------------------------------------------------------

json run_berry_sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
  CsvWriter csv(opts.out_dir / "berry_sweep.csv",
                "t_rot_ns,theta0_rad,s_design_rad,x,y,gamma_rad,gamma_continuity_rad");
  const BerryVariant variant = echo_variant(cfg.variant);
  std::vector<double> thetas = cfg.theta0_grid;
  std::sort(thetas.begin(), thetas.end());
  json fits = json::array();
  for (double t_rot : cfg.t_rot_grid) {
    std::vector<PulseProgram> programs;
    for (double th : thetas) {
      programs.push_back(build_echo_program({th, cfg.delta0, cfg.t_ramp, t_rot}, cfg.variant, cfg.sta, cfg.dt,
                                            cfg.pulses));
    }
    std::vector<Complex> rho10(thetas.size());
    if (cfg.dissipation) {
      parallel_for(thetas.size(), opts.workers,
                   [&](std::size_t i) { rho10[i] = final_coherence(programs[i], cfg.dissipation); });
    } else {
      const std::vector<PureState> psi0(programs.size(), ket0());
      const auto finals = evolve_unitary_batch(programs, psi0);
      for (std::size_t i = 0; i < finals.size(); ++i) rho10[i] = finals[i](1) * std::conj(finals[i](0));
    }
    std::vector<SweepPoint> pts;
    std::vector<ContrastPoint> cpts;
    std::vector<double> raw;
    std::vector<double> amp;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      const double s = solid_angle_for_theta0(thetas[i]);
      const double x = 2.0 * rho10[i].real(), y = 2.0 * rho10[i].imag();
      const auto res = extract_berry_phase(x, y, s, variant);
      pts.push_back({s, res.gamma});
      cpts.push_back({s, x, y});
      raw.push_back(res.raw_angle);
      amp.push_back(std::hypot(x, y));
    }
    const auto cont = unwrap_sweep(raw, pts.front().s, variant);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      csv.row(t_rot, thetas[i], pts[i].s, cpts[i].x, cpts[i].y, pts[i].gamma, cont[i]);
    }
    const SlopeFit fit = fit_slope(pts);
    const double r = fit_contrast(cpts, variant);
    const auto [lo, hi] = std::minmax_element(amp.begin(), amp.end());
    double mean_amp = 0.0;
    for (double a : amp) mean_amp += a;
    mean_amp /= static_cast<double>(amp.size());
    fits.push_back({{"t_rot_ns", t_rot},
                    {"k", fit.k},
                    {"k_err", std::isnan(fit.k_err) ? json(nullptr) : json(fit.k_err)},
                    {"intercept_rad", fit.intercept},
                    {"r", r},
                    {"amplitude_variation", (*hi - *lo) / mean_amp}});
  }
  return {{"variant", to_string(cfg.variant)}, {"fits", fits}};
}

json run_trajectory(const ExperimentConfig& cfg, const RunOptions&  opts) {
  CsvWriter csv(opts.out_dir / "trajectory.csv", "theta0_rad,t_ns,r,theta_rad,phi_rad");
  json out = json::array();
  const double t_rot = cfg.t_rot_grid.front();
  const auto n_probe = static_cast<std::size_t>(std::floor(t_rot / cfg.probe_step + 1e-9));
  std::vector<double> stops;
  for (std::size_t k = 0; k <= n_probe; ++k) stops.push_back(std::min(t_rot, static_cast<double>(k) * cfg.probe_step));
  if (t_rot - stops.back() > 1e-9) stops.push_back(t_rot);

  for (double th : cfg.theta0_grid) {
    const LoopGeometry g{th, cfg.delta0, cfg.t_ramp, t_rot};
    std::vector<StateSample> pure(stops.size());
    std::vector<DensitySample> mixed(stops.size());
    parallel_for(stops.size(), opts.workers, [&](std::size_t k) {
      const PulseProgram prog = build_trajectory_program(g, stops[k], cfg.direction, cfg.dt);
      if (cfg.dissipation) {
        mixed[k] = {stops[k], evolve_lindblad_final(prog, density(ket0()), *cfg.dissipation)};
      } else {
        pure[k] = {stops[k], evolve_unitary_final(prog, ket0())};
      }
    });
    const auto sph = cfg.dissipation ? spherical_trajectory(mixed) : spherical_trajectory(pure);
    for (const auto& s : sph) csv.row(th, s.t, s.r, s.theta, s.phi);
    const double sa = solid_angle(sph);
    const double ideal = solid_angle_for_theta0(th);
    out.push_back({{"theta0_rad", th},
                   {"solid_angle_rad", sa},
                   {"ideal_solid_angle_rad", ideal},
                   {"ratio", sa / ideal},
                   {"final_r", sph.back().r}});
  }
  return {{"probe_step_ns", cfg.probe_step}, {"loops", out}};
}

json run_noise(const ExperimentConfig& cfg, const RunOptions& opts) {
  CsvWriter csv(opts.out_dir / "noise_ensemble.csv",
                "s_design_rad,theta0_rad,c,trajectory_index,seed,gamma_rad");
  json cells = json::array();
  std::size_t cell = 0;
  for (double s : cfg.s_grid) {
    for (double c : cfg.c_grid) {
      EnsembleConfig ec;
      ec.geometry = {theta0_for_solid_angle(s), cfg.delta0, cfg.t_ramp, cfg.t_rot_grid.front()};
      ec.direction = cfg.direction;
      ec.noise = cfg.noise;
      ec.noise.c = c;
      ec.n_traj = cfg.n_traj;
      ec.base_seed = cfg.seed + cell * cfg.n_traj;
      ec.dissipation = cfg.dissipation;
      ec.dt = cfg.dt;
      ec.workers = opts.workers;
      ++cell;
      const auto res = run_noise_ensemble(ec);
      std::vector<double> gammas;
      for (const auto& r : res) {
        csv.row(s, ec.geometry.theta0, c, r.index, static_cast<std::size_t>(r.seed), r.gamma);
        gammas.push_back(r.gamma);
      }
      json entry = {{"s_design_rad", s},       {"theta0_rad", ec.geometry.theta0},
                    {"c", c},                  {"kind", to_string(ec.noise.kind)},
                    {"n_traj", cfg.n_traj},    {"base_seed", ec.base_seed},
                    {"noiseless_gamma_rad", gamma_theory(cfg.direction == Loop::plus ? BerryVariant::single_plus
                                                                                      : BerryVariant::single_minus,
                                                         s)}};
      if (gammas.size() >= 2) {
        const auto st = ensemble_stats(gammas, cfg.histogram_bins);
        entry["mean_gamma_rad"] = st.mean_gamma;
        entry["sigma_rad"] = st.sigma;
        entry["nu"] = st.nu;
        entry["skewness"] = st.skewness;
        entry["excess_kurtosis"] = st.excess_kurtosis;
        entry["histogram"] = {{"lo", st.histogram.lo}, {"hi", st.histogram.hi}, {"counts", st.histogram.counts}};
        entry["gaussian_fit"] = {{"center", st.gaussian_fit.center}, {"width", st.gaussian_fit.width}};
      }
      if (ec.noise.kind == NoiseKind::amplitude) {
        const double sig = analytic_sigma_omega(c, ec.geometry.theta0, ec.noise.gamma_bw, ec.geometry.t_rot);
        entry["analytic_sigma_rad"] = sig;
        entry["analytic_nu"] = analytic_nu(sig);
      } else {
        entry["analytic_sigma_rad"] = nullptr;
        entry["analytic_nu"] = nullptr;
      }
      cells.push_back(entry);
    }
  }
  return {{"cells", cells}};
}

json run_fidelity(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto cells = table_s1_runner(cfg.qubits, cfg.protocols, cfg.dt, opts.workers);
  CsvWriter csv(opts.out_dir / "fidelity_table.csv",
                "qubit,t1_ns,t2_echo_ns,protocol,delta0_rad_per_ns,t_ramp_ns,t_rot_ns,fidelity");
  json table = json::array();
  for (const auto& c : cells) {
    csv.row(c.qubit.label, c.qubit.t1, c.qubit.t2_echo, to_string(c.protocol.kind), c.protocol.delta0,
            c.protocol.t_ramp, c.protocol.t_rot, c.fidelity);
    table.push_back({{"qubit", c.qubit.label},
                     {"protocol", to_string(c.protocol.kind)},
                     {"t_ramp", c.protocol.t_ramp},
                     {"t_rot", c.protocol.t_rot},
                     {"fidelity", c.fidelity}});
  }
  std::ofstream txt(opts.out_dir / "fidelity_table.txt");
  write_table_text(txt, cells);
  return {{"table", table}};
}

PulseProgram lab_program(const ExperimentConfig& cfg) {
  if (cfg.program) return program_from_json(*cfg.program);
  return build_echo_program({cfg.theta0_grid.front(), cfg.delta0, cfg.t_ramp, cfg.t_rot_grid.front()}, cfg.variant,
                            cfg.sta, cfg.dt, cfg.pulses);
}

json run_compile(const ExperimentConfig& cfg, const RunOptions& opts) {
  const PulseProgram prog = lab_program(cfg);
  const double omega_d = kTwoPi * cfg.lab.f10_ghz + cfg.delta0;
  const IQWaveform w = compile_iq(prog, cfg.delta0, omega_d);
  {
    std::ofstream os(opts.out_dir / "iq_waveform.csv");
    write_csv(os, w);
  }
  {
    std::ofstream os(opts.out_dir / "iq_waveform.iqw", std::ios::binary);
    write_iqw1(os, w);
  }
  double peak = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) peak = std::max(peak, std::hypot(w.i_samples[k], w.q_samples[k]));
  return {{"samples", w.size()},
          {"dt_ns", w.dt},
          {"duration_ns", prog.total_duration()},
          {"omega_d_rad_per_ns", omega_d},
          {"peak_amplitude_rad_per_ns", peak},
          {"final_xi_rad", w.xi_samples.empty() ? 0.0 : w.xi_samples.back()}};
}

json run_rwa(const ExperimentConfig& cfg, const RunOptions& opts) {
  const PulseProgram prog = lab_program(cfg);
  CsvWriter csv(opts.out_dir / "rwa_check.csv", "f10_ghz,omega_d_rad_per_ns,deviation");
  std::vector<double> dev(cfg.lab.f10_scan_ghz.size());
  parallel_for(dev.size(), opts.workers, [&](std::size_t i) {
    dev[i] = rwa_deviation(prog, cfg.delta0, LabFrameSpec::scaled(cfg.lab.f10_scan_ghz[i], cfg.delta0, cfg.lab.dt_fine));
  });
  json scan = json::array();
  for (std::size_t i = 0; i < dev.size(); ++i) {
    const auto lab = LabFrameSpec::scaled(cfg.lab.f10_scan_ghz[i], cfg.delta0, cfg.lab.dt_fine);
    csv.row(cfg.lab.f10_scan_ghz[i], lab.omega_d, dev[i]);
    scan.push_back({{"f10_ghz", cfg.lab.f10_scan_ghz[i]}, {"deviation", dev[i]}});
  }

  // Berry phase read from the frame-corrected lab state at the main carrier.
  const auto lab = LabFrameSpec::scaled(cfg.lab.f10_ghz, cfg.delta0, cfg.lab.dt_fine);
  const IQWaveform w = compile_iq(prog, cfg.delta0, lab.omega_d, lab.dt_fine);
  const auto states = simulate_lab_frame(w, lab, ket0());
  const PureState lab_psi = frame_correct(states.back().psi, states.back().t, w);
  const PureState rot_psi = evolve_unitary_final(PulseProgram(prog.segments(), w.dt), ket0());
  const double s = solid_angle_for_theta0(cfg.theta0_grid.front());
  auto gamma = [&](const PureState& p) {
    const Complex r = p(1) * std::conj(p(0));
    return extract_berry_phase(2 * r.real(), 2 * r.imag(), s, echo_variant(cfg.variant)).gamma;
  };
  return {{"scan", scan},
          {"f10_ghz", cfg.lab.f10_ghz},
          {"overlap", std::norm(rot_psi.dot(lab_psi))},
          {"gamma_rotating_rad", gamma(rot_psi)},
          {"gamma_lab_rad", gamma(lab_psi)}};
}

json config_echo(const ExperimentConfig& cfg) {
  json c = cfg.raw.is_object() ? cfg.raw : json::object();
  c["experiment"] = to_string(cfg.experiment);
  c["dt"] = cfg.dt;
  c["delta0"] = cfg.delta0;
  c["t_ramp"] = cfg.t_ramp;
  c["seed"] = cfg.seed;
  return c;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::berry_sweep:
      return "berry-sweep";
    case ExperimentKind::trajectory:
      return "trajectory";
    case ExperimentKind::noise_ensemble:
      return "noise-ensemble";
    case ExperimentKind::fidelity_table:
      return "fidelity-table";
    case ExperimentKind::compile_iq:
      return "compile-iq";
    case ExperimentKind::rwa_check:
      return "rwa-check";
  }
  return "?";
}

ExperimentKind parse_experiment(const std::string& name) {
  for (auto k : {ExperimentKind::berry_sweep, ExperimentKind::trajectory, ExperimentKind::noise_ensemble,
                 ExperimentKind::fidelity_table, ExperimentKind::compile_iq, ExperimentKind::rwa_check}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError("unknown experiment '" + name + "'");
}

std::vector<double> interior_grid(double a, double b, std::size_t n) {
  std::vector<double> g;
  for (std::size_t i = 0; i < n; ++i) g.push_back(a + static_cast<double>(i + 1) * (b - a) / static_cast<double>(n + 1));
  return g;
}

double theta0_for_solid_angle(double s) { return std::acos(1.0 - s / kTwoPi); }
double solid_angle_for_theta0(double theta0) { return kTwoPi * (1.0 - std::cos(theta0)); }

ExperimentConfig config_from_json(const json& doc, std::optional<ExperimentKind> experiment) {
  if (!doc.is_object()) throw ValidationError("/: configuration must be a JSON object");
  ExperimentKind kind = ExperimentKind::berry_sweep;
  if (experiment) {
    kind = *experiment;
  } else if (doc.contains("experiment")) {
    kind = parse_experiment(read<std::string>(doc, "experiment", ""));
  }
  ExperimentConfig c = defaults_for(kind);
  c.raw = doc;
  c.dt = read(doc, "dt", c.dt);
  if (doc.contains("delta0_mhz")) c.delta0 = rad_per_ns_from_mhz(read(doc, "delta0_mhz", 7.0));
  c.delta0 = read(doc, "delta0", c.delta0);
  c.t_ramp = read(doc, "t_ramp", c.t_ramp);
  c.theta0_grid = read_list(doc, "theta0", c.theta0_grid);
  c.t_rot_grid = read_list(doc, "t_rot", c.t_rot_grid);
  c.s_grid = read_list(doc, "s_grid", c.s_grid);
  if (doc.contains("variant")) c.variant = parse_echo_variant(read<std::string>(doc, "variant", ""));
  if (doc.contains("direction")) c.direction = parse_loop(read<std::string>(doc, "direction", ""));
  c.sta = read(doc, "sta", c.sta);
  c.n_traj = read(doc, "n_traj", c.n_traj);
  c.seed = read(doc, "seed", c.seed);
  c.probe_step = read(doc, "probe_step", c.probe_step);
  c.histogram_bins = read(doc, "histogram_bins", c.histogram_bins);

  if (doc.contains("pulses") && !doc.at("pulses").is_null()) {
    const json& p = doc.at("pulses");
    const std::string model = read<std::string>(p, "model", c.pulses.model == PulseModel::ideal ? "ideal" : "resonant", "/pulses");
    if (model != "ideal" && model != "resonant") throw ValidationError("/pulses/model: expected ideal or resonant");
    c.pulses.model = model == "ideal" ? PulseModel::ideal : PulseModel::resonant;
    c.pulses.duration = read(p, "duration", c.pulses.duration, "/pulses");
  }
  if (doc.contains("dissipation") && !doc.at("dissipation").is_null()) {
    const json& d = doc.at("dissipation");
    c.dissipation = DissipationParams{read(d, "t1", 0.0, "/dissipation"), read(d, "t2_echo", 0.0, "/dissipation")};
  }
  if (doc.contains("noise") && !doc.at("noise").is_null()) {
    const json& n = doc.at("noise");
    if (n.contains("kind")) c.noise.kind = parse_noise_kind(read<std::string>(n, "kind", "", "/noise"));
    c.noise.gamma_bw = read(n, "gamma_bw", c.noise.gamma_bw, "/noise");
    c.c_grid = read_list(n, "c", c.c_grid, "/noise");
  }
  if (doc.contains("qubits")) {
    const json& qs = doc.at("qubits");
    if (!qs.is_array()) throw ValidationError("/qubits: expected a list");
    c.qubits.clear();
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const std::string base = "/qubits/" + std::to_string(i);
      c.qubits.push_back({read<std::string>(qs[i], "label", "qubit", base), read(qs[i], "t1", 0.0, base),
                          read(qs[i], "t2_echo", 0.0, base)});
    }
  }
  if (doc.contains("protocols")) {
    const json& ps = doc.at("protocols");
    if (!ps.is_array()) throw ValidationError("/protocols: expected a list");
    c.protocols.clear();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string base = "/protocols/" + std::to_string(i);
      const std::string kind_name = read<std::string>(ps[i], "kind", "STA", base);
      if (kind_name != "STA" && kind_name != "adiabatic") {
        throw ValidationError(base + "/kind: expected STA or adiabatic");
      }
      c.protocols.push_back({kind_name == "STA" ? ProtocolKind::sta : ProtocolKind::adiabatic,
                             read(ps[i], "delta0", c.delta0, base), read(ps[i], "t_ramp", 0.0, base),
                             read(ps[i], "t_rot", 0.0, base)});
    }
  }
  if (doc.contains("lab") && !doc.at("lab").is_null()) {
    const json& l = doc.at("lab");
    c.lab.f10_ghz = read(l, "f10_ghz", c.lab.f10_ghz, "/lab");
    c.lab.dt_fine = read(l, "dt_fine", c.lab.dt_fine, "/lab");
    c.lab.f10_scan_ghz = read_list(l, "f10_scan_ghz", c.lab.f10_scan_ghz, "/lab");
  }
  if (doc.contains("program") && !doc.at("program").is_null()) c.program = doc.at("program");
  return c;
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> v;
  auto check = [&](bool ok, const std::string& path, const std::string& msg) {
    if (!ok) v.push_back(path + ": " + msg);
  };
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  check(positive(c.dt), "/dt", "dt must be positive");
  check(positive(c.delta0), "/delta0", "delta0 must be positive");
  check(positive(c.t_ramp), "/t_ramp", "t_ramp must be positive");
  const bool needs_theta = c.experiment == ExperimentKind::berry_sweep || c.experiment == ExperimentKind::trajectory ||
                           ((c.experiment == ExperimentKind::compile_iq || c.experiment == ExperimentKind::rwa_check) &&
                            !c.program);
  if (needs_theta) check(!c.theta0_grid.empty(), "/theta0", "at least one theta0 is required");
  for (std::size_t i = 0; i < c.theta0_grid.size(); ++i) {
    const double t = c.theta0_grid[i];
    check(std::isfinite(t) && t > 0.0 && t < kMaxTheta0, "/theta0/" + std::to_string(i),
          "theta0 must lie in (0, pi/2)");
  }
  check(!c.t_rot_grid.empty(), "/t_rot", "at least one t_rot is required");
  for (std::size_t i = 0; i < c.t_rot_grid.size(); ++i) {
    check(positive(c.t_rot_grid[i]), "/t_rot/" + std::to_string(i), "t_rot must be positive");
  }
  if (c.pulses.model == PulseModel::resonant) check(positive(c.pulses.duration), "/pulses/duration", "pulse duration must be positive");
  if (c.dissipation) {
    check(positive(c.dissipation->t1), "/dissipation/t1", "t1 must be positive");
    check(positive(c.dissipation->t2_echo), "/dissipation/t2_echo", "t2_echo must be positive");
  }
  switch (c.experiment) {
    case ExperimentKind::berry_sweep:
      check(c.theta0_grid.size() >= 3, "/theta0", "a sweep needs at least three theta0 values");
      break;
    case ExperimentKind::trajectory:
      check(positive(c.probe_step), "/probe_step", "probe_step must be positive");
      break;
    case ExperimentKind::noise_ensemble:
      check(!c.s_grid.empty(), "/s_grid", "at least one solid angle is required");
      for (std::size_t i = 0; i < c.s_grid.size(); ++i) {
        const double s = c.s_grid[i];
        const bool ok = std::isfinite(s) && s > 0.0 && s < kTwoPi && theta0_for_solid_angle(s) < kMaxTheta0;
        check(ok, "/s_grid/" + std::to_string(i), "solid angle must lie in (0, 2 pi (1 - cos theta_max))");
      }
      check(c.n_traj >= 1, "/n_traj", "n_traj must be at least 1");
      check(positive(c.noise.gamma_bw), "/noise/gamma_bw", "noise bandwidth must be positive");
      for (std::size_t i = 0; i < c.c_grid.size(); ++i) {
        check(std::isfinite(c.c_grid[i]) && c.c_grid[i] >= 0.0, "/noise/c/" + std::to_string(i),
              "noise strength must be non-negative");
      }
      check(c.histogram_bins >= 1, "/histogram_bins", "at least one histogram bin is required");
      break;
    case ExperimentKind::fidelity_table:
      check(!c.qubits.empty(), "/qubits", "at least one qubit is required");
      check(!c.protocols.empty(), "/protocols", "at least one protocol is required");
      for (std::size_t i = 0; i < c.qubits.size(); ++i) {
        check(positive(c.qubits[i].t1), "/qubits/" + std::to_string(i) + "/t1", "t1 must be positive");
        check(positive(c.qubits[i].t2_echo), "/qubits/" + std::to_string(i) + "/t2_echo", "t2_echo must be positive");
      }
      for (std::size_t i = 0; i < c.protocols.size(); ++i) {
        const auto& p = c.protocols[i];
        const std::string base = "/protocols/" + std::to_string(i);
        check(positive(p.delta0), base + "/delta0", "delta0 must be positive");
        check(positive(p.t_ramp), base + "/t_ramp", "t_ramp must be positive");
        check(positive(p.t_rot), base + "/t_rot", "t_rot must be positive");
      }
      break;
    case ExperimentKind::compile_iq:
    case ExperimentKind::rwa_check: {
      check(positive(c.lab.f10_ghz), "/lab/f10_ghz", "carrier frequency must be positive");
      check(positive(c.lab.dt_fine), "/lab/dt_fine", "dt_fine must be positive");
      if (c.experiment == ExperimentKind::rwa_check) {
        const auto scan = c.lab.f10_scan_ghz;
        for (std::size_t i = 0; i < scan.size(); ++i) {
          const double wd = kTwoPi * scan[i] + c.delta0;
          check(positive(scan[i]) && c.lab.dt_fine <= kTwoPi / (20.0 * wd), "/lab/f10_scan_ghz/" + std::to_string(i),
                "dt_fine must resolve the carrier with 20 samples per period");
        }
      }
      if (!c.program) {
        check(c.pulses.model == PulseModel::resonant, "/pulses/model",
              "lab-frame compilation needs resonant pulses");
      }
      break;
    }
  }
  return v;
}

json run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto violations = validate(cfg);
  if (!violations.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& s : violations) msg += "\n  " + s;
    throw ValidationError(msg);
  }
  std::filesystem::create_directories(opts.out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  json results;
  switch (cfg.experiment) {
    case ExperimentKind::berry_sweep:
      results = run_berry_sweep(cfg, opts);
      break;
    case ExperimentKind::trajectory:
      results = run_trajectory(cfg, opts);
      break;
    case ExperimentKind::noise_ensemble:
      results = run_noise(cfg, opts);
      break;
    case ExperimentKind::fidelity_table:
      results = run_fidelity(cfg, opts);
      break;
    case ExperimentKind::compile_iq:
      results = run_compile(cfg, opts);
      break;
    case ExperimentKind::rwa_check:
      results = run_rwa(cfg, opts);
      break;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json summary = {{"experiment", to_string(cfg.experiment)},
                  {"config", config_echo(cfg)},
                  {"results", results},
                  {"wall_time_s", wall},
                  {"versions", {{"geophase", kVersion}, {"simd", std::string(simd::to_string(simd::active_isa()))}}}};
  std::ofstream os(opts.out_dir / "summary.json");
  os << summary.dump(2) << '\n';
  return summary;
}

}  // namespace geophase
