#include "geophase/noise_ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "geophase/error.hpp"
#include "geophase/tomography.hpp"

namespace geophase {

namespace {

constexpr std::size_t kChunk = 32;

std::size_t rotation_index(const PulseProgram& p) {
  for (std::size_t i = 0; i < p.segments().size(); ++i) {
    if (p.segments()[i].kind() == SegmentKind::rotation) return i;
  }
  throw ValidationError("program has no rotation segment");
}

// Neumaier-compensated sum of an already sorted range.
double stable_sum(const std::vector<double>& v) {
  double s = 0.0, comp = 0.0;
  for (double x : v) {
    const double t = s + x;
    comp += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + comp;
}

template <class Fn>
void parallel_chunks(std::size_t n_chunks, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < n_chunks; c = next++) {
        try {
          fn(c);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::amplitude:
      return "amplitude";
    case NoiseKind::phase:
      return "phase";
    case NoiseKind::detuning:
      return "detuning";
  }
  return "?";
}

NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "amplitude") return NoiseKind::amplitude;
  if (s == "phase") return NoiseKind::phase;
  if (s == "detuning") return NoiseKind::detuning;
  throw ValidationError("unknown noise kind '" + s + "' (expected amplitude, phase or detuning)");
}

void OUParams::validate() const {
  if (!(std::isfinite(c) && c >= 0.0)) throw ValidationError("noise strength c must be non-negative");
  if (!(std::isfinite(gamma_bw) && gamma_bw > 0.0)) throw ValidationError("noise bandwidth must be positive");
}

double NoiseTrace::at(double t) const {
  if (values.empty()) return 0.0;
  if (!(t >= 0.0)) throw DomainError("noise trace sampled at negative time");
  const auto k = static_cast<std::size_t>(std::floor(t / dt));
  return values[std::min(k, values.size() - 1)];
}

double NoiseTrace::integral(double duration) const {
  const std::size_t n = slice_count(duration, dt);
  if (n == 0) return 0.0;
  const double h = duration / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += at((static_cast<double>(j) + 0.5) * h);
  return acc * h;
}

NoiseTrace generate_ou(const OUParams& params, double duration, double dt, double scale, std::uint64_t seed) {
  params.validate();
  validate_dt(dt);
  if (!(duration >= 0.0)) throw DomainError("noise duration must be non-negative");
  const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(duration / dt - 1e-9)));
  NoiseTrace tr{dt, std::vector<double>(n + 1, 0.0), params.kind};
  const double sst = params.c * std::abs(scale);
  if (sst == 0.0) return tr;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double decay = std::exp(-params.gamma_bw * dt);
  const double kick = sst * std::sqrt(-std::expm1(-2.0 * params.gamma_bw * dt));
  tr.values[0] = sst * normal(rng);
  for (std::size_t k = 1; k <= n; ++k) tr.values[k] = tr.values[k - 1] * decay + kick * normal(rng);
  return tr;
}

double noise_scale(const RotationSpec& spec, bool sta, NoiseKind kind) {
  switch (kind) {
    case NoiseKind::amplitude:
      return std::abs(sta ? spec.omega_total() : spec.omega_ref());
    case NoiseKind::phase:
      return 1.0;
    case NoiseKind::detuning:
      return std::abs(sta ? spec.delta_total() : spec.delta0);
  }
  return 1.0;
}

FieldVector perturbed_rotation_field(const RotationSpec& spec, const FieldVector& baseline, const NoiseTrace& trace,
                                     double t) {
  if (!(t >= 0.0 && t <= spec.t_rot * (1.0 + 1e-12))) throw DomainError("noise applied outside the rotation");
  const double d = trace.at(t);
  FieldVector b = baseline;
  switch (trace.kind) {
    case NoiseKind::amplitude: {
      const double phi = spec.omega0 * t;
      b.bx += d * std::cos(phi);
      b.by += d * std::sin(phi);
      break;
    }
    case NoiseKind::phase: {
      const double c = std::cos(d), s = std::sin(d);
      b = {c * baseline.bx - s * baseline.by, s * baseline.bx + c * baseline.by, baseline.bz};
      break;
    }
    case NoiseKind::detuning:
      b.bz += d;
      break;
  }
  return b;
}

double ramp_dynamic_phase(const RampSpec& spec) {
  const double th = spec.theta0;
  return spec.delta0 * spec.t_ramp / th * std::log(1.0 / std::cos(th) + std::tan(th));
}

double dynamic_phase_reference(const RotationSpec& spec, const NoiseTrace* trace) {
  const double b0 = std::hypot(spec.omega_ref(), spec.delta0);
  double alpha = b0 * spec.t_rot;
  if (trace == nullptr) return alpha;
  const double s = std::sin(spec.theta0), c = std::cos(spec.theta0);
  const double integral = trace->integral(spec.t_rot);
  switch (trace->kind) {
    case NoiseKind::amplitude: {
      const double om = spec.omega_total();
      if (om != 0.0) alpha += s * (om - spec.omega0 * s * c) / om * integral;
      break;
    }
    case NoiseKind::detuning: {
      const double b = b0 - spec.omega0 * c;
      alpha += (c + spec.omega0 * s * s / b) * integral;
      break;
    }
    case NoiseKind::phase:
      break;
  }
  return alpha;
}

std::vector<TrajectoryResult> run_noise_ensemble(const EnsembleConfig& cfg) {
  validate_geometry(cfg.geometry);
  validate_dt(cfg.dt);
  cfg.noise.validate();
  if (cfg.n_traj < 1) throw ValidationError("n_traj must be at least 1");
  if (cfg.dissipation) cfg.dissipation->validate();

  const PulseProgram program = build_single_loop_program(cfg.geometry, cfg.direction, cfg.dt);
  const std::size_t rot = rotation_index(program);
  const Segment& rot_seg = program.segments()[rot];
  const auto& spec = rot_seg.as<RotationSpec>();
  const double scale = noise_scale(spec, rot_seg.sta_enabled(), cfg.noise.kind);
  double ramps = 0.0;
  for (const auto& seg : program.segments()) {
    if (seg.kind() == SegmentKind::ramp) ramps += ramp_dynamic_phase(seg.as<RampSpec>());
  }
  const double s_design = kTwoPi * (1.0 - std::cos(cfg.geometry.theta0));
  const double target =
      gamma_theory(cfg.direction == Loop::plus ? BerryVariant::single_plus : BerryVariant::single_minus, s_design);

  std::vector<TrajectoryResult> out(cfg.n_traj);
  auto finish = [&](std::size_t i, const NoiseTrace& tr, Complex rho10) {
    const double total = std::arg(rho10);
    const double alpha = ramps + dynamic_phase_reference(spec, &tr);
    out[i] = {i, cfg.base_seed + i, unwrap_nearest(total - alpha, target)};
  };

  const std::size_t n_chunks = (cfg.n_traj + kChunk - 1) / kChunk;
  parallel_chunks(n_chunks, cfg.workers, [&](std::size_t chunk) {
    const std::size_t lo = chunk * kChunk;
    const std::size_t hi = std::min(cfg.n_traj, lo + kChunk);
    std::vector<NoiseTrace> traces;
    traces.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
      traces.push_back(generate_ou(cfg.noise, spec.t_rot, cfg.dt, scale, cfg.base_seed + i));
    }
    if (cfg.dissipation) {
      for (std::size_t i = lo; i < hi; ++i) {
        const NoiseTrace& tr = traces[i - lo];
        EvolveOptions opts;
        opts.record = false;
        opts.hook = [&](std::size_t seg, double t, const FieldVector& b) {
          return seg == rot ? perturbed_rotation_field(spec, b, tr, t) : b;
        };
        const DensityMatrix rho = evolve_lindblad(program, density(ket0()), *cfg.dissipation, opts).back().rho;
        finish(i, tr, rho(1, 0));
      }
      return;
    }
    const std::vector<PulseProgram> programs(hi - lo, program);
    const std::vector<PureState> psi0(hi - lo, ket0());
    const auto finals =
        evolve_unitary_batch(programs, psi0, [&](std::size_t lane, std::size_t seg, double t, const FieldVector& b) {
          return seg == rot ? perturbed_rotation_field(spec, b, traces[lane], t) : b;
        });
    for (std::size_t i = lo; i < hi; ++i) {
      const PureState& psi = finals[i - lo];
      finish(i, traces[i - lo], psi(1) * std::conj(psi(0)));
    }
  });
  return out;
}

EnsembleStats ensemble_stats(const std::vector<double>& gammas, std::size_t bins) {
  if (gammas.size() < 2) throw DomainError("ensemble statistics need at least two samples");
  if (bins == 0) throw DomainError("histogram needs at least one bin");
  std::vector<double> g = gammas;
  std::sort(g.begin(), g.end());
  const double n = static_cast<double>(g.size());
  EnsembleStats st;
  st.n = g.size();
  st.mean_gamma = stable_sum(g) / n;

  std::vector<double> d2(g.size()), d3(g.size()), d4(g.size()), cs(g.size()), sn(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = g[i] - st.mean_gamma;
    d2[i] = d * d;
    d3[i] = d2[i] * d;
    d4[i] = d2[i] * d2[i];
    cs[i] = std::cos(g[i]);
    sn[i] = std::sin(g[i]);
  }
  // Sorted by gamma, so every sum below sees the same order for any input permutation.
  const double m2 = stable_sum(d2) / n;
  const double m3 = stable_sum(d3) / n;
  const double m4 = stable_sum(d4) / n;
  st.sigma = std::sqrt(stable_sum(d2) / (n - 1.0));
  st.nu = std::hypot(stable_sum(cs), stable_sum(sn)) / n;
  st.nu = std::min(st.nu, 1.0);
  if (m2 > 0.0) {
    st.skewness = m3 / std::pow(m2, 1.5);
    st.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }

  st.histogram.lo = g.front();
  st.histogram.hi = g.back();
  if (st.histogram.hi == st.histogram.lo) {
    st.histogram.lo -= 0.5;
    st.histogram.hi += 0.5;
  }
  st.histogram.counts.assign(bins, 0);
  const double width = (st.histogram.hi - st.histogram.lo) / static_cast<double>(bins);
  for (double x : g) {
    auto b = static_cast<std::size_t>((x - st.histogram.lo) / width);
    ++st.histogram.counts[std::min(b, bins - 1)];
  }
  st.gaussian_fit = {st.mean_gamma, st.sigma};
  return st;
}

double analytic_sigma_omega(double c_omega, double theta0, double gamma_bw, double t_rot) {
  const double x = gamma_bw * t_rot;
  if (!(x > 0.0)) throw DomainError("gamma_bw * t_rot must be positive");
  // x - 1 + e^{-x}, with a series where the closed form cancels.
  const double g = x < 1e-3 ? x * x * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0) : x + std::expm1(-x);
  const double s = std::sin(theta0);
  return 2.0 * std::sqrt(2.0) * c_omega * kPi * s * s * std::cos(theta0) * std::sqrt(g) / x;
}

double analytic_nu(double sigma) {
  if (!(sigma >= 0.0)) throw DomainError("sigma must be non-negative");
  return std::exp(-0.5 * sigma * sigma);
}

void write_csv(std::ostream& os, const std::vector<TrajectoryResult>& results) {
  os << "trajectory_index,seed,gamma_rad\n";
  char buf[96];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%zu,%llu,%.17g\n", r.index, static_cast<unsigned long long>(r.seed), r.gamma);
    os << buf;
  }
}

}  // namespace geophase
