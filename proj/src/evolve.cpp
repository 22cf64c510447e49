#include "spinline/evolve.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace spinline {

namespace {

struct BoundaryEdges {
  std::size_t left;
  std::size_t right;
};

BoundaryEdges locate_boundary_edges(const SingleParticleSystem& system, int n_chain) {
  require(system.site_count() == static_cast<std::size_t>(n_chain) + 2,
          "driven system must have N + 2 sites");
  const std::size_t n = static_cast<std::size_t>(n_chain);
  BoundaryEdges b{system.find_edge(0, 1), system.find_edge(n, n + 1)};
  require(b.left < system.edges().size() && b.right < system.edges().size(),
          "driven system lacks boundary edges");
  return b;
}

}  // namespace

SingleParticleSystem transfer_system(int n_chain) {
  require(n_chain >= 1, "chain length must be positive");
  const std::size_t n = static_cast<std::size_t>(n_chain);
  SingleParticleSystem s(n + 2);
  s.add_edge(0, 1, 0.0);
  for (std::size_t i = 1; i < n; ++i) s.add_edge(i, i + 1, 1.0);
  s.add_edge(n, n + 1, 0.0);
  return s;
}

Trajectory propagate(const SingleParticleSystem& system, const PulseSchedule* schedule,
                     const AmplitudeVector& initial, double dt, const PropagateOptions& options) {
  require(dt > 0.0, "dt must be positive");
  require(static_cast<std::size_t>(initial.size()) == system.site_count(), "initial state dimension mismatch");
  const std::size_t target =
      options.target_site == std::numeric_limits<std::size_t>::max() ? system.site_count() - 1 : options.target_site;
  require(target < system.site_count(), "target site out of range");

  std::size_t steps = 0;
  BoundaryEdges boundary{0, 0};
  if (schedule != nullptr) {
    require(std::abs(schedule->dt - dt) <= 1e-12 * dt, "schedule step differs from dt");
    require(schedule->omega_in.size() == schedule->omega_out.size(), "schedule channels differ in length");
    boundary = locate_boundary_edges(system, schedule->n_chain);
    steps = schedule->step_count();
  } else {
    require(options.t_final >= 0.0, "t_final must be nonnegative");
    steps = static_cast<std::size_t>(std::llround(options.t_final / dt));
  }

  kernels::HoppingOperator op = system.hopping_operator();
  Trajectory traj;
  AmplitudeVector psi = initial;
  auto record = [&](std::size_t k) {
    const double t = static_cast<double>(k) * dt;
    traj.times.push_back(t);
    traj.fidelity_series.push_back(std::norm(psi[static_cast<Eigen::Index>(target)]));
    const bool keep = (k == 0 || k == steps || (options.stride > 0 && k % options.stride == 0));
    if (keep) {
      traj.snapshot_times.push_back(t);
      traj.states.push_back(psi);
    }
  };
  record(0);
  for (std::size_t k = 0; k < steps; ++k) {
    if (schedule != nullptr) {
      op.set_edge(boundary.left, schedule->omega_in[k]);
      op.set_edge(boundary.right, schedule->omega_out[k]);
    }
    if (options.integrator == Integrator::kChebyshev) {
      kernels::chebyshev_evolve(op, dt, psi);
    } else {
      kernels::dense_evolve(op.dense(), dt, psi);
    }
    record(k + 1);
  }
  traj.final_state = psi;
  return traj;
}

ArrivalFidelity arrival_fidelity(const Trajectory& trajectory, int n_chain) {
  require(n_chain >= 0, "chain length must be nonnegative");
  const auto site = static_cast<Eigen::Index>(n_chain + 1);
  require(trajectory.final_state.size() > site, "trajectory state too small for N");
  const Complex amp = trajectory.final_state[site];
  ArrivalFidelity out;
  out.probability = std::norm(amp);
  out.phase = std::arg(amp);
  const Complex target = std::pow(Complex(0.0, -1.0), n_chain + 1);
  const double diff = std::abs(std::arg(amp / target));
  out.phase_ok = out.probability > 0.0 && diff <= 0.05;
  return out;
}

ArrivalFidelity run_transfer(const PulseSchedule& schedule, Integrator integrator) {
  const SingleParticleSystem system = transfer_system(schedule.n_chain);
  AmplitudeVector initial = AmplitudeVector::Zero(static_cast<Eigen::Index>(system.site_count()));
  initial[0] = 1.0;
  PropagateOptions options;
  options.integrator = integrator;
  return arrival_fidelity(propagate(system, &schedule, initial, schedule.dt, options), schedule.n_chain);
}

HeraldedReport heralded_repeat(const SingleParticleSystem& system, const HeraldedOptions& options) {
  require(options.epsilon > 0.0 && options.epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(options.scan_step > 0.0, "scan step must be positive");
  const std::size_t n = system.site_count();
  require(n >= 1, "empty system");
  const double interval = options.measure_interval > 0.0
                              ? options.measure_interval
                              : 0.5 * static_cast<double>(n) + 3.0 * std::cbrt(static_cast<double>(n));

  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(system.dense());
  const RealVector& w = solver.eigenvalues();
  const RealMatrix& v = solver.eigenvectors();
  const auto last = static_cast<Eigen::Index>(n - 1);

  std::vector<double> grid;
  if (options.cadence == HeraldCadence::kPeakInWindow) {
    for (double t = options.scan_step; t < interval - 1e-12; t += options.scan_step) grid.push_back(t);
  }
  grid.push_back(interval);

  // Eigenbasis coefficients of the (unnormalised) no-detection branch.
  Eigen::VectorXcd c = v.row(0).transpose().cast<Complex>();
  HeraldedReport report;
  while (report.cumulative_success < 1.0 - options.epsilon) {
    if (report.rounds >= options.round_cap) {
      throw NumericalError(NumericalErrorKind::kProtocolStalled,
                           "heralded transfer did not reach 1 - epsilon within the round cap");
    }
    double best_t = grid.back();
    double best_p = -1.0;
    for (double t : grid) {
      Complex a(0.0, 0.0);
      for (Eigen::Index k = 0; k < w.size(); ++k) a += v(last, k) * c[k] * std::exp(Complex(0.0, -w[k] * t));
      const double p = std::norm(a);
      if (p > best_p) {
        best_p = p;
        best_t = t;
      }
    }
    Eigen::VectorXcd psi(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) psi[k] = c[k] * std::exp(Complex(0.0, -w[k] * best_t));
    Eigen::VectorXcd site_amp = v.cast<Complex>() * psi;
    report.cumulative_success += std::norm(site_amp[last]);
    site_amp[last] = 0.0;
    c = v.transpose().cast<Complex>() * site_amp;
    report.total_time += best_t;
    ++report.rounds;
    report.cumulative_history.push_back(report.cumulative_success);
    report.measurement_times.push_back(best_t);
  }
  report.cumulative_success = std::min(report.cumulative_success, 1.0);
  return report;
}

MeasurementBranches measure_reset(const AmplitudeVector& state, std::size_t site) {
  require(site < static_cast<std::size_t>(state.size()), "measured site out of range");
  const auto s = static_cast<Eigen::Index>(site);
  MeasurementBranches out;
  const double total = state.squaredNorm();
  out.found_probability = total > 0.0 ? std::norm(state[s]) / total : 0.0;
  out.not_found_probability = 1.0 - out.found_probability;
  out.found_state = AmplitudeVector::Zero(state.size());
  out.not_found_state = state;
  out.not_found_state[s] = 0.0;
  const double rest = out.not_found_state.norm();
  if (rest > 0.0) {
    out.not_found_state /= rest;
  } else {
    out.not_found_probability = 0.0;
  }
  return out;
}

SampledMeasurement measure_reset_sampled(const AmplitudeVector& state, std::size_t site, std::mt19937_64& rng) {
  const MeasurementBranches b = measure_reset(state, site);
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  SampledMeasurement out;
  out.found = u < b.found_probability;
  out.post_state = out.found ? b.found_state : b.not_found_state;
  return out;
}

double peak_transfer_probability(int n_sites, double t_max, double step) {
  require(n_sites >= 2 && t_max > 0.0 && step > 0.0, "invalid scan");
  const SingleParticleSystem chain = build_uniform_chain(static_cast<std::size_t>(n_sites), 0.0);
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(chain.dense());
  const RealVector& w = solver.eigenvalues();
  const RealMatrix& v = solver.eigenvectors();
  const Eigen::Index last = n_sites - 1;
  double best = 0.0;
  const auto count = static_cast<std::size_t>(std::floor(t_max / step + 1e-9));
  for (std::size_t i = 1; i <= count; ++i) {
    const double t = static_cast<double>(i) * step;
    Complex a(0.0, 0.0);
    for (Eigen::Index k = 0; k < w.size(); ++k) a += v(last, k) * v(0, k) * std::exp(Complex(0.0, -w[k] * t));
    best = std::max(best, std::norm(a));
  }
  return best;
}

}  // namespace spinline
