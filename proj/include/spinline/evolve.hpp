#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "spinline/chain.hpp"
#include "spinline/pulses.hpp"

namespace spinline {

struct Trajectory {
  std::vector<double> times;
  // Stored snapshots, aligned with snapshot_times.
  std::vector<double> snapshot_times;
  std::vector<AmplitudeVector> states;
  std::vector<double> fidelity_series;
  AmplitudeVector final_state;
};

enum class Integrator { kChebyshev, kDense };

struct PropagateOptions {
  // Total time when no schedule drives the boundaries.
  double t_final = 0.0;
  // Keep every stride-th state (0 keeps only the initial and final states).
  std::size_t stride = 0;
  Integrator integrator = Integrator::kChebyshev;
  // Site whose population fills fidelity_series; defaults to the last site.
  std::size_t target_site = std::numeric_limits<std::size_t>::max();
};

// Piecewise-constant evolution. With a schedule, the edges (0,1) and
// (N, N+1) take the sampled values at the left end of each step and the
// system must have N + 2 sites. Without one, the system is evolved for
// options.t_final in steps of dt.
Trajectory propagate(const SingleParticleSystem& system, const PulseSchedule* schedule,
                     const AmplitudeVector& initial, double dt, const PropagateOptions& options = {});

// Boundary-driven transfer chain: interior couplings 1, sites 0 .. N+1.
SingleParticleSystem transfer_system(int n_chain);

struct ArrivalFidelity {
  double probability = 0.0;
  double phase = 0.0;
  bool phase_ok = false;
};

ArrivalFidelity arrival_fidelity(const Trajectory& trajectory, int n_chain);

// Full boundary-driven transfer from site 0 under `schedule`.
ArrivalFidelity run_transfer(const PulseSchedule& schedule, Integrator integrator = Integrator::kChebyshev);

enum class HeraldCadence {
  // Measure exactly measure_interval after the previous measurement.
  kFixed,
  // Measure at the most likely arrival time inside (0, measure_interval].
  kPeakInWindow,
};

struct HeraldedOptions {
  double epsilon = 0.01;
  // <= 0 selects N/2 + 3 N^(1/3).
  double measure_interval = 0.0;
  HeraldCadence cadence = HeraldCadence::kPeakInWindow;
  double scan_step = 0.05;
  std::size_t round_cap = 100000;
};

struct HeraldedReport {
  std::size_t rounds = 0;
  double cumulative_success = 0.0;
  double total_time = 0.0;
  std::vector<double> cumulative_history;
  std::vector<double> measurement_times;
};

// Starts on the first site and measures the last site repeatedly.
HeraldedReport heralded_repeat(const SingleParticleSystem& system, const HeraldedOptions& options);

struct MeasurementBranches {
  double found_probability = 0.0;
  // Excitation removed: the one-excitation record is empty (all zeros).
  AmplitudeVector found_state;
  double not_found_probability = 0.0;
  // Renormalised no-detection branch (zero vector if that branch is empty).
  AmplitudeVector not_found_state;
};

MeasurementBranches measure_reset(const AmplitudeVector& state, std::size_t site);

struct SampledMeasurement {
  bool found = false;
  AmplitudeVector post_state;
};

SampledMeasurement measure_reset_sampled(const AmplitudeVector& state, std::size_t site, std::mt19937_64& rng);

// Population of the last site of a uniform chain started on its first site,
// maximised over (0, t_max] on a grid of the given step.
double peak_transfer_probability(int n_sites, double t_max, double step);

}  // namespace spinline
