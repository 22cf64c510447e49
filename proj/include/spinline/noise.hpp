#pragma once

#include <cstdint>
#include <vector>

#include "spinline/evolve.hpp"
#include "spinline/kernels.hpp"
#include "spinline/pulses.hpp"

namespace spinline {

enum class FluctuationKind { kNone, kRelative, kAbsolute };

struct NoiseModel {
  double offset_in = 0.0;   // t_0
  double offset_out = 0.0;  // t_N
  double systematic_scale = 1.0;
  FluctuationKind fluctuation = FluctuationKind::kNone;
  double bound = 0.0;
  std::uint64_t seed = 0;
};

// Deterministic 64-bit mixer used to derive per-trial seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Uniform double in [-1, 1) from the top 53 bits of one generator draw.
double symmetric_uniform(std::uint64_t raw);

// Shifted, scaled and fluctuating copy of `schedule`. Offsets re-evaluate
// the closed forms at t - t_i when the schedule carries its analytic source
// (shifted sample indices otherwise) with zeros outside [0, horizon].
// Fluctuations are redrawn per step and channel: relative within
// +-bound * ideal, absolute within +-bound (no clipping).
PulseSchedule apply_noise(const PulseSchedule& schedule, const NoiseModel& model);

struct RobustnessConfig {
  int n_chain = 100;
  double width = 30.0;
  double f = 3.0;
  double dt = 0.1;
  NoiseModel model;
  int trials = 200;
  kernels::Execution execution = kernels::Execution::kParallel;
};

struct RobustnessReport {
  int trials = 0;
  double mean_fidelity = 0.0;
  double stderr_fidelity = 0.0;
  std::vector<double> per_trial;
};

// Trial i uses seed splitmix64(model.seed + i); results do not depend on
// the execution mode.
RobustnessReport monte_carlo(const RobustnessConfig& config);

struct TimingPoint {
  double offset = 0.0;
  double fidelity = 0.0;
};

// t_0 = 0, t_N swept over `offsets`.
std::vector<TimingPoint> timing_scan(int n_chain, double width, double f, double dt, const std::vector<double>& offsets,
                                     kernels::Execution execution = kernels::Execution::kParallel);

}  // namespace spinline
