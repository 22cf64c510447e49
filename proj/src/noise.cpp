#include "spinline/noise.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace spinline {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double symmetric_uniform(std::uint64_t raw) {
  return 2.0 * (static_cast<double>(raw >> 11) * 0x1.0p-53) - 1.0;
}

namespace {

std::vector<double> shifted_channel(const PulseSchedule& s, const std::vector<double>& samples, double offset,
                                    bool inbound) {
  if (offset == 0.0) return samples;
  std::vector<double> out(samples.size(), 0.0);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double t = static_cast<double>(k) * s.dt - offset;
    if (s.source) {
      if (t < 0.0 || t > s.horizon) continue;
      out[k] = inbound ? omega_in(t, s.source->width, s.source->x0)
                       : omega_out(t, s.source->width, s.source->x0, s.n_chain);
    } else {
      const long j = static_cast<long>(k) - std::lround(offset / s.dt);
      if (j >= 0 && j < static_cast<long>(samples.size())) out[k] = samples[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

}  // namespace

PulseSchedule apply_noise(const PulseSchedule& schedule, const NoiseModel& model) {
  require(model.bound >= 0.0, "fluctuation bound must be nonnegative");
  PulseSchedule out = schedule;
  out.omega_in = shifted_channel(schedule, schedule.omega_in, model.offset_in, true);
  out.omega_out = shifted_channel(schedule, schedule.omega_out, model.offset_out, false);
  if (model.systematic_scale != 1.0) {
    for (double& v : out.omega_in) v *= model.systematic_scale;
    for (double& v : out.omega_out) v *= model.systematic_scale;
  }
  if (model.fluctuation != FluctuationKind::kNone) {
    std::mt19937_64 rng(model.seed);
    for (std::size_t k = 0; k < out.omega_in.size(); ++k) {
      for (double* v : {&out.omega_in[k], &out.omega_out[k]}) {
        const double u = symmetric_uniform(rng());
        if (model.fluctuation == FluctuationKind::kRelative) {
          *v *= 1.0 + model.bound * u;
        } else {
          *v += model.bound * u;
        }
      }
    }
  }
  if (model.offset_in != 0.0 || model.offset_out != 0.0 || model.fluctuation != FluctuationKind::kNone) {
    out.source.reset();
  }
  return out;
}

RobustnessReport monte_carlo(const RobustnessConfig& config) {
  require(config.trials >= 1, "trials must be at least 1");
  const PulseSchedule ideal = make_transfer_schedule(config.n_chain, config.width, config.f, config.dt);
  RobustnessReport report;
  report.trials = config.trials;
  report.per_trial.assign(static_cast<std::size_t>(config.trials), 0.0);
  kernels::for_index(config.execution, report.per_trial.size(), [&](std::size_t i) {
    NoiseModel model = config.model;
    model.seed = splitmix64(config.model.seed + i);
    report.per_trial[i] = run_transfer(apply_noise(ideal, model)).probability;
  });
  const double n = static_cast<double>(config.trials);
  report.mean_fidelity = std::accumulate(report.per_trial.begin(), report.per_trial.end(), 0.0) / n;
  if (config.trials > 1) {
    double ss = 0.0;
    for (double v : report.per_trial) ss += (v - report.mean_fidelity) * (v - report.mean_fidelity);
    report.stderr_fidelity = std::sqrt(ss / (n - 1.0) / n);
  }
  return report;
}

std::vector<TimingPoint> timing_scan(int n_chain, double width, double f, double dt, const std::vector<double>& offsets,
                                     kernels::Execution execution) {
  const PulseSchedule ideal = make_transfer_schedule(n_chain, width, f, dt);
  std::vector<TimingPoint> curve(offsets.size());
  kernels::for_index(execution, offsets.size(), [&](std::size_t i) {
    NoiseModel model;
    model.offset_out = offsets[i];
    curve[i] = {offsets[i], run_transfer(apply_noise(ideal, model)).probability};
  });
  return curve;
}

}  // namespace spinline
