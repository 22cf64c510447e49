#pragma once

#include <optional>
#include <vector>

#include "spinline/core.hpp"

namespace spinline {

struct PacketSpec {
  double center = 0.0;
  double width = 1.0;
  double f = 3.0;
  double momentum = kPi / 2;
};

// Default injection geometry: centre at -f * width.
PacketSpec injection_packet(double width, double f);

// Gaussian packet over sites [lo, hi], renormalised to unit norm.
// Entry i of the result is site lo + i.
AmplitudeVector gaussian_packet(const PacketSpec& spec, long lo, long hi);

// Unnormalised moving packet psi_n(t) centred at x0 + 2t, sites [lo, hi].
AmplitudeVector target_amplitudes(const PacketSpec& spec, double t, long lo, long hi);

// Injection/extraction couplings in closed form.
double omega_in(double t, double width, double x0);
double omega_out(double t, double width, double x0, int n_chain);

struct AnalyticPulse {
  double width = 1.0;
  double x0 = 0.0;
};

struct PulseSchedule {
  double dt = 0.1;
  double horizon = 0.0;
  std::vector<double> omega_in;
  std::vector<double> omega_out;
  int n_chain = 1;
  // Set when the samples come from the closed forms; lets timing offsets be
  // re-evaluated at shifted arguments instead of shifted sample indices.
  std::optional<AnalyticPulse> source;

  std::size_t sample_count() const { return omega_in.size(); }
  std::size_t step_count() const { return omega_in.empty() ? 0 : omega_in.size() - 1; }
  bool operator==(const PulseSchedule& other) const;
};

// Horizon N/2 + 2 f Delta, sampled at k dt for k = 0 .. round(T/dt).
PulseSchedule make_transfer_schedule(int n_chain, double width, double f, double dt);

// Peak of either channel over the schedule.
double schedule_peak(const PulseSchedule& schedule);

}  // namespace spinline
