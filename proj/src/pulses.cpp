#include "spinline/pulses.hpp"

#include <algorithm>
#include <cmath>

namespace spinline {

namespace {

double packet_prefactor(double width) { return 1.0 / std::sqrt(width * std::sqrt(kPi)); }

Complex packet_entry(const PacketSpec& spec, double centre, long n) {
  const double x = static_cast<double>(n) - centre;
  const double envelope = std::exp(-x * x / (2.0 * spec.width * spec.width));
  return packet_prefactor(spec.width) * envelope *
         std::exp(Complex(0.0, -spec.momentum * static_cast<double>(n)));
}

double checked_denominator(double radicand, const char* channel, double t) {
  if (!(radicand > 0.0)) {
    throw NumericalError(NumericalErrorKind::kDegeneratePulse,
                         std::string(channel) + " denominator vanishes at t=" + std::to_string(t));
  }
  return std::sqrt(radicand);
}

}  // namespace

PacketSpec injection_packet(double width, double f) {
  require(width > 0.0 && f > 0.0, "packet width and f must be positive");
  PacketSpec p;
  p.width = width;
  p.f = f;
  p.center = -f * width;
  return p;
}

AmplitudeVector gaussian_packet(const PacketSpec& spec, long lo, long hi) {
  require(spec.width > 0.0, "packet width must be positive");
  require(lo <= hi, "empty site range");
  require(static_cast<double>(lo) <= spec.center && spec.center <= static_cast<double>(hi),
          "site range excludes the packet centre");
  AmplitudeVector v(hi - lo + 1);
  for (long n = lo; n <= hi; ++n) v[n - lo] = packet_entry(spec, spec.center, n);
  v /= v.norm();
  return v;
}

AmplitudeVector target_amplitudes(const PacketSpec& spec, double t, long lo, long hi) {
  require(lo <= hi, "empty site range");
  AmplitudeVector v(hi - lo + 1);
  const double centre = spec.center + 2.0 * t;
  for (long n = lo; n <= hi; ++n) v[n - lo] = packet_entry(spec, centre, n);
  return v;
}

double omega_in(double t, double width, double x0) {
  const double d2 = width * width;
  const double u = x0 + 2.0 * t;
  const double numerator = std::exp(-u * u / (2.0 * d2));
  const double tail = 0.5 * std::exp(-1.0 / (4.0 * d2)) * (1.0 + std::erf((2.0 * t + x0 - 0.5) / width));
  return packet_prefactor(width) * numerator / checked_denominator(1.0 - tail, "omega_in", t);
}

double omega_out(double t, double width, double x0, int n_chain) {
  const double d2 = width * width;
  const double u = x0 + 2.0 * t - n_chain - 1.0;
  const double numerator = std::exp(-u * u / (2.0 * d2));
  const double tail =
      0.5 * std::exp(-1.0 / (4.0 * d2)) * (1.0 - std::erf((2.0 * t + x0 - n_chain - 0.5) / width));
  return packet_prefactor(width) * numerator / checked_denominator(1.0 - tail, "omega_out", t);
}

bool PulseSchedule::operator==(const PulseSchedule& other) const {
  return dt == other.dt && horizon == other.horizon && omega_in == other.omega_in &&
         omega_out == other.omega_out && n_chain == other.n_chain;
}

PulseSchedule make_transfer_schedule(int n_chain, double width, double f, double dt) {
  require(n_chain >= 1, "chain length must be positive");
  require(dt > 0.0, "dt must be positive");
  require(width >= 1.0, "packet width must be at least 1");
  require(f > 0.0, "f must be positive");
  PulseSchedule s;
  s.dt = dt;
  s.n_chain = n_chain;
  const double x0 = -f * width;
  const double horizon = 0.5 * n_chain + 2.0 * f * width;
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  s.horizon = static_cast<double>(steps) * dt;
  s.source = AnalyticPulse{width, x0};
  s.omega_in.resize(steps + 1);
  s.omega_out.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    s.omega_in[k] = omega_in(t, width, x0);
    s.omega_out[k] = omega_out(t, width, x0, n_chain);
  }
  return s;
}

double schedule_peak(const PulseSchedule& schedule) {
  double peak = 0.0;
  for (double v : schedule.omega_in) peak = std::max(peak, std::abs(v));
  for (double v : schedule.omega_out) peak = std::max(peak, std::abs(v));
  return peak;
}

}  // namespace spinline
