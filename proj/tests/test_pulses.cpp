#include <doctest.h>

#include <cmath>

#include "spinline/chain.hpp"
#include "spinline/pulses.hpp"

using namespace spinline;

TEST_SUITE("pulses") {
  TEST_CASE("default injection packet sits f widths to the left") {
    const PacketSpec p = injection_packet(10.0, 3.0);
    CHECK(p.center == -30.0);
    CHECK(p.momentum == doctest::Approx(kPi / 2));
    CHECK_THROWS_AS(injection_packet(0.0, 3.0), InvalidArgument);
  }

  TEST_CASE("packet amplitude at the centre") {
    PacketSpec p;
    p.width = 10.0;
    p.center = 0.0;
    const AmplitudeVector v = target_amplitudes(p, 0.0, -80, 80);
    CHECK(std::abs(v[80]) == doctest::Approx(1.0 / std::sqrt(10.0 * std::sqrt(kPi))).epsilon(1e-14));
    // Renormalisation barely changes a packet that fits in its range.
    const AmplitudeVector g = gaussian_packet(p, -80, 80);
    CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((g - v).norm() < 1e-12);
  }

  TEST_CASE("neighbouring amplitudes differ by a quarter turn") {
    PacketSpec p;
    p.width = 10.0;
    p.center = 0.5;
    const AmplitudeVector g = gaussian_packet(p, -80, 80);
    const Complex ratio = g[81] / g[80];  // sites 1 and 0, equal Gaussian weight
    CHECK(std::abs(ratio - Complex(0.0, -1.0)) < 1e-14);
  }

  TEST_CASE("packet range must contain the centre") {
    PacketSpec p;
    p.center = 50.0;
    CHECK_THROWS_AS(gaussian_packet(p, -10, 10), InvalidArgument);
  }

  TEST_CASE("free packet moves at group velocity two") {
    const PacketSpec p = injection_packet(10.0, 3.0);
    const long lo = -110, hi = 50;
    const AmplitudeVector g = gaussian_packet(p, lo, hi);
    double mean = 0.0, mass = 0.0;
    for (long x = -140; x <= 80; ++x) {
      Complex a(0.0, 0.0);
      for (long m = lo; m <= hi; ++m) a += infinite_chain_amplitude(m, x, 15.0) * g[m - lo];
      mean += x * std::norm(a);
      mass += std::norm(a);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(mean / mass) < 0.5);
  }

  TEST_CASE("moving target amplitudes") {
    const PacketSpec p = injection_packet(7.0, 3.0);
    for (double t : {0.0, 6.3, 20.0}) {
      const double c = p.center + 2.0 * t;
      const long lo = static_cast<long>(std::floor(c - 12 * 7.0));
      const long hi = static_cast<long>(std::ceil(c + 12 * 7.0));
      const AmplitudeVector v = target_amplitudes(p, t, lo, hi);
      CHECK(v.squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
      Eigen::Index arg = 0;
      v.cwiseAbs().maxCoeff(&arg);
      CHECK(std::abs(static_cast<double>(lo + arg) - std::round(c)) <= 1.0);
    }
  }

  TEST_CASE("injection pulse values") {
    CHECK(omega_in(0.0, 10.0, -30.0) < 0.012);
    // Arbitrary-precision evaluations of the closed forms.
    CHECK(omega_in(0.0, 10.0, -30.0) == doctest::Approx(0.0026386944569488343883).epsilon(1e-12));
    CHECK(omega_in(15.0, 10.0, -30.0) == doctest::Approx(0.3264640089149048792).epsilon(1e-12));
    CHECK(omega_in(37.7, 30.0, -90.0) == doctest::Approx(0.13957495099596996435).epsilon(1e-12));
    CHECK(omega_out(70.3, 30.0, -90.0, 100) == doctest::Approx(0.34123543180602670432).epsilon(1e-12));
  }

  TEST_CASE("pulses never exceed one") {
    double peak = 0.0;
    for (int i = 0; i <= 6000; ++i) peak = std::max(peak, omega_in(0.01 * i, 10.0, -30.0));
    CHECK(peak <= 1.0);
    for (double w : {1.0, 2.0, 5.0, 30.0}) {
      const PulseSchedule s = make_transfer_schedule(40, w, 3.0, 0.05);
      CHECK(schedule_peak(s) <= 1.0);
    }
  }

  TEST_CASE("extraction pulse starts negligible") {
    CHECK(omega_out(0.0, 10.0, -30.0, 100) < 1e-12);
  }

  TEST_CASE("extraction pulse is the time mirror of injection") {
    // omega_out(t) = omega_in(t') with x0 + 2t' = N + 1 - (x0 + 2t), i.e.
    // both channels see the packet the same distance from their boundary.
    const double w = 10.0, x0 = -30.0;
    const int n = 100;
    for (int i = 0; i <= 200; ++i) {
      const double t = 0.5 * i;
      const double t_in = (n + 1.0 - 2.0 * x0 - 2.0 * t) / 2.0;
      CHECK(omega_out(t, w, x0, n) == doctest::Approx(omega_in(t_in, w, x0)).epsilon(1e-10));
    }
  }

  TEST_CASE("transfer schedule for the reference configuration") {
    const PulseSchedule s = make_transfer_schedule(100, 10.0, 3.0, 0.1);
    CHECK(s.sample_count() == 1101);
    CHECK(s.omega_out.size() == 1101);
    CHECK(s.horizon == doctest::Approx(110.0));
    CHECK(s.omega_in.front() < 3e-3);
    for (std::size_t k = 0; k < s.sample_count(); ++k) {
      CHECK(s.omega_in[k] >= 0.0);
      CHECK(s.omega_in[k] <= 1.0);
      CHECK(s.omega_out[k] >= 0.0);
      CHECK(s.omega_out[k] <= 1.0);
      const double t = k * s.dt;
      if (t > 45.0) CHECK(s.omega_in[k] < 1e-6);
    }
  }

  TEST_CASE("injection pulse has a single peak") {
    for (double w : {2.0, 10.0, 30.0}) {
      const PulseSchedule s = make_transfer_schedule(50, w, 3.0, 0.1);
      int maxima = 0;
      for (std::size_t k = 1; k + 1 < s.sample_count(); ++k) {
        if (s.omega_in[k] > s.omega_in[k - 1] && s.omega_in[k] >= s.omega_in[k + 1] && s.omega_in[k] > 1e-300) ++maxima;
      }
      CHECK(maxima == 1);
    }
  }

  TEST_CASE("schedules are deterministic") {
    CHECK(make_transfer_schedule(64, 8.0, 3.0, 0.1) == make_transfer_schedule(64, 8.0, 3.0, 0.1));
  }

  TEST_CASE("schedule arguments are validated") {
    CHECK_THROWS_AS(make_transfer_schedule(0, 10.0, 3.0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(make_transfer_schedule(10, 10.0, 3.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(make_transfer_schedule(10, 0.5, 3.0, 0.1), InvalidArgument);
  }
}
