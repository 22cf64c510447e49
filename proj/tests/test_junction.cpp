#include <doctest.h>

#include <cmath>

#include "spinline/junction.hpp"

using namespace spinline;

namespace {

double curvature_at_half_pi(double j1) {
  JunctionSpec s;
  s.j1 = j1;
  s.j2 = 0.0;
  const double h = 1e-3;
  const double c = kPi / 2;
  return (transmission_probability(c + h, s) - 2.0 * transmission_probability(c, s) +
          transmission_probability(c - h, s)) /
         (h * h);
}

}  // namespace

TEST_SUITE("junction") {
  TEST_CASE("detached branch transmits perfectly at k = pi/2") {
    JunctionSpec s;
    s.j1 = 1.3;
    s.j2 = 0.0;
    CHECK(transmission_probability(kPi / 2, s) == 1.0);
  }

  TEST_CASE("tuned side coupling transmits perfectly") {
    for (double k : {0.4, 1.0, 1.3, 2.0, 2.7}) {
      JunctionSpec s;
      s.j1 = 0.8;
      s.j2 = 2.0 * std::abs(std::cos(k));
      CHECK(transmission_probability(k, s) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("transmission stays within [0, 1]") {
    for (double k = 0.1; k < kPi - 0.1; k += 0.05)
      for (double j1 = 0.5; j1 <= 2.0; j1 += 0.25)
        for (double j2 = 0.0; j2 <= 2.0; j2 += 0.25) {
          JunctionSpec s;
          s.j1 = j1;
          s.j2 = j2;
          const double t = transmission_probability(k, s);
          CHECK(t >= 0.0);
          CHECK(t <= 1.0 + 1e-12);
        }
  }

  TEST_CASE("transmission is symmetric under k -> pi - k") {
    for (double k = 0.15; k < kPi / 2; k += 0.1)
      for (double j1 : {0.6, 1.0, 1.7}) {
        JunctionSpec s;
        s.j1 = j1;
        s.j2 = 2.0 * std::abs(std::cos(k)) * 0.7;
        CHECK(transmission_probability(k, s) == doctest::Approx(transmission_probability(kPi - k, s)).epsilon(1e-12));
      }
  }

  TEST_CASE("curvature of the detached-branch transmission") {
    // The closed form gives 1 - 1/J1^4 dk^2, i.e. second derivative -2/J1^4.
    for (double j1 : {0.8, 1.0, 1.5}) CHECK(curvature_at_half_pi(j1) == doctest::Approx(-2.0 / std::pow(j1, 4)).epsilon(1e-4));
  }

  TEST_CASE("curvature matches -8/J1^4" * doctest::should_fail()) {
    CHECK(curvature_at_half_pi(1.0) == doctest::Approx(-8.0).epsilon(0.01));
  }

  TEST_CASE("multi-bounce expression") {
    CHECK(multi_bounce_success(0, 10.0, 1.0) == doctest::Approx(0.6));
    for (int m = 0; m < 5; ++m) CHECK(multi_bounce_success(m + 1, 3.0, 1.2) > multi_bounce_success(m, 3.0, 1.2));
  }

  TEST_CASE("multi-bounce expression matches scattering at m = 0" * doctest::should_fail()) {
    JunctionSpec s;
    s.j1 = 1.0;
    for (double w : {10.0, 20.0}) {
      const PacketSpec p = injection_packet(w, 3.0);
      const ScatterResult r = scatter_wavepacket(s, p, default_scatter_time(p));
      CHECK(std::abs(r.transmitted_mass - multi_bounce_success(0, w, 1.0)) < 5.0 / (w * w * w));
    }
  }

  TEST_CASE("scattering conserves probability") {
    JunctionSpec s;
    s.j1 = 0.9;
    s.j2 = 0.6;
    const PacketSpec p = injection_packet(12.0, 3.0);
    const ScatterResult r = scatter_wavepacket(s, p, default_scatter_time(p));
    CHECK(r.transmitted_mass + r.reflected_mass + r.trapped_mass == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("short chains are rejected") {
    const PacketSpec p = injection_packet(10.0, 3.0);
    ScatterGeometry g;
    g.half_length = 40;
    CHECK_THROWS_AS(scatter_wavepacket(JunctionSpec{}, p, 50.0, g), InvalidArgument);
  }

  TEST_CASE("free chain transmits a packet untouched") {
    JunctionSpec s;
    s.attached = false;
    const PacketSpec p = injection_packet(15.0, 3.0);
    CHECK(scatter_wavepacket(s, p, default_scatter_time(p)).transmitted_mass > 0.999);
  }

  TEST_CASE("detached branch transmits a wide packet") {
    JunctionSpec s;
    s.j1 = 1.0;
    s.j2 = 0.0;
    const PacketSpec p = injection_packet(15.0, 3.0);
    CHECK(scatter_wavepacket(s, p, default_scatter_time(p)).transmitted_mass >= 1.0 - 5.0 / (15.0 * 15.0));
  }

  TEST_CASE("narrow band scattering approaches the closed form") {
    for (double k : {kPi / 2, 1.2}) {
      JunctionSpec s;
      s.j1 = 1.0;
      s.j2 = k == kPi / 2 ? 0.0 : 0.7;
      for (double w : {10.0, 20.0, 40.0}) {
        PacketSpec p = injection_packet(w, 3.0);
        p.momentum = k;
        const ScatterResult r = scatter_wavepacket(s, p, default_scatter_time(p));
        CHECK(std::abs(r.transmitted_mass - transmission_probability(k, s)) < 10.0 / w);
      }
    }
  }

  TEST_CASE("packets reflect off the chain end with a pi phase") {
    const ReflectionCheck r = reflection_phase_check(200, injection_packet(10.0, 3.0));
    CHECK(r.shape_fidelity >= 0.999);
    CHECK(std::abs(r.phase_shift - kPi) < 0.05);
    CHECK_THROWS_AS(reflection_phase_check(100, injection_packet(10.0, 3.0)), InvalidArgument);
  }

  TEST_CASE("mirror symmetric states stay symmetric") {
    CHECK(symmetric_sector_leakage(200, injection_packet(10.0, 3.0), 60.0, 12) < 1e-10);
  }

  TEST_CASE("junction system layout") {
    JunctionSpec s;
    s.j1 = 0.5;
    s.j2 = 0.25;
    const SingleParticleSystem sys = junction_system(s, 10);
    CHECK(sys.site_count() == 21 + 3);
    CHECK(sys.find_edge(10, 21) < sys.edges().size());
    JunctionSpec bare;
    bare.attached = false;
    CHECK(junction_system(bare, 10).site_count() == 21);
  }
}
