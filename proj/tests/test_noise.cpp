#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spinline/noise.hpp"

using namespace spinline;

namespace {

PulseSchedule fig_schedule() { return make_transfer_schedule(100, 30.0, 3.0, 0.1); }

}  // namespace

TEST_SUITE("noise") {
  TEST_CASE("splitmix64 reference values") {
    // First outputs of the reference generator seeded with 0.
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
  }

  TEST_CASE("symmetric uniform covers [-1, 1)") {
    CHECK(symmetric_uniform(0) == -1.0);
    CHECK(symmetric_uniform(~std::uint64_t{0}) < 1.0);
    CHECK(symmetric_uniform(~std::uint64_t{0}) > 0.999999);
    CHECK(symmetric_uniform(std::uint64_t{1} << 63) == 0.0);
  }

  TEST_CASE("identity model keeps the schedule") {
    const PulseSchedule s = fig_schedule();
    CHECK(apply_noise(s, NoiseModel{}) == s);
    NoiseModel zero_bound;
    zero_bound.fluctuation = FluctuationKind::kRelative;
    CHECK(apply_noise(s, zero_bound).omega_in == s.omega_in);
  }

  TEST_CASE("relative fluctuations stay within the bound") {
    const PulseSchedule s = fig_schedule();
    NoiseModel m;
    m.fluctuation = FluctuationKind::kRelative;
    m.bound = 0.1;
    m.seed = 3;
    const PulseSchedule n = apply_noise(s, m);
    bool moved = false;
    for (std::size_t k = 0; k < s.sample_count(); ++k) {
      CHECK(std::abs(n.omega_in[k] - s.omega_in[k]) <= 0.1 * std::abs(s.omega_in[k]) + 1e-15);
      CHECK(std::abs(n.omega_out[k] - s.omega_out[k]) <= 0.1 * std::abs(s.omega_out[k]) + 1e-15);
      moved = moved || n.omega_in[k] != s.omega_in[k];
    }
    CHECK(moved);
  }

  TEST_CASE("absolute fluctuations are not clipped") {
    const PulseSchedule s = fig_schedule();
    NoiseModel m;
    m.fluctuation = FluctuationKind::kAbsolute;
    m.bound = 0.01;
    m.seed = 11;
    const PulseSchedule n = apply_noise(s, m);
    bool negative = false;
    for (std::size_t k = 0; k < s.sample_count(); ++k) {
      CHECK(std::abs(n.omega_in[k] - s.omega_in[k]) <= 0.01 + 1e-15);
      negative = negative || n.omega_in[k] < 0.0;
    }
    CHECK(negative);
  }

  TEST_CASE("systematic scale multiplies every sample") {
    const PulseSchedule s = fig_schedule();
    NoiseModel m;
    m.systematic_scale = 1.05;
    const PulseSchedule n = apply_noise(s, m);
    for (std::size_t k = 0; k < s.sample_count(); k += 97) CHECK(n.omega_out[k] == doctest::Approx(1.05 * s.omega_out[k]));
  }

  TEST_CASE("timing offset delays the closed form") {
    const PulseSchedule s = fig_schedule();
    NoiseModel m;
    m.offset_in = 1.0;
    const PulseSchedule n = apply_noise(s, m);
    CHECK(n.omega_in[0] == 0.0);
    CHECK(n.omega_in[50] == doctest::Approx(s.omega_in[40]).epsilon(1e-12));
    CHECK(n.omega_out == s.omega_out);
  }

  TEST_CASE("five percent over-drive") {
    RobustnessConfig c;
    c.model.systematic_scale = 1.05;
    c.trials = 1;
    const RobustnessReport r = monte_carlo(c);
    CHECK(r.mean_fidelity == doctest::Approx(0.992).epsilon(0.003));
    CHECK(r.stderr_fidelity == 0.0);
  }

  TEST_CASE("serial and parallel trials agree bitwise") {
    RobustnessConfig c;
    c.n_chain = 30;
    c.width = 8.0;
    c.model.fluctuation = FluctuationKind::kRelative;
    c.model.bound = 0.1;
    c.model.seed = 42;
    c.trials = 6;
    c.execution = kernels::Execution::kSerial;
    const RobustnessReport serial = monte_carlo(c);
    c.execution = kernels::Execution::kParallel;
    const RobustnessReport parallel = monte_carlo(c);
    CHECK(serial.per_trial == parallel.per_trial);
    CHECK(serial.mean_fidelity == parallel.mean_fidelity);
    CHECK(monte_carlo(c).per_trial == parallel.per_trial);
    c.model.seed = 43;
    CHECK(monte_carlo(c).per_trial != parallel.per_trial);
    CHECK(serial.stderr_fidelity > 0.0);
  }

  TEST_CASE("invalid robustness configurations") {
    RobustnessConfig c;
    c.trials = 0;
    CHECK_THROWS_AS(monte_carlo(c), InvalidArgument);
    NoiseModel m;
    m.bound = -1.0;
    m.fluctuation = FluctuationKind::kAbsolute;
    CHECK_THROWS_AS(apply_noise(fig_schedule(), m), InvalidArgument);
  }

  TEST_CASE("timing scan peaks at zero offset") {
    std::vector<double> offsets;
    for (int i = -10; i <= 10; ++i) offsets.push_back(0.5 * i);
    const std::vector<TimingPoint> curve = timing_scan(100, 30.0, 3.0, 0.1, offsets);
    REQUIRE(curve.size() == offsets.size());
    const auto best = std::max_element(curve.begin(), curve.end(),
                                       [](const TimingPoint& a, const TimingPoint& b) { return a.fidelity < b.fidelity; });
    CHECK(best->offset == 0.0);
    for (std::size_t i = 11; i < curve.size(); ++i) CHECK(curve[i].fidelity <= curve[i - 1].fidelity + 1e-3);
    for (std::size_t i = 0; i + 1 < 11; ++i) CHECK(curve[i].fidelity <= curve[i + 1].fidelity + 1e-3);
  }

  TEST_CASE("drive peak sits in the expected band" * doctest::should_fail()) {
    const double peak = schedule_peak(fig_schedule());
    CHECK(peak >= 0.25);
    CHECK(peak <= 0.35);
  }
}
