#include <doctest.h>

#include <cmath>
#include <random>

#include "spinline/evolve.hpp"
#include "spinline/kernels.hpp"

using namespace spinline;

namespace {

AmplitudeVector basis(std::size_t n, std::size_t i) {
  AmplitudeVector v = AmplitudeVector::Zero(static_cast<Eigen::Index>(n));
  v[static_cast<Eigen::Index>(i)] = 1.0;
  return v;
}

}  // namespace

TEST_SUITE("evolve") {
  TEST_CASE("single site only picks up its diagonal phase") {
    SingleParticleSystem s(1);
    s.set_diagonal(0, 0.7);
    PropagateOptions o;
    o.t_final = 3.0;
    const Trajectory tr = propagate(s, nullptr, basis(1, 0), 0.1, o);
    CHECK(std::abs(tr.final_state[0] - std::exp(Complex(0.0, -0.7 * 3.0))) < 1e-12);
  }

  TEST_CASE("two site chain flips at pi/2") {
    PropagateOptions o;
    o.t_final = kPi / 2;
    const Trajectory tr = propagate(build_uniform_chain(2, 0.0), nullptr, basis(2, 0), kPi / 2, o);
    const ArrivalFidelity a = arrival_fidelity(tr, 0);
    CHECK(a.probability == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("zero length evolution keeps the initial target amplitude") {
    AmplitudeVector v = AmplitudeVector::Zero(5);
    v[0] = std::sqrt(0.75);
    v[4] = Complex(0.0, 0.5);
    PropagateOptions o;
    o.t_final = 0.0;
    const Trajectory tr = propagate(build_uniform_chain(5, 0.0), nullptr, v, 0.1, o);
    CHECK(arrival_fidelity(tr, 3).probability == doctest::Approx(0.25));
    CHECK(tr.times.size() == 1);
  }

  TEST_CASE("dimension mismatch is rejected") {
    PropagateOptions o;
    o.t_final = 1.0;
    CHECK_THROWS_AS(propagate(build_uniform_chain(4, 0.0), nullptr, basis(3, 0), 0.1, o), InvalidArgument);
    CHECK_THROWS_AS(propagate(build_uniform_chain(4, 0.0), nullptr, basis(4, 0), 0.0, o), InvalidArgument);
  }

  TEST_CASE("constant couplings agree with one dense exponential") {
    const SingleParticleSystem s = build_uniform_chain(30, 1.0);
    PropagateOptions o;
    o.t_final = 12.0;
    const Trajectory tr = propagate(s, nullptr, basis(30, 4), 0.1, o);
    const AmplitudeVector ref = kernels::dense_propagator(s.dense(), 12.0) * basis(30, 4);
    CHECK((tr.final_state - ref).norm() < 1e-10);
    o.integrator = Integrator::kDense;
    CHECK((propagate(s, nullptr, basis(30, 4), 0.1, o).final_state - ref).norm() < 1e-10);
  }

  TEST_CASE("norm drift over ten thousand steps") {
    PropagateOptions o;
    o.t_final = 1000.0;
    o.stride = 100;
    const Trajectory tr = propagate(build_uniform_chain(50, 0.0), nullptr, basis(50, 0), 0.1, o);
    CHECK(tr.times.size() == 10001);
    for (const AmplitudeVector& s : tr.states) CHECK(std::abs(s.norm() - 1.0) < 1e-9);
  }

  TEST_CASE("reference transfer reaches the far boundary with the right phase") {
    const PulseSchedule s = make_transfer_schedule(100, 10.0, 3.0, 0.1);
    const ArrivalFidelity a = run_transfer(s);
    CHECK(a.probability == doctest::Approx(0.9945).epsilon(0.001 / 0.9945));
    CHECK(a.phase_ok);
    const ArrivalFidelity dense = run_transfer(s, Integrator::kDense);
    CHECK(std::abs(dense.probability - a.probability) < 1e-10);
  }

  TEST_CASE("wide packet transfer") {
    const ArrivalFidelity a = run_transfer(make_transfer_schedule(100, 30.0, 3.0, 0.1));
    CHECK(std::abs(a.probability - 0.9994) <= 0.0005);
  }

  TEST_CASE("halving the step barely moves the fidelity") {
    const double f1 = run_transfer(make_transfer_schedule(100, 10.0, 3.0, 0.1)).probability;
    const double f2 = run_transfer(make_transfer_schedule(100, 10.0, 3.0, 0.05)).probability;
    CHECK(std::abs(f1 - f2) < 1e-4);
  }

  TEST_CASE("driven chain tracks the simulated infinite chain") {
    const int n = 100;
    const PulseSchedule s = make_transfer_schedule(n, 30.0, 3.0, 0.1);
    const SingleParticleSystem sys = transfer_system(n);
    PropagateOptions o;
    o.stride = 10;
    const Trajectory tr = propagate(sys, &s, basis(n + 2, 0), 0.1, o);
    const PacketSpec p = injection_packet(30.0, 3.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
      const AmplitudeVector psi = target_amplitudes(p, tr.snapshot_times[i], 1, n);
      worst = std::max(worst, (tr.states[i].segment(1, n) - psi).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 0.02);
  }

  TEST_CASE("measurement branches") {
    const MeasurementBranches a = measure_reset(basis(4, 2), 2);
    CHECK(a.found_probability == doctest::Approx(1.0));
    CHECK(a.found_state.norm() == 0.0);
    CHECK(a.not_found_probability == doctest::Approx(0.0));

    const MeasurementBranches b = measure_reset(basis(4, 1), 2);
    CHECK(b.found_probability == 0.0);
    CHECK((b.not_found_state - basis(4, 1)).norm() == 0.0);

    const AmplitudeVector u = AmplitudeVector::Constant(4, 0.5);
    const MeasurementBranches c = measure_reset(u, 2);
    CHECK(c.found_probability == doctest::Approx(0.25));
    CHECK(c.not_found_state.norm() == doctest::Approx(1.0));
    CHECK(c.not_found_state[2] == Complex(0.0, 0.0));
  }

  TEST_CASE("sampled measurement is seeded") {
    const AmplitudeVector u = AmplitudeVector::Constant(4, 0.5);
    std::mt19937_64 r1(11), r2(11);
    for (int i = 0; i < 50; ++i) {
      const SampledMeasurement a = measure_reset_sampled(u, 1, r1);
      const SampledMeasurement b = measure_reset_sampled(u, 1, r2);
      CHECK(a.found == b.found);
    }
  }

  TEST_CASE("heralded transfer on two sites succeeds at once") {
    HeraldedOptions o;
    o.measure_interval = kPi / 2;
    o.cadence = HeraldCadence::kFixed;
    const HeraldedReport r = heralded_repeat(build_uniform_chain(2, 0.0), o);
    CHECK(r.rounds == 1);
    CHECK(r.cumulative_success == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.total_time == doctest::Approx(kPi / 2));
  }

  TEST_CASE("heralded transfer on twenty sites") {
    const HeraldedReport r = heralded_repeat(build_uniform_chain(20, 0.0), HeraldedOptions{});
    CHECK(r.cumulative_success >= 0.99);
    CHECK(r.rounds == 20);
    CHECK(r.total_time == doctest::Approx(210.2).epsilon(1e-9));
    for (std::size_t i = 1; i < r.cumulative_history.size(); ++i)
      CHECK(r.cumulative_history[i] >= r.cumulative_history[i - 1]);
  }

  TEST_CASE("heralded transfer stalls at the round cap") {
    HeraldedOptions o;
    o.round_cap = 2;
    CHECK_THROWS_AS(heralded_repeat(build_uniform_chain(20, 0.0), o), NumericalError);
    o.epsilon = 0.0;
    CHECK_THROWS_AS(heralded_repeat(build_uniform_chain(20, 0.0), o), InvalidArgument);
  }

  TEST_CASE("heralded transfer time grows between N^1.3 and N^2") {
    std::vector<double> x, y;
    for (int n : {20, 40, 80}) {
      x.push_back(std::log(n));
      y.push_back(std::log(heralded_repeat(build_uniform_chain(n, 0.0), HeraldedOptions{}).total_time));
    }
    const double xm = (x[0] + x[1] + x[2]) / 3, ym = (y[0] + y[1] + y[2]) / 3;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 3; ++i) {
      sxy += (x[i] - xm) * (y[i] - ym);
      sxx += (x[i] - xm) * (x[i] - xm);
    }
    const double slope = sxy / sxx;
    MESSAGE("heralded time exponent " << slope);
    CHECK(slope >= 1.3);
    CHECK(slope <= 2.0);
  }

  TEST_CASE("bare chain peak transfer probability decreases with length") {
    double prev = 1.0;
    for (int n : {20, 40, 80, 160}) {
      const double p = peak_transfer_probability(n, 2.0 * n, 0.05);
      CHECK(p < prev);
      prev = p;
    }
  }
}
