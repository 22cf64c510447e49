#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "spinline/chain.hpp"
#include "spinline/evolve.hpp"
#include "spinline/kernels.hpp"

using namespace spinline;

TEST_SUITE("chain") {
  TEST_CASE("uniform chain of three sites") {
    const RealMatrix h = build_uniform_chain(3, 0.0).dense();
    RealMatrix expected(3, 3);
    expected << 0, 1, 0, 1, 0, 1, 0, 1, 0;
    CHECK(h == expected);
  }

  TEST_CASE("single site chain is a zero matrix") {
    const RealMatrix h = build_uniform_chain(1, 0.0).dense();
    CHECK(h.rows() == 1);
    CHECK(h(0, 0) == 0.0);
    CHECK_THROWS_AS(build_uniform_chain(0, 0.0), InvalidArgument);
  }

  TEST_CASE("end diagonal lands on the first and last sites only") {
    const RealMatrix h = build_uniform_chain(5, 1.0).dense();
    CHECK(h(0, 0) == 1.0);
    CHECK(h(4, 4) == 1.0);
    for (int i = 1; i < 4; ++i) CHECK(h(i, i) == 0.0);
    CHECK(h == h.transpose());
    CHECK(build_uniform_chain(5, 1.0).is_chain());
  }

  TEST_CASE("bare 100-site chain peak transfer matches the analytic spectrum") {
    // Eigenvectors sqrt(2/(N+1)) sin(pi k n/(N+1)); scan t in (0, 200] at 0.05.
    const int n = 100;
    double best = 0.0;
    for (int i = 1; i <= 4000; ++i) {
      const double t = 0.05 * i;
      Complex a(0.0, 0.0);
      for (int k = 1; k <= n; ++k) {
        const double q = kPi * k / (n + 1);
        a += (2.0 / (n + 1)) * std::sin(q) * std::sin(q * n) * std::exp(Complex(0.0, -2.0 * std::cos(q) * t));
      }
      best = std::max(best, std::norm(a));
    }
    CHECK(best == doctest::Approx(0.28720555271870335).epsilon(1e-12));
    CHECK(peak_transfer_probability(n, 200.0, 0.05) == doctest::Approx(best).epsilon(1e-10));
  }

  TEST_CASE("mirror chain couplings") {
    const auto two = build_pst_chain({2, false, 0}).chain_couplings();
    REQUIRE(two.size() == 1);
    CHECK(two[0] == doctest::Approx(1.0));
    const auto four = build_pst_chain({4, false, 0}).chain_couplings();
    REQUIRE(four.size() == 3);
    CHECK(four[0] == doctest::Approx(std::sqrt(3.0)));
    CHECK(four[1] == doctest::Approx(2.0));
    CHECK(four[2] == doctest::Approx(std::sqrt(3.0)));
    const auto scaled = build_pst_chain({10, true, 0}).chain_couplings();
    CHECK(scaled[4] == doctest::Approx(2.0 / 10.0 * 5.0));
    CHECK_THROWS_AS(build_pst_chain({1, false, 0}), InvalidArgument);
  }

  TEST_CASE("mirror chain couplings are symmetric about the centre") {
    for (int m : {5, 12, 33}) {
      const auto j = build_pst_chain({m, false, 0}).chain_couplings();
      for (std::size_t n = 0; n < j.size(); ++n) CHECK(j[n] == j[j.size() - 1 - n]);
    }
  }

  TEST_CASE("mirror chain transfers every site perfectly at pi/2") {
    for (int m : {2, 7, 32, 64}) {
      const ComplexMatrix u = kernels::dense_propagator(build_pst_chain({m, false, 0}).dense(), kPi / 2.0);
      for (int n = 1; n <= m; ++n) CHECK(std::abs(u(m - n, n - 1)) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  TEST_CASE("mirror chain spectrum is evenly spaced") {
    const RealMatrix h = build_pst_chain({21, false, 0}).dense();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
    const RealVector& w = es.eigenvalues();
    for (Eigen::Index k = 1; k < w.size(); ++k) CHECK(std::abs(w[k] - w[k - 1] - 2.0) < 1e-9);
  }

  TEST_CASE("mirror offset moves the image") {
    const MirrorChainSpec spec{20, false, 3};
    CHECK(mirror_target(spec, 1) == 20 + 1 - 6 - 1);
    CHECK(mirror_target({20, false, 0}, 4) == 17);
  }

  TEST_CASE("infinite chain amplitude basics") {
    CHECK(infinite_chain_amplitude(0, 0, 0.0) == Complex(1.0, 0.0));
    CHECK(std::abs(infinite_chain_amplitude(0, 5, 0.0)) == 0.0);
    // (-i)^4 J_4(6), J_4(6) from an arbitrary-precision evaluation.
    const Complex a = infinite_chain_amplitude(0, 4, 3.0);
    CHECK(std::abs(a - Complex(0.35764159478096076408, 0.0)) < 1e-14);
    CHECK(std::abs(infinite_chain_amplitude(0, -3, 2.0) - infinite_chain_amplitude(0, 3, 2.0)) < 1e-15);
  }

  TEST_CASE("infinite chain amplitude agrees with a 401-site truncated chain") {
    const ComplexMatrix u = kernels::dense_propagator(build_uniform_chain(401, 0.0).dense(), 3.0);
    const Eigen::Index centre = 200;
    for (long d : {-7L, -1L, 0L, 2L, 4L, 9L}) {
      CHECK(std::abs(u(centre + d, centre) - infinite_chain_amplitude(0, d, 3.0)) < 1e-8);
    }
  }

  TEST_CASE("infinite chain amplitudes are normalised") {
    for (double t : {0.5, 4.0, 17.0}) {
      double sum = 0.0;
      const long r = static_cast<long>(2 * t + 40);
      for (long m = -r; m <= r; ++m) sum += std::norm(infinite_chain_amplitude(0, m, t));
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  TEST_CASE("binomial vector is the top eigenvector of the mirror chain") {
    for (int m : {6, 31}) {
      const RealVector v = binomial_eigenvector(m);
      CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
      const RealVector hv = build_pst_chain({m, false, 0}).dense() * v;
      CHECK((hv - (m - 1.0) * v).norm() < 1e-10);
    }
    const RealVector big = binomial_eigenvector(4001);
    CHECK(big.allFinite());
    CHECK(big.norm() == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("delta H expectation") {
    CHECK(delta_h_expectation(10, 0) == 0.0);
    CHECK(delta_h_expectation(100, 10) == doctest::Approx(0.10004149760686462).epsilon(1e-12));
    CHECK_THROWS_AS(delta_h_expectation(100, 9), InvalidArgument);
    CHECK_THROWS_AS(delta_h_expectation(10, 10), InvalidArgument);
  }

  TEST_CASE("delta H expectation by direct summation") {
    const int m = 60, n = 8;
    const RealVector v = binomial_eigenvector(m);
    double sum = 0.0;
    for (int k = (m - n) / 2; k < (m + n) / 2; ++k) {
      const double dh = m / 2.0 - std::sqrt(static_cast<double>(k) * (m - k));
      sum += 2.0 * dh * v[k - 1] * v[k];
    }
    CHECK(delta_h_expectation(m, n) == doctest::Approx(sum).epsilon(1e-12));
  }
}
