#include <doctest.h>

#include <atomic>
#include <random>
#include <vector>

#include "spinline/chain.hpp"
#include "spinline/kernels.hpp"

using namespace spinline;

namespace {

ComplexMatrix random_hermitian(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

kernels::SparseMatrix to_sparse(const ComplexMatrix& m) { return m.sparseView(); }

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("chebyshev evolution agrees with the dense propagator") {
    const ComplexMatrix h = random_hermitian(24, 5);
    kernels::DrivenSparseOperator op(to_sparse(h));
    AmplitudeVector psi = AmplitudeVector::Zero(24);
    psi[3] = 1.0;
    for (double t : {0.3, 7.0, 95.0, -4.0}) {
      AmplitudeVector a = psi;
      kernels::chebyshev_evolve(op, t, a);
      const AmplitudeVector b = kernels::dense_propagator(h, t) * psi;
      CHECK((a - b).norm() < 1e-11);
    }
  }

  TEST_CASE("hopping operator matches its dense form and respects complex edges") {
    kernels::HoppingOperator op(4);
    op.set_diagonal(0, 0.5);
    op.add_edge(0, 1, Complex(0.3, 0.4));
    op.add_edge(1, 2, 1.0);
    const std::size_t e = op.add_edge(2, 3, 2.0);
    op.set_edge(e, Complex(0.0, -1.0));
    const ComplexMatrix d = op.dense();
    CHECK((d - d.adjoint()).norm() == 0.0);
    CHECK(d(0, 1) == Complex(0.3, 0.4));
    CHECK(d(1, 0) == Complex(0.3, -0.4));
    AmplitudeVector x = AmplitudeVector::Random(4), y(4);
    op.apply(x, y);
    CHECK((y - d * x).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(d);
    const auto b = op.spectral_bounds();
    CHECK(b.lo <= es.eigenvalues().minCoeff() + 1e-12);
    CHECK(b.hi >= es.eigenvalues().maxCoeff() - 1e-12);
  }

  TEST_CASE("driven operator adds weighted drives") {
    const ComplexMatrix h = random_hermitian(6, 1);
    const ComplexMatrix d = random_hermitian(6, 2);
    kernels::DrivenSparseOperator op(to_sparse(h));
    const std::size_t k = op.add_drive(to_sparse(d));
    op.set_coefficient(k, 0.7);
    AmplitudeVector x = AmplitudeVector::Random(6), y(6);
    op.apply(x, y);
    CHECK((y - (h + 0.7 * d) * x).norm() < 1e-13);
    AmplitudeVector a = x;
    kernels::chebyshev_evolve(op, 2.5, a);
    CHECK((a - kernels::dense_propagator(ComplexMatrix(h + 0.7 * d), 2.5) * x).norm() < 1e-11);
  }

  TEST_CASE("gershgorin bounds enclose the spectrum") {
    const ComplexMatrix h = random_hermitian(12, 9);
    const auto b = kernels::gershgorin_bounds(to_sparse(h));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    CHECK(b.lo <= es.eigenvalues().minCoeff());
    CHECK(b.hi >= es.eigenvalues().maxCoeff());
  }

  TEST_CASE("chebyshev coefficients reproduce exp(-iz) at x = 1") {
    const double z = 13.0;
    const auto c = kernels::chebyshev_coefficients(z, 1e-16);
    Complex sum(0.0, 0.0);
    for (const Complex& ck : c) sum += ck;  // T_k(1) = 1
    CHECK(std::abs(sum - std::exp(Complex(0.0, -z))) < 1e-13);
  }

  TEST_CASE("phase quotient distance ignores a global phase") {
    const ComplexMatrix a = random_hermitian(5, 3);
    CHECK(kernels::phase_quotient_distance(a, std::exp(Complex(0.0, 1.1)) * a) < 1e-14);
    const ComplexMatrix b = ComplexMatrix::Identity(5, 5);
    CHECK(kernels::phase_quotient_distance(b, -b) < 1e-15);
    CHECK(kernels::phase_quotient_distance(b, ComplexMatrix::Zero(5, 5)) == doctest::Approx(std::sqrt(5.0)));
  }

  TEST_CASE("real dense propagator is unitary") {
    const RealMatrix h = build_uniform_chain(7, 0.3).dense();
    const ComplexMatrix u = kernels::dense_propagator(h, 1.7);
    CHECK((u.adjoint() * u - ComplexMatrix::Identity(7, 7)).norm() < 1e-13);
  }

  TEST_CASE("serial and parallel index loops visit every index once") {
    constexpr std::size_t n = 257;
    std::vector<int> serial(n, 0), parallel(n, 0);
    kernels::serial_for_index(n, [&](std::size_t i) { serial[i] += static_cast<int>(i * i % 17); });
    kernels::parallel_for_index(n, [&](std::size_t i) { parallel[i] += static_cast<int>(i * i % 17); });
    CHECK(serial == parallel);
  }

  TEST_CASE("parallel loop rethrows the first exception") {
    std::atomic<int> visited{0};
    CHECK_THROWS_AS(kernels::parallel_for_index(10,
                                                [&](std::size_t i) {
                                                  ++visited;
                                                  if (i == 4) throw InvalidArgument("boom");
                                                }),
                    InvalidArgument);
    CHECK(visited.load() == 10);
  }

  TEST_CASE("thread cap is positive") { CHECK(kernels::thread_cap() >= 1); }
}
