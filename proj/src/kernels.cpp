#include "spinline/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include <omp.h>

namespace spinline {

const char* to_string(NumericalErrorKind kind) {
  switch (kind) {
    case NumericalErrorKind::kDegeneratePulse: return "degenerate-pulse";
    case NumericalErrorKind::kProtocolStalled: return "protocol-stalled";
    case NumericalErrorKind::kNoSignal: return "no-signal";
    case NumericalErrorKind::kMappingViolation: return "mapping-violation";
    case NumericalErrorKind::kLocalityViolation: return "locality-violation";
    case NumericalErrorKind::kResetFailure: return "reset-failure";
    case NumericalErrorKind::kProtocolViolation: return "protocol-violation";
  }
  return "numerical-error";
}

}  // namespace spinline

namespace spinline::kernels {

HoppingOperator::HoppingOperator(std::size_t dimension) : diagonal_(dimension, 0.0) {}

void HoppingOperator::set_diagonal(std::size_t site, double value) { diagonal_.at(site) = value; }

std::size_t HoppingOperator::add_edge(std::size_t row, std::size_t col, Complex value) {
  require(row < dimension() && col < dimension() && row != col, "hopping edge out of range");
  rows_.push_back(row);
  cols_.push_back(col);
  values_.push_back(value);
  return values_.size() - 1;
}

void HoppingOperator::set_edge(std::size_t edge, Complex value) { values_.at(edge) = value; }

void HoppingOperator::apply(const AmplitudeVector& x, AmplitudeVector& y) const {
  const std::size_t n = dimension();
  y.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) y[i] = diagonal_[i] * x[i];
  for (std::size_t e = 0; e < values_.size(); ++e) {
    const std::size_t r = rows_[e];
    const std::size_t c = cols_[e];
    y[r] += values_[e] * x[c];
    y[c] += std::conj(values_[e]) * x[r];
  }
}

SpectralBounds HoppingOperator::spectral_bounds() const {
  std::vector<double> radius(dimension(), 0.0);
  for (std::size_t e = 0; e < values_.size(); ++e) {
    radius[rows_[e]] += std::abs(values_[e]);
    radius[cols_[e]] += std::abs(values_[e]);
  }
  SpectralBounds b{0.0, 0.0};
  for (std::size_t i = 0; i < dimension(); ++i) {
    const double lo = diagonal_[i] - radius[i];
    const double hi = diagonal_[i] + radius[i];
    if (i == 0 || lo < b.lo) b.lo = lo;
    if (i == 0 || hi > b.hi) b.hi = hi;
  }
  return b;
}

ComplexMatrix HoppingOperator::dense() const {
  const auto n = static_cast<Eigen::Index>(dimension());
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = diagonal_[static_cast<std::size_t>(i)];
  for (std::size_t e = 0; e < values_.size(); ++e) {
    const auto r = static_cast<Eigen::Index>(rows_[e]);
    const auto c = static_cast<Eigen::Index>(cols_[e]);
    h(r, c) += values_[e];
    h(c, r) += std::conj(values_[e]);
  }
  return h;
}

SpectralBounds gershgorin_bounds(const SparseMatrix& h) {
  SpectralBounds b{0.0, 0.0};
  for (Eigen::Index r = 0; r < h.outerSize(); ++r) {
    double diag = 0.0;
    double radius = 0.0;
    for (SparseMatrix::InnerIterator it(h, r); it; ++it) {
      if (it.col() == r) {
        diag = it.value().real();
      } else {
        radius += std::abs(it.value());
      }
    }
    if (r == 0 || diag - radius < b.lo) b.lo = diag - radius;
    if (r == 0 || diag + radius > b.hi) b.hi = diag + radius;
  }
  return b;
}

namespace {

double max_row_abs_sum(const SparseMatrix& m) {
  double best = 0.0;
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

DrivenSparseOperator::DrivenSparseOperator(SparseMatrix base)
    : base_(std::move(base)), base_bounds_(gershgorin_bounds(base_)) {}

std::size_t DrivenSparseOperator::add_drive(SparseMatrix drive) {
  require(drive.rows() == base_.rows() && drive.cols() == base_.cols(), "drive dimension mismatch");
  drive_radii_.push_back(max_row_abs_sum(drive));
  drives_.push_back(std::move(drive));
  coefficients_.push_back(0.0);
  return drives_.size() - 1;
}

void DrivenSparseOperator::apply(const AmplitudeVector& x, AmplitudeVector& y) const {
  y.noalias() = base_ * x;
  for (std::size_t j = 0; j < drives_.size(); ++j) {
    if (coefficients_[j] != 0.0) y.noalias() += coefficients_[j] * (drives_[j] * x);
  }
}

SpectralBounds DrivenSparseOperator::spectral_bounds() const {
  double extra = 0.0;
  for (std::size_t j = 0; j < drives_.size(); ++j) extra += std::abs(coefficients_[j]) * drive_radii_[j];
  return {base_bounds_.lo - extra, base_bounds_.hi + extra};
}

std::vector<Complex> chebyshev_coefficients(double z, double tol) {
  std::vector<Complex> coef;
  if (z == 0.0) {
    coef.emplace_back(1.0, 0.0);
    return coef;
  }
  const Complex minus_i(0.0, -1.0);
  Complex power(1.0, 0.0);
  const std::size_t cap = static_cast<std::size_t>(z) + 200;
  for (std::size_t k = 0; k <= cap; ++k) {
    const double jk = std::cyl_bessel_j(static_cast<double>(k), z);
    coef.push_back((k == 0 ? 1.0 : 2.0) * power * jk);
    power *= minus_i;
    if (static_cast<double>(k) > z && std::abs(jk) < tol) break;
  }
  return coef;
}

ComplexMatrix dense_propagator(const ComplexMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  const RealVector& w = solver.eigenvalues();
  const ComplexMatrix& v = solver.eigenvectors();
  Eigen::VectorXcd phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) phases[k] = std::exp(Complex(0.0, -w[k] * t));
  return v * phases.asDiagonal() * v.adjoint();
}

ComplexMatrix dense_propagator(const RealMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h);
  const RealVector& w = solver.eigenvalues();
  const ComplexMatrix v = solver.eigenvectors().cast<Complex>();
  Eigen::VectorXcd phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) phases[k] = std::exp(Complex(0.0, -w[k] * t));
  return v * phases.asDiagonal() * v.adjoint();
}

void dense_evolve(const ComplexMatrix& h, double t, AmplitudeVector& psi) {
  psi = dense_propagator(h, t) * psi;
}

double phase_quotient_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "operator shape mismatch");
  // The optimal phase aligns b with a; the norm is then taken directly so
  // that tiny distances do not drown in cancellation.
  const Complex overlap = (b.adjoint() * a).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0, 0.0);
  return (a - phase * b).norm();
}

int thread_cap() {
  if (const char* env = std::getenv("SPINLINE_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) return cap;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

}  // namespace spinline::kernels
