#pragma once

// Propagation kernels shared by every module.
//
// Two routes are kept side by side: a Chebyshev expansion of exp(-iHt) that
// only needs matrix-vector products (used in production paths), and a dense
// eigendecomposition route that serves as the reference in tests. Trial- and
// grid-level parallelism lives in parallel_for_index; serial_for_index is the
// reference loop with identical semantics.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

#include <Eigen/SparseCore>

#include "spinline/core.hpp"

namespace spinline::kernels {

struct SpectralBounds {
  double lo = 0.0;
  double hi = 0.0;
};

template <class Op>
concept HermitianOperator = requires(const Op& op, const AmplitudeVector& x, AmplitudeVector& y) {
  { op.dimension() } -> std::convertible_to<std::size_t>;
  op.apply(x, y);
  { op.spectral_bounds() } -> std::convertible_to<SpectralBounds>;
};

// Nearest-neighbour style hopping matrix stored as a diagonal plus an edge
// list. Edge e contributes H[row,col] = value and H[col,row] = conj(value).
class HoppingOperator {
 public:
  explicit HoppingOperator(std::size_t dimension = 0);

  std::size_t dimension() const { return diagonal_.size(); }

  void set_diagonal(std::size_t site, double value);
  std::size_t add_edge(std::size_t row, std::size_t col, Complex value);
  void set_edge(std::size_t edge, Complex value);
  Complex edge_value(std::size_t edge) const { return values_[edge]; }
  std::size_t edge_count() const { return values_.size(); }

  void apply(const AmplitudeVector& x, AmplitudeVector& y) const;
  SpectralBounds spectral_bounds() const;
  ComplexMatrix dense() const;

 private:
  std::vector<double> diagonal_;
  std::vector<std::size_t> rows_;
  std::vector<std::size_t> cols_;
  std::vector<Complex> values_;
};

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

// Static sparse Hermitian matrix plus Hermitian drive terms with real
// coefficients, H = base + sum_j c_j D_j. Coefficients are updated per step.
class DrivenSparseOperator {
 public:
  DrivenSparseOperator() = default;
  explicit DrivenSparseOperator(SparseMatrix base);

  std::size_t add_drive(SparseMatrix drive);
  void set_coefficient(std::size_t drive, double value) { coefficients_[drive] = value; }
  std::size_t drive_count() const { return drives_.size(); }

  std::size_t dimension() const { return static_cast<std::size_t>(base_.rows()); }
  void apply(const AmplitudeVector& x, AmplitudeVector& y) const;
  SpectralBounds spectral_bounds() const;

  const SparseMatrix& base() const { return base_; }

 private:
  SparseMatrix base_;
  SpectralBounds base_bounds_{};
  std::vector<SparseMatrix> drives_;
  std::vector<double> drive_radii_;
  std::vector<double> coefficients_;
};

SpectralBounds gershgorin_bounds(const SparseMatrix& h);

// Expansion coefficients (2 - delta_k0) (-i)^k J_k(z), truncated once the
// Bessel tail drops below tol.
std::vector<Complex> chebyshev_coefficients(double z, double tol);

inline constexpr double kChebyshevTolerance = 1e-16;
inline constexpr double kChebyshevMaxArgument = 40.0;

// psi <- exp(-i H t) psi. Long times are split so that each chunk has
// spectral-radius * time below kChebyshevMaxArgument.
template <HermitianOperator Op>
void chebyshev_evolve(const Op& op, double t, AmplitudeVector& psi,
                      double tol = kChebyshevTolerance) {
  if (t == 0.0) return;
  const SpectralBounds bounds = op.spectral_bounds();
  const double center = 0.5 * (bounds.lo + bounds.hi);
  const double radius = 0.5 * (bounds.hi - bounds.lo) * (1.0 + 1e-12) + 1e-300;

  const double total_arg = radius * std::abs(t);
  const std::size_t chunks =
      total_arg <= kChebyshevMaxArgument ? 1 : static_cast<std::size_t>(std::ceil(total_arg / kChebyshevMaxArgument));
  const double dt = t / static_cast<double>(chunks);
  const std::vector<Complex> coef = chebyshev_coefficients(radius * std::abs(dt), tol);
  // exp(-iHt) with t < 0 is the conjugate series.
  const bool backwards = dt < 0.0;
  const Complex phase = std::exp(Complex(0.0, -center * dt));

  const std::size_t n = op.dimension();
  AmplitudeVector t_prev(n), t_curr(n), t_next(n), hx(n), acc(n);
  auto scaled_apply = [&](const AmplitudeVector& x, AmplitudeVector& y) {
    op.apply(x, hx);
    y = (hx - center * x) / radius;
  };
  for (std::size_t chunk = 0; chunk < chunks; ++chunk) {
    auto c = [&](std::size_t k) { return backwards ? std::conj(coef[k]) : coef[k]; };
    t_prev = psi;
    acc = c(0) * t_prev;
    if (coef.size() > 1) {
      scaled_apply(t_prev, t_curr);
      acc += c(1) * t_curr;
      for (std::size_t k = 2; k < coef.size(); ++k) {
        scaled_apply(t_curr, t_next);
        t_next = 2.0 * t_next - t_prev;
        acc += c(k) * t_next;
        std::swap(t_prev, t_curr);
        std::swap(t_curr, t_next);
      }
    }
    psi = phase * acc;
  }
}

// Reference route: exp(-iHt) through a dense Hermitian eigendecomposition.
ComplexMatrix dense_propagator(const ComplexMatrix& h, double t);
void dense_evolve(const ComplexMatrix& h, double t, AmplitudeVector& psi);

// Same as dense_propagator for a real symmetric matrix (returns complex).
ComplexMatrix dense_propagator(const RealMatrix& h, double t);

// Distance between operators modulo a global phase:
// min_theta ||a - e^{i theta} b||_F.
double phase_quotient_distance(const ComplexMatrix& a, const ComplexMatrix& b);

// Thread cap taken from SPINLINE_THREADS when set, else the OpenMP default.
int thread_cap();

// Both loops call f(i) exactly once for each i in [0, n). Results must be
// written to per-index slots; the two loops then give identical output.
template <class F>
void serial_for_index(std::size_t n, F&& f) {
  for (std::size_t i = 0; i < n; ++i) f(i);
}

template <class F>
void parallel_for_index(std::size_t n, F&& f) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(thread_cap())
  for (long i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

enum class Execution { kSerial, kParallel };

template <class F>
void for_index(Execution mode, std::size_t n, F&& f) {
  if (mode == Execution::kParallel) {
    parallel_for_index(n, std::forward<F>(f));
  } else {
    serial_for_index(n, std::forward<F>(f));
  }
}

}  // namespace spinline::kernels
