#include "spinline/uqi.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <tuple>

namespace spinline::uqi {

using kernels::SparseMatrix;

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kH1: return "h1";
    case Variant::kH2: return "h2";
    case Variant::kH3: return "h3";
    case Variant::kHsim: return "hsim";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "h1" || name == "H1") return Variant::kH1;
  if (name == "h2" || name == "H2") return Variant::kH2;
  if (name == "h3" || name == "H3") return Variant::kH3;
  if (name == "hsim" || name == "HSIM") return Variant::kHsim;
  throw InvalidArgument("unknown UQI variant '" + name + "'");
}

int a_dimension(Variant v) {
  switch (v) {
    case Variant::kH1:
    case Variant::kH2: return 2;
    case Variant::kH3: return 3;
    case Variant::kHsim: return 4;
  }
  return 2;
}

// ---------------------------------------------------------------- gates --

ComplexMatrix hadamard() {
  ComplexMatrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  return h / std::sqrt(2.0);
}

ComplexMatrix pauli(int axis) {
  ComplexMatrix p = ComplexMatrix::Zero(2, 2);
  switch (axis) {
    case 1: p << 0.0, 1.0, 1.0, 0.0; break;
    case 2: p << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0; break;
    case 3: p << 1.0, 0.0, 0.0, -1.0; break;
    default: throw InvalidArgument("Pauli axis must be 1, 2 or 3");
  }
  return p;
}

namespace {

int bit_of(std::size_t x, int n_qubits, int qubit) { return static_cast<int>((x >> (n_qubits - qubit)) & 1U); }

std::size_t with_bit(std::size_t x, int n_qubits, int qubit, int value) {
  const std::size_t mask = std::size_t{1} << (n_qubits - qubit);
  return value != 0 ? (x | mask) : (x & ~mask);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

}  // namespace

ComplexMatrix single_qubit_gate(int n_qubits, int qubit, const ComplexMatrix& g) {
  require(qubit >= 1 && qubit <= n_qubits, "qubit out of range");
  const std::size_t dim = std::size_t{1} << n_qubits;
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t x = 0; x < dim; ++x) {
    const int b = bit_of(x, n_qubits, qubit);
    for (int bp = 0; bp < 2; ++bp) {
      out(static_cast<Eigen::Index>(with_bit(x, n_qubits, qubit, bp)), static_cast<Eigen::Index>(x)) += g(bp, b);
    }
  }
  return out;
}

ComplexMatrix adjacent_gate(int n_qubits, int qubit, const ComplexMatrix& g) {
  require(qubit >= 1 && qubit + 1 <= n_qubits, "qubit pair out of range");
  const std::size_t dim = std::size_t{1} << n_qubits;
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t x = 0; x < dim; ++x) {
    const int in = bit_of(x, n_qubits, qubit) * 2 + bit_of(x, n_qubits, qubit + 1);
    for (int o = 0; o < 4; ++o) {
      if (g(o, in) == 0.0) continue;
      const std::size_t y = with_bit(with_bit(x, n_qubits, qubit, o >> 1), n_qubits, qubit + 1, o & 1);
      out(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) += g(o, in);
    }
  }
  return out;
}

ComplexMatrix swap_gate() {
  ComplexMatrix s = ComplexMatrix::Zero(4, 4);
  s(0, 0) = s(1, 2) = s(2, 1) = s(3, 3) = 1.0;
  return s;
}

ComplexMatrix controlled_phase() {
  ComplexMatrix c = ComplexMatrix::Identity(4, 4);
  c(3, 3) = -1.0;
  return c;
}

ComplexMatrix step_gate() {
  return kron(hadamard(), ComplexMatrix::Identity(2, 2)) * controlled_phase();
}

ComplexMatrix sigma_step_gate(int axis, double dt) {
  const ComplexMatrix ss = kron(pauli(axis), pauli(axis));
  return std::cos(dt) * ComplexMatrix::Identity(4, 4) - Complex(0.0, std::sin(dt)) * ss;
}

ComplexMatrix mirror_permutation(int n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  ComplexMatrix p = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t x = 0; x < dim; ++x) {
    std::size_t y = 0;
    for (int q = 1; q <= n_qubits; ++q) y = with_bit(y, n_qubits, n_qubits + 1 - q, bit_of(x, n_qubits, q));
    p(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = 1.0;
  }
  return p;
}

ComplexMatrix u_tilde(int n_qubits) {
  require(n_qubits >= 1, "need at least one qubit");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  ComplexMatrix cz = ComplexMatrix::Identity(dim, dim);
  for (int q = 1; q < n_qubits; ++q) cz = adjacent_gate(n_qubits, q, controlled_phase()) * cz;
  ComplexMatrix hs = ComplexMatrix::Identity(dim, dim);
  for (int q = 1; q < n_qubits; ++q) hs = single_qubit_gate(n_qubits, q, hadamard()) * hs;
  return hs * cz;
}

namespace {

ComplexMatrix pair_gate(Variant v, int level, double dt) {
  switch (v) {
    case Variant::kH1: return swap_gate();
    case Variant::kH2:
    case Variant::kH3: return step_gate();
    case Variant::kHsim: return sigma_step_gate(level, dt);
  }
  return swap_gate();
}

}  // namespace

ComplexMatrix transport_gate(int n_qubits, Variant v, int from, int to, int level, double dt) {
  require(from >= 1 && from <= n_qubits && to >= 1 && to <= n_qubits, "transport endpoints out of range");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  ComplexMatrix out = ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix g = pair_gate(v, level, dt);
  for (int k = from; k < to; ++k) out = adjacent_gate(n_qubits, k, g) * out;
  for (int k = from; k > to; --k) out = adjacent_gate(n_qubits, k - 1, g).adjoint() * out;
  return out;
}

// ----------------------------------------------------------- many-body --

void check_size(int n_spins, int a_dim) {
  require(n_spins >= 1, "need at least one spin");
  require(a_dim >= 2 && a_dim <= 4, "a-register dimension must be 2, 3 or 4");
  const int bound = a_dim == 2 ? 6 : (a_dim == 3 ? 5 : 4);
  if (n_spins > bound) {
    throw TooLarge("N = " + std::to_string(n_spins) + " exceeds the bound " + std::to_string(bound) +
                   " for local dimension " + std::to_string(2 * a_dim));
  }
}

namespace {

struct Transition {
  int in_left;
  int in_right;
  int out_left;
  int out_right;
  ComplexMatrix b;
};

std::vector<Transition> transitions(Variant v, double hsim_dt) {
  switch (v) {
    case Variant::kH1: return {{1, 0, 0, 1, swap_gate()}};
    case Variant::kH2: return {{1, 0, 0, 1, step_gate()}};
    case Variant::kH3: return {{1, 0, 2, 1, step_gate()}, {1, 2, 0, 1, ComplexMatrix::Identity(4, 4)}};
    case Variant::kHsim: {
      std::vector<Transition> t;
      for (int i = 1; i <= 3; ++i) t.push_back({i, 0, 0, i, sigma_step_gate(i, hsim_dt)});
      return t;
    }
  }
  return {};
}

std::vector<int> position_pattern(Variant v, int n, int position, int level) {
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  if (v == Variant::kH3) {
    for (int k = 1; k < position; ++k) a[static_cast<std::size_t>(k - 1)] = 2;
  }
  a[static_cast<std::size_t>(position - 1)] = level;
  return a;
}

AmplitudeVector evolve(const SparseMatrix& h, AmplitudeVector psi, double t) {
  kernels::DrivenSparseOperator op(h);
  kernels::chebyshev_evolve(op, t, psi);
  return psi;
}

// First-site-to-last-site amplitude of the N-site hopping chain.
ComplexMatrix chain_propagator(int n, double t) {
  return kernels::dense_propagator(build_uniform_chain(static_cast<std::size_t>(n), 0.0).dense(), t);
}

double normalised_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return kernels::phase_quotient_distance(a, b) / std::sqrt(static_cast<double>(a.rows()));
}

}  // namespace

UqiSystem::UqiSystem(int n_spins, Variant variant, const UqiOptions& options)
    : n_(n_spins), variant_(variant), a_dim_(a_dimension(variant)) {
  check_size(n_spins, a_dim_);
  local_ = static_cast<std::size_t>(2 * a_dim_);
  dim_ = 1;
  for (int k = 0; k < n_; ++k) dim_ *= local_;

  std::vector<Eigen::Triplet<Complex>> triplets;
  const std::vector<Transition> terms = transitions(variant, options.hsim_dt);
  std::vector<std::size_t> digits(static_cast<std::size_t>(n_));
  std::vector<std::size_t> weight(static_cast<std::size_t>(n_));
  for (int k = n_ - 1, w = 1; k >= 0; --k, w *= static_cast<int>(local_)) weight[static_cast<std::size_t>(k)] = w;
  for (std::size_t x = 0; x < dim_; ++x) {
    std::size_t rest = x;
    for (int k = n_ - 1; k >= 0; --k) {
      digits[static_cast<std::size_t>(k)] = rest % local_;
      rest /= local_;
    }
    for (int k = 0; k + 1 < n_; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const int al = static_cast<int>(digits[ku] / 2);
      const int ar = static_cast<int>(digits[ku + 1] / 2);
      const int bin = static_cast<int>((digits[ku] % 2) * 2 + digits[ku + 1] % 2);
      for (const Transition& tr : terms) {
        if (al != tr.in_left || ar != tr.in_right) continue;
        for (int bout = 0; bout < 4; ++bout) {
          const Complex val = tr.b(bout, bin);
          if (val == 0.0) continue;
          const std::size_t dl = static_cast<std::size_t>(tr.out_left * 2 + (bout >> 1));
          const std::size_t dr = static_cast<std::size_t>(tr.out_right * 2 + (bout & 1));
          const std::size_t y = x - digits[ku] * weight[ku] - digits[ku + 1] * weight[ku + 1] + dl * weight[ku] +
                                dr * weight[ku + 1];
          triplets.emplace_back(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x), val);
          triplets.emplace_back(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y), std::conj(val));
        }
      }
    }
  }
  h_.resize(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  h_.setFromTriplets(triplets.begin(), triplets.end());
  h_.makeCompressed();
}

std::size_t UqiSystem::index(const std::vector<int>& a, std::size_t b) const {
  require(a.size() == static_cast<std::size_t>(n_), "a-pattern length differs from N");
  std::size_t x = 0;
  for (int k = 0; k < n_; ++k) {
    const int level = a[static_cast<std::size_t>(k)];
    require(level >= 0 && level < a_dim_, "a-level out of range");
    x = x * local_ + static_cast<std::size_t>(level * 2) + ((b >> (n_ - 1 - k)) & 1U);
  }
  return x;
}

std::vector<int> UqiSystem::a_levels(std::size_t x) const {
  std::vector<int> a(static_cast<std::size_t>(n_));
  for (int k = n_ - 1; k >= 0; --k) {
    a[static_cast<std::size_t>(k)] = static_cast<int>((x % local_) / 2);
    x /= local_;
  }
  return a;
}

std::size_t UqiSystem::b_index(std::size_t x) const {
  std::size_t b = 0;
  for (int k = n_ - 1; k >= 0; --k) {
    b |= (x % 2) << (n_ - 1 - k);
    x /= local_;
  }
  return b;
}

AmplitudeVector UqiSystem::product_state(const std::vector<int>& a, const AmplitudeVector& b_state) const {
  require(static_cast<std::size_t>(b_state.size()) == b_dimension(), "b-state dimension mismatch");
  AmplitudeVector out = AmplitudeVector::Zero(static_cast<Eigen::Index>(dim_));
  for (std::size_t b = 0; b < b_dimension(); ++b) out[static_cast<Eigen::Index>(index(a, b))] = b_state[static_cast<Eigen::Index>(b)];
  return out;
}

AmplitudeVector UqiSystem::project_a(const AmplitudeVector& state, const std::vector<int>& a) const {
  AmplitudeVector out(static_cast<Eigen::Index>(b_dimension()));
  for (std::size_t b = 0; b < b_dimension(); ++b) out[static_cast<Eigen::Index>(b)] = state[static_cast<Eigen::Index>(index(a, b))];
  return out;
}

SparseMatrix UqiSystem::laser(int site, int lo, int hi) const {
  require(site >= 1 && site <= n_, "laser site out of range");
  require(lo >= 0 && hi < a_dim_ && lo != hi, "laser levels out of range");
  std::vector<Eigen::Triplet<Complex>> triplets;
  std::size_t weight = 1;
  for (int k = n_; k > site; --k) weight *= local_;
  for (std::size_t x = 0; x < dim_; ++x) {
    const int level = static_cast<int>(((x / weight) % local_) / 2);
    if (level != lo) continue;
    const std::size_t y = x + static_cast<std::size_t>(2 * (hi - lo)) * weight;
    triplets.emplace_back(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x), 1.0);
    triplets.emplace_back(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y), 1.0);
  }
  SparseMatrix m(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

SparseMatrix UqiSystem::excitation_number() const {
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (std::size_t x = 0; x < dim_; ++x) {
    int count = 0;
    for (int level : a_levels(x)) count += level > 0 ? 1 : 0;
    if (count > 0) triplets.emplace_back(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x), count);
  }
  SparseMatrix m(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

SparseMatrix build_uqi_hamiltonian(int n_spins, Variant variant, const UqiOptions& options) {
  return UqiSystem(n_spins, variant, options).hamiltonian();
}

double verify_mapping(int n_spins, Variant variant, const AmplitudeVector& b_initial, double t) {
  require(n_spins >= 2, "mapping needs at least two spins");
  const UqiSystem sys(n_spins, variant);
  require(static_cast<std::size_t>(b_initial.size()) == sys.b_dimension(), "b-state dimension mismatch");
  AmplitudeVector full = sys.product_state(position_pattern(variant, n_spins, 1, 1), b_initial);
  full = evolve(sys.hamiltonian(), full, t);

  const ComplexMatrix u = chain_propagator(n_spins, t);
  AmplitudeVector predicted = AmplitudeVector::Zero(static_cast<Eigen::Index>(sys.dimension()));
  for (int n = 1; n <= n_spins; ++n) {
    const AmplitudeVector vb = transport_gate(n_spins, variant, 1, n) * b_initial;
    predicted += u(n - 1, 0) * sys.product_state(position_pattern(variant, n_spins, n, 1), vb);
  }
  return (full - predicted).norm();
}

namespace {

double first_arrival_peak(int n, int from, int to) {
  const SingleParticleSystem chain = build_uniform_chain(static_cast<std::size_t>(n), 0.0);
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(chain.dense());
  const RealVector& w = solver.eigenvalues();
  const RealMatrix& v = solver.eigenvectors();
  const double window = 0.5 * std::abs(to - from) + 3.0 * std::cbrt(static_cast<double>(n)) + 2.0;
  double best_t = 0.0;
  double best_p = -1.0;
  for (double t = 0.01; t <= window; t += 0.01) {
    Complex a(0.0, 0.0);
    for (Eigen::Index k = 0; k < w.size(); ++k) a += v(to - 1, k) * v(from - 1, k) * std::exp(Complex(0.0, -w[k] * t));
    if (std::norm(a) > best_p) {
      best_p = std::norm(a);
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace

ConditionalGate extract_conditional_gate(int n_spins, Variant variant, const TransferSpec& spec,
                                         const UqiOptions& options) {
  require(variant != Variant::kH3, "conditional gates of H3 come from run_pulsed_uqi");
  const int to = spec.to == 0 ? n_spins : spec.to;
  require(spec.from >= 1 && spec.from <= n_spins && to >= 1 && to <= n_spins, "transfer endpoints out of range");
  const int max_level = variant == Variant::kHsim ? 3 : 1;
  require(spec.level >= 1 && spec.level <= max_level, "excitation level out of range");
  const UqiSystem sys(n_spins, variant, options);

  ConditionalGate gate;
  gate.arrival_time = spec.t > 0.0 ? spec.t : first_arrival_peak(n_spins, spec.from, to);
  const auto bdim = static_cast<Eigen::Index>(sys.b_dimension());
  ComplexMatrix m(bdim, bdim);
  const std::vector<int> start = position_pattern(variant, n_spins, spec.from, spec.level);
  const std::vector<int> finish = position_pattern(variant, n_spins, to, spec.level);
  for (Eigen::Index j = 0; j < bdim; ++j) {
    AmplitudeVector psi = sys.product_state(start, AmplitudeVector::Unit(bdim, j));
    psi = evolve(sys.hamiltonian(), psi, gate.arrival_time);
    m.col(j) = sys.project_a(psi, finish);
  }
  gate.arrival_probability = m.squaredNorm() / static_cast<double>(bdim);
  if (gate.arrival_probability < 1e-6) {
    throw NumericalError(NumericalErrorKind::kNoSignal, "arrival probability below 1e-6");
  }
  gate.matrix = m / std::sqrt(gate.arrival_probability);
  return gate;
}

MirrorCheck compare_with_mirror(const ComplexMatrix& composed, int total_qubits, int first_qubit) {
  require(first_qubit >= 1 && first_qubit <= total_qubits, "mirror range out of bounds");
  const int span = total_qubits - first_qubit + 1;
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << total_qubits);
  require(composed.rows() == dim && composed.cols() == dim, "operator dimension mismatch");
  ComplexMatrix p = ComplexMatrix::Identity(dim, dim);
  if (first_qubit == 1) {
    p = mirror_permutation(total_qubits);
  } else {
    p = kron(ComplexMatrix::Identity(Eigen::Index{1} << (first_qubit - 1), Eigen::Index{1} << (first_qubit - 1)),
             mirror_permutation(span));
  }
  MirrorCheck out;
  out.raw_distance = kernels::phase_quotient_distance(composed, p);
  const ComplexMatrix d = p.adjoint() * composed;
  const Complex d0 = d(0, 0);
  ComplexMatrix layer = ComplexMatrix::Identity(dim, dim);
  if (std::abs(d0) > 1e-12) {
    for (int q = first_qubit; q <= total_qubits; ++q) {
      const auto e = static_cast<Eigen::Index>(with_bit(0, total_qubits, q, 1));
      Complex ph = d(e, e) / d0;
      ph = std::abs(ph) > 1e-12 ? ph / std::abs(ph) : Complex(1.0, 0.0);
      out.local_phases.push_back(ph);
      if (std::abs(ph - 1.0) > 1e-10) out.correction_needed = true;
    }
    for (Eigen::Index x = 0; x < dim; ++x) {
      Complex v(1.0, 0.0);
      for (int q = first_qubit; q <= total_qubits; ++q) {
        if (bit_of(static_cast<std::size_t>(x), total_qubits, q) != 0) v *= out.local_phases[static_cast<std::size_t>(q - first_qubit)];
      }
      layer(x, x) = v;
    }
  }
  out.distance = kernels::phase_quotient_distance(composed, p * layer);
  return out;
}

MirrorCheck layered_mirror_check(int n_qubits) {
  require(n_qubits >= 1 && n_qubits <= 8, "mirror check supports 1 to 8 qubits");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  ComplexMatrix cz = ComplexMatrix::Identity(dim, dim);
  for (int q = 1; q < n_qubits; ++q) cz = adjacent_gate(n_qubits, q, controlled_phase()) * cz;
  ComplexMatrix hs = ComplexMatrix::Identity(dim, dim);
  for (int q = 1; q <= n_qubits; ++q) hs = single_qubit_gate(n_qubits, q, hadamard()) * hs;
  const ComplexMatrix layer = hs * cz;
  ComplexMatrix composed = ComplexMatrix::Identity(dim, dim);
  for (int r = 0; r <= n_qubits; ++r) composed = layer * composed;
  return compare_with_mirror(composed, n_qubits, 1);
}

MakhlinInvariants makhlin_invariants(const ComplexMatrix& g) {
  require(g.rows() == 4 && g.cols() == 4, "invariants need a two-qubit gate");
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  ComplexMatrix q(4, 4);
  q << r, 0.0, 0.0, i * r, 0.0, i * r, r, 0.0, 0.0, i * r, -r, 0.0, r, 0.0, 0.0, -i * r;
  const ComplexMatrix mb = q.adjoint() * g * q;
  const ComplexMatrix m = mb.transpose() * mb;
  const Complex det = g.determinant();
  const Complex tr = m.trace();
  const Complex tr2 = (m * m).trace();
  const Complex g1 = tr * tr / (16.0 * det);
  const Complex g2 = (tr * tr - tr2) / (4.0 * det);
  return {g1.real(), g1.imag(), g2.real()};
}

MakhlinInvariants cnot_reference_invariants() {
  ComplexMatrix cnot = ComplexMatrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  return makhlin_invariants(cnot);
}

bool is_locally_trivial(const MakhlinInvariants& inv, double tol) {
  return std::abs(inv.g1_re - 1.0) <= tol && std::abs(inv.g1_im) <= tol && std::abs(inv.g2 - 3.0) <= tol;
}

EntanglingCheck entangling_check_of(const ComplexMatrix& gate, int n_qubits) {
  require(n_qubits >= 2, "need at least two qubits");
  const auto rest = static_cast<Eigen::Index>(std::size_t{1} << (n_qubits - 2));
  ComplexMatrix g2(4, 4);
  for (Eigen::Index a = 0; a < 4; ++a) {
    for (Eigen::Index b = 0; b < 4; ++b) g2(a, b) = gate(a * rest, b * rest);
  }
  EntanglingCheck out;
  out.locality_defect = (gate - kron(g2, ComplexMatrix::Identity(rest, rest))).cwiseAbs().maxCoeff();
  if (out.locality_defect > 1e-8) {
    throw NumericalError(NumericalErrorKind::kLocalityViolation, "gate acts outside qubits 1 and 2");
  }
  out.two_qubit_gate = g2;
  out.invariants = makhlin_invariants(g2);
  out.is_entangling = !is_locally_trivial(out.invariants);
  return out;
}

EntanglingCheck entangling_gate_check(int n_qubits, GateSource source) {
  require(n_qubits >= 2, "need at least two qubits");
  const ComplexMatrix u = source == GateSource::kAlgebra
                              ? u_tilde(n_qubits)
                              : extract_conditional_gate(n_qubits, Variant::kH2, {1, n_qubits, 1, 0.0}).matrix;
  const ComplexMatrix g = u.adjoint() * single_qubit_gate(n_qubits, 1, hadamard()) * u;
  return entangling_check_of(g, n_qubits);
}

double leakage_norm(const UqiSystem& sys, const AmplitudeVector& state, const std::vector<std::vector<int>>& allowed) {
  require(static_cast<std::size_t>(state.size()) == sys.dimension(), "state dimension mismatch");
  double outside = 0.0;
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    if (state[i] == Complex(0.0, 0.0)) continue;
    const std::vector<int> a = sys.a_levels(static_cast<std::size_t>(i));
    if (std::find(allowed.begin(), allowed.end(), a) == allowed.end()) outside += std::norm(state[i]);
  }
  return std::sqrt(outside);
}

namespace {

struct LaserChannel {
  int site;
  int lo;
  int hi;
};

struct DrivenRun {
  ComplexMatrix map;  // b-register map onto the target pattern
  double max_leakage = 0.0;
};

// Evolves every b basis state from `start` under H + Omega_in L_in + Omega_out L_out.
DrivenRun driven_run(const UqiSystem& sys, const PulseSchedule& schedule, const LaserChannel& in,
                     const LaserChannel& out, const std::vector<int>& start, const std::vector<int>& target,
                     const std::vector<std::vector<int>>* manifold) {
  kernels::DrivenSparseOperator op(sys.hamiltonian());
  const std::size_t d_in = op.add_drive(sys.laser(in.site, in.lo, in.hi));
  const std::size_t d_out = op.add_drive(sys.laser(out.site, out.lo, out.hi));
  const auto bdim = static_cast<Eigen::Index>(sys.b_dimension());
  DrivenRun run;
  run.map = ComplexMatrix(bdim, bdim);
  for (Eigen::Index j = 0; j < bdim; ++j) {
    AmplitudeVector psi = sys.product_state(start, AmplitudeVector::Unit(bdim, j));
    for (std::size_t k = 0; k < schedule.step_count(); ++k) {
      op.set_coefficient(d_in, schedule.omega_in[k]);
      op.set_coefficient(d_out, schedule.omega_out[k]);
      kernels::chebyshev_evolve(op, schedule.dt, psi);
      if (manifold != nullptr) run.max_leakage = std::max(run.max_leakage, leakage_norm(sys, psi, *manifold));
    }
    run.map.col(j) = sys.project_a(psi, target);
  }
  return run;
}

}  // namespace

PulsedRun run_pulsed_uqi(int n_spins, const PulseSchedule& schedule, double leakage_tolerance) {
  require(schedule.n_chain == n_spins, "schedule was built for a different N");
  const UqiSystem sys(n_spins, Variant::kH3);
  std::vector<std::vector<int>> manifold;
  manifold.emplace_back(static_cast<std::size_t>(n_spins), 0);
  for (int n = 1; n <= n_spins; ++n) manifold.push_back(position_pattern(Variant::kH3, n_spins, n, 1));
  manifold.emplace_back(static_cast<std::size_t>(n_spins), 2);

  const DrivenRun run = driven_run(sys, schedule, {1, 0, 1}, {n_spins, 1, 2}, manifold.front(), manifold.back(),
                                   &manifold);
  PulsedRun out;
  out.max_leakage = run.max_leakage;
  if (run.max_leakage > leakage_tolerance) {
    throw NumericalError(NumericalErrorKind::kMappingViolation, "state left the string-state manifold");
  }
  const double bdim = static_cast<double>(sys.b_dimension());
  out.gate.arrival_probability = run.map.squaredNorm() / bdim;
  out.gate.arrival_time = schedule.horizon;
  out.final_pattern_probability = out.gate.arrival_probability;
  out.fidelity = out.gate.arrival_probability;
  if (out.gate.arrival_probability < 1e-6) {
    throw NumericalError(NumericalErrorKind::kNoSignal, "no amplitude reached the final pattern");
  }
  out.gate.matrix = run.map / std::sqrt(out.gate.arrival_probability);
  out.gate_distance = normalised_distance(out.gate.matrix, u_tilde(n_spins));
  return out;
}

ResetResult reset_sweep(int n_spins, const PulseSchedule& schedule, const AmplitudeVector& b_initial,
                        double tolerance) {
  require(schedule.n_chain == n_spins, "schedule was built for a different N");
  const UqiSystem sys(n_spins, Variant::kH3);
  require(static_cast<std::size_t>(b_initial.size()) == sys.b_dimension(), "b-state dimension mismatch");
  const std::vector<int> full(static_cast<std::size_t>(n_spins), 2);
  const std::vector<int> empty(static_cast<std::size_t>(n_spins), 0);
  const DrivenRun run = driven_run(sys, schedule, {1, 1, 2}, {n_spins, 0, 1}, full, empty, nullptr);

  ResetResult out;
  const double bdim = static_cast<double>(sys.b_dimension());
  out.success_probability = run.map.squaredNorm() / bdim;
  if (1.0 - out.success_probability > tolerance) {
    throw NumericalError(NumericalErrorKind::kResetFailure, "residual excitation above tolerance after reset");
  }
  const ComplexMatrix normalised = run.map / std::sqrt(out.success_probability);
  out.b_identity_distance = normalised_distance(normalised, ComplexMatrix::Identity(run.map.rows(), run.map.cols()));
  const AmplitudeVector b_final = run.map * b_initial;
  out.b_overlap = std::norm(b_initial.dot(b_final)) / (b_initial.squaredNorm() * b_final.squaredNorm());
  return out;
}

InjectionGraph second_site_injection_graph(int n_spins, const InjectionDrives& drives) {
  require(n_spins >= 3, "second-site injection needs at least three spins");
  struct Move {
    std::vector<int> to;
    double value;
  };
  const std::vector<Transition> terms = transitions(Variant::kH3, 0.0);
  auto neighbours = [&](const std::vector<int>& a) {
    std::vector<Move> out;
    for (int k = 0; k + 1 < n_spins; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      for (const Transition& tr : terms) {
        if (a[ku] == tr.in_left && a[ku + 1] == tr.in_right) {
          std::vector<int> b = a;
          b[ku] = tr.out_left;
          b[ku + 1] = tr.out_right;
          out.push_back({b, 1.0});
        }
        if (a[ku] == tr.out_left && a[ku + 1] == tr.out_right) {
          std::vector<int> b = a;
          b[ku] = tr.in_left;
          b[ku + 1] = tr.in_right;
          out.push_back({b, 1.0});
        }
      }
    }
    auto laser = [&](int site, int lo, int hi, double value) {
      if (value == 0.0) return;
      const auto s = static_cast<std::size_t>(site - 1);
      if (a[s] == lo || a[s] == hi) {
        std::vector<int> b = a;
        b[s] = a[s] == lo ? hi : lo;
        out.push_back({b, value});
      }
    };
    laser(2, 0, 1, drives.omega1);
    laser(1, 1, 2, drives.omega0);
    laser(n_spins, 1, 2, drives.omega_n);
    return out;
  };

  std::map<std::vector<int>, std::size_t> id;
  std::vector<std::vector<int>> patterns;
  std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
  std::deque<std::vector<int>> queue;
  const std::vector<int> vacuum(static_cast<std::size_t>(n_spins), 0);
  id[vacuum] = 0;
  patterns.push_back(vacuum);
  queue.push_back(vacuum);
  while (!queue.empty()) {
    const std::vector<int> a = queue.front();
    queue.pop_front();
    const std::size_t ia = id.at(a);
    for (const Move& mv : neighbours(a)) {
      auto it = id.find(mv.to);
      if (it == id.end()) {
        it = id.emplace(mv.to, patterns.size()).first;
        patterns.push_back(mv.to);
        queue.push_back(mv.to);
      }
      if (ia < it->second) edges.emplace_back(ia, it->second, mv.value);
    }
  }
  InjectionGraph g;
  g.system = SingleParticleSystem(patterns.size());
  for (const auto& [a, b, v] : edges) g.system.add_edge(a, b, v);
  g.patterns = std::move(patterns);
  return g;
}

JunctionSpec injection_junction(const InjectionGraph& graph) {
  const std::size_t n = graph.system.site_count();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const Edge& e : graph.system.edges()) {
    adj[e.a].emplace_back(e.b, e.value);
    adj[e.b].emplace_back(e.a, e.value);
  }
  std::size_t branch = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (adj[i].size() == 3) branch = i;
  }
  require(branch < n, "injection graph has no branch node");
  JunctionSpec spec;
  std::size_t prev = branch;
  std::size_t cur = n;
  double first = 0.0;
  for (const auto& [nb, v] : adj[branch]) {
    if (graph.patterns[nb][0] != 0) {
      cur = nb;
      first = v;
    }
  }
  require(cur < n, "injection graph has no pendant");
  spec.graph.push_back({kJunctionMain, kJunctionAlpha, first});
  int label = kJunctionAlpha;
  while (true) {
    std::size_t next = n;
    double value = 0.0;
    for (const auto& [nb, v] : adj[cur]) {
      if (nb != prev) {
        next = nb;
        value = v;
      }
    }
    if (next == n || label == kJunctionGamma) break;
    spec.graph.push_back({label, label + 1, value});
    prev = cur;
    cur = next;
    ++label;
  }
  spec.j1 = spec.graph.size() > 1 ? spec.graph[1].value : 0.0;
  spec.j2 = spec.graph.size() > 2 ? spec.graph[2].value : 0.0;
  return spec;
}

ACoolingResult a_register_cooling_check(int n_spins, const std::vector<int>& defect_sites, double width, double f,
                                        double dt) {
  require(n_spins >= 2, "need at least two spins");
  std::vector<int> pattern(static_cast<std::size_t>(n_spins), 0);
  for (int d : defect_sites) {
    require(d >= 1 && d <= n_spins, "defect site out of range");
    pattern[static_cast<std::size_t>(d - 1)] = 2;
  }
  const UqiSystem sys(n_spins, Variant::kH3);
  const PulseSchedule schedule = make_transfer_schedule(n_spins, width, f, dt);
  const auto bdim = static_cast<Eigen::Index>(sys.b_dimension());
  int background = 0;
  auto defects = [&](const std::vector<int>& a) {
    std::vector<int> out;
    for (int k = 1; k <= n_spins; ++k) {
      if (a[static_cast<std::size_t>(k - 1)] != background) out.push_back(k);
    }
    return out;
  };

  ACoolingResult result;
  while (true) {
    // Spins 1, 2 and N carry lasers and are corrected directly. A defect
    // left on spin N, or crossing from spin 2 onto spin 1 mid-sweep, would
    // be driven by the boundary lasers, so it is fixed before the sweep.
    pattern[0] = background;
    pattern[1] = background;
    pattern[static_cast<std::size_t>(n_spins - 1)] = background;
    const std::vector<int> before = defects(pattern);
    if (before.empty()) break;
    if (result.rounds >= n_spins) {
      throw NumericalError(NumericalErrorKind::kProtocolViolation, "defects not cleared within N repetitions");
    }
    const bool reset = background == 2;
    kernels::DrivenSparseOperator op(sys.hamiltonian());
    const std::size_t d_in = op.add_drive(reset ? sys.laser(1, 1, 2) : sys.laser(1, 0, 1));
    const std::size_t d_out = op.add_drive(reset ? sys.laser(n_spins, 0, 1) : sys.laser(n_spins, 1, 2));
    AmplitudeVector psi = sys.product_state(pattern, AmplitudeVector::Unit(bdim, 0));
    for (std::size_t k = 0; k < schedule.step_count(); ++k) {
      op.set_coefficient(d_in, schedule.omega_in[k]);
      op.set_coefficient(d_out, schedule.omega_out[k]);
      kernels::chebyshev_evolve(op, schedule.dt, psi);
    }
    std::map<std::vector<int>, double> weights;
    for (Eigen::Index x = 0; x < psi.size(); ++x) {
      const double p = std::norm(psi[x]);
      if (p > 0.0) weights[sys.a_levels(static_cast<std::size_t>(x))] += p;
    }
    auto best = std::max_element(weights.begin(), weights.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    DefectSweep sweep;
    sweep.pattern_before = pattern;
    sweep.pattern_after = best->first;
    sweep.pattern_probability = best->second;
    sweep.reset_sweep = reset;
    result.sweeps.push_back(sweep);
    ++result.rounds;
    if (sweep.pattern_probability < 0.5) {
      throw NumericalError(NumericalErrorKind::kProtocolViolation, "sweep produced no dominant a-pattern");
    }
    background = reset ? 0 : 2;
    pattern = sweep.pattern_after;
    std::vector<int> expected;
    for (int d : before) expected.push_back(d - 1);
    if (defects(pattern) != expected) {
      throw NumericalError(NumericalErrorKind::kProtocolViolation, "defects did not move one spin towards spin 1");
    }
  }
  return result;
}

TrotterCheck hsim_trotter_check(int n_spins, double dt, const std::array<int, 3>& ratios) {
  require(n_spins >= 2 && n_spins <= 4, "HSIM check supports 2 to 4 spins");
  require(dt > 0.0 && dt <= 0.1, "dt must lie in (0, 0.1]");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_spins);
  UqiOptions options;
  options.hsim_dt = dt;
  TrotterCheck out;
  out.cycle = ComplexMatrix::Identity(dim, dim);
  ComplexMatrix generator = ComplexMatrix::Zero(dim, dim);
  for (int axis = 1; axis <= 3; ++axis) {
    const int reps = ratios[static_cast<std::size_t>(axis - 1)];
    require(reps >= 0, "ratios must be nonnegative");
    if (reps == 0) continue;
    const ComplexMatrix pass = extract_conditional_gate(n_spins, Variant::kHsim, {1, n_spins, axis, 0.0}, options).matrix;
    for (int r = 0; r < reps; ++r) out.cycle = pass * out.cycle;
    const ComplexMatrix ss = kron(pauli(axis), pauli(axis));
    for (int q = 1; q < n_spins; ++q) generator += static_cast<double>(reps) * adjacent_gate(n_spins, q, ss);
  }
  out.target = kernels::dense_propagator(generator, dt);
  out.distance = kernels::phase_quotient_distance(out.cycle, out.target);
  return out;
}

double hsim_round_trip_distance(int n_spins, double dt, int level) {
  UqiOptions options;
  options.hsim_dt = dt;
  const ComplexMatrix forward = extract_conditional_gate(n_spins, Variant::kHsim, {1, n_spins, level, 0.0}, options).matrix;
  const ComplexMatrix back = extract_conditional_gate(n_spins, Variant::kHsim, {n_spins, 1, level, 0.0}, options).matrix;
  const ComplexMatrix total = back * forward;
  return kernels::phase_quotient_distance(total, ComplexMatrix::Identity(total.rows(), total.cols()));
}

}  // namespace spinline::uqi
