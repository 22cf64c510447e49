#include "spinline/cooling.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "spinline/kernels.hpp"

namespace spinline {

namespace {

// Tracked single-particle image of site j after rounds 1 .. j-1, with the
// boundary sites projected out after each round, then renormalised.
AmplitudeVector tracked_state(const std::vector<ComplexMatrix>& done, int n_chain, int j) {
  const Eigen::Index dim = n_chain + 2;
  AmplitudeVector chi = AmplitudeVector::Zero(dim);
  chi[j] = 1.0;
  for (const ComplexMatrix& u : done) {
    chi = u * chi;
    chi[0] = 0.0;
    chi[dim - 1] = 0.0;
  }
  const double norm = chi.norm();
  if (norm < 1e-12) throw NumericalError(NumericalErrorKind::kProtocolStalled, "tracked state vanished");
  return chi / norm;
}

double mean_position(const AmplitudeVector& chi) {
  double pos = 0.0;
  for (Eigen::Index a = 0; a < chi.size(); ++a) pos += static_cast<double>(a) * std::norm(chi[a]);
  return pos;
}

struct SimulatedRound {
  ComplexMatrix unitary;
  double peak = 0.0;
};

SimulatedRound simulate_round(const SingleParticleSystem& chain, const AmplitudeVector& chi, int n_chain, int m,
                              int twice_mirror, double dt_target) {
  const int s = (m + 1 - twice_mirror) / 2;
  require(s >= 1 && s + n_chain + 1 <= m, "mirror window does not fit inside the simulated chain");

  const SingleParticleSystem sim_chain = build_pst_chain({m, true, s});
  const kernels::HoppingOperator sim_op = sim_chain.hopping_operator();
  std::vector<double> j(static_cast<std::size_t>(m - 1));
  for (const Edge& e : sim_chain.edges()) j[std::min(e.a, e.b)] = e.value;

  // Sim label a + s sits at 0-based index a + s - 1.
  AmplitudeVector psi = AmplitudeVector::Zero(m);
  for (int a = 1; a <= n_chain; ++a) psi[a + s - 1] = chi[a];

  const double horizon = kPi * m / 4.0;
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt_target));
  const double dt = horizon / static_cast<double>(steps);

  kernels::HoppingOperator actual(static_cast<std::size_t>(n_chain) + 2);
  const std::size_t left = actual.add_edge(1, 0, Complex(0.0, 0.0));
  for (const Edge& e : chain.edges()) {
    const std::size_t lo = std::min(e.a, e.b);
    if (lo >= 1 && lo + 1 <= static_cast<std::size_t>(n_chain)) actual.add_edge(e.a, e.b, e.value);
  }
  const std::size_t right = actual.add_edge(static_cast<std::size_t>(n_chain), static_cast<std::size_t>(n_chain) + 1,
                                            Complex(0.0, 0.0));

  const double j_left = j[static_cast<std::size_t>(s - 1)];
  const double j_right = j[static_cast<std::size_t>(s + n_chain - 1)];
  const Eigen::Index i_left = s - 1;             // sim label s (actual site 0)
  const Eigen::Index i_right = s + n_chain;      // sim label s + N + 1 (actual site N + 1)

  SimulatedRound out;
  out.unitary = ComplexMatrix::Identity(n_chain + 2, n_chain + 2);
  double theta_left = 0.0;
  double theta_right = 0.0;
  kernels::chebyshev_evolve(sim_op, 0.5 * dt, psi);
  for (std::size_t k = 0; k < steps; ++k) {
    const double mass_left = psi.head(i_left + 1).norm();
    const double mass_right = psi.tail(m - i_right).norm();
    const Complex ps = psi[i_left];
    const Complex pq = psi[i_right];
    if (mass_left < 1e-12 && std::abs(ps) > 1e-9) {
      throw NumericalError(NumericalErrorKind::kDegeneratePulse, "left pulse ratio is degenerate");
    }
    if (mass_right < 1e-12 && std::abs(pq) > 1e-9) {
      throw NumericalError(NumericalErrorKind::kDegeneratePulse, "right pulse ratio is degenerate");
    }
    // With no simulated mass beyond a boundary the link to it stays closed.
    Complex omega_left = 0.0;
    Complex omega_right = 0.0;
    if (mass_left >= 1e-9) {
      omega_left = j_left * ps * std::exp(Complex(0.0, -theta_left)) / mass_left;
      theta_left -= std::real(j_left * std::conj(ps) * psi[i_left + 1]) / (mass_left * mass_left) * dt;
    }
    if (mass_right >= 1e-9) {
      omega_right = j_right * pq * std::exp(Complex(0.0, -theta_right)) / mass_right;
      theta_right -= std::real(j_right * std::conj(pq) * psi[i_right - 1]) / (mass_right * mass_right) * dt;
    }
    out.peak = std::max({out.peak, std::abs(omega_left), std::abs(omega_right)});
    actual.set_edge(left, omega_left);
    actual.set_edge(right, omega_right);
    out.unitary = kernels::dense_propagator(actual.dense(), dt) * out.unitary;
    if (k + 1 < steps) kernels::chebyshev_evolve(sim_op, dt, psi);
  }
  return out;
}

ComplexMatrix permutation_matrix(const std::vector<std::size_t>& image) {
  const auto n = static_cast<Eigen::Index>(image.size());
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) p(static_cast<Eigen::Index>(image[static_cast<std::size_t>(a)]), a) = 1.0;
  return p;
}

}  // namespace

CoolingProtocol cooling_round_unitaries(const SingleParticleSystem& chain, const CoolingOptions& options) {
  require(chain.site_count() >= 3, "cooling chain needs at least one interior site");
  const int n = static_cast<int>(chain.site_count()) - 2;
  require(options.dt > 0.0, "dt must be positive");
  const int m = options.m_sim + (options.m_sim % 2);
  require(m >= 10 * n * n, "M_sim must be at least 10 N^2");

  CoolingProtocol protocol;
  protocol.n_chain = n;
  protocol.mode = CoolingMode::kSimulated;
  protocol.m_sim = m;
  for (int round = 1; round <= n; ++round) {
    const AmplitudeVector chi = tracked_state(protocol.unitaries, n, round);
    const bool eject_left = mean_position(chi) <= 0.5 * (n + 1);
    const int twice_mirror = eject_left ? 1 : 2 * n + 1;
    SimulatedRound r = simulate_round(chain, chi, n, m, twice_mirror, options.dt);
    protocol.unitaries.push_back(std::move(r.unitary));
    protocol.boundary_site.push_back(eject_left ? 0 : static_cast<std::size_t>(n) + 1);
    protocol.peak_coupling.push_back(r.peak);
  }
  return protocol;
}

CoolingProtocol oracle_cooling_unitaries(int n_chain) {
  require(n_chain >= 1, "chain length must be positive");
  const auto n = static_cast<std::size_t>(n_chain);
  CoolingProtocol protocol;
  protocol.n_chain = n_chain;
  protocol.mode = CoolingMode::kOracle;
  for (int round = 1; round <= n_chain; ++round) {
    const AmplitudeVector chi = tracked_state(protocol.unitaries, n_chain, round);
    const auto q = static_cast<std::size_t>(std::llround(mean_position(chi)));
    std::vector<std::size_t> image(n + 2);
    for (std::size_t a = 0; a < n + 2; ++a) image[a] = a;
    std::size_t boundary = 0;
    if (q == 1) {
      for (std::size_t a = 1; a <= n + 1; ++a) image[a] = n + 2 - a;
      boundary = n + 1;
    } else if (q == n) {
      for (std::size_t a = 0; a <= n; ++a) image[a] = n - a;
      boundary = 0;
    } else {
      boundary = q <= (n + 1) / 2 ? 0 : n + 1;
      std::swap(image[q], image[boundary]);
    }
    protocol.unitaries.push_back(permutation_matrix(image));
    protocol.boundary_site.push_back(boundary);
    protocol.peak_coupling.push_back(0.0);
  }
  return protocol;
}

CoolingLog cooling_run(const OccupationSet& initial, const CoolingProtocol& protocol) {
  const std::size_t n = static_cast<std::size_t>(protocol.n_chain);
  const std::size_t dim = n + 2;
  for (std::size_t site : initial.sites()) require(site < dim, "occupied site out of range");
  CoolingLog log;
  if (initial.annihilated()) return log;

  const std::size_t k0 = initial.size();
  // Block-diagonal density matrix, one block per excitation number.
  std::vector<std::vector<OccupationSet>> basis(k0 + 1);
  std::vector<std::map<std::vector<std::size_t>, Eigen::Index>> index(k0 + 1);
  std::vector<ComplexMatrix> rho(k0 + 1);
  for (std::size_t k = 0; k <= k0; ++k) {
    basis[k] = enumerate_occupations(dim, k);
    for (std::size_t i = 0; i < basis[k].size(); ++i) index[k][basis[k][i].sites()] = static_cast<Eigen::Index>(i);
    const auto d = static_cast<Eigen::Index>(basis[k].size());
    rho[k] = ComplexMatrix::Zero(d, d);
  }
  const Eigen::Index start = index[k0].at(initial.sites());
  rho[k0](start, start) = 1.0;

  for (std::size_t r = 0; r < protocol.unitaries.size(); ++r) {
    const ComplexMatrix& u = protocol.unitaries[r];
    for (std::size_t k = 1; k <= k0; ++k) {
      if (rho[k].cwiseAbs().maxCoeff() == 0.0) continue;
      const ComplexMatrix lifted = lift_operator(u, k);
      rho[k] = lifted * rho[k] * lifted.adjoint();
    }
    // Measure both boundary sites and reset whatever was found.
    std::vector<ComplexMatrix> next(k0 + 1);
    for (std::size_t k = 0; k <= k0; ++k) next[k] = ComplexMatrix::Zero(rho[k].rows(), rho[k].cols());
    CoolingRound round;
    round.round_index = static_cast<int>(r) + 1;
    for (std::size_t k = 0; k <= k0; ++k) {
      const auto d = static_cast<Eigen::Index>(basis[k].size());
      for (Eigen::Index a = 0; a < d; ++a) {
        const OccupationSet& sa = basis[k][static_cast<std::size_t>(a)];
        const bool a_left = sa.contains(0);
        const bool a_right = sa.contains(dim - 1);
        const double pa = rho[k](a, a).real();
        if (a_left || a_right) round.detection_probability += pa;
        if (a_left) round.left_probability += pa;
        if (a_right) round.right_probability += pa;
        std::vector<std::size_t> kept_a;
        for (std::size_t site : sa.sites()) {
          if (site != 0 && site != dim - 1) kept_a.push_back(site);
        }
        const std::size_t kk = kept_a.size();
        const Eigen::Index ia = index[kk].at(kept_a);
        for (Eigen::Index b = 0; b < d; ++b) {
          const OccupationSet& sb = basis[k][static_cast<std::size_t>(b)];
          if (sb.contains(0) != a_left || sb.contains(dim - 1) != a_right) continue;
          std::vector<std::size_t> kept_b;
          for (std::size_t site : sb.sites()) {
            if (site != 0 && site != dim - 1) kept_b.push_back(site);
          }
          next[kk](ia, index[kk].at(kept_b)) += rho[k](a, b);
        }
      }
    }
    rho = std::move(next);
    round.removed = round.detection_probability > 0.5;
    log.rounds.push_back(round);
  }
  double residual = 0.0;
  for (std::size_t k = 1; k <= k0; ++k) residual += rho[k].trace().real();
  log.residual_excitation_probability = std::clamp(residual, 0.0, 1.0);
  return log;
}

std::vector<ScalingRow> perturbation_scaling_report(int n, const std::vector<int>& m_values) {
  std::vector<ScalingRow> rows;
  for (int m : m_values) {
    ScalingRow row;
    row.m = m;
    row.expectation = delta_h_expectation(m, n);
    row.rescaled_expectation = 2.0 * row.expectation / m;
    row.scaled_ratio = n == 0 ? 0.0 : row.rescaled_expectation * std::pow(m, 2.5) / std::pow(n, 3);
    rows.push_back(row);
  }
  return rows;
}

double mirror_fidelity_with_eigenvalue_shift(int m, int site, double delta) {
  require(m >= 2 && site >= 1 && site <= m, "site outside the mirror chain");
  const RealMatrix h = build_pst_chain({m, false, 0}).dense();
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h);
  const RealVector& w = solver.eigenvalues();
  const RealMatrix& v = solver.eigenvectors();
  Complex amp(0.0, 0.0);
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const double pattern = std::cos(1.7 * static_cast<double>(k) + 0.3);
    const double lambda = w[k] + delta * pattern;
    amp += v(m - site, k) * v(site - 1, k) * std::exp(Complex(0.0, -lambda * kPi / 2.0));
  }
  return std::norm(amp);
}

}  // namespace spinline
