#include "spinline/chain.hpp"

#include <cmath>
#include <cstdlib>

namespace spinline {

SingleParticleSystem::SingleParticleSystem(std::size_t site_count) : diagonal_(site_count, 0.0) {}

void SingleParticleSystem::set_diagonal(std::size_t site, double value) {
  require(site < site_count(), "diagonal site out of range");
  diagonal_[site] = value;
}

std::size_t SingleParticleSystem::add_edge(std::size_t a, std::size_t b, double value) {
  require(a < site_count() && b < site_count() && a != b, "edge endpoints out of range");
  edges_.push_back({a, b, value});
  return edges_.size() - 1;
}

void SingleParticleSystem::set_edge_value(std::size_t edge, double value) {
  require(edge < edges_.size(), "edge index out of range");
  edges_[edge].value = value;
}

std::size_t SingleParticleSystem::find_edge(std::size_t a, std::size_t b) const {
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if ((edges_[e].a == a && edges_[e].b == b) || (edges_[e].a == b && edges_[e].b == a)) return e;
  }
  return edges_.size();
}

bool SingleParticleSystem::is_chain() const {
  for (const Edge& e : edges_) {
    if (std::max(e.a, e.b) - std::min(e.a, e.b) != 1) return false;
  }
  return true;
}

std::vector<double> SingleParticleSystem::chain_couplings() const {
  require(is_chain(), "system is not a chain");
  std::vector<double> j(site_count() > 0 ? site_count() - 1 : 0, 0.0);
  for (const Edge& e : edges_) j[std::min(e.a, e.b)] += e.value;
  return j;
}

RealMatrix SingleParticleSystem::dense() const {
  const auto n = static_cast<Eigen::Index>(site_count());
  RealMatrix h = RealMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = diagonal_[static_cast<std::size_t>(i)];
  for (const Edge& e : edges_) {
    h(static_cast<Eigen::Index>(e.a), static_cast<Eigen::Index>(e.b)) += e.value;
    h(static_cast<Eigen::Index>(e.b), static_cast<Eigen::Index>(e.a)) += e.value;
  }
  return h;
}

kernels::HoppingOperator SingleParticleSystem::hopping_operator() const {
  kernels::HoppingOperator op(site_count());
  for (std::size_t i = 0; i < site_count(); ++i) op.set_diagonal(i, diagonal_[i]);
  for (const Edge& e : edges_) op.add_edge(e.a, e.b, e.value);
  return op;
}

SingleParticleSystem build_uniform_chain(std::size_t n_sites, double end_diagonal) {
  require(n_sites >= 1, "n_sites must be at least 1");
  SingleParticleSystem s(n_sites);
  for (std::size_t i = 0; i + 1 < n_sites; ++i) s.add_edge(i, i + 1, 1.0);
  s.set_diagonal(0, end_diagonal);
  s.set_diagonal(n_sites - 1, end_diagonal);
  return s;
}

SingleParticleSystem build_pst_chain(const MirrorChainSpec& spec) {
  require(spec.total_sites >= 2, "mirror chain needs at least 2 sites");
  const int m = spec.total_sites;
  const double scale = spec.rescale ? 2.0 / m : 1.0;
  SingleParticleSystem s(static_cast<std::size_t>(m));
  for (int n = 1; n < m; ++n) {
    s.add_edge(static_cast<std::size_t>(n - 1), static_cast<std::size_t>(n),
               scale * std::sqrt(static_cast<double>(n) * (m - n)));
  }
  return s;
}

int mirror_target(const MirrorChainSpec& spec, int a) {
  return spec.total_sites + 1 - 2 * spec.mirror_offset - a;
}

Complex infinite_chain_amplitude(long from, long to, double t) {
  const long d = std::labs(to - from);
  if (t == 0.0) return d == 0 ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
  static const Complex phases[4] = {{1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
  return phases[d % 4] * std::cyl_bessel_j(static_cast<double>(d), 2.0 * t);
}

RealVector binomial_eigenvector(int M) {
  require(M >= 1, "chain length must be positive");
  RealVector v(M);
  const double log_norm = 0.5 * (M - 1) * std::log(2.0);
  for (int n = 1; n <= M; ++n) {
    const double log_binom = std::lgamma(M) - std::lgamma(n) - std::lgamma(M - n + 1);
    v[n - 1] = std::exp(0.5 * log_binom - log_norm);
  }
  return v;
}

double delta_h_expectation(int M, int N) {
  require(M >= 4, "M must be at least 4");
  require(N >= 0 && M > N, "window must fit inside the chain");
  require((M - N) % 2 == 0, "M - N must be even");
  const int first = (M - N) / 2;
  const int last = (M + N) / 2;
  require(first >= 1 && last <= M, "window out of range");
  const RealVector v = binomial_eigenvector(M);
  double sum = 0.0;
  for (int n = first; n < last; ++n) {
    const double dh = 0.5 * M - std::sqrt(static_cast<double>(n) * (M - n));
    sum += 2.0 * dh * v[n - 1] * v[n];
  }
  return sum;
}

}  // namespace spinline
