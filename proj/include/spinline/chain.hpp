#pragma once

#include <cstddef>
#include <vector>

#include "spinline/core.hpp"
#include "spinline/kernels.hpp"

namespace spinline {

struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  double value = 0.0;
};

// One-excitation-sector Hamiltonian on a chain or graph: real on-site
// energies plus real symmetric hopping edges.
class SingleParticleSystem {
 public:
  SingleParticleSystem() = default;
  explicit SingleParticleSystem(std::size_t site_count);

  std::size_t site_count() const { return diagonal_.size(); }
  const std::vector<double>& diagonal() const { return diagonal_; }
  const std::vector<Edge>& edges() const { return edges_; }

  void set_diagonal(std::size_t site, double value);
  std::size_t add_edge(std::size_t a, std::size_t b, double value);
  void set_edge_value(std::size_t edge, double value);

  // Index of the edge joining a and b, or edge_count() when absent.
  std::size_t find_edge(std::size_t a, std::size_t b) const;

  // True when every edge joins consecutive sites.
  bool is_chain() const;
  // Hopping J_n between sites n and n+1 (chain topologies only).
  std::vector<double> chain_couplings() const;

  RealMatrix dense() const;
  kernels::HoppingOperator hopping_operator() const;

 private:
  std::vector<double> diagonal_;
  std::vector<Edge> edges_;
};

SingleParticleSystem build_uniform_chain(std::size_t n_sites, double end_diagonal);

struct MirrorChainSpec {
  int total_sites = 2;
  bool rescale = false;
  // An embedded window with labels a occupies chain sites a + mirror_offset
  // (1-based chain labels), which moves the mirror image of a to
  // total_sites + 1 - 2 * mirror_offset - a.
  int mirror_offset = 0;
};

// Chain with couplings sqrt(n (M - n)), optionally rescaled by 2/M.
// Site index i of the returned system is chain label i + 1.
SingleParticleSystem build_pst_chain(const MirrorChainSpec& spec);

// Mirror image of window label a for that embedding.
int mirror_target(const MirrorChainSpec& spec, int a);

// <to| exp(-iHt) |from> for the doubly infinite uniform chain.
Complex infinite_chain_amplitude(long from, long to, double t);

// Normalised binomial vector sqrt(C(M-1, n-1)) / 2^((M-1)/2), n = 1..M,
// evaluated in log space.
RealVector binomial_eigenvector(int M);

// <lambda0| deltaH |lambda0> with deltaH = (M/2 - sqrt(n (M - n))) on the
// edges of the central window (M - N)/2 ... (M + N)/2 (unrescaled units).
double delta_h_expectation(int M, int N);

}  // namespace spinline
