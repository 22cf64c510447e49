#pragma once

#include <cstddef>
#include <vector>

#include "spinline/chain.hpp"
#include "spinline/fermionic.hpp"

namespace spinline {

enum class CoolingMode { kSimulated, kOracle };

struct CoolingOptions {
  int m_sim = 640;
  double dt = 0.1;
};

// Round unitaries for a chain with sites 0 .. N+1 (the ends are the
// boundary/reservoir sites). Round j is designed to push the classically
// tracked image of site j onto boundary_site[j - 1].
struct CoolingProtocol {
  int n_chain = 0;
  CoolingMode mode = CoolingMode::kSimulated;
  int m_sim = 0;
  std::vector<ComplexMatrix> unitaries;
  std::vector<std::size_t> boundary_site;
  // Largest |Omega| used by each round's pulses (simulated mode).
  std::vector<double> peak_coupling;
};

// Simulated mode: each round drives the chain's end couplings so that its
// interior follows the rescaled mirror chain 2 H_PST / M_sim with the
// mirror point moved until the tracked state is mirrored off one end.
// `chain` supplies the interior couplings and must have N + 2 sites.
CoolingProtocol cooling_round_unitaries(const SingleParticleSystem& chain, const CoolingOptions& options = {});

// Idealised permutation unitaries with the same tracking logic.
CoolingProtocol oracle_cooling_unitaries(int n_chain);

struct CoolingRound {
  int round_index = 0;
  double detection_probability = 0.0;
  bool removed = false;
  double left_probability = 0.0;
  double right_probability = 0.0;
};

struct CoolingLog {
  std::vector<CoolingRound> rounds;
  double residual_excitation_probability = 0.0;
};

// Applies U_1 .. U_N, measuring and resetting both boundary sites after
// every round. Multi-excitation states evolve through lifted determinants.
CoolingLog cooling_run(const OccupationSet& initial, const CoolingProtocol& protocol);

struct ScalingRow {
  int m = 0;
  double expectation = 0.0;
  // Same quantity in the rescaled (2/M) frame.
  double rescaled_expectation = 0.0;
  // rescaled_expectation * M^(5/2) / N^3 (zero when N = 0).
  double scaled_ratio = 0.0;
};

std::vector<ScalingRow> perturbation_scaling_report(int n, const std::vector<int>& m_values);

// Mirror fidelity |<M+1-n| U |n>|^2 at t = pi/2 after every eigenvalue of
// the unrescaled H_PST is shifted by delta times a fixed zero-mean pattern.
double mirror_fidelity_with_eigenvalue_shift(int m, int site, double delta);

}  // namespace spinline
