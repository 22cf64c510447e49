#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "spinline/chain.hpp"
#include "spinline/junction.hpp"
#include "spinline/kernels.hpp"
#include "spinline/pulses.hpp"

namespace spinline::uqi {

enum class Variant { kH1, kH2, kH3, kHsim };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

// a-register levels per variant: 2 (H1, H2), 3 (H3), 4 (HSIM).
int a_dimension(Variant v);

// ---- b-register gate algebra (qubit 1 is the most significant bit) ----
ComplexMatrix hadamard();
ComplexMatrix pauli(int axis);  // 1 = X, 2 = Y, 3 = Z
ComplexMatrix single_qubit_gate(int n_qubits, int qubit, const ComplexMatrix& g);
// Two-qubit gate on qubits (qubit, qubit + 1); g is indexed (b_q b_{q+1}).
ComplexMatrix adjacent_gate(int n_qubits, int qubit, const ComplexMatrix& g);
ComplexMatrix swap_gate();
ComplexMatrix controlled_phase();
// U = (H x 1) . CP, the H2/H3 step gate.
ComplexMatrix step_gate();
// exp(-i dt sigma x sigma).
ComplexMatrix sigma_step_gate(int axis, double dt);
// Qubit n -> N + 1 - n.
ComplexMatrix mirror_permutation(int n_qubits);
// (H_1 ... H_{N-1}) (CP_{N-1,N} ... CP_{1,2}).
ComplexMatrix u_tilde(int n_qubits);

// Ordered product of step gates for an excitation moving from site `from`
// to site `to` (1-based): right steps apply the step gate, left steps its
// inverse.
ComplexMatrix transport_gate(int n_qubits, Variant v, int from, int to, int level = 1, double dt = 0.05);

// ---- many-body operators ----
struct UqiOptions {
  // Trotter step of the HSIM gates.
  double hsim_dt = 0.05;
};

class UqiSystem {
 public:
  UqiSystem(int n_spins, Variant variant, const UqiOptions& options = {});

  int n_spins() const { return n_; }
  int a_dim() const { return a_dim_; }
  Variant variant() const { return variant_; }
  std::size_t dimension() const { return dim_; }
  std::size_t b_dimension() const { return std::size_t{1} << n_; }
  const kernels::SparseMatrix& hamiltonian() const { return h_; }

  // Basis index of a-levels (one per spin) and b-register basis index.
  std::size_t index(const std::vector<int>& a_levels, std::size_t b_index) const;
  std::vector<int> a_levels(std::size_t index) const;
  std::size_t b_index(std::size_t index) const;

  // |a_levels> x b_state.
  AmplitudeVector product_state(const std::vector<int>& a_levels, const AmplitudeVector& b_state) const;
  // b-register component of `state` with the a-register projected onto
  // a_levels (unnormalised).
  AmplitudeVector project_a(const AmplitudeVector& state, const std::vector<int>& a_levels) const;

  // (|lo><hi| + |hi><lo|) on a-level pair of spin `site` (1-based), x 1_b.
  kernels::SparseMatrix laser(int site, int lo, int hi) const;
  // Total a-excitation number Sum_n n_a (levels counted as occupation > 0).
  kernels::SparseMatrix excitation_number() const;

 private:
  int n_;
  Variant variant_;
  int a_dim_;
  std::size_t local_;
  std::size_t dim_;
  kernels::SparseMatrix h_;
};

// Size bound check shared by all builders (throws TooLarge).
void check_size(int n_spins, int a_dim);

kernels::SparseMatrix build_uqi_hamiltonian(int n_spins, Variant variant, const UqiOptions& options = {});

// Excitation starting on spin 1 (level 1) with b-register b_initial,
// evolved for time t; returns the norm of the difference from the predicted
// single-particle-amplitude x position-gate decomposition.
double verify_mapping(int n_spins, Variant variant, const AmplitudeVector& b_initial, double t);

struct ConditionalGate {
  ComplexMatrix matrix;          // normalised by sqrt(arrival_probability)
  double arrival_probability = 0.0;
  double arrival_time = 0.0;
};

struct TransferSpec {
  int from = 1;
  int to = 0;     // 0 selects spin N
  int level = 1;  // excitation level (HSIM type)
  double t = 0.0; // 0 selects the first arrival peak
};

// b-register map conditioned on the a-excitation arriving at spec.to.
ConditionalGate extract_conditional_gate(int n_spins, Variant variant, const TransferSpec& spec,
                                         const UqiOptions& options = {});

struct MirrorCheck {
  double distance = 0.0;        // after the local phase correction layer
  double raw_distance = 0.0;    // without any correction
  std::vector<Complex> local_phases;  // phase on |1> per qubit, relative to |0>
  bool correction_needed = false;
};

// Compares `composed` with the mirror on `n_qubits` qubits (acting on the
// trailing qubits when n_qubits < total), allowing a diagonal local phase
// layer.
MirrorCheck compare_with_mirror(const ComplexMatrix& composed, int total_qubits, int first_qubit);

// (H^{x N} . CP-chain)^{N + 1} against the mirror permutation.
MirrorCheck layered_mirror_check(int n_qubits);

struct MakhlinInvariants {
  double g1_re = 0.0;
  double g1_im = 0.0;
  double g2 = 0.0;
};

MakhlinInvariants makhlin_invariants(const ComplexMatrix& two_qubit);
MakhlinInvariants cnot_reference_invariants();

struct EntanglingCheck {
  MakhlinInvariants invariants;
  bool is_entangling = false;
  double locality_defect = 0.0;
  ComplexMatrix two_qubit_gate;
};

enum class GateSource { kAlgebra, kDynamics };

// Restricts U~^dag H_{b1} U~ to qubits 1, 2.
EntanglingCheck entangling_gate_check(int n_qubits, GateSource source = GateSource::kAlgebra);
EntanglingCheck entangling_check_of(const ComplexMatrix& gate, int n_qubits);
bool is_locally_trivial(const MakhlinInvariants& inv, double tol = 1e-8);

struct PulsedRun {
  double final_pattern_probability = 0.0;  // mean over b basis inputs
  ConditionalGate gate;
  double gate_distance = 0.0;              // normalised distance from U~
  double max_leakage = 0.0;
  double fidelity = 0.0;
};

// H3 + H_L with the schedule's Omega_0 (spin 1, 0<->1) and Omega_N
// (spin N, 2<->1).
PulsedRun run_pulsed_uqi(int n_spins, const PulseSchedule& schedule, double leakage_tolerance = 1e-10);

struct ResetResult {
  double success_probability = 0.0;
  double b_identity_distance = 0.0;
  double b_overlap = 0.0;
};

// From |2>^N: spin-1 laser 2<->1 (omega_in) and spin-N laser 1<->0
// (omega_out). The b register starts in b_initial. Throws reset-failure
// when more than `tolerance` probability stays outside |0>^N.
ResetResult reset_sweep(int n_spins, const PulseSchedule& schedule, const AmplitudeVector& b_initial,
                        double tolerance = 0.1);

struct InjectionGraph {
  SingleParticleSystem system;
  std::vector<std::vector<int>> patterns;
};

struct InjectionDrives {
  double omega1 = 1.0;  // spin 2, 0 <-> 1
  double omega0 = 1.0;  // spin 1, 1 <-> 2
  double omega_n = 0.0; // spin N, 1 <-> 2
};

// Graph of a-patterns reachable from |0>^N under H3 plus the injection
// lasers; edge values are the coupling strengths.
InjectionGraph second_site_injection_graph(int n_spins, const InjectionDrives& drives = {});

// Pendant of the node with three neighbours, expressed as a junction.
JunctionSpec injection_junction(const InjectionGraph& graph);

struct DefectSweep {
  std::vector<int> pattern_before;
  std::vector<int> pattern_after;
  double pattern_probability = 0.0;
  bool reset_sweep = false;
};

struct ACoolingResult {
  int rounds = 0;
  std::vector<DefectSweep> sweeps;
};

// Repeats pulsed 1 -> N sweeps on an a-register holding |2> defects over a
// |0> background until no defect remains; defects reaching spin 1 are
// corrected there.
ACoolingResult a_register_cooling_check(int n_spins, const std::vector<int>& defect_sites, double width = 6.0,
                                        double f = 3.0, double dt = 0.1);

struct TrotterCheck {
  double distance = 0.0;
  ComplexMatrix cycle;
  ComplexMatrix target;
};

// One Trotter cycle built from ratios[i] passes of type-(i+1) excitations,
// each pass's gate extracted from HSIM dynamics.
TrotterCheck hsim_trotter_check(int n_spins, double dt, const std::array<int, 3>& ratios);

// Forward transfer of a type-`level` excitation then the reverse transfer,
// distance of the composed b map from identity.
double hsim_round_trip_distance(int n_spins, double dt, int level);

// max |<a-sector leakage>| helper for tests: norm of the component of
// `state` whose a-pattern is not in `allowed`.
double leakage_norm(const UqiSystem& sys, const AmplitudeVector& state, const std::vector<std::vector<int>>& allowed);

}  // namespace spinline::uqi
