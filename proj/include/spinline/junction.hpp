#pragma once

#include <cstddef>
#include <vector>

#include "spinline/chain.hpp"
#include "spinline/pulses.hpp"

namespace spinline {

// Attached-graph node labels: 0 is the main-chain site at x = 0, the others
// are side sites alpha, beta, gamma.
enum JunctionNode : int { kJunctionMain = 0, kJunctionAlpha = 1, kJunctionBeta = 2, kJunctionGamma = 3 };

struct JunctionEdge {
  int a = 0;
  int b = 0;
  double value = 0.0;
};

struct JunctionSpec {
  double j1 = 1.0;
  double j2 = 0.0;
  // Edges of the scattering region among JunctionNode labels. Empty selects
  // default_junction_graph(j1, j2).
  std::vector<JunctionEdge> graph;
  // False gives a plain uniform chain (no side sites at all).
  bool attached = true;
};

// main -1- alpha -J1- beta -J2- gamma.
std::vector<JunctionEdge> default_junction_graph(double j1, double j2);

// |T_k|^2 in closed form (the common factor 4 cos^2 k is cancelled so that
// k = pi/2 is evaluated without a 0/0).
double transmission_probability(double k, const JunctionSpec& spec);

// Leading-order multi-bounce success probability.
double multi_bounce_success(int m, double width, double j1);

struct ScatterResult {
  double transmitted_mass = 0.0;
  double reflected_mass = 0.0;
  double trapped_mass = 0.0;
};

struct ScatterGeometry {
  // Main-chain sites run from -half_length to +half_length; 0 picks the
  // minimum admissible length.
  long half_length = 0;
};

long minimum_half_length(const PacketSpec& packet, double t_final);

// Main chain plus side sites. Site index of main-chain position x is
// x + half_length; side nodes follow the chain.
SingleParticleSystem junction_system(const JunctionSpec& spec, long half_length);

ScatterResult scatter_wavepacket(const JunctionSpec& spec, const PacketSpec& packet, double t_final,
                                 const ScatterGeometry& geometry = {});

// Time for the packet centre to move from x0 to a point 6 widths past the
// junction at group velocity 2 sin k.
double default_scatter_time(const PacketSpec& packet);

struct ReflectionCheck {
  double shape_fidelity = 0.0;
  double phase_shift = 0.0;
};

// Open chain of sites 1 .. L; a packet centred at L/2 runs into the end at
// L and back. The expected state is the infinite-chain image solution.
ReflectionCheck reflection_phase_check(long half_chain_length, const PacketSpec& packet);

// Largest antisymmetric-component norm seen while an even superposition of
// mirrored packets evolves on the mirror-symmetric chain -L .. L.
double symmetric_sector_leakage(long half_chain_length, const PacketSpec& packet, double t_final, int samples);

}  // namespace spinline
