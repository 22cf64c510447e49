#include "spinline/junction.hpp"

#include <algorithm>
#include <cmath>

#include "spinline/kernels.hpp"

namespace spinline {

std::vector<JunctionEdge> default_junction_graph(double j1, double j2) {
  return {{kJunctionMain, kJunctionAlpha, 1.0}, {kJunctionAlpha, kJunctionBeta, j1}, {kJunctionBeta, kJunctionGamma, j2}};
}

double transmission_probability(double k, const JunctionSpec& spec) {
  require(spec.j1 > 0.0, "J1 must be positive");
  const double e = 2.0 * std::cos(k);
  const double s2 = std::sin(k) * std::sin(k);
  const double j1s = spec.j1 * spec.j1;
  const double j2s = spec.j2 * spec.j2;
  const double a = j1s + j2s - e * e;
  double b_over_e = 0.0;
  if (j2s == 0.0) {
    b_over_e = -e;
  } else if (e == 0.0) {
    return 0.0;
  } else {
    b_over_e = (j2s - e * e) / e;
  }
  const double num = 4.0 * s2 * a * a;
  const double den = num + b_over_e * b_over_e;
  return den == 0.0 ? 0.0 : num / den;
}

double multi_bounce_success(int m, double width, double j1) {
  require(m >= 0, "m must be nonnegative");
  require(width >= 1.0, "width must be at least 1");
  require(j1 > 0.0, "J1 must be positive");
  return 1.0 - 4.0 / (std::pow(j1, 4) * std::pow(width, m + 1) * std::tgamma(m + 2.0));
}

long minimum_half_length(const PacketSpec& packet, double t_final) {
  return static_cast<long>(std::ceil(std::abs(packet.center) + 2.0 * t_final + 8.0 * packet.width));
}

SingleParticleSystem junction_system(const JunctionSpec& spec, long half_length) {
  require(half_length >= 3, "main chain too short");
  const auto main_sites = static_cast<std::size_t>(2 * half_length + 1);
  const std::vector<JunctionEdge> graph =
      spec.attached ? (spec.graph.empty() ? default_junction_graph(spec.j1, spec.j2) : spec.graph)
                    : std::vector<JunctionEdge>{};
  int side_nodes = 0;
  for (const JunctionEdge& e : graph) {
    require(e.a >= 0 && e.a <= 3 && e.b >= 0 && e.b <= 3 && e.a != e.b, "junction edge label out of range");
    side_nodes = std::max({side_nodes, e.a, e.b});
  }
  SingleParticleSystem s(main_sites + static_cast<std::size_t>(side_nodes));
  for (std::size_t i = 0; i + 1 < main_sites; ++i) s.add_edge(i, i + 1, 1.0);
  const auto node_site = [&](int label) {
    return label == kJunctionMain ? static_cast<std::size_t>(half_length)
                                  : main_sites + static_cast<std::size_t>(label - 1);
  };
  for (const JunctionEdge& e : graph) s.add_edge(node_site(e.a), node_site(e.b), e.value);
  return s;
}

double default_scatter_time(const PacketSpec& packet) {
  const double speed = 2.0 * std::abs(std::sin(packet.momentum));
  require(speed > 1e-6, "packet momentum has no group velocity");
  return (std::abs(packet.center) + 6.0 * packet.width) / speed;
}

ScatterResult scatter_wavepacket(const JunctionSpec& spec, const PacketSpec& packet, double t_final,
                                 const ScatterGeometry& geometry) {
  require(t_final >= 0.0, "t_final must be nonnegative");
  const long needed = minimum_half_length(packet, t_final);
  const long half = geometry.half_length == 0 ? needed : geometry.half_length;
  require(half >= needed, "chain too short for the requested scattering time");

  const SingleParticleSystem system = junction_system(spec, half);
  const long lo = static_cast<long>(std::floor(packet.center - 8.0 * packet.width));
  const long hi = static_cast<long>(std::ceil(packet.center + 8.0 * packet.width));
  const AmplitudeVector packet_amps = gaussian_packet(packet, lo, hi);
  AmplitudeVector psi = AmplitudeVector::Zero(static_cast<Eigen::Index>(system.site_count()));
  for (long x = lo; x <= hi; ++x) psi[x + half] = packet_amps[x - lo];

  kernels::chebyshev_evolve(system.hopping_operator(), t_final, psi);

  ScatterResult r;
  for (long x = -half; x <= half; ++x) {
    const double p = std::norm(psi[x + half]);
    if (x > 2) {
      r.transmitted_mass += p;
    } else if (x < -2) {
      r.reflected_mass += p;
    } else {
      r.trapped_mass += p;
    }
  }
  for (auto i = static_cast<Eigen::Index>(2 * half + 1); i < psi.size(); ++i) r.trapped_mass += std::norm(psi[i]);
  return r;
}

ReflectionCheck reflection_phase_check(long half_chain_length, const PacketSpec& packet_in) {
  const double w = packet_in.width;
  require(w > 0.0, "packet width must be positive");
  const long l = half_chain_length;
  require(static_cast<double>(l) >= 16.0 * w + 2.0, "half chain too short for the packet");
  PacketSpec packet = packet_in;
  const long c = l / 2;
  packet.center = static_cast<double>(c);
  const long wall = l + 1;
  const double t = static_cast<double>(wall - c);

  AmplitudeVector initial = AmplitudeVector::Zero(l);
  const long lo = std::max(1L, static_cast<long>(std::floor(c - 8.0 * w)));
  const long hi = std::min(l, static_cast<long>(std::ceil(c + 8.0 * w)));
  const AmplitudeVector amps = gaussian_packet(packet, lo, hi);
  for (long n = lo; n <= hi; ++n) initial[n - 1] = amps[n - lo];

  AmplitudeVector psi = initial;
  kernels::chebyshev_evolve(build_uniform_chain(static_cast<std::size_t>(l), 0.0).hopping_operator(), t, psi);

  // Image solution and the mirrored free continuation, both from the
  // infinite-chain propagator.
  AmplitudeVector expected = AmplitudeVector::Zero(l);
  AmplitudeVector free_mirror = AmplitudeVector::Zero(l);
  for (long n = 1; n <= l; ++n) {
    Complex direct(0.0, 0.0);
    Complex image(0.0, 0.0);
    for (long m = lo; m <= hi; ++m) {
      const Complex a = amps[m - lo];
      direct += infinite_chain_amplitude(m, n, t) * a;
      image += infinite_chain_amplitude(m, 2 * wall - n, t) * a;
    }
    expected[n - 1] = direct - image;
    free_mirror[n - 1] = image;
  }
  ReflectionCheck out;
  out.shape_fidelity = std::norm(expected.dot(psi)) / (expected.squaredNorm() * psi.squaredNorm());
  double phase = std::arg(free_mirror.dot(psi));
  if (phase < 0.0) phase += 2.0 * kPi;
  out.phase_shift = phase;
  return out;
}

double symmetric_sector_leakage(long half_chain_length, const PacketSpec& packet, double t_final, int samples) {
  require(half_chain_length >= 1 && samples >= 1, "invalid leakage scan");
  const long l = half_chain_length;
  const SingleParticleSystem chain = build_uniform_chain(static_cast<std::size_t>(2 * l + 1), 0.0);
  const long lo = std::max(-l, static_cast<long>(std::floor(packet.center - 8.0 * packet.width)));
  const long hi = std::min(l, static_cast<long>(std::ceil(packet.center + 8.0 * packet.width)));
  const AmplitudeVector amps = gaussian_packet(packet, lo, hi);
  AmplitudeVector psi = AmplitudeVector::Zero(2 * l + 1);
  for (long x = lo; x <= hi; ++x) {
    psi[x + l] += amps[x - lo];
    psi[-x + l] += amps[x - lo];
  }
  psi /= psi.norm();
  const kernels::HoppingOperator op = chain.hopping_operator();
  double worst = 0.0;
  const double dt = t_final / samples;
  for (int s = 0; s <= samples; ++s) {
    if (s > 0) kernels::chebyshev_evolve(op, dt, psi);
    const AmplitudeVector flipped = psi.reverse();
    worst = std::max(worst, 0.5 * (psi - flipped).norm());
  }
  return worst;
}

}  // namespace spinline
