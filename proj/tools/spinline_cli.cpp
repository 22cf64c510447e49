#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spinline/chain.hpp"
#include "spinline/cooling.hpp"
#include "spinline/evolve.hpp"
#include "spinline/io.hpp"
#include "spinline/junction.hpp"
#include "spinline/noise.hpp"
#include "spinline/pulses.hpp"
#include "spinline/uqi.hpp"

using namespace spinline;
using nlohmann::json;

namespace {

enum class Kind { kInt, kDouble, kSeed, kText, kIntList };

struct Param {
  const char* name;  // JSON key
  const char* flag;
  Kind kind;
  const char* help;
};

const std::vector<Param>& all_params() {
  static const std::vector<Param> params{
      {"N", "--n", Kind::kInt, "chain length or spin count"},
      {"delta", "--delta", Kind::kDouble, "packet width"},
      {"f", "--f", Kind::kDouble, "injection distance in widths"},
      {"dt", "--dt", Kind::kDouble, "time step"},
      {"seed", "--seed", Kind::kSeed, "random seed"},
      {"trials", "--trials", Kind::kInt, "Monte Carlo trials"},
      {"scale", "--scale", Kind::kDouble, "systematic pulse scale"},
      {"fluctuation", "--fluctuation", Kind::kText, "none | relative | absolute"},
      {"bound", "--bound", Kind::kDouble, "fluctuation bound"},
      {"offset_in", "--offset-in", Kind::kDouble, "timing offset of the input pulse"},
      {"offset_out", "--offset-out", Kind::kDouble, "timing offset of the output pulse"},
      {"offset_min", "--offset-min", Kind::kDouble, "first timing offset"},
      {"offset_max", "--offset-max", Kind::kDouble, "last timing offset"},
      {"offset_step", "--offset-step", Kind::kDouble, "offset spacing"},
      {"mode", "--mode", Kind::kText, "simulated | oracle"},
      {"m_sim", "--m-sim", Kind::kInt, "simulated mirror chain length"},
      {"sites", "--sites", Kind::kIntList, "initially excited sites, comma separated"},
      {"j1", "--j1", Kind::kDouble, "junction coupling J1"},
      {"j2", "--j2", Kind::kDouble, "junction coupling J2"},
      {"points", "--points", Kind::kInt, "interior grid points in (0, pi)"},
      {"variant", "--variant", Kind::kText, "h1 | h2 | h3 | hsim"},
      {"n_values", "--n-values", Kind::kIntList, "chain lengths for the heralded and bare-peak fits"},
      {"m_values", "--m-values", Kind::kIntList, "mirror lengths for the perturbation report"},
      {"perturbation_n", "--perturbation-n", Kind::kInt, "excitation site count in the perturbation report"},
  };
  return params;
}

const Param& param(const std::string& name) {
  for (const Param& p : all_params())
    if (name == p.name) return p;
  throw std::logic_error("unknown parameter " + name);
}

// Defaults per command; a key listed here is accepted by that command.
const std::map<std::string, json>& command_defaults(const std::string& command) {
  static const std::map<std::string, std::map<std::string, json>> table{
      {"transfer",
       {{"N", 100}, {"delta", 10.0}, {"f", 3.0}, {"dt", 0.1}, {"scale", 1.0}, {"fluctuation", "none"},
        {"bound", 0.0}, {"offset_in", 0.0}, {"offset_out", 0.0}, {"seed", nullptr}}},
      {"pulses", {{"N", 100}, {"delta", 10.0}, {"f", 3.0}, {"dt", 0.1}}},
      {"robustness",
       {{"N", 100}, {"delta", 30.0}, {"f", 3.0}, {"dt", 0.1}, {"trials", 200}, {"scale", 1.0},
        {"fluctuation", "relative"}, {"bound", 0.1}, {"offset_in", 0.0}, {"offset_out", 0.0}, {"seed", nullptr}}},
      {"timing-scan",
       {{"N", 100}, {"delta", 30.0}, {"f", 3.0}, {"dt", 0.1}, {"offset_min", -5.0}, {"offset_max", 5.0},
        {"offset_step", 0.5}}},
      {"cooling", {{"N", 8}, {"mode", "simulated"}, {"m_sim", 640}, {"dt", 0.1}, {"sites", json::array({1})}}},
      {"junction", {{"j1", 1.0}, {"j2", 0.0}, {"points", 199}, {"delta", nullptr}, {"f", 3.0}}},
      {"uqi-verify", {{"N", 4}, {"variant", "h1"}, {"seed", nullptr}}},
      {"scaling",
       {{"n_values", json::array({20, 40, 80})},
        {"m_values", json::array({200, 400, 800, 1600})},
        {"perturbation_n", 10}}},
  };
  const auto it = table.find(command);
  if (it == table.end()) throw InvalidArgument("unknown command '" + command + "'");
  return it->second;
}

json parse_flag_value(const Param& p, const std::string& text) {
  try {
    std::size_t used = 0;
    switch (p.kind) {
      case Kind::kInt: {
        const long long v = std::stoll(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case Kind::kSeed: {
        if (!text.empty() && text[0] == '-') break;
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) break;
        return static_cast<std::uint64_t>(v);
      }
      case Kind::kDouble: {
        const double v = std::stod(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case Kind::kText:
        return text;
      case Kind::kIntList: {
        json list = json::array();
        std::stringstream in(text);
        std::string item;
        while (std::getline(in, item, ',')) {
          const long long v = std::stoll(item, &used);
          if (used != item.size()) throw InvalidArgument("");
          list.push_back(v);
        }
        return list;
      }
    }
  } catch (const std::exception&) {
  }
  throw InvalidArgument(std::string("invalid value '") + text + "' for " + p.flag);
}

// ---- typed accessors with range checks ----

class Params {
 public:
  explicit Params(const json& j) : j_(j) {}

  long long integer(const std::string& name, long long lo, long long hi = 1LL << 40) const {
    const json& v = at(name);
    if (!v.is_number_integer()) throw InvalidArgument(name + " must be an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi) {
      throw InvalidArgument(name + " = " + std::to_string(x) + " is outside [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
    }
    return x;
  }

  double real(const std::string& name, double lo, double hi, bool open_lo = false) const {
    const json& v = at(name);
    if (!v.is_number()) throw InvalidArgument(name + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || x > hi || (open_lo && x == lo)) {
      std::ostringstream m;
      m << name << " = " << x << " is outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
      throw InvalidArgument(m.str());
    }
    return x;
  }

  std::string text(const std::string& name, const std::vector<std::string>& allowed) const {
    const json& v = at(name);
    if (!v.is_string()) throw InvalidArgument(name + " must be a string");
    const std::string s = v.get<std::string>();
    for (const std::string& a : allowed)
      if (a == s) return s;
    throw InvalidArgument("unsupported " + name + " '" + s + "'");
  }

  std::vector<long long> list(const std::string& name, long long lo) const {
    const json& v = at(name);
    if (!v.is_array() || v.empty()) throw InvalidArgument(name + " must be a non-empty list");
    std::vector<long long> out;
    for (const json& e : v) {
      if (!e.is_number_integer() || e.get<long long>() < lo) {
        throw InvalidArgument(name + " entries must be integers >= " + std::to_string(lo));
      }
      out.push_back(e.get<long long>());
    }
    return out;
  }

  std::uint64_t seed() const {
    const json& v = at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw InvalidArgument("seed must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

 private:
  const json& at(const std::string& name) const {
    if (!j_.contains(name)) throw InvalidArgument("missing parameter " + name);
    return j_.at(name);
  }
  const json& j_;
};

bool randomised(const std::string& command, const json& p) {
  if (command == "robustness" || command == "uqi-verify") return true;
  return command == "transfer" && p.value("fluctuation", "none") != "none";
}

// ---- per-command execution ----

struct Result {
  std::string summary;
  std::optional<io::CsvTable> table;
  json report = json::object();
};

NoiseModel noise_model(const Params& p, bool has_seed) {
  NoiseModel m;
  m.systematic_scale = p.real("scale", 0.0, 100.0, true);
  const std::string kind = p.text("fluctuation", {"none", "relative", "absolute"});
  m.fluctuation = kind == "none" ? FluctuationKind::kNone
                                 : (kind == "relative" ? FluctuationKind::kRelative : FluctuationKind::kAbsolute);
  m.bound = p.real("bound", 0.0, 10.0);
  m.offset_in = p.real("offset_in", -1e6, 1e6);
  m.offset_out = p.real("offset_out", -1e6, 1e6);
  if (has_seed) m.seed = p.seed();
  return m;
}

PulseSchedule schedule_from(const Params& p) {
  return make_transfer_schedule(static_cast<int>(p.integer("N", 1, 100000)), p.real("delta", 0.0, 1e6, true),
                                p.real("f", 0.0, 1e3, true), p.real("dt", 0.0, 10.0, true));
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

Result run_transfer_command(const Params& p, const json& raw) {
  const PulseSchedule ideal = schedule_from(p);
  const NoiseModel model = noise_model(p, !raw.at("seed").is_null());
  const PulseSchedule schedule = apply_noise(ideal, model);
  const SingleParticleSystem system = transfer_system(ideal.n_chain);
  AmplitudeVector initial = AmplitudeVector::Zero(static_cast<Eigen::Index>(system.site_count()));
  initial[0] = 1.0;
  const Trajectory tr = propagate(system, &schedule, initial, schedule.dt);
  const ArrivalFidelity a = arrival_fidelity(tr, ideal.n_chain);
  Result r;
  r.summary = "transfer N=" + std::to_string(ideal.n_chain) + " fidelity=" + fmt(a.probability) +
              " phase=" + fmt(a.phase) + " phase_ok=" + (a.phase_ok ? "true" : "false");
  r.table = io::trajectory_summary_table(tr);
  r.report = {{"fidelity", a.probability}, {"phase", a.phase}, {"phase_ok", a.phase_ok}};
  return r;
}

Result run_pulses_command(const Params& p) {
  const PulseSchedule s = schedule_from(p);
  Result r;
  r.summary = "pulses N=" + std::to_string(s.n_chain) + " samples=" + std::to_string(s.sample_count()) +
              " horizon=" + fmt(s.horizon) + " peak=" + fmt(schedule_peak(s));
  r.table = io::schedule_table(s);
  r.report = {{"samples", s.sample_count()}, {"horizon", s.horizon}, {"peak", schedule_peak(s)}};
  return r;
}

Result run_robustness_command(const Params& p) {
  RobustnessConfig c;
  c.n_chain = static_cast<int>(p.integer("N", 1, 100000));
  c.width = p.real("delta", 0.0, 1e6, true);
  c.f = p.real("f", 0.0, 1e3, true);
  c.dt = p.real("dt", 0.0, 10.0, true);
  c.trials = static_cast<int>(p.integer("trials", 1, 10000000));
  c.model = noise_model(p, true);
  const RobustnessReport rep = monte_carlo(c);
  Result r;
  r.summary = "robustness trials=" + std::to_string(rep.trials) + " mean=" + fmt(rep.mean_fidelity) +
              " stderr=" + fmt(rep.stderr_fidelity) + " seed=" + std::to_string(c.model.seed);
  r.report = io::to_json(rep, c);
  io::CsvTable t{{"trial", "fidelity"}, {}};
  for (std::size_t i = 0; i < rep.per_trial.size(); ++i) t.rows.push_back({static_cast<double>(i), rep.per_trial[i]});
  r.table = t;
  return r;
}

Result run_timing_command(const Params& p) {
  const double lo = p.real("offset_min", -1e6, 1e6);
  const double hi = p.real("offset_max", lo, 1e6);
  const double step = p.real("offset_step", 0.0, 1e6, true);
  std::vector<double> offsets;
  for (long i = 0; lo + static_cast<double>(i) * step <= hi + 1e-12; ++i) offsets.push_back(lo + static_cast<double>(i) * step);
  const auto curve = timing_scan(static_cast<int>(p.integer("N", 1, 100000)), p.real("delta", 0.0, 1e6, true),
                                 p.real("f", 0.0, 1e3, true), p.real("dt", 0.0, 10.0, true), offsets);
  double best = 0.0, best_offset = 0.0;
  for (const TimingPoint& t : curve) {
    if (t.fidelity > best) {
      best = t.fidelity;
      best_offset = t.offset;
    }
  }
  Result r;
  r.summary = "timing-scan points=" + std::to_string(curve.size()) + " best_offset=" + fmt(best_offset) +
              " best_fidelity=" + fmt(best);
  r.table = io::timing_table(curve);
  r.report = {{"best_offset", best_offset}, {"best_fidelity", best}};
  return r;
}

Result run_cooling_command(const Params& p) {
  const int n = static_cast<int>(p.integer("N", 1, 64));
  const std::string mode = p.text("mode", {"simulated", "oracle"});
  std::vector<std::size_t> sites;
  for (long long s : p.list("sites", 1)) {
    if (s > n) throw InvalidArgument("site " + std::to_string(s) + " is outside 1.." + std::to_string(n));
    sites.push_back(static_cast<std::size_t>(s));
  }
  const CoolingProtocol protocol =
      mode == "oracle" ? oracle_cooling_unitaries(n)
                       : cooling_round_unitaries(transfer_system(n),
                                                 CoolingOptions{static_cast<int>(p.integer("m_sim", 1, 100000)),
                                                                p.real("dt", 0.0, 10.0, true)});
  const CoolingLog log = cooling_run(OccupationSet(sites), protocol);
  Result r;
  r.summary = "cooling N=" + std::to_string(n) + " mode=" + mode + " rounds=" + std::to_string(log.rounds.size()) +
              " residual=" + fmt(log.residual_excitation_probability);
  r.report = io::to_json(log);
  io::CsvTable t{{"round", "detection_probability", "left_probability", "right_probability"}, {}};
  for (const CoolingRound& c : log.rounds) {
    t.rows.push_back({static_cast<double>(c.round_index), c.detection_probability, c.left_probability,
                      c.right_probability});
  }
  r.table = t;
  return r;
}

Result run_junction_command(const Params& p, const json& raw) {
  JunctionSpec spec;
  spec.j1 = p.real("j1", -1e3, 1e3);
  spec.j2 = p.real("j2", -1e3, 1e3);
  const auto points = p.integer("points", 1, 100000);
  const bool simulate = !raw.at("delta").is_null();
  const double width = simulate ? p.real("delta", 0.0, 1e4, true) : 0.0;
  const double f = p.real("f", 0.0, 1e3, true);
  io::CsvTable t{{"k", "transmission"}, {}};
  if (simulate) t.header.push_back("simulated");
  t.rows.resize(static_cast<std::size_t>(points));
  kernels::parallel_for_index(t.rows.size(), [&](std::size_t i) {
    const double k = kPi * static_cast<double>(i + 1) / static_cast<double>(points + 1);
    std::vector<double> row{k, transmission_probability(k, spec)};
    if (simulate) {
      PacketSpec packet = injection_packet(width, f);
      packet.momentum = k;
      row.push_back(scatter_wavepacket(spec, packet, default_scatter_time(packet)).transmitted_mass);
    }
    t.rows[i] = std::move(row);
  });
  Result r;
  r.summary = "junction j1=" + fmt(spec.j1) + " j2=" + fmt(spec.j2) + " points=" + std::to_string(points) +
              " T(pi/2)=" + fmt(transmission_probability(kPi / 2, spec));
  r.table = t;
  return r;
}

struct Check {
  std::string name;
  double value;
  double tolerance;
  bool pass;
};

Check below(const std::string& name, double value, double tol) { return {name, value, tol, value < tol}; }
Check at_least(const std::string& name, double value, double tol) { return {name, value, tol, value >= tol}; }

std::vector<Check> uqi_checks(int n, uqi::Variant v, std::uint64_t seed) {
  using namespace spinline::uqi;
  std::vector<Check> checks;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> times(0.1, 8.0);
  const Eigen::Index dim = Eigen::Index{1} << n;
  double worst = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    AmplitudeVector b(dim);
    for (auto& x : b) x = Complex(g(rng), g(rng));
    b /= b.norm();
    worst = std::max(worst, verify_mapping(n, v, b, times(rng)));
  }
  checks.push_back(below("mapping", worst, 1e-8));

  if (v == Variant::kH1 || v == Variant::kH2) {
    const ConditionalGate gate = extract_conditional_gate(n, v, {});
    ComplexMatrix expected = ComplexMatrix::Identity(dim, dim);
    if (v == Variant::kH1) {
      for (int q = 1; q < n; ++q) expected = adjacent_gate(n, q, swap_gate()) * expected;
    } else {
      expected = u_tilde(n);
    }
    checks.push_back(below("conditional_gate", kernels::phase_quotient_distance(gate.matrix, expected), 1e-8));
    const ConditionalGate back = extract_conditional_gate(n, v, {n, 1, 1, 0.0});
    checks.push_back(below("round_trip",
                           kernels::phase_quotient_distance(back.matrix * gate.matrix,
                                                            ComplexMatrix::Identity(dim, dim)),
                           1e-8));
    if (v == Variant::kH2) {
      const ComplexMatrix layer = single_qubit_gate(n, n, hadamard()) * gate.matrix;
      ComplexMatrix c = ComplexMatrix::Identity(dim, dim);
      for (int r = 0; r <= n; ++r) c = layer * c;
      checks.push_back(below("mirror", compare_with_mirror(c, n, 1).distance, 1e-8));
      if (n >= 3) {
        const EntanglingCheck e = entangling_gate_check(n, GateSource::kDynamics);
        const MakhlinInvariants ref = cnot_reference_invariants();
        const double gap = std::max({std::abs(e.invariants.g1_re - ref.g1_re), std::abs(e.invariants.g1_im - ref.g1_im),
                                     std::abs(e.invariants.g2 - ref.g2)});
        checks.push_back(below("entangling_invariants", gap, 1e-8));
      }
    }
  } else if (v == Variant::kH3) {
    const PulsedRun run = run_pulsed_uqi(n, make_transfer_schedule(n, 4.0, 3.0, 0.05));
    checks.push_back(at_least("pulsed_pattern_probability", run.final_pattern_probability, 0.95));
    checks.push_back(below("pulsed_gate_distance", run.gate_distance, 0.05));
    checks.push_back(below("pulsed_leakage", run.max_leakage, 1e-10));
  } else {
    const double d1 = hsim_trotter_check(n, 0.05, {1, 1, 1}).distance;
    const double d2 = hsim_trotter_check(n, 0.025, {1, 1, 1}).distance;
    const double ratio = d2 > 0.0 ? d1 / d2 : 4.0;
    checks.push_back({"trotter_order", ratio, 0.5, n == 2 || std::abs(ratio - 4.0) <= 0.5});
    checks.push_back(below("round_trip", hsim_round_trip_distance(n, 0.05, 1), 1e-8));
  }
  return checks;
}

Result run_uqi_command(const Params& p) {
  const int n = static_cast<int>(p.integer("N", 1, 64));
  const uqi::Variant v = uqi::parse_variant(p.text("variant", {"h1", "h2", "h3", "hsim"}));
  if (v != uqi::Variant::kH3) require(n >= 2, "uqi-verify needs N >= 2 for this variant");
  uqi::check_size(n, uqi::a_dimension(v));
  const std::vector<Check> checks = uqi_checks(n, v, p.seed());
  Result r;
  json list = json::array();
  int passed = 0;
  for (const Check& c : checks) {
    list.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    passed += c.pass ? 1 : 0;
  }
  r.report = {{"variant", uqi::to_string(v)}, {"N", n}, {"checks", list},
              {"all_pass", passed == static_cast<int>(checks.size())}};
  r.summary = "uqi-verify variant=" + uqi::to_string(v) + " N=" + std::to_string(n) + " checks_passed=" +
              std::to_string(passed) + "/" + std::to_string(checks.size());
  return r;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double xm = 0, ym = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i] / static_cast<double>(x.size());
    ym += y[i] / static_cast<double>(y.size());
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - xm) * (y[i] - ym);
    sxx += (x[i] - xm) * (x[i] - xm);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

Result run_scaling_command(const Params& p) {
  const std::vector<long long> ns = p.list("n_values", 2);
  std::vector<int> ms;
  for (long long m : p.list("m_values", 1)) ms.push_back(static_cast<int>(m));
  const int pn = static_cast<int>(p.integer("perturbation_n", 0, 100000));

  json heralded = json::array(), bare = json::array(), pert = json::array();
  std::vector<double> lx, lt, lp;
  for (long long n : ns) {
    const HeraldedReport h = heralded_repeat(build_uniform_chain(static_cast<std::size_t>(n), 0.0), {});
    const double peak = peak_transfer_probability(static_cast<int>(n), 2.0 * static_cast<double>(n), 0.05);
    heralded.push_back({{"N", n}, {"rounds", h.rounds}, {"total_time", h.total_time}});
    bare.push_back({{"N", n}, {"peak", peak}});
    lx.push_back(std::log(static_cast<double>(n)));
    lt.push_back(std::log(h.total_time));
    lp.push_back(std::log(peak));
  }
  io::CsvTable t{{"m", "expectation", "rescaled_expectation", "scaled_ratio"}, {}};
  for (const ScalingRow& row : perturbation_scaling_report(pn, ms)) {
    pert.push_back({{"M", row.m}, {"expectation", row.expectation}, {"rescaled", row.rescaled_expectation},
                    {"scaled_ratio", row.scaled_ratio}});
    t.rows.push_back({static_cast<double>(row.m), row.expectation, row.rescaled_expectation, row.scaled_ratio});
  }
  Result r;
  r.report = {{"heralded", heralded},
              {"heralded_exponent", slope(lx, lt)},
              {"bare_peak", bare},
              {"bare_peak_exponent", slope(lx, lp)},
              {"perturbation", pert}};
  r.table = t;
  r.summary = "scaling heralded_exponent=" + fmt(slope(lx, lt)) + " bare_peak_exponent=" + fmt(slope(lx, lp));
  return r;
}

Result dispatch(const io::RunConfig& config) {
  const Params p(config.parameters);
  const std::string& c = config.command;
  if (c == "transfer") return run_transfer_command(p, config.parameters);
  if (c == "pulses") return run_pulses_command(p);
  if (c == "robustness") return run_robustness_command(p);
  if (c == "timing-scan") return run_timing_command(p);
  if (c == "cooling") return run_cooling_command(p);
  if (c == "junction") return run_junction_command(p, config.parameters);
  if (c == "uqi-verify") return run_uqi_command(p);
  if (c == "scaling") return run_scaling_command(p);
  throw InvalidArgument("unknown command '" + c + "'");
}

// Fills defaults, rejects keys the command does not take, and records a
// generated seed for randomised commands.
void complete_parameters(io::RunConfig& config) {
  const auto& defaults = command_defaults(config.command);
  for (const auto& [key, value] : config.parameters.items()) {
    if (!defaults.count(key)) throw InvalidArgument("command " + config.command + " does not take '" + key + "'");
  }
  for (const auto& [key, value] : defaults) {
    if (!config.parameters.contains(key)) config.parameters[key] = value;
  }
  if (config.parameters.contains("seed") && config.parameters["seed"].is_null() &&
      randomised(config.command, config.parameters)) {
    std::random_device rd;
    config.parameters["seed"] = (static_cast<std::uint64_t>(rd()) << 32) | rd();
  }
}

std::string render(const Result& r, const io::RunConfig& config) {
  if (config.format == "json") {
    json out = r.report;
    out["run_config"] = io::to_json(config);
    if (r.table) out["table"] = {{"columns", r.table->header}, {"rows", r.table->rows}};
    return out.dump(2) + "\n";
  }
  if (!r.table) throw InvalidArgument("command " + config.command + " only writes json");
  std::string header;
  if (config.parameters.contains("seed") && !config.parameters["seed"].is_null()) {
    header = "# seed=" + config.parameters["seed"].dump() + "\n";
  }
  return header + r.table->to_string();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("config " + path + " is not valid JSON: " + e.what());
  }
}

int execute(io::RunConfig config, const std::string& write_config) {
  complete_parameters(config);
  if (!write_config.empty()) io::write_atomic(write_config, io::to_json(config).dump(2) + "\n");
  const Result r = dispatch(config);
  const std::string body = render(r, config);
  if (config.output_path.empty()) {
    std::cout << body;
    std::cerr << r.summary << "\n";
  } else {
    io::write_atomic(config.output_path, body);
    std::cout << r.summary << "\n";
  }
  if (config.command == "uqi-verify" && !r.report.value("all_pass", false)) {
    throw NumericalError(NumericalErrorKind::kProtocolViolation, "uqi verification checks failed");
  }
  return 0;
}

int run_golden(const std::string& suite, const std::string& dir) {
  std::vector<std::string> suites;
  if (suite == "all") {
    suites = io::golden_suites();
  } else {
    suites.push_back(suite);
  }
  std::filesystem::create_directories(dir);
  for (const std::string& s : suites) {
    const io::CsvTable t = io::golden_table(s);
    const std::string path = (std::filesystem::path(dir) / (s + ".csv")).string();
    io::write_atomic(path, t.to_string());
    std::cout << "golden " << s << " rows=" << t.rows.size() << " -> " << path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-controlled spin chain simulations"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::string config_path, output, format, write_config;
  };
  std::map<std::string, Sub> subs;
  for (const std::string& command : io::run_commands()) {
    Sub& s = subs[command];
    s.app = app.add_subcommand(command);
    for (const auto& [key, unused] : command_defaults(command)) {
      const Param& p = param(key);
      s.app->add_option(p.flag, s.values[key], p.help);
    }
    s.app->add_option("--config", s.config_path, "JSON run config; flags override it");
    s.app->add_option("--output,-o", s.output, "output file (stdout when omitted)");
    s.app->add_option("--format", s.format, "csv | json");
    s.app->add_option("--write-config", s.write_config, "write the merged run config as JSON");
  }

  std::string run_config_path;
  CLI::App* run_app = app.add_subcommand("run", "execute a saved JSON run config");
  run_app->add_option("config", run_config_path, "config file")->required();

  std::string suite = "all", golden_dir = "golden";
  CLI::App* golden_app = app.add_subcommand("golden", "regenerate golden regression CSVs");
  golden_app->add_option("--suite", suite, "fig1 | fig2 | fig3 | robustness | junction-curve | all");
  golden_app->add_option("--output-dir", golden_dir, "directory for the CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) std::cerr << app.help();
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_app->parsed()) return execute(io::run_config_from_json(read_json_file(run_config_path)), "");
    if (golden_app->parsed()) return run_golden(suite, golden_dir);
    for (auto& [command, s] : subs) {
      if (!s.app->parsed()) continue;
      io::RunConfig config;
      if (!s.config_path.empty()) config = io::run_config_from_json(read_json_file(s.config_path));
      if (!config.command.empty() && config.command != command) {
        throw InvalidArgument("config file is for '" + config.command + "', not '" + command + "'");
      }
      config.command = command;
      for (const auto& [key, text] : s.values) {
        if (s.app->get_option(param(key).flag)->count() > 0) config.parameters[key] = parse_flag_value(param(key), text);
      }
      if (!s.output.empty()) config.output_path = s.output;
      if (!s.format.empty()) config.format = s.format;
      if (config.format != "csv" && config.format != "json") throw InvalidArgument("format must be csv or json");
      if (command == "uqi-verify" && s.format.empty() && s.config_path.empty()) config.format = "json";
      return execute(config, s.write_config);
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
