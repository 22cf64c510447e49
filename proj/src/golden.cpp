#include <algorithm>

#include "spinline/io.hpp"
#include "spinline/junction.hpp"

namespace spinline::io {

const std::vector<std::string>& run_commands() {
  static const std::vector<std::string> commands{"transfer", "pulses",   "robustness", "timing-scan",
                                                 "cooling",  "junction", "uqi-verify", "scaling"};
  return commands;
}

nlohmann::json to_json(const RunConfig& config) {
  return {{"command", config.command},
          {"parameters", config.parameters},
          {"output_path", config.output_path},
          {"format", config.format}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  require(j.is_object(), "config must be a JSON object");
  RunConfig c;
  try {
    if (j.contains("command")) c.command = j.at("command").get<std::string>();
    if (j.contains("parameters")) c.parameters = j.at("parameters");
    if (j.contains("output_path")) c.output_path = j.at("output_path").get<std::string>();
    if (j.contains("format")) c.format = j.at("format").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed config: ") + e.what());
  }
  require(c.parameters.is_object(), "config parameters must be an object");
  const auto& commands = run_commands();
  require(c.command.empty() || std::find(commands.begin(), commands.end(), c.command) != commands.end(),
          "unknown command '" + c.command + "'");
  require(c.format == "csv" || c.format == "json", "format must be csv or json");
  return c;
}

const std::vector<std::string>& golden_suites() {
  static const std::vector<std::string> suites{"fig1", "fig2", "fig3", "robustness", "junction-curve"};
  return suites;
}

namespace {

CsvTable transfer_curve(const PulseSchedule& schedule) {
  const SingleParticleSystem system = transfer_system(schedule.n_chain);
  AmplitudeVector initial = AmplitudeVector::Zero(static_cast<Eigen::Index>(system.site_count()));
  initial[0] = 1.0;
  const Trajectory tr = propagate(system, &schedule, initial, schedule.dt);
  CsvTable t{{"t", "fidelity", "omega_in", "omega_out"}, {}};
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    t.rows.push_back({tr.times[k], tr.fidelity_series[k], schedule.omega_in[k], schedule.omega_out[k]});
  }
  return t;
}

}  // namespace

CsvTable golden_table(const std::string& suite) {
  if (suite == "fig1") return transfer_curve(make_transfer_schedule(100, 10.0, 3.0, 0.1));
  if (suite == "fig2") {
    NoiseModel m;
    m.fluctuation = FluctuationKind::kRelative;
    m.bound = 0.1;
    m.seed = 7;
    return transfer_curve(apply_noise(make_transfer_schedule(100, 10.0, 3.0, 0.1), m));
  }
  if (suite == "fig3") {
    std::vector<double> offsets;
    for (int i = -20; i <= 20; ++i) offsets.push_back(0.5 * i);
    return timing_table(timing_scan(100, 30.0, 3.0, 0.1, offsets));
  }
  if (suite == "robustness") {
    // fluctuation column: 0 none, 1 relative, 2 absolute.
    CsvTable t{{"systematic_scale", "fluctuation", "bound", "seed", "trials", "mean", "stderr"}, {}};
    struct Row {
      double scale;
      FluctuationKind kind;
      double bound;
    };
    for (const Row& r : {Row{1.0, FluctuationKind::kNone, 0.0}, Row{1.05, FluctuationKind::kNone, 0.0},
                         Row{1.0, FluctuationKind::kRelative, 0.1}, Row{1.0, FluctuationKind::kAbsolute, 0.01}}) {
      RobustnessConfig c;
      c.model.systematic_scale = r.scale;
      c.model.fluctuation = r.kind;
      c.model.bound = r.bound;
      c.model.seed = 1;
      c.trials = r.kind == FluctuationKind::kNone ? 1 : 200;
      const RobustnessReport rep = monte_carlo(c);
      t.rows.push_back({r.scale, static_cast<double>(r.kind), r.bound, 1.0, static_cast<double>(c.trials),
                        rep.mean_fidelity, rep.stderr_fidelity});
    }
    return t;
  }
  if (suite == "junction-curve") {
    CsvTable t{{"k", "T_j2_0", "T_j2_0.5", "T_j2_1"}, {}};
    for (int i = 1; i < 200; ++i) {
      const double k = kPi * i / 200.0;
      std::vector<double> row{k};
      for (double j2 : {0.0, 0.5, 1.0}) {
        JunctionSpec s;
        s.j2 = j2;
        row.push_back(transmission_probability(k, s));
      }
      t.rows.push_back(std::move(row));
    }
    return t;
  }
  throw InvalidArgument("unknown golden suite '" + suite + "'");
}

}  // namespace spinline::io
