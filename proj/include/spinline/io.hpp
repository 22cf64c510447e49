#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "spinline/cooling.hpp"
#include "spinline/evolve.hpp"
#include "spinline/noise.hpp"
#include "spinline/pulses.hpp"

namespace spinline::io {

// 17 significant digits in scientific notation.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string to_string() const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

// Writes through a temporary file in the same directory and renames it
// into place. Throws InvalidArgument when the target is not writable.
void write_atomic(const std::string& path, const std::string& content);

CsvTable schedule_table(const PulseSchedule& schedule);
// Long format: t, site, re, im for every stored snapshot.
CsvTable trajectory_long_table(const Trajectory& trajectory);
CsvTable trajectory_summary_table(const Trajectory& trajectory);
CsvTable timing_table(const std::vector<TimingPoint>& curve);

nlohmann::json to_json(const CoolingLog& log);
nlohmann::json to_json(const RobustnessReport& report, const RobustnessConfig& config);
nlohmann::json to_json(const NoiseModel& model);

// One CLI invocation. Parameters hold the fully merged values (config file
// then flags), keyed by their JSON names.
struct RunConfig {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  std::string output_path;
  std::string format = "csv";

  bool operator==(const RunConfig& other) const = default;
};

const std::vector<std::string>& run_commands();
nlohmann::json to_json(const RunConfig& config);
// Throws InvalidArgument on an unknown command, format or malformed fields.
RunConfig run_config_from_json(const nlohmann::json& j);

// Regression tables, regenerated by the CLI `golden` command.
const std::vector<std::string>& golden_suites();
CsvTable golden_table(const std::string& suite);

}  // namespace spinline::io
