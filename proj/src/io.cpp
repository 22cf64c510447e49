#include "spinline/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace spinline::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string CsvTable::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
  return out.str();
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      table.header = cells;
      first = false;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) {
      // strtod rather than stod: subnormal cells are valid data.
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || end != c.c_str() + c.size()) throw InvalidArgument("non-numeric CSV cell '" + c + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  const fs::path tmp = dir / ("." + target.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + path);
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw InvalidArgument("write failed for " + path);
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InvalidArgument("cannot move output into " + path);
  }
}

CsvTable schedule_table(const PulseSchedule& schedule) {
  CsvTable t{{"t", "omega_in", "omega_out"}, {}};
  for (std::size_t k = 0; k < schedule.sample_count(); ++k) {
    t.rows.push_back({static_cast<double>(k) * schedule.dt, schedule.omega_in[k], schedule.omega_out[k]});
  }
  return t;
}

CsvTable trajectory_long_table(const Trajectory& trajectory) {
  CsvTable t{{"t", "site", "re", "im"}, {}};
  for (std::size_t s = 0; s < trajectory.states.size(); ++s) {
    const AmplitudeVector& v = trajectory.states[s];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      t.rows.push_back({trajectory.snapshot_times[s], static_cast<double>(i), v[i].real(), v[i].imag()});
    }
  }
  return t;
}

CsvTable trajectory_summary_table(const Trajectory& trajectory) {
  CsvTable t{{"t", "fidelity"}, {}};
  for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
    t.rows.push_back({trajectory.times[k], trajectory.fidelity_series[k]});
  }
  return t;
}

CsvTable timing_table(const std::vector<TimingPoint>& curve) {
  CsvTable t{{"offset", "fidelity"}, {}};
  for (const TimingPoint& p : curve) t.rows.push_back({p.offset, p.fidelity});
  return t;
}

nlohmann::json to_json(const CoolingLog& log) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const CoolingRound& r : log.rounds) {
    rounds.push_back({{"round", r.round_index},
                      {"detection_probability", r.detection_probability},
                      {"left_probability", r.left_probability},
                      {"right_probability", r.right_probability},
                      {"removed", r.removed}});
  }
  return {{"rounds", rounds}, {"residual_excitation_probability", log.residual_excitation_probability}};
}

nlohmann::json to_json(const NoiseModel& model) {
  const char* kind = model.fluctuation == FluctuationKind::kNone
                         ? "none"
                         : (model.fluctuation == FluctuationKind::kRelative ? "relative" : "absolute");
  return {{"offset_in", model.offset_in},   {"offset_out", model.offset_out}, {"systematic_scale", model.systematic_scale},
          {"fluctuation", kind},            {"bound", model.bound},           {"seed", model.seed}};
}

nlohmann::json to_json(const RobustnessReport& report, const RobustnessConfig& config) {
  return {{"config",
           {{"N", config.n_chain}, {"delta", config.width}, {"f", config.f}, {"dt", config.dt}, {"noise", to_json(config.model)}}},
          {"trials", report.trials},
          {"mean", report.mean_fidelity},
          {"stderr", report.stderr_fidelity}};
}

}  // namespace spinline::io
