#pragma once

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "rbcsim/analysis.hpp"
#include "rbcsim/circuit.hpp"
#include "rbcsim/cluster_state.hpp"
#include "rbcsim/ensemble.hpp"
#include "rbcsim/errors.hpp"
#include "rbcsim/version.hpp"

namespace rbcsim {

// Shortest round-trip decimal form; CSV files reload bit-identically.
inline std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("bad number in table: " + s);
  return v;
}

struct DynamicsRow {
  uint32_t t = 0;
  std::string observable;
  uint32_t element = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  uint32_t n_traj = 0;
};

inline std::vector<SweepRow> ensemble_to_sweep_rows(const EnsembleResult& res,
                                                    uint32_t L, double p) {
  std::vector<SweepRow> rows;
  rows.reserve(res.labels.size());
  for (size_t k = 0; k < res.labels.size(); ++k) {
    const SlotLabel& lab = res.labels[k];
    rows.push_back({L, p, observable_name(lab.obs), lab.element, res.mean[k],
                    res.stderr_[k], res.n_traj});
  }
  return rows;
}

inline std::vector<DynamicsRow> ensemble_to_dynamics_rows(
    const EnsembleResult& res) {
  std::vector<DynamicsRow> rows;
  rows.reserve(res.labels.size());
  for (size_t k = 0; k < res.labels.size(); ++k) {
    const SlotLabel& lab = res.labels[k];
    rows.push_back({lab.time, observable_name(lab.obs), lab.element,
                    res.mean[k], res.stderr_[k], res.n_traj});
  }
  return rows;
}

inline void write_sweep_csv(const std::filesystem::path& path,
                            const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "L,p,observable,element,mean,stderr,n_traj\n";
  for (const auto& r : rows)
    out << r.L << ',' << format_double(r.p) << ',' << r.observable << ','
        << r.element << ',' << format_double(r.mean) << ','
        << format_double(r.stderr_) << ',' << r.n_traj << '\n';
}

inline void write_dynamics_csv(const std::filesystem::path& path,
                               const std::vector<DynamicsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t,observable,element,mean,stderr,n_traj\n";
  for (const auto& r : rows)
    out << r.t << ',' << r.observable << ',' << r.element << ','
        << format_double(r.mean) << ',' << format_double(r.stderr_) << ','
        << r.n_traj << '\n';
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<std::vector<std::string>> read_table(
    const std::filesystem::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("empty table: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw ConfigError("unexpected header in " + path.string() + ": " + line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
    if (rows.back().size() != split_csv_line(header).size())
      throw ConfigError("ragged row in " + path.string());
  }
  return rows;
}

}  // namespace detail

inline SweepDataset read_sweep_csv(const std::filesystem::path& path) {
  SweepDataset ds;
  for (const auto& f :
       detail::read_table(path, "L,p,observable,element,mean,stderr,n_traj")) {
    SweepRow r;
    r.L = static_cast<uint32_t>(std::stoul(f[0]));
    r.p = parse_double(f[1]);
    r.observable = f[2];
    r.element = static_cast<uint32_t>(std::stoul(f[3]));
    r.mean = parse_double(f[4]);
    r.stderr_ = parse_double(f[5]);
    r.n_traj = static_cast<uint32_t>(std::stoul(f[6]));
    ds.rows.push_back(std::move(r));
  }
  ds.validate();
  return ds;
}

inline std::vector<DynamicsRow> read_dynamics_csv(
    const std::filesystem::path& path) {
  std::vector<DynamicsRow> rows;
  for (const auto& f :
       detail::read_table(path, "t,observable,element,mean,stderr,n_traj")) {
    DynamicsRow r;
    r.t = static_cast<uint32_t>(std::stoul(f[0]));
    r.observable = f[1];
    r.element = static_cast<uint32_t>(std::stoul(f[2]));
    r.mean = parse_double(f[3]);
    r.stderr_ = parse_double(f[4]);
    r.n_traj = static_cast<uint32_t>(std::stoul(f[5]));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline nlohmann::json phase_to_json(PhaseValue p) {
  if (p.is_exact())
    return {{"mode", "exact"}, {"value", p.exact_units()}};
  return {{"mode", "real"}, {"value", p.to_radians()}};
}

// Structural dump of the full engine state; keys are cluster labels.
inline nlohmann::json debug_dump(const ClusterState& st) {
  nlohmann::json j;
  j["n_sites"] = st.n_sites();
  j["n_clusters"] = st.n_clusters();
  std::vector<uint32_t> labels(st.n_sites());
  std::vector<int> bits(st.n_sites());
  for (uint32_t s = 0; s < st.n_sites(); ++s) {
    labels[s] = st.label_of(s);
    bits[s] = st.bit_of(s);
  }
  j["site_label"] = labels;
  j["site_bit"] = bits;
  auto& clusters = j["clusters"] = nlohmann::json::object();
  for (const auto& c : st.snapshot().clusters) {
    uint32_t lbl = st.label_of(c.sites[0]);
    clusters[std::to_string(lbl)] = {{"size", c.sites.size()},
                                     {"members", c.sites},
                                     {"phase", phase_to_json(c.phase)}};
  }
  return j;
}

inline void write_json(const std::filesystem::path& path,
                       const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Write-then-rename so readers never observe a half-written file and an
// interrupted run leaves either the old contents or the new, nothing else.
inline void write_json_atomic(const std::filesystem::path& path,
                              const nlohmann::json& j) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  write_json(tmp, j);
  std::filesystem::rename(tmp, path);
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

// manifest.json: resolved configuration echo plus provenance.
inline void write_manifest(const std::filesystem::path& dir,
                           const nlohmann::json& resolved_config,
                           const std::string& command) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["version"] = version_string;
  j["command"] = command;
  auto now = std::chrono::system_clock::now();
  auto t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  j["created_utc"] = buf;
  j["config"] = resolved_config;
  write_json(dir / "manifest.json", j);
}

// Collects per-trajectory records as JSON lines, written out in index order.
class JsonlRecordSink : public RecordSink {
 public:
  explicit JsonlRecordSink(uint32_t n_traj) : lines_(n_traj) {}

  void take(uint32_t index, const TrajectoryRecord& rec) override {
    nlohmann::json j;
    j["trajectory"] = index;
    j["seed"] = rec.seed;
    j["values"] = rec.values;
    lines_[index] = j.dump();
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& l : lines_) out << l << '\n';
  }

 private:
  std::vector<std::string> lines_;
};

inline nlohmann::json fit_to_json(const FitResult& r) {
  return {{"slope", r.slope},
          {"intercept", r.intercept},
          {"slope_se", r.slope_se},
          {"intercept_se", r.intercept_se},
          {"chi2", r.chi2},
          {"r2", r.r2},
          {"n_points", r.n_points},
          {"window", {r.window_lo, r.window_hi}}};
}

inline nlohmann::json collapse_to_json(const CollapseResult& r) {
  return {{"pc", r.pc},
          {"nu", r.nu},
          {"quality", r.quality},
          {"n_points", r.n_points},
          {"grid_pc", r.grid_pc},
          {"grid_nu", r.grid_nu},
          {"grid_quality", r.grid_q}};
}

}  // namespace rbcsim
