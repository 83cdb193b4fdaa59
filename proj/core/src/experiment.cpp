#include "evonet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

#include <json.hpp>

#include "evonet/edge_list.hpp"
#include "evonet/error.hpp"

namespace evonet {
namespace {

using OrderedJson = nlohmann::ordered_json;

// Thresholds of the cell merged with metrics_at, strictly decreasing.
std::vector<double> merged_thresholds(const std::vector<double>& a,
                                      const std::vector<double>& b) {
  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end(), std::greater<>());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

std::optional<std::size_t> crossing_for(const ConvergenceTrace& trace, double threshold) {
  for (std::size_t k = 0; k < trace.thresholds.size(); ++k) {
    if (trace.thresholds[k] == threshold) return trace.crossings[k];
  }
  return std::nullopt;
}

// Restricts a trace run with merged thresholds back to the cell's own.
ConvergenceTrace project(const ConvergenceTrace& full, const std::vector<double>& thresholds) {
  ConvergenceTrace out;
  out.thresholds = thresholds;
  out.b_per_round = full.b_per_round;
  out.stop_reason = full.stop_reason;
  for (double t : thresholds) out.crossings.push_back(crossing_for(full, t));
  return out;
}

MemberResult run_member(const ExperimentConfig& config, const CellSpec& cell,
                        std::size_t k) {
  MemberResult m;
  m.index = k;
  m.topology_seed = member_topology_seed(config.base_seed, k);
  m.data_seed = member_data_seed(config.base_seed, k);
  const auto start = std::chrono::steady_clock::now();
  try {
    RunConfig run_config = cell.run;
    run_config.topology_seed = m.topology_seed;
    run_config.data_seed = m.data_seed;
    run_config.thresholds = merged_thresholds(cell.run.thresholds, config.metrics_at);

    CrossingObserver observer;
    if (!config.metrics_at.empty()) {
      observer = [&](double threshold, std::size_t round, const Topology& topology,
                     std::span<const double>) {
        if (std::find(config.metrics_at.begin(), config.metrics_at.end(), threshold) ==
            config.metrics_at.end()) {
          return;
        }
        m.metrics.push_back({threshold, round, measure(topology, config.metrics)});
        if (config.output.snapshots) m.snapshots.emplace_back(threshold, topology);
      };
    }

    RunResult result;
    if (cell.run.mode == Mode::kFrozen) {
      FrozenResult frozen =
          frozen_pipeline(run_config, cell.lattice, cell.distribution, observer);
      m.evolution_rounds = frozen.evolution_rounds;
      result = std::move(frozen.fixed);
    } else {
      Rng data_rng(m.data_seed);
      result = run(run_config, build_moore_lattice(cell.lattice),
                   generate(cell.distribution, cell.lattice.rows, cell.lattice.cols, data_rng),
                   observer);
    }
    m.trace = project(result.trace, cell.run.thresholds);
    m.initial_mean = result.initial_mean;
    m.final_mean = result.final_mean;
    m.ok = true;
  } catch (const std::exception& e) {
    m.ok = false;
    m.error = e.what();
    m.metrics.clear();
    m.snapshots.clear();
  }
  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return m;
}

std::string cell_label(const CellSpec& cell) {
  std::string label =
      std::to_string(cell.lattice.rows) + "x" + std::to_string(cell.lattice.cols);
  if (cell.run.mode == Mode::kFrozen) {
    label += " freeze<" + format_b(cell.run.freeze_threshold);
  }
  return label;
}

std::string regime_name(const CellSpec& cell) {
  return std::string(to_string(cell.run.mode)) + "_" + to_string(cell.distribution.kind);
}

std::string cell_slug(std::size_t index, const CellSpec& cell) {
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "c%02zu_", index);
  std::string slug = prefix + regime_name(cell) + "_" + std::to_string(cell.lattice.rows) +
                     "x" + std::to_string(cell.lattice.cols);
  if (cell.run.mode == Mode::kFrozen) slug += "_freeze" + format_b(cell.run.freeze_threshold);
  return slug;
}

std::string format_count(double value) {
  char buf[64];
  const bool whole = std::floor(value) == value;
  auto [ptr, ec] = whole ? std::to_chars(buf, buf + sizeof buf, static_cast<long long>(value))
                         : std::to_chars(buf, buf + sizeof buf, value,
                                         std::chars_format::fixed, 1);
  return std::string(buf, ptr);
}

OrderedJson metrics_json(const MetricsReport& r) {
  OrderedJson j;
  j["method"] = r.exact() ? "exact" : "sampled";
  j["sample_size"] = r.sample_size;
  j["diameter"] = r.diameter;
  j["diameter_is_lower_bound"] = !r.exact();
  j["cpl"] = r.cpl;
  j["clustering"] = r.clustering;
  j["strongly_connected"] = r.strongly_connected;
  j["reachable_pairs"] = r.reachable_pairs;
  return j;
}

OrderedJson optional_json(const std::optional<std::size_t>& v) {
  return v ? OrderedJson(*v) : OrderedJson(nullptr);
}

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
  written.push_back(path);
}

}  // namespace

std::uint64_t member_topology_seed(std::uint64_t base_seed, std::size_t k) {
  return mix_seed(base_seed, 2 * static_cast<std::uint64_t>(k));
}

std::uint64_t member_data_seed(std::uint64_t base_seed, std::size_t k) {
  return mix_seed(base_seed, 2 * static_cast<std::uint64_t>(k) + 1);
}

std::string format_b(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value,
                                 std::chars_format::scientific, 5);
  return std::string(buf, ptr);
}

CrossingSummary summarize(double threshold,
                          std::span<const std::optional<std::size_t>> rounds) {
  CrossingSummary s;
  s.threshold = threshold;
  if (rounds.empty()) return s;
  constexpr double kNever = std::numeric_limits<double>::infinity();
  std::vector<double> values;
  for (const auto& r : rounds) {
    values.push_back(r ? static_cast<double>(*r) : kNever);
    if (r) {
      ++s.reached;
      s.min = s.min ? std::min(*s.min, *r) : *r;
      s.max = s.max ? std::max(*s.max, *r) : *r;
    }
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  const double median =
      values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  if (std::isfinite(median)) s.median = median;
  return s;
}

bool CellResult::failed() const {
  return std::none_of(members.begin(), members.end(),
                      [](const MemberResult& m) { return m.ok; });
}

ExperimentReport run_experiment(const ExperimentConfig& config, const ProgressFn& progress) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = config;

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(),
                                                     config.seeds));
  for (const CellSpec& cell : config.cells) {
    CellResult result;
    result.spec = cell;
    result.label = cell_label(cell);
    result.members.resize(config.seeds);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t k = next++; k < config.seeds; k = next++) {
        result.members[k] = run_member(config, cell, k);
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    for (std::size_t t = 0; t < cell.run.thresholds.size(); ++t) {
      std::vector<std::optional<std::size_t>> rounds;
      for (const MemberResult& m : result.members) {
        if (m.ok) rounds.push_back(m.trace.crossings[t]);
      }
      result.summary.push_back(summarize(cell.run.thresholds[t], rounds));
    }
    if (progress) progress(result);
    report.cells.push_back(std::move(result));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

int exit_code(const ExperimentReport& report) {
  const auto failed = static_cast<std::size_t>(std::count_if(
      report.cells.begin(), report.cells.end(), [](const CellResult& c) { return c.failed(); }));
  if (failed == 0) return 0;
  return failed == report.cells.size() ? 2 : 3;
}

std::vector<RegimeTable> regime_tables(const ExperimentReport& report) {
  std::vector<RegimeTable> tables;
  std::map<std::string, std::size_t> by_name;
  for (const CellResult& cell : report.cells) {
    const std::string name = regime_name(cell.spec);
    auto [it, inserted] = by_name.emplace(name, tables.size());
    if (inserted) tables.push_back({name, {}, {}});
    RegimeTable& table = tables[it->second];
    table.thresholds = merged_thresholds(table.thresholds, cell.spec.run.thresholds);
  }
  for (const CellResult& cell : report.cells) {
    if (cell.failed()) continue;
    RegimeTable& table = tables[by_name.at(regime_name(cell.spec))];
    RegimeTable::Row row{cell.label, {}};
    for (double t : table.thresholds) {
      std::optional<double> median;
      for (const CrossingSummary& s : cell.summary) {
        if (s.threshold == t) median = s.median;
      }
      row.medians.push_back(median);
    }
    table.rows.push_back(std::move(row));
  }
  return tables;
}

std::string render_csv(const RegimeTable& table) {
  std::string out = "size";
  for (double t : table.thresholds) out += ",b<" + format_b(t);
  out += '\n';
  for (const RegimeTable::Row& row : table.rows) {
    out += row.label;
    for (const auto& m : row.medians) {
      out += ',';
      if (m) out += format_count(*m);
    }
    out += '\n';
  }
  return out;
}

std::string render_trace_csv(const ConvergenceTrace& trace) {
  std::string out = "round,b\n";
  for (std::size_t t = 0; t < trace.b_per_round.size(); ++t) {
    out += std::to_string(t) + "," + format_b(trace.b_per_round[t]) + "\n";
  }
  out += "\nthreshold,round\n";
  for (std::size_t k = 0; k < trace.thresholds.size(); ++k) {
    out += format_b(trace.thresholds[k]) + ",";
    if (trace.crossings[k]) out += std::to_string(*trace.crossings[k]);
    out += "\n";
  }
  return out;
}

std::string render_metrics_json(const MetricsReport& report) {
  return metrics_json(report).dump(2) + "\n";
}

std::string render_metrics_csv(const MetricsReport& r, bool header) {
  std::string out;
  if (header) out += "method,sample_size,diameter,cpl,clustering,strongly_connected\n";
  char cpl[64];
  char cc[64];
  auto e1 = std::to_chars(cpl, cpl + sizeof cpl, r.cpl, std::chars_format::fixed, 4).ptr;
  auto e2 = std::to_chars(cc, cc + sizeof cc, r.clustering, std::chars_format::fixed, 6).ptr;
  out += std::string(r.exact() ? "exact" : "sampled") + "," + std::to_string(r.sample_size) +
         "," + std::to_string(r.diameter) + "," + std::string(cpl, e1) + "," +
         std::string(cc, e2) + "," + (r.strongly_connected ? "true" : "false") + "\n";
  return out;
}

std::string render_json(const ExperimentReport& report) {
  OrderedJson root;
  root["schema"] = "evonet.report/1";
  root["version"] = std::string(kVersion);
  root["config"] = OrderedJson::parse(emit_config(report.config));

  OrderedJson cells = OrderedJson::array();
  OrderedJson timing_cells = OrderedJson::array();
  for (const CellResult& cell : report.cells) {
    OrderedJson c;
    c["label"] = cell.label;
    c["regime"] = regime_name(cell.spec);
    c["mode"] = to_string(cell.spec.run.mode);
    c["rows"] = cell.spec.lattice.rows;
    c["cols"] = cell.spec.lattice.cols;
    c["distribution"] = to_string(cell.spec.distribution.kind);
    c["thresholds"] = cell.spec.run.thresholds;
    c["status"] = cell.failed() ? "failed" : "ok";

    OrderedJson summary = OrderedJson::array();
    for (const CrossingSummary& s : cell.summary) {
      OrderedJson e;
      e["threshold"] = s.threshold;
      e["median"] = s.median ? OrderedJson(*s.median) : OrderedJson(nullptr);
      e["min"] = optional_json(s.min);
      e["max"] = optional_json(s.max);
      e["reached"] = s.reached;
      summary.push_back(std::move(e));
    }
    c["summary"] = std::move(summary);

    OrderedJson members = OrderedJson::array();
    OrderedJson member_seconds = OrderedJson::array();
    for (const MemberResult& m : cell.members) {
      OrderedJson e;
      e["index"] = m.index;
      e["topology_seed"] = m.topology_seed;
      e["data_seed"] = m.data_seed;
      e["status"] = m.ok ? "ok" : "failed";
      if (!m.ok) {
        e["error"] = m.error;
      } else {
        e["stop_reason"] = to_string(m.trace.stop_reason);
        e["rounds"] = m.trace.rounds();
        if (cell.spec.run.mode == Mode::kFrozen) e["evolution_rounds"] = m.evolution_rounds;
        OrderedJson crossings = OrderedJson::array();
        for (std::size_t k = 0; k < m.trace.thresholds.size(); ++k) {
          crossings.push_back({{"threshold", m.trace.thresholds[k]},
                               {"round", optional_json(m.trace.crossings[k])}});
        }
        e["crossings"] = std::move(crossings);
        e["initial_b"] = m.trace.b_per_round.front();
        e["final_b"] = m.trace.b_per_round.back();
        e["initial_mean"] = m.initial_mean;
        e["final_mean"] = m.final_mean;
        OrderedJson metrics = OrderedJson::array();
        for (const SnapshotMetrics& s : m.metrics) {
          OrderedJson mj = metrics_json(s.report);
          mj["threshold"] = s.threshold;
          mj["round"] = s.round;
          metrics.push_back(std::move(mj));
        }
        e["metrics"] = std::move(metrics);
      }
      members.push_back(std::move(e));
      member_seconds.push_back(m.wall_seconds);
    }
    c["members"] = std::move(members);
    cells.push_back(std::move(c));
    timing_cells.push_back({{"label", cell.label}, {"member_seconds", member_seconds}});
  }
  root["cells"] = std::move(cells);
  root["timing"] = {{"total_seconds", report.wall_seconds}, {"cells", timing_cells}};
  return root.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_report(const ExperimentReport& report) {
  namespace fs = std::filesystem;
  const OutputSpec& out = report.config.output;
  const fs::path dir(out.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  if (out.format != OutputFormat::kJson) {
    for (const RegimeTable& table : regime_tables(report)) {
      write_file(dir / (table.name + ".csv"), render_csv(table), written);
    }
  }
  if (out.format != OutputFormat::kCsv) {
    write_file(dir / "report.json", render_json(report), written);
  }
  if (out.traces || out.snapshots) {
    for (std::size_t c = 0; c < report.cells.size(); ++c) {
      const CellResult& cell = report.cells[c];
      const std::string slug = cell_slug(c, cell.spec);
      for (const MemberResult& m : cell.members) {
        if (!m.ok) continue;
        const std::string member = slug + "_m" + std::to_string(m.index);
        if (out.traces) {
          fs::create_directories(dir / "traces", ec);
          write_file(dir / "traces" / (member + ".csv"), render_trace_csv(m.trace), written);
        }
        if (out.snapshots) {
          fs::create_directories(dir / "snapshots", ec);
          for (const auto& [threshold, topology] : m.snapshots) {
            const fs::path path =
                dir / "snapshots" / (member + "_b" + format_b(threshold) + ".edges");
            save_edge_list(path, topology);
            written.push_back(path);
          }
        }
      }
    }
  }
  return written;
}

}  // namespace evonet
