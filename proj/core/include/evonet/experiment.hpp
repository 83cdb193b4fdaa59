#ifndef EVONET_EXPERIMENT_HPP
#define EVONET_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evonet/analytics.hpp"
#include "evonet/datagen.hpp"
#include "evonet/dynamics.hpp"
#include "evonet/topology.hpp"

namespace evonet {

inline constexpr std::string_view kVersion = "1.0.0";

enum class OutputFormat { kCsv, kJson, kBoth };

std::string_view to_string(OutputFormat format);
std::optional<OutputFormat> parse_format(std::string_view text);

// One grid cell: a lattice size run under one regime and data layout. The
// seeds inside `run` are ignored; ensemble members derive theirs from the
// experiment's base seed.
struct CellSpec {
  LatticeSpec lattice;
  RunConfig run;
  DistributionSpec distribution;

  bool operator==(const CellSpec&) const = default;
};

struct OutputSpec {
  std::string dir = "out";
  OutputFormat format = OutputFormat::kBoth;
  bool traces = false;     // per-member round,b CSV files
  bool snapshots = false;  // edge lists at each metrics_at crossing

  bool operator==(const OutputSpec&) const = default;
};

struct ExperimentConfig {
  std::vector<CellSpec> cells;
  std::size_t seeds = 1;
  std::uint64_t base_seed = 1;
  std::vector<double> metrics_at;
  MetricsOptions metrics;
  OutputSpec output;

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses a JSON config document. Throws ConfigError naming the line/column
// for syntax errors and the field path for semantic ones.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical JSON form with every field explicit; parse_config accepts it.
std::string emit_config(const ExperimentConfig& config);

// Throws ConfigError for invalid cells, empty grids or zero ensembles.
void validate(const ExperimentConfig& config);

// Command-line values that replace config-file settings in every cell.
struct Overrides {
  std::optional<Mode> mode;
  std::optional<std::size_t> rows;
  std::optional<std::size_t> cols;
  std::optional<DistributionSpec> distribution;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> seeds;
  std::optional<std::vector<double>> thresholds;
  std::optional<double> stop_epsilon;
  std::optional<std::size_t> max_rounds;
  std::optional<double> freeze_at;
  std::optional<std::vector<double>> metrics_at;
  std::optional<std::string> out_dir;
  std::optional<OutputFormat> format;
  std::optional<bool> traces;
  std::optional<bool> snapshots;
};

// With no cells yet, rows and cols create the single cell.
void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

// "uniform", "uniform:LO,HI", "quadrant" or "quadrant:V1,V2,V3,V4".
DistributionSpec parse_distribution(std::string_view text);
std::vector<double> parse_number_list(std::string_view text);

struct SnapshotMetrics {
  double threshold = 0.0;
  std::size_t round = 0;
  MetricsReport report;
};

struct MemberResult {
  std::size_t index = 0;
  std::uint64_t topology_seed = 0;
  std::uint64_t data_seed = 0;
  bool ok = false;
  std::string error;
  ConvergenceTrace trace;
  std::size_t evolution_rounds = 0;  // frozen mode only
  double initial_mean = 0.0;
  double final_mean = 0.0;
  std::vector<SnapshotMetrics> metrics;
  std::vector<std::pair<double, Topology>> snapshots;
  double wall_seconds = 0.0;
};

struct CrossingSummary {
  double threshold = 0.0;
  // Median over members; a member that never crossed counts as +infinity.
  std::optional<double> median;
  std::optional<std::size_t> min;
  std::optional<std::size_t> max;
  std::size_t reached = 0;
};

struct CellResult {
  CellSpec spec;
  std::string label;
  std::vector<MemberResult> members;
  std::vector<CrossingSummary> summary;

  bool failed() const;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CellResult> cells;
  double wall_seconds = 0.0;
};

// Seeds of ensemble member k; identical across cells so regimes compare on
// the same draws.
std::uint64_t member_topology_seed(std::uint64_t base_seed, std::size_t k);
std::uint64_t member_data_seed(std::uint64_t base_seed, std::size_t k);

CrossingSummary summarize(double threshold,
                          std::span<const std::optional<std::size_t>> rounds);

using ProgressFn = std::function<void(const CellResult& cell)>;

// Runs every cell's ensemble. Member failures are recorded, never thrown.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                const ProgressFn& progress = {});

// 0 success, 2 every cell failed, 3 some cells failed.
int exit_code(const ExperimentReport& report);

// One table per regime and data layout: rows are sizes, columns thresholds.
struct RegimeTable {
  std::string name;
  std::vector<double> thresholds;
  struct Row {
    std::string label;
    std::vector<std::optional<double>> medians;
  };
  std::vector<Row> rows;
};

std::vector<RegimeTable> regime_tables(const ExperimentReport& report);

std::string render_csv(const RegimeTable& table);
std::string render_trace_csv(const ConvergenceTrace& trace);
// Full bundle; wall-clock values live only under the top-level "timing" key.
std::string render_json(const ExperimentReport& report);
std::string render_metrics_json(const MetricsReport& report);
std::string render_metrics_csv(const MetricsReport& report, bool header);

// b values: scientific notation, 6 significant digits, locale independent.
std::string format_b(double value);

// Writes tables, bundle, traces and snapshots under output.dir. Returns the
// paths written. Throws IoError with the failing path.
std::vector<std::filesystem::path> write_report(const ExperimentReport& report);

}  // namespace evonet

#endif  // EVONET_EXPERIMENT_HPP
