// evonet: run averaging experiments on rewiring 8-regular networks and
// measure snapshot topologies.
//
//   evonet --rows 32 --cols 32 --mode evolutionary --seeds 11 --out out/
//   evonet --config table1.json --format csv
//   evonet metrics --input out/snapshots/x.edges --format json

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "evonet/analytics.hpp"
#include "evonet/edge_list.hpp"
#include "evonet/error.hpp"
#include "evonet/experiment.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

template <class T, class Parse>
std::optional<T> convert(const std::string& text, const char* flag, Parse parse) {
  if (text.empty()) return std::nullopt;
  try {
    return parse(text);
  } catch (const std::exception& e) {
    throw evonet::ConfigError(flag, e.what());
  }
}

int run_metrics(const std::string& input, std::size_t sample, std::uint64_t seed,
                const std::string& format) {
  const evonet::Topology topology = evonet::load_edge_list(input);
  const auto violations = evonet::validate(topology);
  if (!violations.empty()) {
    std::cerr << input << ": invalid topology (" << violations.size()
              << " violations), first: node " << violations.front().node << " "
              << evonet::to_string(violations.front().rule) << "\n";
    return kConfigError;
  }
  evonet::MetricsReport report;
  if (sample == 0) {
    report = evonet::shortest_path_stats(topology);
  } else {
    evonet::Rng rng(seed);
    report = evonet::sampled_cpl(topology, sample, rng);
  }
  std::cout << (format == "csv" ? evonet::render_metrics_csv(report, true)
                                : evonet::render_metrics_json(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collective averaging on rewiring 8-regular directed networks"};
  app.require_subcommand(0, 1);

  std::string config_path, mode, distribution, thresholds, metrics_at, out_dir, format;
  std::optional<std::size_t> rows, cols, seeds, max_rounds;
  std::optional<std::uint64_t> seed;
  std::optional<double> stop_epsilon, freeze_at;
  bool traces = false;
  bool snapshots = false;
  bool quiet = false;

  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--mode", mode, "evolutionary | frozen | automaton");
  app.add_option("--rows", rows, "lattice rows");
  app.add_option("--cols", cols, "lattice columns");
  app.add_option("--distribution", distribution,
                 "uniform[:LO,HI] | quadrant[:V1,V2,V3,V4]");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--seeds", seeds, "ensemble size per cell");
  app.add_option("--thresholds", thresholds, "comma-separated, strictly decreasing");
  app.add_option("--stop-epsilon", stop_epsilon, "stop when |b_t - b_t-1| falls below");
  app.add_option("--max-rounds", max_rounds, "round limit");
  app.add_option("--freeze-at", freeze_at, "frozen mode: b at which the network is fixed");
  app.add_option("--metrics-at", metrics_at, "comma-separated b values to measure topology at");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "csv | json | both");
  app.add_flag("--traces", traces, "write per-member round,b traces");
  app.add_flag("--snapshots", snapshots, "write edge lists at --metrics-at crossings");
  app.add_flag("-q,--quiet", quiet, "no progress on stderr");

  auto* metrics_cmd = app.add_subcommand("metrics", "measure an edge-list snapshot");
  std::string input;
  std::size_t sample = 0;
  std::uint64_t metrics_seed = 1;
  std::string metrics_format = "json";
  metrics_cmd->add_option("--input", input, "edge-list file")->required()->check(CLI::ExistingFile);
  metrics_cmd->add_option("--sample", sample, "sampled sources (0 = exact)");
  metrics_cmd->add_option("--seed", metrics_seed, "sampling seed");
  metrics_cmd->add_option("--format", metrics_format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (metrics_cmd->parsed()) return run_metrics(input, sample, metrics_seed, metrics_format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }

  evonet::ExperimentConfig config;
  try {
    if (!config_path.empty()) config = evonet::load_config(config_path);
    evonet::Overrides o;
    o.mode = convert<evonet::Mode>(mode, "--mode", [](const std::string& s) {
      auto m = evonet::parse_mode(s);
      if (!m) throw evonet::InvalidSpec("expected evolutionary, frozen or automaton");
      return *m;
    });
    o.rows = rows;
    o.cols = cols;
    o.distribution = convert<evonet::DistributionSpec>(
        distribution, "--distribution",
        [](const std::string& s) { return evonet::parse_distribution(s); });
    o.seed = seed;
    o.seeds = seeds;
    o.thresholds = convert<std::vector<double>>(
        thresholds, "--thresholds", [](const std::string& s) { return evonet::parse_number_list(s); });
    o.stop_epsilon = stop_epsilon;
    o.max_rounds = max_rounds;
    o.freeze_at = freeze_at;
    o.metrics_at = convert<std::vector<double>>(
        metrics_at, "--metrics-at", [](const std::string& s) { return evonet::parse_number_list(s); });
    if (!out_dir.empty()) o.out_dir = out_dir;
    o.format = convert<evonet::OutputFormat>(format, "--format", [](const std::string& s) {
      auto f = evonet::parse_format(s);
      if (!f) throw evonet::InvalidSpec("expected csv, json or both");
      return *f;
    });
    if (traces) o.traces = true;
    if (snapshots) o.snapshots = true;
    evonet::apply_overrides(config, o);
  } catch (const evonet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const auto report = evonet::run_experiment(config, [&](const evonet::CellResult& cell) {
      if (quiet) return;
      std::cerr << cell.label << " [" << evonet::to_string(cell.spec.run.mode) << ", "
                << evonet::to_string(cell.spec.distribution.kind) << "]";
      for (const auto& s : cell.summary) {
        std::cerr << "  b<" << evonet::format_b(s.threshold) << ": ";
        if (s.median) {
          std::cerr << *s.median;
        } else {
          std::cerr << "-";
        }
      }
      if (cell.failed()) std::cerr << "  FAILED: " << cell.members.front().error;
      std::cerr << "\n";
    });
    for (const auto& path : evonet::write_report(report)) std::cout << path.string() << "\n";
    return evonet::exit_code(report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
