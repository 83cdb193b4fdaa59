#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "evonet/error.hpp"
#include "evonet/experiment.hpp"

namespace evonet {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

const std::set<std::string> kRunKeys = {
    "mode",       "rows",         "cols",     "sizes",     "periodic",
    "distribution", "thresholds", "stop_epsilon", "max_rounds", "freeze_at",
    "reuse_data_seed"};
const std::set<std::string> kTopKeys = {"runs",    "seed",   "seeds",
                                        "metrics_at", "metrics", "output"};

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string index(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void reject_unknown(const Json& j, const std::string& path,
                    const std::set<std::string>& a,
                    const std::set<std::string>& b = {}) {
  for (const auto& [key, value] : j.items()) {
    if (!a.count(key) && !b.count(key)) {
      throw ConfigError(join(path, key), "unknown field");
    }
  }
}

std::uint64_t get_uint(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw ConfigError(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

double get_double(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

double get_positive(const Json& j, const std::string& path) {
  const double v = get_double(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

bool get_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_thresholds(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(path, "expected a non-empty array of numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_positive(j[i], index(path, i)));
    if (i > 0 && !(out[i] < out[i - 1])) {
      throw ConfigError(path, "thresholds must be strictly decreasing");
    }
  }
  return out;
}

DistributionSpec get_distribution(const Json& j, const std::string& path) {
  DistributionSpec spec;
  if (j.is_string()) {
    try {
      spec = parse_distribution(j.get<std::string>());
    } catch (const InvalidSpec& e) {
      throw ConfigError(path, e.what());
    }
    return spec;
  }
  require_object(j, path);
  if (!j.contains("kind")) throw ConfigError(join(path, "kind"), "required");
  const std::string kind = get_string(j.at("kind"), join(path, "kind"));
  if (kind == "uniform") {
    reject_unknown(j, path, {"kind", "lo", "hi"});
    if (j.contains("lo")) spec.lo = get_double(j.at("lo"), join(path, "lo"));
    if (j.contains("hi")) spec.hi = get_double(j.at("hi"), join(path, "hi"));
  } else if (kind == "quadrant") {
    reject_unknown(j, path, {"kind", "values"});
    spec.kind = DistributionKind::kQuadrant;
    if (j.contains("values")) {
      const Json& v = j.at("values");
      const std::string vpath = join(path, "values");
      if (!v.is_array() || v.size() != 4) {
        throw ConfigError(vpath, "expected four numbers");
      }
      for (std::size_t i = 0; i < 4; ++i) spec.quadrant[i] = get_double(v[i], index(vpath, i));
    }
  } else {
    throw ConfigError(join(path, "kind"), "expected \"uniform\" or \"quadrant\"");
  }
  try {
    validate(spec);
  } catch (const InvalidSpec& e) {
    throw ConfigError(path, e.what());
  }
  return spec;
}

// Per-run settings as found in one JSON object; unset fields inherit.
struct RunFields {
  std::optional<Mode> mode;
  std::optional<std::vector<LatticeSpec>> sizes;
  std::optional<DistributionSpec> distribution;
  std::optional<std::vector<double>> thresholds;
  std::optional<double> stop_epsilon;
  std::optional<std::size_t> max_rounds;
  std::optional<double> freeze_at;
  std::optional<bool> reuse_data_seed;
  std::optional<bool> periodic;
};

std::size_t get_dimension(const Json& j, const std::string& path) {
  const std::uint64_t v = get_uint(j, path);
  if (v == 0) throw ConfigError(path, "must be positive");
  return static_cast<std::size_t>(v);
}

RunFields read_run_fields(const Json& j, const std::string& path) {
  RunFields f;
  if (j.contains("mode")) {
    const std::string p = join(path, "mode");
    f.mode = parse_mode(get_string(j.at("mode"), p));
    if (!f.mode) throw ConfigError(p, "expected evolutionary, frozen or automaton");
  }
  const bool has_rc = j.contains("rows") || j.contains("cols");
  if (has_rc && j.contains("sizes")) {
    throw ConfigError(join(path, "sizes"), "give either sizes or rows/cols, not both");
  }
  if (has_rc) {
    if (!j.contains("rows")) throw ConfigError(join(path, "rows"), "required with cols");
    if (!j.contains("cols")) throw ConfigError(join(path, "cols"), "required with rows");
    LatticeSpec spec;
    spec.rows = get_dimension(j.at("rows"), join(path, "rows"));
    spec.cols = get_dimension(j.at("cols"), join(path, "cols"));
    f.sizes = std::vector<LatticeSpec>{spec};
  }
  if (j.contains("sizes")) {
    const std::string p = join(path, "sizes");
    const Json& s = j.at("sizes");
    if (!s.is_array() || s.empty()) throw ConfigError(p, "expected a non-empty array");
    std::vector<LatticeSpec> sizes;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string ip = index(p, i);
      LatticeSpec spec;
      if (s[i].is_array()) {
        if (s[i].size() != 2) throw ConfigError(ip, "expected [rows, cols]");
        spec.rows = get_dimension(s[i][0], index(ip, 0));
        spec.cols = get_dimension(s[i][1], index(ip, 1));
      } else {
        spec.rows = spec.cols = get_dimension(s[i], ip);
      }
      sizes.push_back(spec);
    }
    f.sizes = std::move(sizes);
  }
  if (j.contains("periodic")) f.periodic = get_bool(j.at("periodic"), join(path, "periodic"));
  if (j.contains("distribution")) {
    f.distribution = get_distribution(j.at("distribution"), join(path, "distribution"));
  }
  if (j.contains("thresholds")) {
    f.thresholds = get_thresholds(j.at("thresholds"), join(path, "thresholds"));
  }
  if (j.contains("stop_epsilon")) {
    f.stop_epsilon = get_positive(j.at("stop_epsilon"), join(path, "stop_epsilon"));
  }
  if (j.contains("max_rounds")) {
    f.max_rounds = get_uint(j.at("max_rounds"), join(path, "max_rounds"));
  }
  if (j.contains("freeze_at")) {
    f.freeze_at = get_positive(j.at("freeze_at"), join(path, "freeze_at"));
  }
  if (j.contains("reuse_data_seed")) {
    f.reuse_data_seed = get_bool(j.at("reuse_data_seed"), join(path, "reuse_data_seed"));
  }
  return f;
}

template <class T>
T pick(const std::optional<T>& local, const std::optional<T>& inherited, T fallback) {
  if (local) return *local;
  if (inherited) return *inherited;
  return fallback;
}

void expand(const RunFields& local, const RunFields& top, const std::string& path,
            std::vector<CellSpec>& cells) {
  const auto sizes = local.sizes ? local.sizes : top.sizes;
  if (!sizes) throw ConfigError(join(path, "rows"), "a lattice size is required");
  RunConfig run;
  run.mode = pick(local.mode, top.mode, Mode::kEvolutionary);
  run.thresholds = pick(local.thresholds, top.thresholds, default_thresholds());
  run.stop_epsilon = pick(local.stop_epsilon, top.stop_epsilon, 1e-12);
  run.max_rounds = pick(local.max_rounds, top.max_rounds, std::size_t{200000});
  run.freeze_threshold = pick(local.freeze_at, top.freeze_at, 1e-1);
  run.reuse_data_seed = pick(local.reuse_data_seed, top.reuse_data_seed, false);
  const bool periodic = pick(local.periodic, top.periodic, true);
  const DistributionSpec dist =
      pick(local.distribution, top.distribution, DistributionSpec{});
  for (LatticeSpec spec : *sizes) {
    spec.periodic = periodic;
    cells.push_back({spec, run, dist});
  }
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

OrderedJson distribution_json(const DistributionSpec& d) {
  OrderedJson j;
  j["kind"] = to_string(d.kind);
  if (d.kind == DistributionKind::kUniform) {
    j["lo"] = d.lo;
    j["hi"] = d.hi;
  } else {
    j["values"] = d.quadrant;
  }
  return j;
}

}  // namespace

std::string_view to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::kCsv: return "csv";
    case OutputFormat::kJson: return "json";
    case OutputFormat::kBoth: return "both";
  }
  return "both";
}

std::optional<OutputFormat> parse_format(std::string_view text) {
  if (text == "csv") return OutputFormat::kCsv;
  if (text == "json") return OutputFormat::kJson;
  if (text == "both") return OutputFormat::kBoth;
  return std::nullopt;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw InvalidSpec("not a number: '" + std::string(item) + "'");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

DistributionSpec parse_distribution(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view kind = text.substr(0, colon);
  const std::vector<double> args =
      colon == std::string_view::npos ? std::vector<double>{}
                                      : parse_number_list(text.substr(colon + 1));
  DistributionSpec spec;
  if (kind == "uniform") {
    if (!args.empty()) {
      if (args.size() != 2) throw InvalidSpec("uniform takes LO,HI");
      spec = DistributionSpec::uniform(args[0], args[1]);
    }
  } else if (kind == "quadrant") {
    spec.kind = DistributionKind::kQuadrant;
    if (!args.empty()) {
      if (args.size() != 4) throw InvalidSpec("quadrant takes V1,V2,V3,V4");
      spec.quadrant = {args[0], args[1], args[2], args[3]};
    }
  } else {
    throw InvalidSpec("unknown distribution '" + std::string(kind) + "'");
  }
  validate(spec);
  return spec;
}

ExperimentConfig parse_config(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("", "JSON syntax error at line " + std::to_string(line) +
                              ", column " + std::to_string(column) + ": " + e.what());
  }
  require_object(root, "(root)");
  reject_unknown(root, "", kRunKeys, kTopKeys);

  ExperimentConfig config;
  const RunFields top = read_run_fields(root, "");
  if (root.contains("runs")) {
    const Json& runs = root.at("runs");
    if (!runs.is_array() || runs.empty()) {
      throw ConfigError("runs", "expected a non-empty array of run objects");
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const std::string path = index("runs", i);
      require_object(runs[i], path);
      reject_unknown(runs[i], path, kRunKeys);
      expand(read_run_fields(runs[i], path), top, path, config.cells);
    }
  } else {
    expand(top, RunFields{}, "", config.cells);
  }

  if (root.contains("seed")) config.base_seed = get_uint(root.at("seed"), "seed");
  if (root.contains("seeds")) {
    config.seeds = get_uint(root.at("seeds"), "seeds");
    if (config.seeds == 0) throw ConfigError("seeds", "ensemble size must be >= 1");
  }
  if (root.contains("metrics_at") && root.at("metrics_at") != Json::array()) {
    config.metrics_at = get_thresholds(root.at("metrics_at"), "metrics_at");
  }
  if (root.contains("metrics")) {
    const Json& m = root.at("metrics");
    require_object(m, "metrics");
    reject_unknown(m, "metrics", {"exact_budget", "sample_size", "seed"});
    if (m.contains("exact_budget")) {
      config.metrics.exact_node_budget = get_uint(m.at("exact_budget"), "metrics.exact_budget");
    }
    if (m.contains("sample_size")) {
      config.metrics.sample_size = get_uint(m.at("sample_size"), "metrics.sample_size");
      if (config.metrics.sample_size == 0) {
        throw ConfigError("metrics.sample_size", "must be >= 1");
      }
    }
    if (m.contains("seed")) config.metrics.seed = get_uint(m.at("seed"), "metrics.seed");
  }
  if (root.contains("output")) {
    const Json& o = root.at("output");
    require_object(o, "output");
    reject_unknown(o, "output", {"dir", "format", "traces", "snapshots"});
    if (o.contains("dir")) config.output.dir = get_string(o.at("dir"), "output.dir");
    if (o.contains("format")) {
      const auto f = parse_format(get_string(o.at("format"), "output.format"));
      if (!f) throw ConfigError("output.format", "expected csv, json or both");
      config.output.format = *f;
    }
    if (o.contains("traces")) config.output.traces = get_bool(o.at("traces"), "output.traces");
    if (o.contains("snapshots")) {
      config.output.snapshots = get_bool(o.at("snapshots"), "output.snapshots");
    }
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void validate(const ExperimentConfig& config) {
  if (config.cells.empty()) throw ConfigError("runs", "at least one run is required");
  if (config.seeds == 0) throw ConfigError("seeds", "ensemble size must be >= 1");
  for (std::size_t k = 0; k < config.metrics_at.size(); ++k) {
    if (!(config.metrics_at[k] > 0.0) ||
        (k > 0 && !(config.metrics_at[k] < config.metrics_at[k - 1]))) {
      throw ConfigError("metrics_at", "must be positive and strictly decreasing");
    }
  }
  for (std::size_t i = 0; i < config.cells.size(); ++i) {
    const CellSpec& cell = config.cells[i];
    const std::string path = index("cells", i);
    const LatticeSpec& l = cell.lattice;
    if (!l.periodic) {
      throw ConfigError(join(path, "periodic"), "only periodic lattices are supported");
    }
    if (l.rows < 3 || l.cols < 3) {
      throw ConfigError(join(path, "rows"), "rows and cols must be >= 3");
    }
    try {
      cell.run.validate();
    } catch (const InvalidSpec& e) {
      throw ConfigError(join(path, "run"), e.what());
    }
    try {
      validate(cell.distribution);
    } catch (const InvalidSpec& e) {
      throw ConfigError(join(path, "distribution"), e.what());
    }
  }
}

std::string emit_config(const ExperimentConfig& config) {
  OrderedJson root;
  OrderedJson runs = OrderedJson::array();
  for (const CellSpec& cell : config.cells) {
    OrderedJson r;
    r["mode"] = to_string(cell.run.mode);
    r["rows"] = cell.lattice.rows;
    r["cols"] = cell.lattice.cols;
    r["periodic"] = cell.lattice.periodic;
    r["distribution"] = distribution_json(cell.distribution);
    r["thresholds"] = cell.run.thresholds;
    r["stop_epsilon"] = cell.run.stop_epsilon;
    r["max_rounds"] = cell.run.max_rounds;
    r["freeze_at"] = cell.run.freeze_threshold;
    r["reuse_data_seed"] = cell.run.reuse_data_seed;
    runs.push_back(std::move(r));
  }
  root["runs"] = std::move(runs);
  root["seed"] = config.base_seed;
  root["seeds"] = config.seeds;
  root["metrics_at"] = config.metrics_at;
  root["metrics"] = {{"exact_budget", config.metrics.exact_node_budget},
                     {"sample_size", config.metrics.sample_size},
                     {"seed", config.metrics.seed}};
  root["output"] = {{"dir", config.output.dir},
                    {"format", to_string(config.output.format)},
                    {"traces", config.output.traces},
                    {"snapshots", config.output.snapshots}};
  return root.dump(2) + "\n";
}

void apply_overrides(ExperimentConfig& config, const Overrides& o) {
  if (config.cells.empty()) {
    if (!o.rows || !o.cols) {
      throw ConfigError("rows", "--rows and --cols are required without --config");
    }
    config.cells.push_back({LatticeSpec{*o.rows, *o.cols, true}, RunConfig{}, {}});
  }
  for (CellSpec& cell : config.cells) {
    if (o.mode) cell.run.mode = *o.mode;
    if (o.rows) cell.lattice.rows = *o.rows;
    if (o.cols) cell.lattice.cols = *o.cols;
    if (o.distribution) cell.distribution = *o.distribution;
    if (o.thresholds) cell.run.thresholds = *o.thresholds;
    if (o.stop_epsilon) cell.run.stop_epsilon = *o.stop_epsilon;
    if (o.max_rounds) cell.run.max_rounds = *o.max_rounds;
    if (o.freeze_at) cell.run.freeze_threshold = *o.freeze_at;
  }
  if (o.seed) config.base_seed = *o.seed;
  if (o.seeds) config.seeds = *o.seeds;
  if (o.metrics_at) config.metrics_at = *o.metrics_at;
  if (o.out_dir) config.output.dir = *o.out_dir;
  if (o.format) config.output.format = *o.format;
  if (o.traces) config.output.traces = *o.traces;
  if (o.snapshots) config.output.snapshots = *o.snapshots;
  validate(config);
}

}  // namespace evonet
