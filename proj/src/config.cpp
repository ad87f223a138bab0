#include "mlrank/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mlrank {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError("bad value `" + value + "` for `" + key + "`");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("bad boolean `" + value + "` for `" + key + "`");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

} // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<double>("list", item));
  return out;
}

std::string format_double_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "datasets") {
    datasets = split_list(value);
  } else if (key == "format") {
    if (value == "sparse") format = DataFormat::sparse;
    else if (value == "csv") format = DataFormat::csv;
    else throw ConfigError("format must be sparse or csv");
  } else if (key == "csv_labels") {
    csv_labels = parse_number<Index>(key, value);
  } else if (key == "algos") {
    algorithms.clear();
    for (const auto& name : split_list(value)) {
      const auto id = parse_algorithm(name);
      if (!id) throw ConfigError("unknown algorithm `" + name + "`");
      algorithms.push_back(*id);
    }
  } else if (key == "base") {
    const auto b = parse_base_loss(value);
    if (!b) throw ConfigError("unknown base loss `" + value + "`");
    base = *b;
  } else if (key == "lambdas") {
    try {
      lambdas = parse_double_list(value);
    } catch (const ConfigError&) {
      throw ConfigError("bad lambda list `" + value + "`");
    }
  } else if (key == "folds") {
    folds = parse_number<int>(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "epochs") {
    epochs = parse_number<int>(key, value);
  } else if (key == "inner_steps") {
    inner_steps = parse_number<Index>(key, value);
  } else if (key == "step") {
    step = parse_number<double>(key, value);
  } else if (key == "tolerance") {
    tolerance = parse_number<double>(key, value);
  } else if (key == "max_wall_seconds") {
    if (value == "none") max_wall_seconds.reset();
    else max_wall_seconds = parse_number<double>(key, value);
  } else if (key == "solver") {
    if (value == "svrg_bb") solver = Solver::svrg_bb;
    else if (value == "batch_gd") solver = Solver::batch_gd;
    else throw ConfigError("solver must be svrg_bb or batch_gd");
  } else if (key == "standardize") {
    standardize = parse_bool(key, value);
  } else if (key == "bias") {
    bias = parse_bool(key, value);
  } else if (key == "keep_trivial") {
    keep_trivial = parse_bool(key, value);
  } else if (key == "select_on_test_folds") {
    select_on_test_folds = parse_bool(key, value);
  } else if (key == "smoke") {
    smoke = parse_bool(key, value);
  } else if (key == "output") {
    output = value;
  } else if (key == "threads") {
    threads = parse_number<int>(key, value);
  } else {
    throw ConfigError("unknown config key `" + key + "`");
  }
}

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw ConfigError("no algorithms selected");
  if (lambdas.empty()) throw ConfigError("lambda grid is empty");
  for (const double l : lambdas)
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("lambda values must be finite and nonnegative");
  if (folds < 2) throw ConfigError("folds must be at least 2");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (inner_steps < 0) throw ConfigError("inner_steps must be nonnegative");
  if (!(step > 0.0)) throw ConfigError("step must be positive");
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be nonnegative");
  if (format == DataFormat::csv && csv_labels < 2) throw ConfigError("csv input needs csv_labels >= 2");
  if (threads < 0) throw ConfigError("threads must be nonnegative");
  if (output.empty()) throw ConfigError("output directory is empty");
}

CvOptions ExperimentConfig::cv_options(int resolved_threads) const {
  CvOptions o;
  o.folds = folds;
  o.lambda_grid = lambdas;
  o.seed = seed;
  o.train.optimizer.outer_epochs = epochs;
  o.train.optimizer.inner_steps = inner_steps;
  o.train.optimizer.initial_step = step;
  o.train.optimizer.tolerance = tolerance;
  o.train.optimizer.max_wall_seconds = max_wall_seconds;
  o.train.solver = solver;
  o.train.standardize = standardize;
  o.train.bias = bias;
  o.select_on_test_folds = select_on_test_folds;
  o.threads = resolved_threads;
  return o;
}

ExperimentConfig ExperimentConfig::effective() const {
  ExperimentConfig e = *this;
  if (!smoke) return e;
  e.epochs = std::min(e.epochs, kSmokeMaxEpochs);
  if (e.lambdas.size() > 3) e.lambdas = {e.lambdas.front(), e.lambdas[e.lambdas.size() / 2], e.lambdas.back()};
  return e;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    try {
      cfg.set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(number) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_config(in);
}

namespace {

void write_body(std::ostream& out, const ExperimentConfig& cfg) {
  std::string datasets, algos;
  for (std::size_t i = 0; i < cfg.datasets.size(); ++i) datasets += (i ? "," : "") + cfg.datasets[i];
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i)
    algos += (i ? "," : "") + std::string(to_string(cfg.algorithms[i]));
  out << "datasets = " << datasets << '\n'
      << "format = " << (cfg.format == DataFormat::sparse ? "sparse" : "csv") << '\n'
      << "csv_labels = " << cfg.csv_labels << '\n'
      << "algos = " << algos << '\n'
      << "base = " << to_string(cfg.base) << '\n'
      << "lambdas = " << format_double_list(cfg.lambdas) << '\n'
      << "folds = " << cfg.folds << '\n'
      << "seed = " << cfg.seed << '\n'
      << "epochs = " << cfg.epochs << '\n'
      << "inner_steps = " << cfg.inner_steps << '\n'
      << "step = " << format_double(cfg.step) << '\n'
      << "tolerance = " << format_double(cfg.tolerance) << '\n'
      << "max_wall_seconds = " << (cfg.max_wall_seconds ? format_double(*cfg.max_wall_seconds) : "none") << '\n'
      << "solver = " << (cfg.solver == Solver::svrg_bb ? "svrg_bb" : "batch_gd") << '\n'
      << "standardize = " << bool_text(cfg.standardize) << '\n'
      << "bias = " << bool_text(cfg.bias) << '\n'
      << "keep_trivial = " << bool_text(cfg.keep_trivial) << '\n'
      << "select_on_test_folds = " << bool_text(cfg.select_on_test_folds) << '\n'
      << "smoke = " << bool_text(cfg.smoke) << '\n'
      << "output = " << cfg.output << '\n';
}

} // namespace

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  write_body(out, cfg);
  out << "threads = " << cfg.threads << '\n';
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::ostringstream body;
  write_body(body, cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : body.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace mlrank
