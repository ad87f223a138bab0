#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlrank/dataset.hpp"
#include "mlrank/trainer.hpp"

namespace mlrank {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a benchmark run depends on. Serialized as flat `key = value`
/// lines; `#` starts a comment; lists are comma-separated.
struct ExperimentConfig {
  std::vector<std::string> datasets;
  DataFormat format = DataFormat::sparse;
  /// Label column count for CSV input.
  Index csv_labels = 0;
  std::vector<AlgorithmId> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  BaseLossKind base = BaseLossKind::logistic;
  std::vector<double> lambdas = CvOptions::default_lambda_grid();
  int folds = 3;
  std::uint64_t seed = 0;
  int epochs = 30;
  Index inner_steps = 0;
  double step = 0.1;
  double tolerance = 1e-7;
  std::optional<double> max_wall_seconds;
  Solver solver = Solver::svrg_bb;
  bool standardize = true;
  bool bias = true;
  bool keep_trivial = false;
  bool select_on_test_folds = false;
  bool smoke = false;
  std::string output = "results";
  /// 0 picks MLRANK_THREADS or the core count. Not part of the hash: results do not depend on it.
  int threads = 0;

  /// Applies the key; throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// Throws ConfigError when the combination is unusable.
  void validate() const;

  CvOptions cv_options(int resolved_threads) const;
  /// Copy with the smoke caps applied when `smoke` is set.
  ExperimentConfig effective() const;
};

/// Instances kept per dataset and epochs allowed under smoke mode.
inline constexpr Index kSmokeMaxInstances = 600;
inline constexpr int kSmokeMaxEpochs = 3;

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
/// Canonical serialization; parse_config(write_config(c)) reproduces c.
void write_config(std::ostream& out, const ExperimentConfig& cfg);
/// 16 hex digits of FNV-1a over the canonical serialization without `threads`.
std::string config_hash(const ExperimentConfig& cfg);

std::vector<double> parse_double_list(const std::string& text);
std::string format_double_list(const std::vector<double>& values);

} // namespace mlrank
