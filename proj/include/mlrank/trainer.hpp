#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlrank/dataset.hpp"
#include "mlrank/losses.hpp"
#include "mlrank/model.hpp"
#include "mlrank/optimizer.hpp"

namespace mlrank {

struct AlgorithmSpec {
  AlgorithmId id = AlgorithmId::u3;
  BaseLossKind base = BaseLossKind::logistic;
};

inline constexpr std::array<AlgorithmId, 5> kAllAlgorithms{AlgorithmId::pa, AlgorithmId::u1, AlgorithmId::u2,
                                                           AlgorithmId::u3, AlgorithmId::u4};

enum class Solver { svrg_bb, batch_gd };

struct TrainOptions {
  OptimizerConfig optimizer;
  Solver solver = Solver::svrg_bb;
  bool standardize = true;
  bool bias = true;
};

struct TrainResult {
  LinearModeld model;
  OptimizationTrace trace;
  double seconds = 0.0;
};

/// Fits preprocessing on `data`, then minimizes the regularized surrogate
/// objective from W = 0. Trivial instances are left out of training unless the
/// surrogate accepts them.
TrainResult train(const MultiLabelDataset& data, const AlgorithmSpec& algo, double lambda,
                  const TrainOptions& options = {});

struct Metrics {
  double ranking_loss = 0.0;
  double partial_ranking_loss = 0.0;
  /// Mean surrogate value of every algorithm under the model's base loss, indexed by AlgorithmId.
  std::array<double, 5> surrogate_risk{};
  Index evaluated = 0;
  Index skipped_trivial = 0;

  double risk(AlgorithmId id) const { return surrogate_risk[static_cast<std::size_t>(id)]; }
};

/// Metrics of precomputed scores (n x c) over instances with nontrivial labels.
Metrics evaluate_scores(const MatrixXd& scores, const LabelMatrix& labels, BaseLossKind base);
/// Applies the model's preprocessing to raw `data` first.
Metrics evaluate(const LinearModeld& model, const MultiLabelDataset& data);

struct CvOptions {
  int folds = 3;
  std::vector<double> lambda_grid = default_lambda_grid();
  std::uint64_t seed = 0;
  TrainOptions train;
  /// Pick lambda on the test folds themselves instead of a nested split.
  bool select_on_test_folds = false;
  double selection_train_fraction = 0.8;
  int threads = 1;

  static std::vector<double> default_lambda_grid();
};

struct ValidationRecord {
  int fold;
  std::size_t lambda_index;
  double lambda;
  double ranking_loss;
  double partial_ranking_loss;
  double seconds;
};

struct TestRecord {
  int fold;
  double lambda;
  double ranking_loss;
  double partial_ranking_loss;
  double seconds;
  double epoch_seconds;
  int epochs;
};

struct CvResult {
  AlgorithmSpec algo;
  std::vector<double> lambda_grid;
  /// One record per (fold, lambda), fold-major.
  std::vector<ValidationRecord> validation;
  double best_lambda = 0.0;
  /// One record per fold.
  std::vector<TestRecord> test;
  double mean_ranking_loss = 0.0;
  double std_ranking_loss = 0.0;
  double mean_partial_ranking_loss = 0.0;
  double std_partial_ranking_loss = 0.0;
  /// Sum of training and evaluation time over every task of this algorithm.
  double wall_seconds = 0.0;

  /// Mean validation ranking loss per grid entry.
  std::vector<double> mean_validation_curve() const;
};

/// Per-task seed so results do not depend on scheduling order.
std::uint64_t task_seed(std::uint64_t master, int fold, std::size_t lambda_index, AlgorithmId algo);

/// k-fold protocol: each fold is the test set once. Lambda is chosen by mean
/// validation ranking loss (ties go to the smaller lambda) on an 80/20 split
/// of each training part, then every fold is retrained on its full training
/// part and tested. All (algorithm, fold, lambda) tasks share one work pool.
std::vector<CvResult> cross_validate_many(const MultiLabelDataset& data, std::span<const AlgorithmSpec> algos,
                                          const CvOptions& options);
CvResult cross_validate(const MultiLabelDataset& data, const AlgorithmSpec& algo, const CvOptions& options);

/// Population mean and standard deviation.
std::pair<double, double> mean_and_std(std::span<const double> values);

} // namespace mlrank
