#include "mlrank/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "mlrank/parallel.hpp"

namespace mlrank {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<Index> nontrivial_rows(const LabelMatrix& labels) {
  std::vector<Index> rows;
  for (Index i = 0; i < labels.rows(); ++i) {
    const auto row = labels.row(i);
    if ((row.array() > 0).any() && (row.array() < 0).any()) rows.push_back(i);
  }
  return rows;
}

} // namespace

TrainResult train(const MultiLabelDataset& data, const AlgorithmSpec& algo, double lambda,
                  const TrainOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SurrogateLoss surrogate(algo.id, algo.base);

  const MultiLabelDataset* source = &data;
  MultiLabelDataset filtered;
  if (!surrogate.accepts_trivial() && data.nontrivial_count() != data.instance_count()) {
    const auto rows = nontrivial_rows(data.labels);
    if (rows.empty()) throw LossError("no instance has both positive and negative labels");
    filtered = subset(data, rows);
    source = &filtered;
  }

  TrainResult result;
  result.model.preprocessing = Preprocessing::fit(*source, options.standardize, options.bias);
  const MultiLabelDataset prepared = result.model.preprocessing.apply(*source);
  const Objective objective(prepared, std::move(surrogate), lambda);
  const MatrixXd init = MatrixXd::Zero(prepared.feature_count(), prepared.label_count());

  OptimizationResult opt = options.solver == Solver::svrg_bb
                               ? minimize_svrg_bb(objective, init, options.optimizer)
                               : minimize_batch_gd(objective, init, options.optimizer);
  result.model.weights = std::move(opt.weights);
  result.model.trained_with = TrainingInfo{algo.id, algo.base, lambda, options.optimizer.seed};
  result.trace = std::move(opt.trace);
  result.seconds = seconds_since(start);
  return result;
}

Metrics evaluate_scores(const MatrixXd& scores, const LabelMatrix& labels, BaseLossKind base) {
  if (scores.rows() != labels.rows() || scores.cols() != labels.cols())
    throw ModelError("score and label matrices differ in shape");
  std::vector<SurrogateLoss> surrogates;
  for (const auto id : kAllAlgorithms) surrogates.emplace_back(id, base);

  Metrics m;
  VectorXd f(scores.cols()), g(scores.cols());
  for (Index i = 0; i < scores.rows(); ++i) {
    const auto y = labels.row(i);
    const LabelSplit split = split_labels(y);
    if (!split.nontrivial()) {
      ++m.skipped_trivial;
      continue;
    }
    f = scores.row(i).transpose();
    m.ranking_loss += ranking_loss(f, y.transpose());
    m.partial_ranking_loss += partial_ranking_loss(f, y.transpose());
    for (std::size_t a = 0; a < surrogates.size(); ++a)
      m.surrogate_risk[a] += surrogates[a].evaluate_into(f, y.transpose(), split, g);
    ++m.evaluated;
  }
  if (m.evaluated > 0) {
    const double n = static_cast<double>(m.evaluated);
    m.ranking_loss /= n;
    m.partial_ranking_loss /= n;
    for (auto& r : m.surrogate_risk) r /= n;
  }
  return m;
}

Metrics evaluate(const LinearModeld& model, const MultiLabelDataset& data) {
  return evaluate_scores(model.predict_raw(data), data.labels, model.trained_with.base);
}

std::vector<double> CvOptions::default_lambda_grid() {
  std::vector<double> grid;
  for (int e = -8; e <= 2; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

std::vector<double> CvResult::mean_validation_curve() const {
  std::vector<double> sum(lambda_grid.size(), 0.0);
  std::vector<int> count(lambda_grid.size(), 0);
  for (const auto& v : validation) {
    sum[v.lambda_index] += v.ranking_loss;
    ++count[v.lambda_index];
  }
  for (std::size_t l = 0; l < sum.size(); ++l)
    sum[l] = count[l] > 0 ? sum[l] / count[l] : std::numeric_limits<double>::quiet_NaN();
  return sum;
}

std::uint64_t task_seed(std::uint64_t master, int fold, std::size_t lambda_index, AlgorithmId algo) {
  return derive_seed(master, {static_cast<std::uint64_t>(fold), static_cast<std::uint64_t>(lambda_index),
                              static_cast<std::uint64_t>(algo)});
}

std::pair<double, double> mean_and_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

namespace {

struct TaskOutcome {
  Metrics metrics;
  double seconds = 0.0;
  double epoch_seconds = 0.0;
  int epochs = 0;
};

TaskOutcome run_task(const MultiLabelDataset& data, std::span<const Index> train_rows,
                     std::span<const Index> eval_rows, const AlgorithmSpec& algo, double lambda,
                     TrainOptions options, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  options.optimizer.seed = seed;
  const TrainResult trained = train(subset(data, train_rows), algo, lambda, options);
  TaskOutcome out;
  out.metrics = evaluate(trained.model, subset(data, eval_rows));
  out.epoch_seconds = trained.trace.mean_epoch_seconds();
  out.epochs = static_cast<int>(trained.trace.epochs.size()) - 1;
  out.seconds = seconds_since(start);
  return out;
}

} // namespace

std::vector<CvResult> cross_validate_many(const MultiLabelDataset& data, std::span<const AlgorithmSpec> algos,
                                          const CvOptions& options) {
  if (options.lambda_grid.empty()) throw std::invalid_argument("lambda grid is empty");
  if (options.folds < 2) throw std::invalid_argument("need at least 2 folds");
  if (algos.empty()) return {};

  const FoldAssignment folds = kfold_split(data.instance_count(), options.folds, derive_seed(options.seed, {0xf01dULL}));
  const auto K = static_cast<std::size_t>(options.folds);
  const std::size_t L = options.lambda_grid.size();
  const std::size_t A = algos.size();

  // Training and selection rows per fold.
  std::vector<std::vector<Index>> train_rows(K), test_rows(K), select_train(K), select_eval(K);
  for (std::size_t k = 0; k < K; ++k) {
    const int fold = static_cast<int>(k);
    train_rows[k] = folds.complement(fold);
    test_rows[k] = folds.members(fold);
    if (options.select_on_test_folds) {
      select_train[k] = train_rows[k];
      select_eval[k] = test_rows[k];
    } else {
      auto [fit, val] = holdout_split(train_rows[k], options.selection_train_fraction,
                                      derive_seed(options.seed, {0x5e1ecULL, k}));
      select_train[k] = std::move(fit);
      select_eval[k] = std::move(val);
    }
  }

  // Phase 1: every (algorithm, fold, lambda) selection task.
  std::vector<TaskOutcome> selection(A * K * L);
  parallel_for(selection.size(), options.threads, [&](std::size_t t) {
    const std::size_t a = t / (K * L), k = (t / L) % K, l = t % L;
    selection[t] = run_task(data, select_train[k], select_eval[k], algos[a], options.lambda_grid[l], options.train,
                            task_seed(options.seed, static_cast<int>(k), l, algos[a].id));
  });

  std::vector<CvResult> results(A);
  for (std::size_t a = 0; a < A; ++a) {
    CvResult& r = results[a];
    r.algo = algos[a];
    r.lambda_grid = options.lambda_grid;
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t l = 0; l < L; ++l) {
        const TaskOutcome& o = selection[(a * K + k) * L + l];
        r.validation.push_back({static_cast<int>(k), l, options.lambda_grid[l], o.metrics.ranking_loss,
                                o.metrics.partial_ranking_loss, o.seconds});
        r.wall_seconds += o.seconds;
      }
    const auto curve = r.mean_validation_curve();
    std::size_t best = 0;
    for (std::size_t l = 1; l < L; ++l) {
      const bool better = curve[l] < curve[best] ||
                          (curve[l] == curve[best] && options.lambda_grid[l] < options.lambda_grid[best]);
      if (better) best = l;
    }
    r.best_lambda = options.lambda_grid[best];
  }

  // Phase 2: test metrics at the selected lambda.
  std::vector<TaskOutcome> testing(A * K);
  if (options.select_on_test_folds) {
    for (std::size_t a = 0; a < A; ++a) {
      const auto best = static_cast<std::size_t>(
          std::find(options.lambda_grid.begin(), options.lambda_grid.end(), results[a].best_lambda) -
          options.lambda_grid.begin());
      for (std::size_t k = 0; k < K; ++k) testing[a * K + k] = selection[(a * K + k) * L + best];
    }
  } else {
    parallel_for(testing.size(), options.threads, [&](std::size_t t) {
      const std::size_t a = t / K, k = t % K;
      testing[t] = run_task(data, train_rows[k], test_rows[k], algos[a], results[a].best_lambda, options.train,
                            task_seed(options.seed, static_cast<int>(k), L, algos[a].id));
    });
  }

  for (std::size_t a = 0; a < A; ++a) {
    CvResult& r = results[a];
    std::vector<double> rank, partial;
    for (std::size_t k = 0; k < K; ++k) {
      const TaskOutcome& o = testing[a * K + k];
      r.test.push_back({static_cast<int>(k), r.best_lambda, o.metrics.ranking_loss, o.metrics.partial_ranking_loss,
                        o.seconds, o.epoch_seconds, o.epochs});
      rank.push_back(o.metrics.ranking_loss);
      partial.push_back(o.metrics.partial_ranking_loss);
      if (!options.select_on_test_folds) r.wall_seconds += o.seconds;
    }
    std::tie(r.mean_ranking_loss, r.std_ranking_loss) = mean_and_std(rank);
    std::tie(r.mean_partial_ranking_loss, r.std_partial_ranking_loss) = mean_and_std(partial);
  }
  return results;
}

CvResult cross_validate(const MultiLabelDataset& data, const AlgorithmSpec& algo, const CvOptions& options) {
  return cross_validate_many(data, std::span<const AlgorithmSpec>(&algo, 1), options).front();
}

} // namespace mlrank
