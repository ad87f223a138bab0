#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlrank/dataset.hpp"
#include "mlrank/losses.hpp"
#include "mlrank/types.hpp"

namespace mlrank {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainingInfo {
  AlgorithmId algorithm = AlgorithmId::u3;
  BaseLossKind base = BaseLossKind::logistic;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

/// Linear score function f(x) = W^T x with W of shape d x c.
template <typename Scalar>
struct LinearModel {
  MatrixX<Scalar> weights;
  TrainingInfo trained_with;
  Preprocessing preprocessing;

  static LinearModel zeros(Index features, Index labels) {
    LinearModel m;
    m.weights = MatrixX<Scalar>::Zero(features, labels);
    return m;
  }

  Index feature_count() const { return weights.rows(); }
  Index label_count() const { return weights.cols(); }

  /// Row i of the result is W^T x_i. `features` must already be preprocessed.
  template <typename Derived>
  MatrixX<Scalar> predict(const Eigen::MatrixBase<Derived>& features) const {
    if (features.cols() != weights.rows())
      throw ModelError("model expects " + std::to_string(weights.rows()) + " features, got " +
                       std::to_string(features.cols()));
    return features * weights;
  }

  /// Applies the stored preprocessing first.
  MatrixX<Scalar> predict_raw(const MultiLabelDataset& data) const {
    return predict(preprocessing.apply(data).features.template cast<Scalar>());
  }
};

using LinearModeld = LinearModel<double>;

struct ObjectiveSpec {
  AlgorithmId algorithm = AlgorithmId::u3;
  BaseLossKind base = BaseLossKind::logistic;
  double lambda = 0.0;
};

/// Regularized empirical surrogate risk
///   J(W) = (1/n) sum_i L(W^T x_i, y_i) + lambda ||W||_F^2
/// exposed as a gradient oracle for the optimizers.
class Objective {
 public:
  /// Throws LossError when a trivial instance meets a surrogate that rejects it.
  Objective(const MultiLabelDataset& data, const ObjectiveSpec& spec);
  Objective(const MultiLabelDataset& data, SurrogateLoss surrogate, double lambda);

  Index sample_count() const { return features_.rows(); }
  Index feature_count() const { return features_.cols(); }
  Index label_count() const { return labels_.cols(); }
  double lambda() const { return lambda_; }
  const SurrogateLoss& surrogate() const { return surrogate_; }

  double value(const MatrixXd& weights) const;
  /// Mean surrogate loss without the regularizer.
  double empirical_risk(const MatrixXd& weights) const;
  /// (1/n) sum_i x_i g_i^T + 2 lambda W.
  void full_gradient(const MatrixXd& weights, MatrixXd& out) const;
  /// x_i g_i^T + 2 lambda W; its mean over i equals full_gradient.
  void sample_gradient(const MatrixXd& weights, Index i, MatrixXd& out) const;
  /// Surrogate value at instance i with the length-c loss gradient g_i.
  double sample_loss(const MatrixXd& weights, Index i, VectorXd& loss_gradient) const;

 private:
  const RowMatrixXd& features_;
  const LabelMatrix& labels_;
  SurrogateLoss surrogate_;
  double lambda_;
  std::vector<LabelSplit> splits_;
};

/// Text format: `mlrank-model 1` then `key value` header lines, then
/// `weights` followed by d rows of c values (17 significant digits).
void write_model(std::ostream& out, const LinearModeld& model);
LinearModeld read_model(std::istream& in);
void save_model(const std::string& path, const LinearModeld& model);
LinearModeld load_model(const std::string& path);

} // namespace mlrank
