#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mlrank/base_loss.hpp"
#include "mlrank/types.hpp"

namespace mlrank {

class LossError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Relevant (S+) and irrelevant (S-) label indices of one label vector.
struct LabelSplit {
  std::vector<Index> positives;
  std::vector<Index> negatives;

  Index label_count() const { return static_cast<Index>(positives.size() + negatives.size()); }
  bool nontrivial() const { return !positives.empty() && !negatives.empty(); }
};

template <typename Derived>
LabelSplit split_labels(const Eigen::MatrixBase<Derived>& labels) {
  LabelSplit split;
  for (Index j = 0; j < labels.size(); ++j) {
    const auto y = labels(j);
    if (y == 1) {
      split.positives.push_back(j);
    } else if (y == -1) {
      split.negatives.push_back(j);
    } else {
      throw LossError("label entries must be -1 or +1");
    }
  }
  return split;
}

/// Label weights of the reweighted univariate loss
///   L_u(f, y) = sum_j (beta+ [[y_j = +1]] + beta- [[y_j = -1]]) l(y_j f_j).
struct PenaltyWeights {
  double positive;
  double negative;
};

enum class PenaltyKind { u1, u2, u3, u4, general };

class PenaltyScheme {
 public:
  using PenaltyFn = std::function<double(const LabelVector&)>;

  static PenaltyScheme u1() { return PenaltyScheme(PenaltyKind::u1); }
  static PenaltyScheme u2() { return PenaltyScheme(PenaltyKind::u2); }
  static PenaltyScheme u3() { return PenaltyScheme(PenaltyKind::u3); }
  static PenaltyScheme u4() { return PenaltyScheme(PenaltyKind::u4); }
  static PenaltyScheme of(PenaltyKind kind);
  /// Caller-supplied beta+(y), beta-(y); both must be positive on nontrivial y.
  static PenaltyScheme general(PenaltyFn beta_plus, PenaltyFn beta_minus);

  PenaltyKind kind() const { return kind_; }
  bool accepts_trivial() const { return kind_ == PenaltyKind::u1; }

  /// Weights for the fixed schemes depend only on |S+| and c.
  /// Returns nullopt where the scheme is undefined (|S+| or |S-| zero).
  static std::optional<PenaltyWeights> table_weights(PenaltyKind kind, Index positives, Index label_count);

  /// Throws LossError for trivial labels unless the scheme is u1.
  PenaltyWeights weights(const LabelSplit& split) const;
  PenaltyWeights weights(const LabelSplit& split, const LabelVector& labels) const;

 private:
  explicit PenaltyScheme(PenaltyKind kind) : kind_(kind) {}

  PenaltyKind kind_;
  PenaltyFn beta_plus_;
  PenaltyFn beta_minus_;
};

std::string_view to_string(PenaltyKind kind);
std::optional<PenaltyKind> parse_penalty_kind(std::string_view name);

template <typename Scalar>
struct LossEval {
  Scalar value;
  VectorX<Scalar> gradient;
};

namespace detail {

inline void require_nontrivial(const LabelSplit& split) {
  if (!split.nontrivial()) throw LossError("label vector needs at least one positive and one negative label");
}

template <typename LabelsT>
LabelVector to_label_vector(const Eigen::MatrixBase<LabelsT>& labels) {
  LabelVector out(labels.size());
  for (Index j = 0; j < labels.size(); ++j) out(j) = static_cast<int>(labels(j));
  return out;
}

template <typename ScoresT, typename LabelsT>
void require_same_size(const Eigen::MatrixBase<ScoresT>& scores, const Eigen::MatrixBase<LabelsT>& labels) {
  if (scores.size() != labels.size()) throw LossError("scores and labels differ in length");
}

} // namespace detail

/// Fraction of (positive, negative) pairs with f_p <= f_q. Ties are exact.
template <typename ScoresT, typename LabelsT>
typename ScoresT::Scalar ranking_loss(const Eigen::MatrixBase<ScoresT>& scores,
                                      const Eigen::MatrixBase<LabelsT>& labels) {
  using Scalar = typename ScoresT::Scalar;
  detail::require_same_size(scores, labels);
  const LabelSplit split = split_labels(labels);
  detail::require_nontrivial(split);
  Index wrong = 0;
  for (Index p : split.positives)
    for (Index q : split.negatives)
      if (scores(p) <= scores(q)) ++wrong;
  return Scalar(wrong) / Scalar(split.positives.size() * split.negatives.size());
}

/// Pairs with f_p < f_q count 1, ties count 1/2.
template <typename ScoresT, typename LabelsT>
typename ScoresT::Scalar partial_ranking_loss(const Eigen::MatrixBase<ScoresT>& scores,
                                              const Eigen::MatrixBase<LabelsT>& labels) {
  using Scalar = typename ScoresT::Scalar;
  detail::require_same_size(scores, labels);
  const LabelSplit split = split_labels(labels);
  detail::require_nontrivial(split);
  Index reversed = 0;
  Index ties = 0;
  for (Index p : split.positives) {
    for (Index q : split.negatives) {
      if (scores(p) < scores(q)) {
        ++reversed;
      } else if (scores(p) == scores(q)) {
        ++ties;
      }
    }
  }
  return (Scalar(reversed) + Scalar(0.5) * Scalar(ties)) /
         Scalar(split.positives.size() * split.negatives.size());
}

/// Pairwise surrogate accumulated into `gradient` (overwritten). Returns the value.
template <typename ScoresT, typename GradT>
typename ScoresT::Scalar pairwise_surrogate_into(const Eigen::MatrixBase<ScoresT>& scores, const LabelSplit& split,
                                                 BaseLossKind base, Eigen::MatrixBase<GradT>& gradient) {
  using Scalar = typename ScoresT::Scalar;
  detail::require_nontrivial(split);
  gradient.setZero();
  Scalar value(0);
  for (Index p : split.positives) {
    const Scalar fp = scores(p);
    Scalar gp(0);
    for (Index q : split.negatives) {
      const LossPoint<Scalar> lp = base_loss(base, fp - scores(q));
      value += lp.value;
      gp += lp.derivative;
      gradient(q) -= lp.derivative;
    }
    gradient(p) += gp;
  }
  const Scalar norm = Scalar(1) / Scalar(split.positives.size() * split.negatives.size());
  gradient *= norm;
  return value * norm;
}

/// Reweighted univariate surrogate with explicit label weights. Returns the value.
template <typename ScoresT, typename LabelsT, typename GradT>
typename ScoresT::Scalar univariate_surrogate_into(const Eigen::MatrixBase<ScoresT>& scores,
                                                   const Eigen::MatrixBase<LabelsT>& labels, PenaltyWeights weights,
                                                   BaseLossKind base, Eigen::MatrixBase<GradT>& gradient) {
  using Scalar = typename ScoresT::Scalar;
  Scalar value(0);
  for (Index j = 0; j < scores.size(); ++j) {
    const bool positive = labels(j) == 1;
    const Scalar y = positive ? Scalar(1) : Scalar(-1);
    const Scalar w = Scalar(positive ? weights.positive : weights.negative);
    const LossPoint<Scalar> lp = base_loss(base, y * scores(j));
    value += w * lp.value;
    gradient(j) = w * y * lp.derivative;
  }
  return value;
}

template <typename ScoresT, typename LabelsT>
LossEval<typename ScoresT::Scalar> pairwise_surrogate(const Eigen::MatrixBase<ScoresT>& scores,
                                                      const Eigen::MatrixBase<LabelsT>& labels, BaseLossKind base) {
  using Scalar = typename ScoresT::Scalar;
  detail::require_same_size(scores, labels);
  const LabelSplit split = split_labels(labels);
  LossEval<Scalar> out{Scalar(0), VectorX<Scalar>(scores.size())};
  out.value = pairwise_surrogate_into(scores, split, base, out.gradient);
  return out;
}

template <typename ScoresT, typename LabelsT>
LossEval<typename ScoresT::Scalar> univariate_surrogate(const Eigen::MatrixBase<ScoresT>& scores,
                                                        const Eigen::MatrixBase<LabelsT>& labels, BaseLossKind base,
                                                        const PenaltyScheme& scheme) {
  using Scalar = typename ScoresT::Scalar;
  detail::require_same_size(scores, labels);
  const LabelSplit split = split_labels(labels);
  const PenaltyWeights w = scheme.kind() == PenaltyKind::general
                               ? scheme.weights(split, detail::to_label_vector(labels))
                               : scheme.weights(split);
  LossEval<Scalar> out{Scalar(0), VectorX<Scalar>(scores.size())};
  out.value = univariate_surrogate_into(scores, labels, w, base, out.gradient);
  return out;
}

/// Identifier of the five learning objectives: pairwise plus u1..u4.
enum class AlgorithmId { pa, u1, u2, u3, u4 };

std::string_view to_string(AlgorithmId id);
std::optional<AlgorithmId> parse_algorithm(std::string_view name);
/// The univariate penalty scheme of u1..u4; throws for pa.
PenaltyKind penalty_kind_of(AlgorithmId id);

/// A surrogate (pairwise or reweighted univariate) bound to a base loss.
class SurrogateLoss {
 public:
  SurrogateLoss(AlgorithmId id, BaseLossKind base);
  static SurrogateLoss univariate(PenaltyScheme scheme, BaseLossKind base);

  bool pairwise() const { return pairwise_; }
  BaseLossKind base() const { return base_; }
  const PenaltyScheme& scheme() const { return scheme_; }
  bool accepts_trivial() const { return !pairwise_ && scheme_.accepts_trivial(); }

  /// Value with gradient written into `gradient` (length c).
  template <typename ScoresT, typename LabelsT, typename GradT>
  typename ScoresT::Scalar evaluate_into(const Eigen::MatrixBase<ScoresT>& scores,
                                         const Eigen::MatrixBase<LabelsT>& labels, const LabelSplit& split,
                                         Eigen::MatrixBase<GradT>& gradient) const {
    if (pairwise_) return pairwise_surrogate_into(scores, split, base_, gradient);
    const PenaltyWeights w = scheme_.kind() == PenaltyKind::general
                                 ? scheme_.weights(split, detail::to_label_vector(labels))
                                 : scheme_.weights(split);
    return univariate_surrogate_into(scores, labels, w, base_, gradient);
  }

  template <typename ScoresT, typename LabelsT>
  LossEval<typename ScoresT::Scalar> evaluate(const Eigen::MatrixBase<ScoresT>& scores,
                                              const Eigen::MatrixBase<LabelsT>& labels) const {
    using Scalar = typename ScoresT::Scalar;
    detail::require_same_size(scores, labels);
    const LabelSplit split = split_labels(labels);
    LossEval<Scalar> out{Scalar(0), VectorX<Scalar>(scores.size())};
    out.value = evaluate_into(scores, labels, split, out.gradient);
    return out;
  }

  template <typename ScoresT, typename LabelsT>
  typename ScoresT::Scalar value(const Eigen::MatrixBase<ScoresT>& scores,
                                 const Eigen::MatrixBase<LabelsT>& labels) const {
    return evaluate(scores, labels).value;
  }

 private:
  SurrogateLoss(bool pairwise, PenaltyScheme scheme, BaseLossKind base)
      : pairwise_(pairwise), scheme_(std::move(scheme)), base_(base) {}

  bool pairwise_;
  PenaltyScheme scheme_;
  BaseLossKind base_;
};

} // namespace mlrank
