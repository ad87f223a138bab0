#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlrank/base_loss.hpp"
#include "mlrank/dataset.hpp"
#include "mlrank/losses.hpp"
#include "mlrank/model.hpp"

namespace mlrank {

class BoundError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inputs of the generalization bounds: base-loss Lipschitz constant rho and
/// bound B, hypothesis norm Lambda, feature radius r, sample size n, label
/// count c, confidence delta and empirical surrogate risk.
struct BoundInputs {
  double rho = 1.0;
  double B = 1.0;
  double Lambda = 1.0;
  double r = 1.0;
  Index n = 1;
  Index c = 2;
  double delta = 0.05;
  double empirical_risk = 0.0;

  /// Throws BoundError unless every field is in range.
  void validate() const;
};

struct SurrogateConstants {
  double mu;
  double M;
};

enum class LogBase { natural, binary };

/// Lipschitz constant and bound of L_u2, L_u3, L_u4 given rho and B.
SurrogateConstants surrogate_constants(double rho, double B, Index c, PenaltyKind which);

/// R + 2 sqrt(2) mu sqrt(c Lambda^2 r^2 / n) + 3 M sqrt(log(2/delta) / (2n)).
double bound_base(const BoundInputs& in, double mu, double M, LogBase log_base = LogBase::natural);

/// Right-hand sides of the learning guarantees for A^u2, A^u3, A^u4. The u2
/// bound scales the empirical risk by c.
double bound_u2(const BoundInputs& in, LogBase log_base = LogBase::natural);
double bound_u3(const BoundInputs& in, LogBase log_base = LogBase::natural);
double bound_u4(const BoundInputs& in, LogBase log_base = LogBase::natural);
double bound_for(PenaltyKind which, const BoundInputs& in, LogBase log_base = LogBase::natural);

/// rho and B of a base loss restricted to [-z_max, z_max]: B = l(-z_max) and
/// rho = |l'(-z_max)|, the largest slope of a convex non-increasing loss there.
struct BaseLossConstants {
  double rho;
  double B;
  double z_max;
};
BaseLossConstants base_loss_constants(BaseLossKind base, double z_max);

/// Largest |L(f1,y) - L(f2,y)| / |f1 - f2| seen over random pairs; identical pairs count 0.
/// Scores are drawn in [-score_range, score_range].
double empirical_lipschitz_probe(AlgorithmId which, BaseLossKind base, Index c, std::size_t trials,
                                 std::uint64_t seed, double score_range = 3.0);

struct BoundRow {
  PenaltyKind scheme;
  double empirical_risk;
  SurrogateConstants constants;
  double bound;
};

struct BoundReport {
  BoundInputs inputs;
  BaseLossKind base;
  double z_max;
  double ranking_loss;
  std::vector<BoundRow> rows;
};

/// Plugs a trained model into the u2/u3/u4 bounds: Lambda = |W|_F, r = largest
/// preprocessed feature norm, rho and B from the base loss on the observed score range.
BoundReport bound_report(const LinearModeld& model, const MultiLabelDataset& data, double delta,
                         LogBase log_base = LogBase::natural);

} // namespace mlrank
