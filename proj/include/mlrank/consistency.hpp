#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "mlrank/base_loss.hpp"
#include "mlrank/losses.hpp"
#include "mlrank/types.hpp"

namespace mlrank {

class ConsistencyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Rational = boost::rational<long long>;

struct LabelAtom {
  LabelVector labels;
  double probability;
};

/// Finite-support P(y|x). Probabilities are positive and sum to 1 within 1e-12.
class ConditionalDistribution {
 public:
  ConditionalDistribution(Index label_count, std::vector<LabelAtom> support);

  Index label_count() const { return label_count_; }
  const std::vector<LabelAtom>& support() const { return support_; }

 private:
  Index label_count_;
  std::vector<LabelAtom> support_;
};

/// Penalties (alpha, beta+, beta-) of the general reweighted losses. A
/// penalty that is undefined for some label vector is reported as NaN.
struct PenaltyAssignment {
  using Fn = std::function<double(const LabelVector&)>;

  Fn alpha;
  Fn beta_plus;
  Fn beta_minus;
  /// Set when the betas come from a tabulated scheme and depend on y only through |S+|.
  std::optional<PenaltyKind> table_kind;

  /// beta from a tabulated scheme, alpha of the partial ranking loss.
  static PenaltyAssignment from_scheme(PenaltyKind kind);
  static PenaltyAssignment general(Fn beta_plus, Fn beta_minus, Fn alpha = partial_ranking_alpha);

  /// 1/(|S+||S-|); 0 for a trivial y, which has no label pairs.
  static double partial_ranking_alpha(const LabelVector& labels);
};

struct LabelStats {
  VectorXd phi_plus, phi_minus;
  VectorXd delta_plus, delta_minus;
  /// delta_pair[r][k](p, q) = sum of alpha_y P(y) over y with y_p = s_r, y_q = s_k, with s_0 = +1, s_1 = -1.
  std::array<std::array<MatrixXd, 2>, 2> delta_pair;
  /// sum_y alpha_y P(y).
  double alpha_mass = 0.0;
  /// Atoms left out because a penalty they need is undefined.
  Index excluded_atoms = 0;

  const MatrixXd& delta_pm() const { return delta_pair[0][1]; }
  const MatrixXd& delta_mp() const { return delta_pair[1][0]; }
};

LabelStats compute_stats(const ConditionalDistribution& dist, const PenaltyAssignment& penalties);

/// Extended-real score ordered -inf < finite < +inf. `unspecified` marks a
/// coordinate whose Bayes value is not pinned down.
struct ExtendedScore {
  enum class Kind { finite, positive_infinity, negative_infinity, unspecified };
  Kind kind = Kind::finite;
  double value = 0.0;

  static ExtendedScore finite(double v) { return {Kind::finite, v}; }
  static ExtendedScore plus_infinity() { return {Kind::positive_infinity, 0.0}; }
  static ExtendedScore minus_infinity() { return {Kind::negative_infinity, 0.0}; }
  static ExtendedScore unspecified() { return {Kind::unspecified, 0.0}; }

  bool is_finite() const { return kind == Kind::finite; }
  bool is_unspecified() const { return kind == Kind::unspecified; }
  /// -1, 0, +1; throws for unspecified operands.
  friend int compare(const ExtendedScore& a, const ExtendedScore& b);
  std::string to_string() const;
};

using BayesPredictor = std::vector<ExtendedScore>;

/// Closed-form minimizer of sum_j [phi_j^+ l(f_j) + phi_j^- l(-f_j)] for the
/// exponential, logistic, squared hinge and hinge losses.
BayesPredictor bayes_surrogate(const LabelStats& stats, BaseLossKind base);
BayesPredictor bayes_surrogate(const ConditionalDistribution& dist, const PenaltyAssignment& penalties,
                               BaseLossKind base);

struct OracleConfig {
  double lower = -50.0;
  double upper = 50.0;
  double tolerance = 1e-8;
};

/// argmin of phi_plus l(z) + phi_minus l(-z) on [lower, upper] by golden-section search.
double golden_section_minimizer(double phi_plus, double phi_minus, BaseLossKind base, const OracleConfig& cfg = {});
/// Coordinatewise golden-section minimization of the conditional surrogate risk.
VectorXd bayes_numeric_oracle(const LabelStats& stats, BaseLossKind base, const OracleConfig& cfg = {});

/// sum_y P(y) sum_j w_j(y) l(y_j f_j), evaluated atom by atom.
double conditional_risk(std::span<const double> scores, const ConditionalDistribution& dist,
                        const PenaltyAssignment& penalties, BaseLossKind base);

enum class RankingMeasure { ranking, partial_ranking };

struct MembershipResult {
  bool member = false;
  /// Ranking measure only: a pair with equal deltas involves an unspecified score.
  bool ambiguous = false;
  /// 0-based (p, q), p < q, violated under the best assignment of unspecified scores.
  std::vector<std::pair<Index, Index>> violations;
};

/// Relative tolerance used when comparing delta and phi sums for equality.
inline constexpr double kTieTolerance = 1e-12;

/// Is `scores` in the Bayes set of the (partial) ranking loss? Unspecified
/// scores are tried at -1, 0 and +1 and count as satisfied if any assignment works.
MembershipResult zero_one_bayes_membership(std::span<const ExtendedScore> scores, const LabelStats& stats,
                                           RankingMeasure measure);

struct PairCondition {
  Index p = 0, q = 0;
  /// Delta_p^+ Delta_q^- - Delta_p^- Delta_q^+.
  double delta_determinant = 0.0;
  /// phi_p^+ phi_q^- - phi_p^- phi_q^+.
  double phi_determinant = 0.0;
};

struct ConsistencyVerdict {
  bool consistent_here = true;
  std::optional<PairCondition> violation;
};

/// Sign condition: for every p < q the phi determinant must share the sign of
/// a nonzero delta determinant. Bases: exponential, logistic, squared hinge.
ConsistencyVerdict check_consistency_on_distribution(const LabelStats& stats, BaseLossKind base);
ConsistencyVerdict check_consistency_on_distribution(const ConditionalDistribution& dist,
                                                     const PenaltyAssignment& penalties, BaseLossKind base);

struct TauWitness {
  LabelVector y, y_prime;
  double ratio = 0.0, ratio_prime = 0.0;
  std::optional<Rational> exact_ratio, exact_ratio_prime;
};

struct TauCheck {
  bool holds = false;
  double tau = 0.0;
  std::optional<Rational> exact_tau;
  std::optional<TauWitness> witness;
};

/// beta+ beta- / alpha^2 for a tabulated scheme at |S+| = k, exactly.
Rational exact_class_ratio(PenaltyKind kind, Index positives, Index label_count);

/// Is r(y) = beta+ beta- / alpha^2 constant over nontrivial y? Tabulated
/// schemes iterate over |S+| in exact arithmetic; others enumerate all 2^c
/// vectors (c <= 20) and compare within 1e-12.
TauCheck necessary_condition_tau(const PenaltyAssignment& penalties, Index label_count);

/// Label vector with the first `positives` entries +1 and the rest -1.
LabelVector leading_positive_labels(Index positives, Index label_count);

struct Counterexample {
  ConditionalDistribution distribution;
  LabelStats stats;
  ConsistencyVerdict verdict;
  Index p = 0, q = 0;
};

/// Two-atom distribution on y, y' with y_p = +1, y_q = -1, y'_p = -1, y'_q = +1
/// and r(y) != r(y'). The mass ratio P(y)/P(y') is the geometric mean of the
/// ratios zeroing the delta and phi determinants, so the two have strictly
/// opposite signs. Returns nullopt when the necessary condition holds.
std::optional<Counterexample> corollary_counterexample(const PenaltyAssignment& penalties, Index label_count);

struct HingeCounterexampleConfig {
  double mass_y2 = 0.2;
  double mass_y3 = 0.1;
};

struct HingeCounterexample {
  ConditionalDistribution distribution;
  LabelStats stats;
  BayesPredictor surrogate_bayes;
  MembershipResult membership;
  double epsilon = 0.0;
  double epsilon_bound = 0.0;
  /// Delta_1^+ - Delta_2^+.
  double delta_gap = 0.0;
};

/// c = 2 construction with y1 = (+1,+1), y2 = (+1,-1), y3 = (-1,+1): mass
/// 1 - eps on y1, where eps = P(y2) + P(y3) stays below
/// beta+_{y1} / (beta+_{y1} + max(beta-_{y2}, beta-_{y3})). Throws
/// ConsistencyError when the masses break the construction's preconditions.
HingeCounterexample hinge_counterexample(const PenaltyAssignment& penalties, const HingeCounterexampleConfig& cfg = {});

/// Support size uniform in [2, min(2^c - 2, 8)], atoms drawn without
/// replacement from nontrivial vectors, probabilities flat on the simplex.
ConditionalDistribution sample_distribution(Index label_count, std::uint64_t seed);

struct SearchViolation {
  std::size_t trial = 0;
  ConditionalDistribution distribution;
  PairCondition condition;
};

/// Runs the sign-condition check on `trials` random distributions (c <= 6).
/// When the necessary condition fails, trial 0 is the constructive counterexample.
std::vector<SearchViolation> random_violation_search(const PenaltyAssignment& penalties, BaseLossKind base,
                                                     Index label_count, std::size_t trials, std::uint64_t seed,
                                                     int threads = 1);

} // namespace mlrank
