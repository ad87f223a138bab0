#include "mlrank/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <set>

#include "mlrank/parallel.hpp"

namespace mlrank {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::pair<Index, Index> count_signs(const LabelVector& y) {
  const Index pos = (y.array() > 0).count();
  return {pos, y.size() - pos};
}

LabelVector labels_from_mask(std::uint32_t mask, Index c) {
  LabelVector y(c);
  for (Index j = 0; j < c; ++j) y(j) = (mask >> j) & 1U ? 1 : -1;
  return y;
}

bool usable(double w) { return std::isfinite(w) && w > 0.0; }

/// (beta+, beta-) of an atom with NaN on a side it does not need; nullopt if a needed side is unusable.
std::optional<std::pair<double, double>> atom_betas(const LabelVector& y, const PenaltyAssignment& penalties) {
  const auto [pos, neg] = count_signs(y);
  const double bp = pos > 0 ? penalties.beta_plus(y) : kNaN;
  const double bm = neg > 0 ? penalties.beta_minus(y) : kNaN;
  if ((pos > 0 && !usable(bp)) || (neg > 0 && !usable(bm))) return std::nullopt;
  return std::pair{bp, bm};
}

double sign_with_tolerance(double v, double tol) { return v > tol ? 1.0 : (v < -tol ? -1.0 : 0.0); }

void require_supported(BaseLossKind base, bool allow_hinge) {
  const bool ok = base == BaseLossKind::exponential || base == BaseLossKind::logistic ||
                  base == BaseLossKind::squared_hinge || (allow_hinge && base == BaseLossKind::hinge);
  if (!ok) throw ConsistencyError("base loss " + std::string(to_string(base)) + " is not supported here");
}

} // namespace

ConditionalDistribution::ConditionalDistribution(Index label_count, std::vector<LabelAtom> support)
    : label_count_(label_count), support_(std::move(support)) {
  if (label_count_ < 2) throw ConsistencyError("need at least two labels");
  if (support_.empty()) throw ConsistencyError("distribution has empty support");
  std::set<std::vector<int>> seen;
  double total = 0.0;
  for (const auto& atom : support_) {
    if (atom.labels.size() != label_count_) throw ConsistencyError("atom has the wrong number of labels");
    if (((atom.labels.array() != 1) && (atom.labels.array() != -1)).any())
      throw ConsistencyError("atom labels must be -1 or +1");
    if (!(atom.probability > 0.0) || !std::isfinite(atom.probability))
      throw ConsistencyError("atom probabilities must be positive");
    if (!seen.emplace(atom.labels.data(), atom.labels.data() + atom.labels.size()).second)
      throw ConsistencyError("duplicate label vector in support");
    total += atom.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConsistencyError("probabilities do not sum to 1");
}

double PenaltyAssignment::partial_ranking_alpha(const LabelVector& labels) {
  const auto [pos, neg] = count_signs(labels);
  if (pos == 0 || neg == 0) return 0.0;
  return 1.0 / static_cast<double>(pos * neg);
}

PenaltyAssignment PenaltyAssignment::from_scheme(PenaltyKind kind) {
  if (kind == PenaltyKind::general) throw ConsistencyError("general schemes need explicit penalty functions");
  auto side = [kind](bool plus) {
    return [kind, plus](const LabelVector& y) {
      const auto [pos, neg] = count_signs(y);
      if ((plus && pos == 0) || (!plus && neg == 0)) return kNaN;
      // The side in use is defined even when the other side's count is zero
      // for u1 and u3; u2 and u4 divide by a product or minimum that vanishes.
      if (pos == 0 || neg == 0) {
        const double c = static_cast<double>(y.size());
        if (kind == PenaltyKind::u1) return 1.0 / c;
        if (kind == PenaltyKind::u3) return 1.0 / static_cast<double>(plus ? pos : neg);
        return kNaN;
      }
      const auto w = PenaltyScheme::table_weights(kind, pos, y.size());
      return plus ? w->positive : w->negative;
    };
  };
  return PenaltyAssignment{partial_ranking_alpha, side(true), side(false), kind};
}

PenaltyAssignment PenaltyAssignment::general(Fn beta_plus, Fn beta_minus, Fn alpha) {
  return PenaltyAssignment{std::move(alpha), std::move(beta_plus), std::move(beta_minus), std::nullopt};
}

LabelStats compute_stats(const ConditionalDistribution& dist, const PenaltyAssignment& penalties) {
  const Index c = dist.label_count();
  LabelStats s;
  s.phi_plus = VectorXd::Zero(c);
  s.phi_minus = VectorXd::Zero(c);
  s.delta_plus = VectorXd::Zero(c);
  s.delta_minus = VectorXd::Zero(c);
  for (auto& row : s.delta_pair)
    for (auto& m : row) m = MatrixXd::Zero(c, c);

  Index used = 0;
  for (const auto& atom : dist.support()) {
    const LabelVector& y = atom.labels;
    const auto betas = atom_betas(y, penalties);
    const double alpha = penalties.alpha(y);
    if (!betas || !std::isfinite(alpha) || alpha < 0.0) {
      ++s.excluded_atoms;
      continue;
    }
    ++used;
    const double P = atom.probability;
    const double aP = alpha * P;
    s.alpha_mass += aP;
    for (Index j = 0; j < c; ++j) {
      if (y(j) > 0) {
        s.phi_plus(j) += betas->first * P;
        s.delta_plus(j) += aP;
      } else {
        s.phi_minus(j) += betas->second * P;
        s.delta_minus(j) += aP;
      }
    }
    for (Index p = 0; p < c; ++p)
      for (Index q = 0; q < c; ++q)
        if (p != q) s.delta_pair[y(p) > 0 ? 0 : 1][y(q) > 0 ? 0 : 1](p, q) += aP;
  }
  if (used == 0) throw ConsistencyError("no atom has usable penalties");
  return s;
}

int compare(const ExtendedScore& a, const ExtendedScore& b) {
  if (a.is_unspecified() || b.is_unspecified()) throw ConsistencyError("cannot order an unspecified score");
  auto rank = [](const ExtendedScore& s) {
    switch (s.kind) {
      case ExtendedScore::Kind::negative_infinity: return -1;
      case ExtendedScore::Kind::positive_infinity: return 1;
      default: return 0;
    }
  };
  const int ra = rank(a), rb = rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (ra != 0) return 0;
  return a.value < b.value ? -1 : (a.value > b.value ? 1 : 0);
}

std::string ExtendedScore::to_string() const {
  switch (kind) {
    case Kind::positive_infinity: return "+inf";
    case Kind::negative_infinity: return "-inf";
    case Kind::unspecified: return "unspecified";
    case Kind::finite: break;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

BayesPredictor bayes_surrogate(const LabelStats& stats, BaseLossKind base) {
  require_supported(base, true);
  BayesPredictor f;
  f.reserve(static_cast<std::size_t>(stats.phi_plus.size()));
  for (Index j = 0; j < stats.phi_plus.size(); ++j) {
    const double pp = stats.phi_plus(j), pm = stats.phi_minus(j);
    if (pp == 0.0 && pm == 0.0) {
      f.push_back(ExtendedScore::unspecified());
      continue;
    }
    switch (base) {
      case BaseLossKind::exponential:
      case BaseLossKind::logistic: {
        const double C = base == BaseLossKind::exponential ? 0.5 : 1.0;
        if (pm == 0.0) f.push_back(ExtendedScore::plus_infinity());
        else if (pp == 0.0) f.push_back(ExtendedScore::minus_infinity());
        else f.push_back(ExtendedScore::finite(C * std::log(pp / pm)));
        break;
      }
      case BaseLossKind::squared_hinge:
        f.push_back(ExtendedScore::finite((pp - pm) / (pp + pm)));
        break;
      case BaseLossKind::hinge: {
        const double gap = pp - pm;
        const double tol = kTieTolerance * (pp + pm);
        if (gap > tol) f.push_back(ExtendedScore::finite(1.0));
        else if (gap < -tol) f.push_back(ExtendedScore::finite(-1.0));
        else f.push_back(ExtendedScore::unspecified());
        break;
      }
      default:
        break;
    }
  }
  return f;
}

BayesPredictor bayes_surrogate(const ConditionalDistribution& dist, const PenaltyAssignment& penalties,
                               BaseLossKind base) {
  return bayes_surrogate(compute_stats(dist, penalties), base);
}

double golden_section_minimizer(double phi_plus, double phi_minus, BaseLossKind base, const OracleConfig& cfg) {
  const auto g = [&](double z) {
    return phi_plus * base_loss_value(base, z) + phi_minus * base_loss_value(base, -z);
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = cfg.lower, b = cfg.upper;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double g1 = g(x1), g2 = g(x2);
  while (b - a > cfg.tolerance) {
    if (g1 <= g2) {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - inv_phi * (b - a);
      g1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + inv_phi * (b - a);
      g2 = g(x2);
    }
  }
  return 0.5 * (a + b);
}

VectorXd bayes_numeric_oracle(const LabelStats& stats, BaseLossKind base, const OracleConfig& cfg) {
  VectorXd f(stats.phi_plus.size());
  for (Index j = 0; j < f.size(); ++j) f(j) = golden_section_minimizer(stats.phi_plus(j), stats.phi_minus(j), base, cfg);
  return f;
}

double conditional_risk(std::span<const double> scores, const ConditionalDistribution& dist,
                        const PenaltyAssignment& penalties, BaseLossKind base) {
  if (static_cast<Index>(scores.size()) != dist.label_count()) throw ConsistencyError("score length mismatch");
  double risk = 0.0;
  for (const auto& atom : dist.support()) {
    const auto betas = atom_betas(atom.labels, penalties);
    if (!betas) continue;
    double loss = 0.0;
    for (Index j = 0; j < dist.label_count(); ++j) {
      const int yj = atom.labels(j);
      const double w = yj > 0 ? betas->first : betas->second;
      loss += w * base_loss_value(base, yj * scores[static_cast<std::size_t>(j)]);
    }
    risk += atom.probability * loss;
  }
  return risk;
}

MembershipResult zero_one_bayes_membership(std::span<const ExtendedScore> scores, const LabelStats& stats,
                                           RankingMeasure measure) {
  const Index c = stats.phi_plus.size();
  if (static_cast<Index>(scores.size()) != c) throw ConsistencyError("score length mismatch");
  const double tol = kTieTolerance * std::max(stats.alpha_mass, std::numeric_limits<double>::min());

  // requirement(p, q): +1 needs f_p > f_q, -1 needs f_p < f_q, 0 needs f_p != f_q (ranking only), 2 none.
  std::vector<std::tuple<Index, Index, int>> requirements;
  MembershipResult result;
  for (Index p = 0; p < c; ++p)
    for (Index q = p + 1; q < c; ++q) {
      const double d = stats.delta_pm()(p, q) - stats.delta_mp()(p, q);
      const double s = sign_with_tolerance(d, tol);
      if (s != 0.0) {
        requirements.emplace_back(p, q, static_cast<int>(s));
      } else if (measure == RankingMeasure::ranking) {
        requirements.emplace_back(p, q, 0);
        if (scores[static_cast<std::size_t>(p)].is_unspecified() || scores[static_cast<std::size_t>(q)].is_unspecified())
          result.ambiguous = true;
      }
    }

  std::vector<std::size_t> open;
  for (std::size_t j = 0; j < scores.size(); ++j)
    if (scores[j].is_unspecified()) open.push_back(j);
  if (open.size() > 12) throw ConsistencyError("too many unspecified scores to enumerate");

  std::vector<ExtendedScore> trial(scores.begin(), scores.end());
  std::size_t assignments = 1;
  for (std::size_t k = 0; k < open.size(); ++k) assignments *= 3;
  std::optional<std::vector<std::pair<Index, Index>>> best;
  for (std::size_t a = 0; a < assignments; ++a) {
    std::size_t code = a;
    for (const std::size_t j : open) {
      trial[j] = ExtendedScore::finite(static_cast<double>(code % 3) - 1.0);
      code /= 3;
    }
    std::vector<std::pair<Index, Index>> violated;
    for (const auto& [p, q, need] : requirements) {
      const int order = compare(trial[static_cast<std::size_t>(p)], trial[static_cast<std::size_t>(q)]);
      const bool ok = need == 0 ? order != 0 : order == need;
      if (!ok) violated.emplace_back(p, q);
    }
    if (!best || violated.size() < best->size()) best = std::move(violated);
    if (best->empty()) break;
  }
  result.violations = std::move(*best);
  result.member = result.violations.empty();
  return result;
}

ConsistencyVerdict check_consistency_on_distribution(const LabelStats& stats, BaseLossKind base) {
  require_supported(base, false);
  const Index c = stats.phi_plus.size();
  const double tol_delta = kTieTolerance * stats.alpha_mass * stats.alpha_mass;
  const double phi_scale = (stats.phi_plus + stats.phi_minus).maxCoeff();
  const double tol_phi = kTieTolerance * phi_scale * phi_scale;
  for (Index p = 0; p < c; ++p)
    for (Index q = p + 1; q < c; ++q) {
      const double D = stats.delta_plus(p) * stats.delta_minus(q) - stats.delta_minus(p) * stats.delta_plus(q);
      const double F = stats.phi_plus(p) * stats.phi_minus(q) - stats.phi_minus(p) * stats.phi_plus(q);
      const double sd = sign_with_tolerance(D, tol_delta);
      if (sd != 0.0 && sign_with_tolerance(F, tol_phi) != sd) return {false, PairCondition{p, q, D, F}};
    }
  return {true, std::nullopt};
}

ConsistencyVerdict check_consistency_on_distribution(const ConditionalDistribution& dist,
                                                     const PenaltyAssignment& penalties, BaseLossKind base) {
  return check_consistency_on_distribution(compute_stats(dist, penalties), base);
}

Rational exact_class_ratio(PenaltyKind kind, Index positives, Index label_count) {
  if (label_count < 2 || positives < 1 || positives >= label_count)
    throw ConsistencyError("class ratio needs 1 <= |S+| <= c-1");
  const long long k = positives, n = label_count - positives, c = label_count;
  const Rational alpha(1, k * n);
  Rational bp, bm;
  switch (kind) {
    case PenaltyKind::u1: bp = bm = Rational(1, c); break;
    case PenaltyKind::u2: bp = bm = Rational(1, k * n); break;
    case PenaltyKind::u3: bp = Rational(1, k); bm = Rational(1, n); break;
    case PenaltyKind::u4: bp = bm = Rational(1, std::min(k, n)); break;
    case PenaltyKind::general: throw ConsistencyError("general schemes have no tabulated ratio");
  }
  return bp * bm / (alpha * alpha);
}

LabelVector leading_positive_labels(Index positives, Index label_count) {
  LabelVector y = LabelVector::Constant(label_count, -1);
  y.head(positives).setConstant(1);
  return y;
}

namespace {

double ratio_of(const LabelVector& y, const PenaltyAssignment& penalties) {
  const double a = penalties.alpha(y);
  const double bp = penalties.beta_plus(y), bm = penalties.beta_minus(y);
  if (!usable(a) || !usable(bp) || !usable(bm))
    throw ConsistencyError("penalties must be positive on nontrivial label vectors");
  return bp * bm / (a * a);
}

bool ratios_differ(double r, double s) { return std::abs(r - s) > 1e-12 * std::max(std::abs(r), std::abs(s)); }

} // namespace

TauCheck necessary_condition_tau(const PenaltyAssignment& penalties, Index label_count) {
  if (label_count < 2) throw ConsistencyError("need at least two labels");
  TauCheck out;
  if (penalties.table_kind) {
    const PenaltyKind kind = *penalties.table_kind;
    const Rational r1 = exact_class_ratio(kind, 1, label_count);
    for (Index k = 2; k < label_count; ++k) {
      const Rational rk = exact_class_ratio(kind, k, label_count);
      if (rk != r1) {
        TauWitness w;
        w.y = leading_positive_labels(1, label_count);
        w.y_prime = leading_positive_labels(k, label_count);
        w.exact_ratio = r1;
        w.exact_ratio_prime = rk;
        w.ratio = boost::rational_cast<double>(r1);
        w.ratio_prime = boost::rational_cast<double>(rk);
        out.witness = std::move(w);
        return out;
      }
    }
    out.holds = true;
    out.exact_tau = r1;
    out.tau = boost::rational_cast<double>(r1);
    return out;
  }
  if (label_count > 20) throw ConsistencyError("enumeration beyond 20 labels needs a tabulated scheme");
  const std::uint32_t last = (1U << label_count) - 1U;
  std::optional<std::pair<LabelVector, double>> first;
  for (std::uint32_t mask = 1; mask < last; ++mask) {
    LabelVector y = labels_from_mask(mask, label_count);
    const double r = ratio_of(y, penalties);
    if (!first) {
      first.emplace(std::move(y), r);
    } else if (ratios_differ(r, first->second)) {
      out.witness = TauWitness{first->first, std::move(y), first->second, r, std::nullopt, std::nullopt};
      return out;
    }
  }
  out.holds = true;
  out.tau = first->second;
  return out;
}

std::optional<Counterexample> corollary_counterexample(const PenaltyAssignment& penalties, Index label_count) {
  const TauCheck tau = necessary_condition_tau(penalties, label_count);
  if (tau.holds) return std::nullopt;

  LabelVector y, y_prime;
  Index p = 0, q = 0;
  if (penalties.table_kind) {
    // y has its first k1 labels positive; flip (0, k1) and fill the rest so y' lands in class k2.
    const Index k1 = (tau.witness->y.array() > 0).count();
    const Index k2 = (tau.witness->y_prime.array() > 0).count();
    y = leading_positive_labels(k1, label_count);
    p = 0;
    q = k1;
    y_prime = LabelVector::Constant(label_count, -1);
    y_prime(q) = 1;
    Index remaining = k2 - 1;
    for (Index j = 1; j < label_count && remaining > 0; ++j)
      if (j != q) {
        y_prime(j) = 1;
        --remaining;
      }
  } else {
    if (label_count > 10) throw ConsistencyError("counterexample search beyond 10 labels needs a tabulated scheme");
    const std::uint32_t last = (1U << label_count) - 1U;
    bool found = false;
    for (std::uint32_t a = 1; a < last && !found; ++a) {
      const LabelVector ya = labels_from_mask(a, label_count);
      const double ra = ratio_of(ya, penalties);
      for (std::uint32_t b = 1; b < last && !found; ++b) {
        const LabelVector yb = labels_from_mask(b, label_count);
        if (!ratios_differ(ra, ratio_of(yb, penalties))) continue;
        for (Index i = 0; i < label_count && !found; ++i)
          for (Index k = 0; k < label_count && !found; ++k)
            if (i != k && ya(i) > 0 && ya(k) < 0 && yb(i) < 0 && yb(k) > 0) {
              y = ya;
              y_prime = yb;
              p = std::min(i, k);
              q = std::max(i, k);
              found = true;
            }
      }
    }
    if (!found) return std::nullopt;
  }

  const double a = penalties.alpha(y), a_prime = penalties.alpha(y_prime);
  const double b = penalties.beta_plus(y) * penalties.beta_minus(y);
  const double b_prime = penalties.beta_plus(y_prime) * penalties.beta_minus(y_prime);
  const double t_delta = a_prime / a;
  const double t_phi = std::sqrt(b_prime / b);
  const double t = std::sqrt(t_delta * t_phi);
  ConditionalDistribution dist(label_count, {{y, t / (1.0 + t)}, {y_prime, 1.0 / (1.0 + t)}});
  LabelStats stats = compute_stats(dist, penalties);
  ConsistencyVerdict verdict = check_consistency_on_distribution(stats, BaseLossKind::logistic);
  return Counterexample{std::move(dist), std::move(stats), std::move(verdict), p, q};
}

HingeCounterexample hinge_counterexample(const PenaltyAssignment& penalties, const HingeCounterexampleConfig& cfg) {
  const LabelVector y1 = (LabelVector(2) << 1, 1).finished();
  const LabelVector y2 = (LabelVector(2) << 1, -1).finished();
  const LabelVector y3 = (LabelVector(2) << -1, 1).finished();
  const double bp1 = penalties.beta_plus(y1);
  const double bm2 = penalties.beta_minus(y2), bm3 = penalties.beta_minus(y3);
  if (!usable(bp1) || !usable(bm2) || !usable(bm3))
    throw ConsistencyError("construction needs positive beta+ on (+1,+1) and beta- on (+1,-1), (-1,+1)");
  if (!(cfg.mass_y2 > 0.0) || !(cfg.mass_y3 > 0.0)) throw ConsistencyError("both masses must be positive");

  HingeCounterexample out{ConditionalDistribution(2, {{y1, 1.0}}), {}, {}, {}, 0.0, 0.0, 0.0};
  out.epsilon = cfg.mass_y2 + cfg.mass_y3;
  out.epsilon_bound = bp1 / (bp1 + std::max(bm2, bm3));
  if (!(out.epsilon < out.epsilon_bound))
    throw ConsistencyError("mass on (+1,-1) and (-1,+1) must stay below " + std::to_string(out.epsilon_bound));
  const double w2 = penalties.alpha(y2) * cfg.mass_y2, w3 = penalties.alpha(y3) * cfg.mass_y3;
  if (!(std::abs(w2 - w3) > kTieTolerance * (w2 + w3)))
    throw ConsistencyError("alpha-weighted masses of (+1,-1) and (-1,+1) must differ");

  out.distribution = ConditionalDistribution(2, {{y1, 1.0 - out.epsilon}, {y2, cfg.mass_y2}, {y3, cfg.mass_y3}});
  out.stats = compute_stats(out.distribution, penalties);
  out.surrogate_bayes = bayes_surrogate(out.stats, BaseLossKind::hinge);
  out.membership = zero_one_bayes_membership(out.surrogate_bayes, out.stats, RankingMeasure::partial_ranking);
  out.delta_gap = out.stats.delta_plus(0) - out.stats.delta_plus(1);
  return out;
}

ConditionalDistribution sample_distribution(Index label_count, std::uint64_t seed) {
  if (label_count < 2 || label_count > 20) throw ConsistencyError("sampler supports 2 <= c <= 20");
  std::mt19937_64 rng(seed);
  const std::uint32_t nontrivial = (1U << label_count) - 2U;
  const auto max_support = static_cast<std::uint32_t>(std::min<std::uint32_t>(nontrivial, 8U));
  const auto size = std::uniform_int_distribution<std::uint32_t>(2, max_support)(rng);
  std::uniform_int_distribution<std::uint32_t> pick(1, nontrivial);
  std::vector<std::uint32_t> masks;
  while (masks.size() < size) {
    const std::uint32_t m = pick(rng);
    if (std::find(masks.begin(), masks.end(), m) == masks.end()) masks.push_back(m);
  }
  std::exponential_distribution<double> gamma1(1.0);
  std::vector<double> weights;
  double total = 0.0;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    weights.push_back(std::max(gamma1(rng), 1e-300));
    total += weights.back();
  }
  std::vector<LabelAtom> atoms;
  for (std::size_t i = 0; i < masks.size(); ++i)
    atoms.push_back({labels_from_mask(masks[i], label_count), weights[i] / total});
  return ConditionalDistribution(label_count, std::move(atoms));
}

std::vector<SearchViolation> random_violation_search(const PenaltyAssignment& penalties, BaseLossKind base,
                                                     Index label_count, std::size_t trials, std::uint64_t seed,
                                                     int threads) {
  require_supported(base, false);
  if (label_count < 2 || label_count > 6) throw ConsistencyError("random search supports 2 <= c <= 6");
  if (trials == 0) return {};
  const auto constructive = label_count >= 3 ? corollary_counterexample(penalties, label_count) : std::nullopt;

  std::vector<std::optional<SearchViolation>> slots(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    ConditionalDistribution dist = (t == 0 && constructive) ? constructive->distribution
                                                             : sample_distribution(label_count, derive_seed(seed, {t}));
    const ConsistencyVerdict v = check_consistency_on_distribution(dist, penalties, base);
    if (!v.consistent_here) slots[t] = SearchViolation{t, std::move(dist), *v.violation};
  });
  std::vector<SearchViolation> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

} // namespace mlrank
