#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mlrank/consistency.hpp"
#include "test_util.hpp"

using namespace mlrank;
using doctest::Approx;

namespace {

LabelVector lab(std::initializer_list<int> v) {
  LabelVector out(static_cast<Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}

PenaltyAssignment unit_betas() {
  const auto one = [](const LabelVector&) { return 1.0; };
  return PenaltyAssignment::general(one, one);
}

PenaltyAssignment unit_all() {
  const auto one = [](const LabelVector&) { return 1.0; };
  return PenaltyAssignment::general(one, one, one);
}

ConditionalDistribution two_atom() {
  return ConditionalDistribution(2, {{lab({1, -1}), 0.75}, {lab({-1, 1}), 0.25}});
}

std::vector<ExtendedScore> finite_scores(std::initializer_list<double> v) {
  std::vector<ExtendedScore> out;
  for (double x : v) out.push_back(ExtendedScore::finite(x));
  return out;
}

// Expected (partial) ranking loss weighted by alpha, by direct enumeration.
double zero_one_risk(const std::vector<int>& f, const ConditionalDistribution& dist, bool partial) {
  double risk = 0.0;
  for (const auto& atom : dist.support()) {
    const auto& y = atom.labels;
    const double pos = static_cast<double>((y.array() == 1).count());
    const double alpha = 1.0 / (pos * (static_cast<double>(y.size()) - pos));
    for (Index p = 0; p < y.size(); ++p)
      for (Index q = 0; q < y.size(); ++q) {
        if (y(p) != 1 || y(q) != -1) continue;
        const int fp = f[static_cast<std::size_t>(p)], fq = f[static_cast<std::size_t>(q)];
        const double cost = fp < fq ? 1.0 : (fp == fq ? (partial ? 0.5 : 1.0) : 0.0);
        risk += atom.probability * alpha * cost;
      }
  }
  return risk;
}

} // namespace

TEST_CASE("label statistics on a two-atom distribution") {
  const auto s = compute_stats(two_atom(), unit_betas());
  CHECK(s.phi_plus(0) == Approx(0.75));
  CHECK(s.phi_minus(0) == Approx(0.25));
  CHECK(s.phi_plus(1) == Approx(0.25));
  CHECK(s.phi_minus(1) == Approx(0.75));

  const auto a = compute_stats(two_atom(), unit_all());
  CHECK(a.delta_plus(0) == Approx(0.75));
  CHECK(a.delta_minus(0) == Approx(0.25));

  const ConditionalDistribution single(3, {{lab({1, -1, 1}), 1.0}});
  const auto u3 = compute_stats(single, PenaltyAssignment::from_scheme(PenaltyKind::u3));
  CHECK(u3.phi_plus(0) == Approx(0.5));
  CHECK(u3.phi_plus(1) == 0.0);
  CHECK(u3.phi_minus(1) == Approx(1.0));
  CHECK(u3.phi_plus(2) == Approx(0.5));
  CHECK(check_consistency_on_distribution(u3, BaseLossKind::logistic).consistent_here);
}

TEST_CASE("distribution validation") {
  CHECK_THROWS_AS(ConditionalDistribution(2, {}), ConsistencyError);
  CHECK_THROWS_AS(ConditionalDistribution(2, {{lab({1, -1}), 0.5}}), ConsistencyError);
  CHECK_THROWS_AS(ConditionalDistribution(2, {{lab({1, -1}), 0.5}, {lab({1, -1}), 0.5}}), ConsistencyError);
  CHECK_THROWS_AS(ConditionalDistribution(2, {{lab({1, 2}), 1.0}}), ConsistencyError);
}

TEST_CASE("trivial atoms: alpha is zero, undefined betas exclude the atom") {
  CHECK(PenaltyAssignment::partial_ranking_alpha(lab({1, 1})) == 0.0);
  const ConditionalDistribution d(2, {{lab({1, 1}), 0.5}, {lab({1, -1}), 0.5}});
  const auto u2 = compute_stats(d, PenaltyAssignment::from_scheme(PenaltyKind::u2));
  CHECK(u2.excluded_atoms == 1);
  CHECK(u2.phi_plus(1) == 0.0);
  const auto u1 = compute_stats(d, PenaltyAssignment::from_scheme(PenaltyKind::u1));
  CHECK(u1.excluded_atoms == 0);
  CHECK(u1.phi_plus(1) == Approx(0.25));
  CHECK(u1.alpha_mass == Approx(0.5));
}

TEST_CASE("closed-form Bayes predictors") {
  const auto s = compute_stats(two_atom(), unit_betas());
  CHECK(bayes_surrogate(s, BaseLossKind::logistic)[0].value == Approx(std::log(3.0)));
  CHECK(bayes_surrogate(s, BaseLossKind::exponential)[0].value == Approx(0.5 * std::log(3.0)));
  CHECK(bayes_surrogate(s, BaseLossKind::squared_hinge)[0].value == Approx(0.5));
  CHECK(bayes_surrogate(s, BaseLossKind::hinge)[0].value == 1.0);
  CHECK(bayes_surrogate(s, BaseLossKind::hinge)[1].value == -1.0);
  CHECK_THROWS_AS(bayes_surrogate(s, BaseLossKind::logistic_calibrated), ConsistencyError);

  const ConditionalDistribution sure(2, {{lab({1, -1}), 1.0}});
  const auto inf = bayes_surrogate(sure, unit_betas(), BaseLossKind::logistic);
  CHECK(inf[0].kind == ExtendedScore::Kind::positive_infinity);
  CHECK(inf[1].kind == ExtendedScore::Kind::negative_infinity);

  const ConditionalDistribution even(2, {{lab({1, -1}), 0.5}, {lab({-1, 1}), 0.5}});
  CHECK(bayes_surrogate(even, unit_betas(), BaseLossKind::hinge)[0].is_unspecified());
  CHECK(bayes_surrogate(even, unit_betas(), BaseLossKind::squared_hinge)[0].value == 0.0);
}

TEST_CASE("golden-section oracle") {
  CHECK(golden_section_minimizer(0.75, 0.25, BaseLossKind::logistic) == Approx(std::log(3.0)).epsilon(1e-6));
  CHECK(std::abs(golden_section_minimizer(0.6, 0.4, BaseLossKind::hinge) - 1.0) < 1e-6);
  CHECK(std::abs(golden_section_minimizer(0.3, 0.3, BaseLossKind::squared_hinge)) < 1e-6);
}

TEST_CASE("closed form matches the numeric oracle and is locally optimal") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<Index> cdist(2, 4);
  std::normal_distribution<double> g(0.0, 1.0);
  const PenaltyAssignment schemes[] = {PenaltyAssignment::from_scheme(PenaltyKind::u1),
                                       PenaltyAssignment::from_scheme(PenaltyKind::u3), unit_betas()};
  for (int t = 0; t < 300; ++t) {
    const Index c = cdist(rng);
    const auto dist = sample_distribution(c, rng());
    const auto& pen = schemes[t % 3];
    const auto stats = compute_stats(dist, pen);
    for (const auto base : {BaseLossKind::exponential, BaseLossKind::logistic, BaseLossKind::squared_hinge}) {
      const auto closed = bayes_surrogate(stats, base);
      const VectorXd numeric = bayes_numeric_oracle(stats, base);
      bool all_finite = true;
      for (Index j = 0; j < c; ++j) {
        if (stats.phi_plus(j) <= 1e-6 || stats.phi_minus(j) <= 1e-6) {
          all_finite = false;
          continue;
        }
        CHECK(std::abs(closed[static_cast<std::size_t>(j)].value - numeric(j)) < 1e-4);
      }
      if (!all_finite) continue;
      std::vector<double> f(static_cast<std::size_t>(c));
      for (Index j = 0; j < c; ++j) f[static_cast<std::size_t>(j)] = closed[static_cast<std::size_t>(j)].value;
      const double best = conditional_risk(f, dist, pen, base);
      for (std::size_t j = 0; j < f.size(); ++j)
        for (double step : {-0.01, 0.01}) {
          auto moved = f;
          moved[j] += step;
          CHECK(best <= conditional_risk(moved, dist, pen, base) + 1e-12);
        }
      for (int k = 0; k < 20; ++k) {
        std::vector<double> r(f.size());
        for (auto& v : r) v = 2.0 * g(rng);
        CHECK(best <= conditional_risk(r, dist, pen, base) + 1e-12);
      }
      // sign(f_p - f_q) follows the phi determinant.
      for (Index p = 0; p < c; ++p)
        for (Index q = p + 1; q < c; ++q) {
          const double det = stats.phi_plus(p) * stats.phi_minus(q) - stats.phi_minus(p) * stats.phi_plus(q);
          const double diff = f[static_cast<std::size_t>(p)] - f[static_cast<std::size_t>(q)];
          if (std::abs(det) > 1e-9) CHECK((det > 0) == (diff > 0));
        }
    }
  }
}

TEST_CASE("stats identity: delta+ + delta- is the same for every label") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    const auto dist = sample_distribution(5, rng());
    const auto s = compute_stats(dist, PenaltyAssignment::from_scheme(PenaltyKind::u4));
    for (Index p = 0; p < 5; ++p) CHECK(std::abs(s.delta_plus(p) + s.delta_minus(p) - s.alpha_mass) < 1e-12);
  }
}

TEST_CASE("zero-one Bayes membership on hand cases") {
  const ConditionalDistribution d(2, {{lab({1, -1}), 0.7}, {lab({-1, 1}), 0.3}});
  const auto s = compute_stats(d, unit_betas());
  REQUIRE(s.delta_plus(0) > s.delta_plus(1));
  CHECK(zero_one_bayes_membership(finite_scores({2, 1}), s, RankingMeasure::partial_ranking).member);
  const auto tied = zero_one_bayes_membership(finite_scores({1, 1}), s, RankingMeasure::partial_ranking);
  CHECK_FALSE(tied.member);
  REQUIRE(tied.violations.size() == 1);
  CHECK(tied.violations[0] == std::pair<Index, Index>{0, 1});

  const ConditionalDistribution even(2, {{lab({1, -1}), 0.5}, {lab({-1, 1}), 0.5}});
  const auto e = compute_stats(even, unit_betas());
  CHECK(zero_one_bayes_membership(finite_scores({1, 1}), e, RankingMeasure::partial_ranking).member);
  CHECK(zero_one_bayes_membership(finite_scores({0, 5}), e, RankingMeasure::partial_ranking).member);
  CHECK_FALSE(zero_one_bayes_membership(finite_scores({1, 1}), e, RankingMeasure::ranking).member);
  CHECK(zero_one_bayes_membership(finite_scores({1, 2}), e, RankingMeasure::ranking).member);

  std::vector<ExtendedScore> open{ExtendedScore::unspecified(), ExtendedScore::finite(0.0)};
  const auto amb = zero_one_bayes_membership(open, e, RankingMeasure::ranking);
  CHECK(amb.member);
  CHECK(amb.ambiguous);
  std::vector<ExtendedScore> inf{ExtendedScore::plus_infinity(), ExtendedScore::finite(1e300)};
  CHECK(zero_one_bayes_membership(inf, s, RankingMeasure::partial_ranking).member);
}

TEST_CASE("membership agrees with brute-force minimization over weak orders") {
  std::mt19937_64 rng(3);
  int compared = 0;
  for (int t = 0; t < 300; ++t) {
    const Index c = 3 + t % 2;
    const auto dist = sample_distribution(c, rng());
    const auto stats = compute_stats(dist, PenaltyAssignment::from_scheme(PenaltyKind::u2));
    bool degenerate_pair = false;
    for (Index p = 0; p < c; ++p)
      for (Index q = p + 1; q < c; ++q)
        if (stats.delta_pm()(p, q) == 0.0 && stats.delta_mp()(p, q) == 0.0) degenerate_pair = true;

    std::size_t total = 1;
    for (Index j = 0; j < c; ++j) total *= static_cast<std::size_t>(c);
    for (const bool partial : {true, false}) {
      if (!partial && degenerate_pair) continue;
      double best = std::numeric_limits<double>::infinity();
      std::vector<std::vector<int>> orders;
      for (std::size_t code = 0; code < total; ++code) {
        std::vector<int> f(static_cast<std::size_t>(c));
        std::size_t rest = code;
        for (auto& v : f) {
          v = static_cast<int>(rest % static_cast<std::size_t>(c));
          rest /= static_cast<std::size_t>(c);
        }
        best = std::min(best, zero_one_risk(f, dist, partial));
        orders.push_back(std::move(f));
      }
      for (const auto& f : orders) {
        std::vector<ExtendedScore> scores;
        for (int v : f) scores.push_back(ExtendedScore::finite(v));
        const bool member = zero_one_bayes_membership(
                                scores, stats, partial ? RankingMeasure::partial_ranking : RankingMeasure::ranking)
                                .member;
        const bool optimal = zero_one_risk(f, dist, partial) <= best + 1e-12;
        CHECK(member == optimal);
        ++compared;
      }
    }
  }
  CHECK(compared > 1000);
}

TEST_CASE("sign condition: u2 has no violations, u1 breaks on the corollary pair") {
  std::mt19937_64 rng(4);
  const auto u2 = PenaltyAssignment::from_scheme(PenaltyKind::u2);
  for (int t = 0; t < 500; ++t) {
    const auto dist = sample_distribution(4, rng());
    CHECK(check_consistency_on_distribution(dist, u2, BaseLossKind::logistic).consistent_here);
  }
  const auto ce = corollary_counterexample(PenaltyAssignment::from_scheme(PenaltyKind::u1), 4);
  REQUIRE(ce.has_value());
  CHECK_FALSE(ce->verdict.consistent_here);
  CHECK_THROWS_AS(check_consistency_on_distribution(two_atom(), u2, BaseLossKind::hinge), ConsistencyError);
}

TEST_CASE("necessary condition tau") {
  for (Index c = 2; c <= 12; ++c) {
    const auto r = necessary_condition_tau(PenaltyAssignment::from_scheme(PenaltyKind::u2), c);
    CHECK(r.holds);
    REQUIRE(r.exact_tau.has_value());
    CHECK(*r.exact_tau == Rational(1));
  }
  const auto u1 = necessary_condition_tau(PenaltyAssignment::from_scheme(PenaltyKind::u1), 4);
  REQUIRE_FALSE(u1.holds);
  CHECK(*u1.witness->exact_ratio == Rational(9, 16));
  CHECK(*u1.witness->exact_ratio_prime == Rational(1));
  const auto u4 = necessary_condition_tau(PenaltyAssignment::from_scheme(PenaltyKind::u4), 4);
  CHECK(*u4.witness->exact_ratio == Rational(9));
  CHECK(*u4.witness->exact_ratio_prime == Rational(4));

  // (c-1)^2/c^2 vs 4(c-2)^2/c^2 for u1 at general c.
  for (Index c = 4; c <= 9; ++c) {
    CHECK(exact_class_ratio(PenaltyKind::u1, 1, c) == Rational((c - 1) * (c - 1), c * c));
    CHECK(exact_class_ratio(PenaltyKind::u1, 2, c) == Rational(4 * (c - 2) * (c - 2), c * c));
  }

  // General penalties go through enumeration; beta = alpha gives tau = 1.
  const auto same = PenaltyAssignment::general(PenaltyAssignment::partial_ranking_alpha,
                                               PenaltyAssignment::partial_ranking_alpha);
  const auto g = necessary_condition_tau(same, 6);
  CHECK(g.holds);
  CHECK(g.tau == Approx(1.0));
  CHECK_FALSE(necessary_condition_tau(unit_betas(), 4).holds);
  CHECK(leading_positive_labels(2, 4) == lab({1, 1, -1, -1}));
}

TEST_CASE("hinge construction") {
  const auto h = hinge_counterexample(unit_betas(), {0.2, 0.1});
  CHECK(h.stats.phi_plus(0) == Approx(0.9));
  CHECK(h.stats.phi_minus(0) == Approx(0.1));
  CHECK(h.surrogate_bayes[0].value == 1.0);
  CHECK(h.surrogate_bayes[1].value == 1.0);
  CHECK_FALSE(h.membership.member);
  CHECK(h.delta_gap == Approx(0.2 - 0.1));
  CHECK(h.epsilon < h.epsilon_bound);
  CHECK_THROWS_AS(hinge_counterexample(unit_betas(), {0.15, 0.15}), ConsistencyError);
  CHECK_THROWS_AS(hinge_counterexample(unit_betas(), {0.4, 0.3}), ConsistencyError);
}

TEST_CASE("random search") {
  const auto u2 = PenaltyAssignment::from_scheme(PenaltyKind::u2);
  const auto u3 = PenaltyAssignment::from_scheme(PenaltyKind::u3);
  CHECK(random_violation_search(u2, BaseLossKind::logistic, 4, 10000, 1, 4).empty());
  const auto found = random_violation_search(u3, BaseLossKind::logistic, 4, 10000, 1, 4);
  REQUIRE_FALSE(found.empty());
  CHECK(found.front().trial == 0);
  CHECK(random_violation_search(u3, BaseLossKind::logistic, 4, 0, 1).empty());

  const auto a = random_violation_search(u3, BaseLossKind::exponential, 3, 500, 9, 1);
  const auto b = random_violation_search(u3, BaseLossKind::exponential, 3, 500, 9, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].trial == b[i].trial);
  CHECK_THROWS_AS(random_violation_search(u3, BaseLossKind::logistic, 7, 10, 1), ConsistencyError);
}

TEST_CASE("sampled distributions respect the support rule") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto d = sample_distribution(2 + static_cast<Index>(seed % 4), seed);
    const auto n = d.support().size();
    CHECK(n >= 2);
    CHECK(n <= 8);
    double total = 0.0;
    for (const auto& a : d.support()) {
      total += a.probability;
      CHECK((a.labels.array() == 1).any());
      CHECK((a.labels.array() == -1).any());
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}
