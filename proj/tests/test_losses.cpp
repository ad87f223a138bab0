#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mlrank/base_loss.hpp"
#include "mlrank/losses.hpp"
#include "test_util.hpp"

using namespace mlrank;
using doctest::Approx;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}

LabelVector lab(std::initializer_list<int> v) {
  LabelVector out(static_cast<Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}

// Independent oracle: enumerate positive/negative pairs directly.
double brute_rank(const VectorXd& f, const LabelVector& y, bool partial) {
  double bad = 0.0, pairs = 0.0;
  for (Index p = 0; p < f.size(); ++p)
    for (Index q = 0; q < f.size(); ++q) {
      if (y(p) != 1 || y(q) != -1) continue;
      pairs += 1.0;
      if (f(p) < f(q)) bad += 1.0;
      else if (f(p) == f(q)) bad += partial ? 0.5 : 1.0;
    }
  return bad / pairs;
}

// Independent oracle: Table 2 weights written out from the definitions.
std::pair<double, double> table_oracle(PenaltyKind kind, int pos, int c) {
  const int neg = c - pos;
  switch (kind) {
    case PenaltyKind::u1: return {1.0 / c, 1.0 / c};
    case PenaltyKind::u2: return {1.0 / (pos * neg), 1.0 / (pos * neg)};
    case PenaltyKind::u3: return {1.0 / pos, 1.0 / neg};
    case PenaltyKind::u4: return {1.0 / std::min(pos, neg), 1.0 / std::min(pos, neg)};
    default: return {0, 0};
  }
}

constexpr BaseLossKind kAllBases[] = {BaseLossKind::exponential, BaseLossKind::logistic,
                                      BaseLossKind::logistic_calibrated, BaseLossKind::hinge,
                                      BaseLossKind::squared_hinge};

} // namespace

TEST_CASE("base loss values and derivatives") {
  CHECK(base_loss(BaseLossKind::hinge, 0.0).value == 1.0);
  CHECK(base_loss(BaseLossKind::hinge, 0.0).derivative == -1.0);
  CHECK(base_loss(BaseLossKind::hinge, 1.0).derivative == -1.0);
  CHECK(base_loss(BaseLossKind::logistic, 0.0).value == Approx(std::log(2.0)));
  CHECK(base_loss(BaseLossKind::logistic, 0.0).derivative == Approx(-0.5));
  CHECK(base_loss(BaseLossKind::squared_hinge, 2.0).value == 0.0);
  CHECK(base_loss(BaseLossKind::squared_hinge, 2.0).derivative == 0.0);
  CHECK(base_loss(BaseLossKind::logistic_calibrated, 0.0).value == Approx(1.0));
  CHECK(base_loss(BaseLossKind::exponential, 0.0).value == 1.0);
  CHECK(std::isfinite(base_loss(BaseLossKind::exponential, -1e6).value));
  CHECK(base_loss(BaseLossKind::logistic, -800.0).value == Approx(800.0));
  CHECK(base_loss(BaseLossKind::logistic, 800.0).value == 0.0);
}

TEST_CASE("base losses are nonnegative, non-increasing and match finite differences") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (const auto kind : kAllBases) {
    for (int t = 0; t < 500; ++t) {
      const double z = u(rng);
      const auto lp = base_loss(kind, z);
      CHECK(lp.value >= 0.0);
      CHECK(lp.derivative <= 0.0);
      if (dominates_zero_one(kind)) CHECK(lp.value >= (z <= 0.0 ? 1.0 : 0.0));
      if (std::abs(z - 1.0) < 1e-3) continue;
      const double h = 1e-6;
      const double fd = (base_loss_value(kind, z + h) - base_loss_value(kind, z - h)) / (2 * h);
      CHECK(lp.derivative == Approx(fd).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("ranking loss counts ties fully, partial ranking loss by half") {
  const auto y = lab({1, -1, -1});
  const auto f = vec({0.5, 0.5, 0.1});
  CHECK(ranking_loss(f, y) == 0.5);
  CHECK(partial_ranking_loss(f, y) == 0.25);
  CHECK(ranking_loss(vec({1.0, 0.0}), lab({1, -1})) == 0.0);
  CHECK(ranking_loss(vec({0.0, 1.0}), lab({1, -1})) == 1.0);
  CHECK(partial_ranking_loss(vec({0.0, 0.0}), lab({1, -1})) == 0.5);
  CHECK_THROWS_AS(ranking_loss(vec({0.0, 1.0}), lab({1, 1})), LossError);
  CHECK_THROWS_AS(partial_ranking_loss(vec({0.0, 1.0}), lab({-1, -1})), LossError);
}

TEST_CASE("ranking measures match pair enumeration and are scale and permutation invariant") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<Index> cdist(2, 12);
  std::uniform_int_distribution<int> level(-2, 2);
  for (int t = 0; t < 2000; ++t) {
    const Index c = cdist(rng);
    const auto y = testing::random_nontrivial_labels(rng, c);
    VectorXd f(c);
    for (Index j = 0; j < c; ++j) f(j) = level(rng) * 0.5;  // coarse grid to force ties
    const double r = ranking_loss(f, y), pr = partial_ranking_loss(f, y);
    CHECK(r == Approx(brute_rank(f, y, false)).epsilon(1e-15));
    CHECK(pr == Approx(brute_rank(f, y, true)).epsilon(1e-15));
    CHECK(pr <= r);
    CHECK(ranking_loss(VectorXd(3.7 * f), y) == r);

    std::vector<Index> perm(static_cast<std::size_t>(c));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    VectorXd fp(c);
    LabelVector yp(c);
    for (Index j = 0; j < c; ++j) {
      fp(j) = f(perm[static_cast<std::size_t>(j)]);
      yp(j) = y(perm[static_cast<std::size_t>(j)]);
    }
    CHECK(ranking_loss(fp, yp) == r);
    const SurrogateLoss pa(AlgorithmId::pa, BaseLossKind::logistic);
    CHECK(pa.value(fp, yp) == Approx(pa.value(f, y)).epsilon(1e-13));
    const SurrogateLoss u3(AlgorithmId::u3, BaseLossKind::exponential);
    CHECK(u3.value(fp, yp) == Approx(u3.value(f, y)).epsilon(1e-13));
  }
}

TEST_CASE("pairwise surrogate on hand-computed cases") {
  const auto one = pairwise_surrogate(vec({0.3, -0.2}), lab({1, -1}), BaseLossKind::hinge);
  CHECK(one.value == Approx(0.5));
  CHECK(one.gradient(0) == Approx(-1.0));
  CHECK(one.gradient(1) == Approx(1.0));

  const auto zero = pairwise_surrogate(vec({2.5, 0.0}), lab({1, -1}), BaseLossKind::hinge);
  CHECK(zero.value == 0.0);
  CHECK(zero.gradient.isZero());

  const auto l = pairwise_surrogate(vec({0.0, 0.0, 0.0}), lab({1, -1, -1}), BaseLossKind::logistic);
  CHECK(l.value == Approx(std::log(2.0)));
  CHECK(l.gradient(0) == Approx(-0.5));
  CHECK(l.gradient(1) == Approx(0.25));
  CHECK(l.gradient(2) == Approx(0.25));

  CHECK_THROWS_AS(pairwise_surrogate(vec({0.0, 0.0}), lab({1, 1}), BaseLossKind::hinge), LossError);
}

TEST_CASE("univariate surrogates at zero scores") {
  const auto y = lab({1, -1});
  const auto f = vec({0.0, 0.0});
  CHECK(univariate_surrogate(f, y, BaseLossKind::logistic, PenaltyScheme::u1()).value == Approx(std::log(2.0)));
  CHECK(univariate_surrogate(f, y, BaseLossKind::logistic, PenaltyScheme::u3()).value ==
        Approx(2.0 * std::log(2.0)));
  CHECK_THROWS_AS(univariate_surrogate(f, lab({1, 1}), BaseLossKind::logistic, PenaltyScheme::u2()), LossError);
  CHECK(univariate_surrogate(f, lab({1, 1}), BaseLossKind::logistic, PenaltyScheme::u1()).value ==
        Approx(std::log(2.0)));
}

TEST_CASE("Table 2 penalties at c = 4 with one positive label") {
  const auto w1 = *PenaltyScheme::table_weights(PenaltyKind::u1, 1, 4);
  const auto w2 = *PenaltyScheme::table_weights(PenaltyKind::u2, 1, 4);
  const auto w3 = *PenaltyScheme::table_weights(PenaltyKind::u3, 1, 4);
  const auto w4 = *PenaltyScheme::table_weights(PenaltyKind::u4, 1, 4);
  CHECK(w1.positive == 0.25);
  CHECK(w1.negative == 0.25);
  CHECK(w2.positive == Approx(1.0 / 3));
  CHECK(w2.negative == Approx(1.0 / 3));
  CHECK(w3.positive == 1.0);
  CHECK(w3.negative == Approx(1.0 / 3));
  CHECK(w4.positive == 1.0);
  CHECK(w4.negative == 1.0);
  CHECK_FALSE(PenaltyScheme::table_weights(PenaltyKind::u3, 0, 4).has_value());

  for (const auto kind : {PenaltyKind::u1, PenaltyKind::u2, PenaltyKind::u3, PenaltyKind::u4})
    for (int c = 2; c <= 10; ++c)
      for (int k = 1; k < c; ++k) {
        const auto w = *PenaltyScheme::table_weights(kind, k, c);
        const auto [bp, bm] = table_oracle(kind, k, c);
        CHECK(w.positive == Approx(bp).epsilon(1e-15));
        CHECK(w.negative == Approx(bm).epsilon(1e-15));
      }
}

TEST_CASE("tabulated schemes equal the general form with the same penalties") {
  std::mt19937_64 rng(3);
  for (const auto kind : {PenaltyKind::u1, PenaltyKind::u2, PenaltyKind::u4}) {
    const auto general = PenaltyScheme::general(
        [kind](const LabelVector& y) {
          const int pos = static_cast<int>((y.array() == 1).count());
          return table_oracle(kind, pos, static_cast<int>(y.size())).first;
        },
        [kind](const LabelVector& y) {
          const int pos = static_cast<int>((y.array() == 1).count());
          return table_oracle(kind, pos, static_cast<int>(y.size())).second;
        });
    for (int t = 0; t < 300; ++t) {
      const auto y = testing::random_nontrivial_labels(rng, 6);
      const auto f = testing::random_scores(rng, 6);
      const double a = univariate_surrogate(f, y, BaseLossKind::logistic, PenaltyScheme::of(kind)).value;
      const double b = univariate_surrogate(f, y, BaseLossKind::logistic, general).value;
      CHECK(std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("surrogate gradients match central finite differences") {
  std::mt19937_64 rng(4);
  const AlgorithmId algos[] = {AlgorithmId::pa, AlgorithmId::u1, AlgorithmId::u2, AlgorithmId::u3, AlgorithmId::u4};
  for (const auto base : kAllBases)
    for (const auto id : algos) {
      const SurrogateLoss loss(id, base);
      int checked = 0;
      while (checked < 40) {
        const auto y = testing::random_nontrivial_labels(rng, 5);
        const auto f = testing::random_scores(rng, 5, 2.0);
        bool near_kink = false;
        for (Index p = 0; p < 5; ++p) {
          if (std::abs(y(p) * f(p) - 1.0) < 1e-3) near_kink = true;
          for (Index q = 0; q < 5; ++q)
            if (std::abs(f(p) - f(q) - 1.0) < 1e-3) near_kink = true;
        }
        if (near_kink && !is_smooth(base)) continue;
        ++checked;
        const auto eval = loss.evaluate(f, y);
        const double h = 1e-6;
        for (Index j = 0; j < 5; ++j) {
          VectorXd a = f, b = f;
          a(j) += h;
          b(j) -= h;
          const double fd = (loss.value(a, y) - loss.value(b, y)) / (2 * h);
          CHECK(std::abs(eval.gradient(j) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
        }
      }
    }
}

TEST_CASE("zero-one dominating bases respect the domination chain") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Index> cdist(2, 20);
  for (const auto base : {BaseLossKind::exponential, BaseLossKind::hinge, BaseLossKind::squared_hinge,
                          BaseLossKind::logistic_calibrated}) {
    for (int t = 0; t < 2000; ++t) {
      const Index c = cdist(rng);
      const auto y = testing::random_nontrivial_labels(rng, c);
      const auto f = testing::random_scores(rng, c);
      const double r = ranking_loss(f, y);
      const double u2 = univariate_surrogate(f, y, base, PenaltyScheme::u2()).value;
      const double u3 = univariate_surrogate(f, y, base, PenaltyScheme::u3()).value;
      const double u4 = univariate_surrogate(f, y, base, PenaltyScheme::u4()).value;
      CHECK(r <= u4 + 1e-12);
      CHECK(u4 <= static_cast<double>(c) * u2 + 1e-12);
      CHECK(r <= u3 + 1e-12);
    }
  }
}

TEST_CASE("names round trip") {
  for (const auto id : {AlgorithmId::pa, AlgorithmId::u1, AlgorithmId::u2, AlgorithmId::u3, AlgorithmId::u4})
    CHECK(parse_algorithm(to_string(id)) == id);
  for (const auto b : kAllBases) CHECK(parse_base_loss(to_string(b)) == b);
  CHECK_FALSE(parse_algorithm("u5").has_value());
  CHECK_FALSE(parse_base_loss("huber").has_value());
}
