#include "mlrank/bounds.hpp"

#include <cmath>
#include <random>

#include "mlrank/trainer.hpp"

namespace mlrank {

namespace {

double log_of(double x, LogBase base) { return base == LogBase::natural ? std::log(x) : std::log2(x); }

double confidence_term(const BoundInputs& in, LogBase log_base) {
  return std::sqrt(log_of(2.0 / in.delta, log_base) / (2.0 * static_cast<double>(in.n)));
}

double complexity_root(const BoundInputs& in) {
  return std::sqrt(in.Lambda * in.Lambda * in.r * in.r / static_cast<double>(in.n));
}

} // namespace

void BoundInputs::validate() const {
  if (!(rho > 0.0) || !(B > 0.0) || !(Lambda >= 0.0) || !(r >= 0.0))
    throw BoundError("rho and B must be positive, Lambda and r nonnegative");
  if (n < 1) throw BoundError("n must be at least 1");
  if (c < 2) throw BoundError("c must be at least 2");
  if (!(delta > 0.0 && delta < 1.0)) throw BoundError("delta must lie in (0, 1)");
  if (!(empirical_risk >= 0.0)) throw BoundError("empirical risk must be nonnegative");
}

SurrogateConstants surrogate_constants(double rho, double B, Index c, PenaltyKind which) {
  if (c < 2) throw BoundError("c must be at least 2");
  const double cd = static_cast<double>(c);
  switch (which) {
    case PenaltyKind::u2: return {rho * std::sqrt(cd) / (cd - 1.0), (1.0 + 1.0 / (cd - 1.0)) * B};
    case PenaltyKind::u3: return {2.0 * rho, 2.0 * B};
    case PenaltyKind::u4: return {rho * std::sqrt(cd), cd * B};
    default: throw BoundError("surrogate constants are only tabulated for u2, u3 and u4");
  }
}

double bound_base(const BoundInputs& in, double mu, double M, LogBase log_base) {
  in.validate();
  const double c = static_cast<double>(in.c);
  return in.empirical_risk + 2.0 * std::sqrt(2.0) * mu * std::sqrt(c) * complexity_root(in) +
         3.0 * M * confidence_term(in, log_base);
}

double bound_u2(const BoundInputs& in, LogBase log_base) {
  in.validate();
  const double c = static_cast<double>(in.c);
  const double inflate = 1.0 + 1.0 / (c - 1.0);
  return c * in.empirical_risk + 2.0 * std::sqrt(2.0) * in.rho * c * inflate * complexity_root(in) +
         3.0 * in.B * c * inflate * confidence_term(in, log_base);
}

double bound_u3(const BoundInputs& in, LogBase log_base) {
  in.validate();
  const double c = static_cast<double>(in.c);
  return in.empirical_risk + 4.0 * std::sqrt(2.0) * in.rho * std::sqrt(c) * complexity_root(in) +
         6.0 * in.B * confidence_term(in, log_base);
}

double bound_u4(const BoundInputs& in, LogBase log_base) {
  in.validate();
  const double c = static_cast<double>(in.c);
  return in.empirical_risk + 2.0 * std::sqrt(2.0) * in.rho * c * complexity_root(in) +
         3.0 * c * in.B * confidence_term(in, log_base);
}

double bound_for(PenaltyKind which, const BoundInputs& in, LogBase log_base) {
  switch (which) {
    case PenaltyKind::u2: return bound_u2(in, log_base);
    case PenaltyKind::u3: return bound_u3(in, log_base);
    case PenaltyKind::u4: return bound_u4(in, log_base);
    default: throw BoundError("bounds exist for u2, u3 and u4 only");
  }
}

BaseLossConstants base_loss_constants(BaseLossKind base, double z_max) {
  if (!(z_max >= 0.0) || !std::isfinite(z_max)) throw BoundError("z_max must be finite and nonnegative");
  const auto at = base_loss(base, -z_max);
  return {std::abs(at.derivative), at.value, z_max};
}

double empirical_lipschitz_probe(AlgorithmId which, BaseLossKind base, Index c, std::size_t trials,
                                 std::uint64_t seed, double score_range) {
  if (c < 2) throw BoundError("c must be at least 2");
  const SurrogateLoss loss(which, base);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> score(-score_range, score_range);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<Index> coordinate(0, c - 1);

  double best = 0.0;
  VectorXd f1(c), f2(c);
  LabelVector y(c);
  for (std::size_t t = 0; t < trials; ++t) {
    for (Index j = 0; j < c; ++j) y(j) = coin(rng) ? 1 : -1;
    if ((y.array() > 0).all()) y(coordinate(rng)) = -1;
    if ((y.array() < 0).all()) y(coordinate(rng)) = 1;
    for (Index j = 0; j < c; ++j) f1(j) = score(rng);
    // Alternate far pairs with short steps, which approach the local slope.
    if (t % 2 == 0) {
      for (Index j = 0; j < c; ++j) f2(j) = score(rng);
    } else {
      const double step = std::pow(10.0, -4.0 * unit(rng));
      for (Index j = 0; j < c; ++j) f2(j) = f1(j) + step * (2.0 * unit(rng) - 1.0);
    }
    const double dist = (f1 - f2).norm();
    if (dist == 0.0) continue;
    best = std::max(best, std::abs(loss.value(f1, y) - loss.value(f2, y)) / dist);
  }
  return best;
}

BoundReport bound_report(const LinearModeld& model, const MultiLabelDataset& data, double delta, LogBase log_base) {
  const MultiLabelDataset prepared = model.preprocessing.apply(data);
  const MatrixXd scores = model.predict(prepared.features);
  const Metrics m = evaluate_scores(scores, prepared.labels, model.trained_with.base);
  if (m.evaluated == 0) throw BoundError("dataset has no instance with both positive and negative labels");

  BoundReport report;
  report.base = model.trained_with.base;
  report.z_max = scores.size() > 0 ? scores.cwiseAbs().maxCoeff() : 0.0;
  report.ranking_loss = m.ranking_loss;
  const BaseLossConstants k = base_loss_constants(report.base, report.z_max);
  report.inputs.rho = k.rho;
  report.inputs.B = k.B;
  report.inputs.Lambda = model.weights.norm();
  report.inputs.r = prepared.features.rowwise().norm().maxCoeff();
  report.inputs.n = m.evaluated;
  report.inputs.c = data.label_count();
  report.inputs.delta = delta;

  const std::array<std::pair<PenaltyKind, AlgorithmId>, 3> schemes{
      {{PenaltyKind::u2, AlgorithmId::u2}, {PenaltyKind::u3, AlgorithmId::u3}, {PenaltyKind::u4, AlgorithmId::u4}}};
  for (const auto& [kind, id] : schemes) {
    BoundInputs in = report.inputs;
    in.empirical_risk = m.risk(id);
    report.rows.push_back({kind, in.empirical_risk, surrogate_constants(k.rho, k.B, in.c, kind),
                           bound_for(kind, in, log_base)});
  }
  return report;
}

} // namespace mlrank
