#include "mlrank/losses.hpp"

#include <array>
#include <utility>

namespace mlrank {

namespace {

constexpr std::array<std::pair<BaseLossKind, std::string_view>, 5> kBaseNames{{
    {BaseLossKind::exponential, "exponential"},
    {BaseLossKind::logistic, "logistic"},
    {BaseLossKind::logistic_calibrated, "logistic_calibrated"},
    {BaseLossKind::hinge, "hinge"},
    {BaseLossKind::squared_hinge, "squared_hinge"},
}};

constexpr std::array<std::pair<AlgorithmId, std::string_view>, 5> kAlgorithmNames{{
    {AlgorithmId::pa, "pa"},
    {AlgorithmId::u1, "u1"},
    {AlgorithmId::u2, "u2"},
    {AlgorithmId::u3, "u3"},
    {AlgorithmId::u4, "u4"},
}};

constexpr std::array<std::pair<PenaltyKind, std::string_view>, 5> kPenaltyNames{{
    {PenaltyKind::u1, "u1"},
    {PenaltyKind::u2, "u2"},
    {PenaltyKind::u3, "u3"},
    {PenaltyKind::u4, "u4"},
    {PenaltyKind::general, "general"},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum value) {
  for (const auto& [e, name] : table)
    if (e == value) return name;
  return "unknown";
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<Enum, std::string_view>, N>& table, std::string_view name) {
  for (const auto& [e, n] : table)
    if (n == name) return e;
  return std::nullopt;
}

} // namespace

std::string_view to_string(BaseLossKind kind) { return name_of(kBaseNames, kind); }
std::optional<BaseLossKind> parse_base_loss(std::string_view name) { return lookup(kBaseNames, name); }
std::string_view to_string(AlgorithmId id) { return name_of(kAlgorithmNames, id); }
std::optional<AlgorithmId> parse_algorithm(std::string_view name) { return lookup(kAlgorithmNames, name); }
std::string_view to_string(PenaltyKind kind) { return name_of(kPenaltyNames, kind); }
std::optional<PenaltyKind> parse_penalty_kind(std::string_view name) { return lookup(kPenaltyNames, name); }

PenaltyKind penalty_kind_of(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::u1: return PenaltyKind::u1;
    case AlgorithmId::u2: return PenaltyKind::u2;
    case AlgorithmId::u3: return PenaltyKind::u3;
    case AlgorithmId::u4: return PenaltyKind::u4;
    case AlgorithmId::pa: break;
  }
  throw LossError("the pairwise algorithm has no univariate penalty scheme");
}

PenaltyScheme PenaltyScheme::of(PenaltyKind kind) {
  if (kind == PenaltyKind::general) throw LossError("general penalties need caller-supplied functions");
  return PenaltyScheme(kind);
}

PenaltyScheme PenaltyScheme::general(PenaltyFn beta_plus, PenaltyFn beta_minus) {
  if (!beta_plus || !beta_minus) throw LossError("general penalty scheme needs both beta functions");
  PenaltyScheme s(PenaltyKind::general);
  s.beta_plus_ = std::move(beta_plus);
  s.beta_minus_ = std::move(beta_minus);
  return s;
}

std::optional<PenaltyWeights> PenaltyScheme::table_weights(PenaltyKind kind, Index positives, Index label_count) {
  const Index negatives = label_count - positives;
  if (positives < 0 || negatives < 0) return std::nullopt;
  const double c = static_cast<double>(label_count);
  const double kp = static_cast<double>(positives);
  const double kn = static_cast<double>(negatives);
  switch (kind) {
    case PenaltyKind::u1:
      return PenaltyWeights{1.0 / c, 1.0 / c};
    case PenaltyKind::u2:
      if (positives == 0 || negatives == 0) return std::nullopt;
      return PenaltyWeights{1.0 / (kp * kn), 1.0 / (kp * kn)};
    case PenaltyKind::u3:
      if (positives == 0 || negatives == 0) return std::nullopt;
      return PenaltyWeights{1.0 / kp, 1.0 / kn};
    case PenaltyKind::u4: {
      if (positives == 0 || negatives == 0) return std::nullopt;
      const double m = std::min(kp, kn);
      return PenaltyWeights{1.0 / m, 1.0 / m};
    }
    case PenaltyKind::general:
      break;
  }
  return std::nullopt;
}

PenaltyWeights PenaltyScheme::weights(const LabelSplit& split) const {
  if (kind_ == PenaltyKind::general) throw LossError("general penalties need the full label vector");
  const auto w = table_weights(kind_, static_cast<Index>(split.positives.size()), split.label_count());
  if (!w) throw LossError("penalty scheme " + std::string(to_string(kind_)) + " is undefined for trivial labels");
  return *w;
}

PenaltyWeights PenaltyScheme::weights(const LabelSplit& split, const LabelVector& labels) const {
  if (kind_ != PenaltyKind::general) return weights(split);
  if (!split.nontrivial()) throw LossError("general penalties are only defined on nontrivial labels");
  const PenaltyWeights w{beta_plus_(labels), beta_minus_(labels)};
  if (!(w.positive > 0.0) || !(w.negative > 0.0)) throw LossError("general penalties must be positive");
  return w;
}

SurrogateLoss::SurrogateLoss(AlgorithmId id, BaseLossKind base)
    : pairwise_(id == AlgorithmId::pa),
      scheme_(id == AlgorithmId::pa ? PenaltyScheme::u1() : PenaltyScheme::of(penalty_kind_of(id))),
      base_(base) {}

SurrogateLoss SurrogateLoss::univariate(PenaltyScheme scheme, BaseLossKind base) {
  return SurrogateLoss(false, std::move(scheme), base);
}

} // namespace mlrank
