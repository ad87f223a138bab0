#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>

namespace mlrank {

/// Scalar margin losses l(z) composed into the multi-label surrogates.
///
/// `logistic_calibrated` is ln(e - 1 + e^{-z}), the shifted logistic that
/// satisfies l(z) >= [[z <= 0]]; plain `logistic` does not (l(0) = ln 2).
enum class BaseLossKind { exponential, logistic, logistic_calibrated, hinge, squared_hinge };

template <typename Scalar>
struct LossPoint {
  Scalar value;
  Scalar derivative;
};

namespace detail {
inline constexpr double kExpClamp = -700.0;
}

/// Value and derivative of the base loss at margin z.
///
/// Hinge-type kinks at z = 1 take the left derivative (-1 for hinge).
template <typename Scalar>
LossPoint<Scalar> base_loss(BaseLossKind kind, Scalar z) {
  using std::exp;
  using std::log;
  using std::log1p;
  switch (kind) {
    case BaseLossKind::exponential: {
      const Scalar v = exp(-std::max(z, Scalar(detail::kExpClamp)));
      return {v, -v};
    }
    case BaseLossKind::logistic: {
      if (z >= Scalar(0)) {
        const Scalar e = exp(-z);
        return {log1p(e), -e / (Scalar(1) + e)};
      }
      const Scalar e = exp(z);
      return {-z + log1p(e), Scalar(-1) / (Scalar(1) + e)};
    }
    case BaseLossKind::logistic_calibrated: {
      const Scalar em1 = Scalar(std::numbers::e - 1.0);
      if (z >= Scalar(0)) {
        const Scalar e = exp(-z);
        return {log(em1 + e), -e / (em1 + e)};
      }
      const Scalar e = exp(z);
      return {-z + log1p(em1 * e), Scalar(-1) / (Scalar(1) + em1 * e)};
    }
    case BaseLossKind::hinge:
      if (z <= Scalar(1)) return {Scalar(1) - z, Scalar(-1)};
      return {Scalar(0), Scalar(0)};
    case BaseLossKind::squared_hinge:
      if (z < Scalar(1)) {
        const Scalar m = Scalar(1) - z;
        return {m * m, Scalar(-2) * m};
      }
      return {Scalar(0), Scalar(0)};
  }
  return {Scalar(0), Scalar(0)};
}

template <typename Scalar>
Scalar base_loss_value(BaseLossKind kind, Scalar z) {
  return base_loss(kind, z).value;
}

/// True for the bases with l(z) >= [[z <= 0]].
constexpr bool dominates_zero_one(BaseLossKind kind) {
  return kind != BaseLossKind::logistic;
}

/// True where l is differentiable everywhere.
constexpr bool is_smooth(BaseLossKind kind) {
  return kind != BaseLossKind::hinge;
}

std::string_view to_string(BaseLossKind kind);
std::optional<BaseLossKind> parse_base_loss(std::string_view name);

} // namespace mlrank
