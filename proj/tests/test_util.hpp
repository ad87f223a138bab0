#pragma once

#include <random>
#include <vector>

#include "mlrank/dataset.hpp"
#include "mlrank/types.hpp"

namespace mlrank::testing {

/// Random label vector with at least one positive and one negative entry.
inline LabelVector random_nontrivial_labels(std::mt19937_64& rng, Index c) {
  std::bernoulli_distribution coin(0.5);
  LabelVector y(c);
  for (;;) {
    for (Index j = 0; j < c; ++j) y(j) = coin(rng) ? 1 : -1;
    if ((y.array() == 1).any() && (y.array() == -1).any()) return y;
  }
}

inline VectorXd random_scores(std::mt19937_64& rng, Index c, double range = 3.0) {
  std::uniform_real_distribution<double> u(-range, range);
  VectorXd f(c);
  for (Index j = 0; j < c; ++j) f(j) = u(rng);
  return f;
}

/// Labels from a planted linear separator: y_ij = sign(<w_j, x_i> + noise).
inline MultiLabelDataset planted_dataset(Index n, Index d, Index c, std::uint64_t seed, double noise = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  MultiLabelDataset data;
  data.features.resize(n, d);
  data.labels.resize(n, c);
  MatrixXd w(d, c);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < c; ++j) w(i, j) = g(rng);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) data.features(i, k) = g(rng);
    const VectorXd s = w.transpose() * data.features.row(i).transpose();
    for (Index j = 0; j < c; ++j) data.labels(i, j) = s(j) + noise * g(rng) > 0.0 ? 1 : -1;
  }
  data.name = "planted";
  return data;
}

/// Keeps rows with both a positive and a negative label.
inline MultiLabelDataset nontrivial_rows(const MultiLabelDataset& data) {
  std::vector<Index> rows;
  for (Index i = 0; i < data.instance_count(); ++i)
    if ((data.labels.row(i).array() == 1).any() && (data.labels.row(i).array() == -1).any()) rows.push_back(i);
  return subset(data, rows);
}

} // namespace mlrank::testing
