#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mlrank/model.hpp"
#include "test_util.hpp"

using namespace mlrank;
using doctest::Approx;

namespace {

MatrixXd random_matrix(std::mt19937_64& rng, Index r, Index c, double scale = 0.5) {
  std::normal_distribution<double> g(0.0, scale);
  MatrixXd m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

} // namespace

TEST_CASE("predict computes W^T x") {
  auto m = LinearModeld::zeros(2, 2);
  m.weights.setIdentity();
  RowMatrixXd x(1, 2);
  x << 1, 0;
  const MatrixXd f = m.predict(x);
  CHECK(f(0, 0) == 1.0);
  CHECK(f(0, 1) == 0.0);
  CHECK(LinearModeld::zeros(3, 4).predict(RowMatrixXd::Ones(5, 3)).isZero());

  std::mt19937_64 rng(1);
  m.weights = random_matrix(rng, 6, 3);
  const RowMatrixXd xs = random_matrix(rng, 4, 6);
  const MatrixXd s = m.predict(xs);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (Index k = 0; k < 6; ++k) dot += xs(i, k) * m.weights(k, j);
      CHECK(std::abs(s(i, j) - dot) < 1e-12);
    }
  CHECK_THROWS_AS(m.predict(RowMatrixXd::Ones(1, 5)), ModelError);
}

TEST_CASE("objective at zero weights is the zero-score loss") {
  MultiLabelDataset data;
  data.features = RowMatrixXd::Ones(3, 2);
  data.labels.resize(3, 2);
  data.labels << 1, -1, 1, -1, 1, -1;
  const Objective obj(data, {AlgorithmId::u3, BaseLossKind::logistic, 1.0});
  CHECK(obj.value(MatrixXd::Zero(2, 2)) == Approx(2.0 * std::log(2.0)));
}

TEST_CASE("single instance with lambda zero gives its surrogate value and x g^T") {
  std::mt19937_64 rng(2);
  MultiLabelDataset data;
  data.features = random_matrix(rng, 1, 4);
  data.labels.resize(1, 3);
  data.labels << 1, -1, -1;
  const MatrixXd w = random_matrix(rng, 4, 3);
  for (const auto id : {AlgorithmId::pa, AlgorithmId::u1, AlgorithmId::u4}) {
    const Objective obj(data, {id, BaseLossKind::logistic, 0.0});
    const SurrogateLoss loss(id, BaseLossKind::logistic);
    const VectorXd f = w.transpose() * data.features.row(0).transpose();
    const auto eval = loss.evaluate(f, data.labels.row(0).transpose());
    CHECK(obj.value(w) == Approx(eval.value).epsilon(1e-14));
    MatrixXd g(4, 3);
    obj.full_gradient(w, g);
    const MatrixXd expected = data.features.row(0).transpose() * eval.gradient.transpose();
    CHECK((g - expected).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("regularizer is lambda times squared Frobenius norm") {
  const auto data = testing::nontrivial_rows(testing::planted_dataset(20, 3, 3, 3));
  std::mt19937_64 rng(3);
  const MatrixXd w = random_matrix(rng, 3, 3);
  const Objective a(data, {AlgorithmId::u2, BaseLossKind::logistic, 0.5});
  const Objective b(data, {AlgorithmId::u2, BaseLossKind::logistic, 1.0});
  CHECK(b.value(w) - a.value(w) == Approx(0.5 * w.squaredNorm()).epsilon(1e-12));
  MatrixXd g(3, 3);
  a.full_gradient(MatrixXd::Zero(3, 3), g);
  const Objective none(data, {AlgorithmId::u2, BaseLossKind::logistic, 0.0});
  MatrixXd g0(3, 3);
  none.full_gradient(MatrixXd::Zero(3, 3), g0);
  CHECK((g - g0).isZero());
}

TEST_CASE("full gradient matches finite differences and the mean of sample gradients") {
  const auto data = testing::nontrivial_rows(testing::planted_dataset(25, 4, 4, 4));
  std::mt19937_64 rng(4);
  for (const auto id : {AlgorithmId::pa, AlgorithmId::u1, AlgorithmId::u2, AlgorithmId::u3, AlgorithmId::u4}) {
    const Objective obj(data, {id, BaseLossKind::logistic, 0.3});
    const MatrixXd w = random_matrix(rng, 4, 4);
    MatrixXd g(4, 4), gi(4, 4), mean = MatrixXd::Zero(4, 4);
    obj.full_gradient(w, g);
    for (Index i = 0; i < obj.sample_count(); ++i) {
      obj.sample_gradient(w, i, gi);
      mean += gi;
    }
    mean /= static_cast<double>(obj.sample_count());
    CHECK((mean - g).cwiseAbs().maxCoeff() < 1e-10);

    const double h = 1e-6;
    for (Index r = 0; r < 4; ++r)
      for (Index c = 0; c < 4; ++c) {
        MatrixXd a = w, b = w;
        a(r, c) += h;
        b(r, c) -= h;
        const double fd = (obj.value(a) - obj.value(b)) / (2 * h);
        CHECK(std::abs(g(r, c) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
  }
}

TEST_CASE("objective is convex along random chords") {
  const auto data = testing::nontrivial_rows(testing::planted_dataset(30, 3, 3, 5));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto base : {BaseLossKind::logistic, BaseLossKind::hinge, BaseLossKind::exponential})
    for (const auto id : {AlgorithmId::pa, AlgorithmId::u3}) {
      const Objective obj(data, {id, base, 0.1});
      for (int t = 0; t < 50; ++t) {
        const MatrixXd w1 = random_matrix(rng, 3, 3), w2 = random_matrix(rng, 3, 3);
        const double s = u(rng);
        CHECK(obj.value(s * w1 + (1 - s) * w2) <= s * obj.value(w1) + (1 - s) * obj.value(w2) + 1e-10);
      }
    }
}

TEST_CASE("trivial instances are rejected unless the surrogate accepts them") {
  MultiLabelDataset data;
  data.features = RowMatrixXd::Ones(2, 2);
  data.labels.resize(2, 2);
  data.labels << 1, 1, 1, -1;
  CHECK_THROWS_AS(Objective(data, {AlgorithmId::u3, BaseLossKind::logistic, 0.0}), LossError);
  CHECK_NOTHROW(Objective(data, {AlgorithmId::u1, BaseLossKind::logistic, 0.0}));
}

TEST_CASE("model text format round trips exactly") {
  std::mt19937_64 rng(6);
  const auto data = testing::planted_dataset(10, 3, 2, 6);
  LinearModeld m;
  m.weights = random_matrix(rng, 4, 2);
  m.trained_with = {AlgorithmId::u4, BaseLossKind::squared_hinge, 1e-3};
  m.preprocessing = Preprocessing::fit(data, true, true);
  std::stringstream ss;
  write_model(ss, m);
  const auto back = read_model(ss);
  CHECK(back.weights == m.weights);
  CHECK(back.trained_with.algorithm == AlgorithmId::u4);
  CHECK(back.trained_with.base == BaseLossKind::squared_hinge);
  CHECK(back.trained_with.lambda == 1e-3);
  CHECK(back.preprocessing.bias);
  REQUIRE(back.preprocessing.standardization.has_value());
  CHECK(back.preprocessing.standardization->mean == m.preprocessing.standardization->mean);
  CHECK(back.predict_raw(data) == m.predict_raw(data));

  std::istringstream bad("mlrank-model 1\nweights\n1 2\n");
  CHECK_THROWS_AS(read_model(bad), ModelError);
}
