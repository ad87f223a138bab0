#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mlrank/dataset.hpp"
#include "test_util.hpp"

using namespace mlrank;

namespace {

MultiLabelDataset parse(const std::string& text, LoadReport* report = nullptr, LoadOptions options = {}) {
  std::istringstream in(text);
  return read_sparse(in, options, report);
}

MultiLabelDataset column(std::initializer_list<double> values) {
  MultiLabelDataset d;
  d.features.resize(static_cast<Index>(values.size()), 1);
  d.labels.resize(static_cast<Index>(values.size()), 2);
  Index i = 0;
  for (double v : values) {
    d.features(i, 0) = v;
    d.labels.row(i++) << 1, -1;
  }
  return d;
}

} // namespace

TEST_CASE("sparse line decodes labels and features") {
  const auto d = parse("1 3 4\n0,2 1:0.5 3:-1.0\n");
  REQUIRE(d.instance_count() == 1);
  CHECK(d.feature_count() == 3);
  CHECK(d.label_count() == 4);
  CHECK(d.labels(0, 0) == 1);
  CHECK(d.labels(0, 1) == -1);
  CHECK(d.labels(0, 2) == 1);
  CHECK(d.labels(0, 3) == -1);
  CHECK(d.features(0, 0) == 0.5);
  CHECK(d.features(0, 1) == 0.0);
  CHECK(d.features(0, 2) == -1.0);
}

TEST_CASE("all-positive and all-negative instances are dropped and counted") {
  LoadReport report;
  const auto d = parse("3 2 4\n0,1,2,3 1:1\n 2:1\n1 1:2 2:3\n", &report);
  CHECK(d.instance_count() == 1);
  CHECK(report.dropped_trivial == 2);
  CHECK(report.retained == 1);
  CHECK(d.features(0, 0) == 2.0);

  LoadOptions keep;
  keep.keep_trivial = true;
  CHECK(parse("3 2 4\n0,1,2,3 1:1\n 2:1\n1 1:2 2:3\n", nullptr, keep).instance_count() == 3);
}

TEST_CASE("header inference matches explicit header") {
  const std::string body = "# comment\n0 1:1.5 4:2\n2 2:-1\n1,2 3:0.25\n";
  const auto inferred = parse(body);
  const auto explicit_header = parse("3 4 3\n" + body);
  CHECK(inferred.feature_count() == 4);
  CHECK(inferred.label_count() == 3);
  CHECK(inferred.features == explicit_header.features);
  CHECK(inferred.labels == explicit_header.labels);
}

TEST_CASE("malformed sparse input names the line") {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse(text);
    } catch (const DatasetError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("2 3 2\n0 1:1\n1 x:2\n") == 3);
  CHECK(line_of("2 3 2\n0 1:1\n1 9:2\n") == 3);  // feature index >= d
  CHECK(line_of("2 3 2\n5 1:1\n0 1:1\n") == 2);  // label index >= c
  CHECK(line_of("2 3 2\n0 1:abc\n1 1:1\n") == 2);
  CHECK_THROWS_AS(parse(""), DatasetError);
}

TEST_CASE("csv accepts 0/1 labels and maps them to -1/+1") {
  std::istringstream in("1.5,2,1,0\n-1,0.5,0,1\n");
  const auto d = read_csv(in, 2);
  REQUIRE(d.instance_count() == 2);
  CHECK(d.feature_count() == 2);
  CHECK(d.labels(0, 0) == 1);
  CHECK(d.labels(0, 1) == -1);
  CHECK(d.labels(1, 1) == 1);
  std::istringstream bad("1,2,1,0\n1,2,1\n");
  CHECK_THROWS_AS(read_csv(bad, 2), DatasetError);
}

TEST_CASE("dense to sparse to dense round trip is exact") {
  const auto data = testing::planted_dataset(40, 5, 4, 7);
  LoadOptions keep;
  keep.keep_trivial = true;
  std::ostringstream sparse;
  write_sparse(sparse, data);
  std::istringstream sparse_in(sparse.str());
  const auto back = read_sparse(sparse_in, keep);
  CHECK(back.features == data.features);
  CHECK(back.labels == data.labels);

  std::ostringstream csv;
  write_csv(csv, back);
  std::istringstream csv_in(csv.str());
  const auto dense = read_csv(csv_in, 4, keep);
  CHECK(dense.features == data.features);
  CHECK(dense.labels == data.labels);
}

TEST_CASE("standardize_fit uses population moments") {
  const auto p = standardize_fit(column({1, 2, 3}));
  CHECK(p.mean(0) == doctest::Approx(2.0));
  CHECK(p.std(0) == doctest::Approx(std::sqrt(2.0 / 3.0)));

  const auto constant = standardize_fit(column({5, 5, 5}));
  CHECK(constant.mean(0) == 5.0);
  CHECK(constant.std(0) == 1.0);
}

TEST_CASE("standardize_apply centers and scales the fit data") {
  StandardizationParams p{VectorXd::Constant(1, 2.0), VectorXd::Constant(1, 1.0)};
  CHECK(standardize_apply(column({3}), p).features(0, 0) == 1.0);

  const auto data = testing::planted_dataset(200, 6, 3, 11);
  const auto z = standardize_apply(data, standardize_fit(data));
  for (Index k = 0; k < z.feature_count(); ++k) {
    const double mean = z.features.col(k).mean();
    const double sd = std::sqrt((z.features.col(k).array() - mean).square().mean());
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(sd - 1.0) < 1e-6);
  }
  const auto again = standardize_fit(z);
  CHECK(again.mean.cwiseAbs().maxCoeff() < 1e-9);
  CHECK((again.std.array() - 1.0).abs().maxCoeff() < 1e-9);
  CHECK(z.labels == data.labels);

  StandardizationParams wrong{VectorXd::Zero(2), VectorXd::Ones(2)};
  CHECK_THROWS_AS(standardize_apply(column({1}), wrong), DatasetError);
}

TEST_CASE("train-fold parameters leave the held-out fold off-center") {
  auto data = testing::planted_dataset(100, 3, 2, 5);
  for (Index i = 50; i < 100; ++i) data.features.row(i).array() += 3.0;
  std::vector<Index> head(50), tail(50);
  for (Index i = 0; i < 50; ++i) head[static_cast<std::size_t>(i)] = i, tail[static_cast<std::size_t>(i)] = i + 50;
  const auto params = standardize_fit(subset(data, head));
  const auto test = standardize_apply(subset(data, tail), params);
  CHECK(std::abs(test.features.col(0).mean()) > 1.0);
}

TEST_CASE("append_bias adds a constant column") {
  const auto b = append_bias(column({1, 2}));
  CHECK(b.feature_count() == 2);
  CHECK(b.features(0, 1) == 1.0);
  CHECK(b.features(1, 1) == 1.0);
}

TEST_CASE("kfold_split is balanced, deterministic and a partition") {
  auto sizes = [](const FoldAssignment& f) {
    std::vector<std::size_t> s;
    for (int k = 0; k < f.fold_count; ++k) s.push_back(f.members(k).size());
    std::sort(s.begin(), s.end());
    return s;
  };
  CHECK(sizes(kfold_split(6, 3, 1)) == std::vector<std::size_t>{2, 2, 2});
  CHECK(sizes(kfold_split(7, 3, 1)) == std::vector<std::size_t>{2, 2, 3});
  CHECK(kfold_split(50, 3, 9).fold_of_instance == kfold_split(50, 3, 9).fold_of_instance);
  CHECK(kfold_split(50, 3, 9).fold_of_instance != kfold_split(50, 3, 10).fold_of_instance);

  const auto f = kfold_split(31, 4, 3);
  std::multiset<Index> seen;
  for (int k = 0; k < 4; ++k) {
    const auto m = f.members(k);
    const auto rest = f.complement(k);
    CHECK(m.size() + rest.size() == 31);
    seen.insert(m.begin(), m.end());
  }
  CHECK(seen.size() == 31);
  CHECK(std::set<Index>(seen.begin(), seen.end()).size() == 31);
  CHECK_THROWS(kfold_split(2, 3, 0));
}

TEST_CASE("holdout_split partitions the given rows") {
  std::vector<Index> rows{3, 5, 8, 13, 21, 34, 55, 89, 144, 233};
  const auto [train, valid] = holdout_split(rows, 0.8, 4);
  CHECK(train.size() == 8);
  CHECK(valid.size() == 2);
  std::set<Index> all(train.begin(), train.end());
  all.insert(valid.begin(), valid.end());
  CHECK(all == std::set<Index>(rows.begin(), rows.end()));
  CHECK(holdout_split(rows, 0.8, 4) == holdout_split(rows, 0.8, 4));
}

TEST_CASE("preprocessing applies standardization then bias") {
  const auto data = testing::planted_dataset(30, 4, 3, 2);
  const auto p = Preprocessing::fit(data, true, true);
  const auto out = p.apply(data);
  CHECK(out.feature_count() == 5);
  CHECK(p.raw_feature_count() == 4);
  CHECK(std::abs(out.features.col(0).mean()) < 1e-9);
  CHECK((out.features.col(4).array() == 1.0).all());
}
