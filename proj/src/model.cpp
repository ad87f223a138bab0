#include "mlrank/model.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace mlrank {

Objective::Objective(const MultiLabelDataset& data, const ObjectiveSpec& spec)
    : Objective(data, SurrogateLoss(spec.algorithm, spec.base), spec.lambda) {}

Objective::Objective(const MultiLabelDataset& data, SurrogateLoss surrogate, double lambda)
    : features_(data.features), labels_(data.labels), surrogate_(std::move(surrogate)), lambda_(lambda) {
  if (lambda < 0.0) throw ModelError("lambda must be nonnegative");
  if (data.features.rows() != data.labels.rows()) throw ModelError("feature and label row counts differ");
  splits_.reserve(static_cast<std::size_t>(data.instance_count()));
  for (Index i = 0; i < data.instance_count(); ++i) {
    splits_.push_back(split_labels(data.labels.row(i)));
    if (!splits_.back().nontrivial() && !surrogate_.accepts_trivial())
      throw LossError("instance " + std::to_string(i) + " has a trivial label vector");
  }
}

double Objective::sample_loss(const MatrixXd& weights, Index i, VectorXd& loss_gradient) const {
  thread_local VectorXd scores;
  scores.noalias() = weights.transpose() * features_.row(i).transpose();
  loss_gradient.resize(scores.size());
  return surrogate_.evaluate_into(scores, labels_.row(i), splits_[static_cast<std::size_t>(i)], loss_gradient);
}

double Objective::empirical_risk(const MatrixXd& weights) const {
  const MatrixXd scores = features_ * weights;
  VectorXd g(scores.cols());
  double total = 0.0;
  for (Index i = 0; i < scores.rows(); ++i) {
    const VectorXd f = scores.row(i).transpose();
    total += surrogate_.evaluate_into(f, labels_.row(i), splits_[static_cast<std::size_t>(i)], g);
  }
  return total / static_cast<double>(sample_count());
}

double Objective::value(const MatrixXd& weights) const {
  return empirical_risk(weights) + lambda_ * weights.squaredNorm();
}

void Objective::full_gradient(const MatrixXd& weights, MatrixXd& out) const {
  const MatrixXd scores = features_ * weights;
  MatrixXd loss_grads(scores.rows(), scores.cols());
  VectorXd g(scores.cols());
  for (Index i = 0; i < scores.rows(); ++i) {
    const VectorXd f = scores.row(i).transpose();
    surrogate_.evaluate_into(f, labels_.row(i), splits_[static_cast<std::size_t>(i)], g);
    loss_grads.row(i) = g.transpose();
  }
  out.noalias() = features_.transpose() * loss_grads;
  out /= static_cast<double>(sample_count());
  out += (2.0 * lambda_) * weights;
}

void Objective::sample_gradient(const MatrixXd& weights, Index i, MatrixXd& out) const {
  thread_local VectorXd g;
  sample_loss(weights, i, g);
  out.noalias() = features_.row(i).transpose() * g.transpose();
  out += (2.0 * lambda_) * weights;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_vector_line(std::ostream& out, const char* key, const VectorXd& v) {
  out << key;
  for (Index j = 0; j < v.size(); ++j) out << ' ' << format_double(v(j));
  out << '\n';
}

VectorXd read_vector(std::istringstream& line, Index expected, const std::string& key) {
  VectorXd v(expected);
  for (Index j = 0; j < expected; ++j)
    if (!(line >> v(j))) throw ModelError("model line `" + key + "` has too few values");
  return v;
}

} // namespace

void write_model(std::ostream& out, const LinearModeld& model) {
  const auto& info = model.trained_with;
  out << "mlrank-model 1\n";
  out << "features " << model.feature_count() << '\n';
  out << "labels " << model.label_count() << '\n';
  out << "algorithm " << to_string(info.algorithm) << '\n';
  out << "base " << to_string(info.base) << '\n';
  out << "lambda " << format_double(info.lambda) << '\n';
  out << "seed " << info.seed << '\n';
  out << "bias " << (model.preprocessing.bias ? 1 : 0) << '\n';
  if (const auto& s = model.preprocessing.standardization) {
    out << "raw_features " << s->mean.size() << '\n';
    write_vector_line(out, "mean", s->mean);
    write_vector_line(out, "std", s->std);
  }
  out << "weights\n";
  for (Index r = 0; r < model.weights.rows(); ++r) {
    for (Index c = 0; c < model.weights.cols(); ++c) {
      if (c > 0) out << ' ';
      out << format_double(model.weights(r, c));
    }
    out << '\n';
  }
}

LinearModeld read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "mlrank-model 1") throw ModelError("not an mlrank model file");
  LinearModeld model;
  Index d = -1, c = -1, raw = -1;
  VectorXd mean, stddev;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key.empty()) continue;
    if (key == "weights") break;
    if (key == "features") {
      ls >> d;
    } else if (key == "labels") {
      ls >> c;
    } else if (key == "algorithm") {
      std::string v;
      ls >> v;
      const auto id = parse_algorithm(v);
      if (!id) throw ModelError("unknown algorithm `" + v + "`");
      model.trained_with.algorithm = *id;
    } else if (key == "base") {
      std::string v;
      ls >> v;
      const auto b = parse_base_loss(v);
      if (!b) throw ModelError("unknown base loss `" + v + "`");
      model.trained_with.base = *b;
    } else if (key == "lambda") {
      ls >> model.trained_with.lambda;
    } else if (key == "seed") {
      ls >> model.trained_with.seed;
    } else if (key == "bias") {
      int b = 0;
      ls >> b;
      model.preprocessing.bias = b != 0;
    } else if (key == "raw_features") {
      ls >> raw;
    } else if (key == "mean") {
      mean = read_vector(ls, raw, key);
    } else if (key == "std") {
      stddev = read_vector(ls, raw, key);
    } else {
      throw ModelError("unknown model key `" + key + "`");
    }
    if (ls.fail()) throw ModelError("malformed model line `" + line + "`");
  }
  if (d < 1 || c < 2) throw ModelError("model header lacks valid `features`/`labels`");
  if (raw >= 0) {
    if (mean.size() != raw || stddev.size() != raw) throw ModelError("model standardization block incomplete");
    model.preprocessing.standardization = StandardizationParams{mean, stddev};
  }
  model.weights.resize(d, c);
  for (Index r = 0; r < d; ++r)
    for (Index k = 0; k < c; ++k)
      if (!(in >> model.weights(r, k))) throw ModelError("model weight block truncated");
  return model;
}

void save_model(const std::string& path, const LinearModeld& model) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write " + path);
  write_model(out, model);
}

LinearModeld load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open " + path);
  return read_model(in);
}

} // namespace mlrank
