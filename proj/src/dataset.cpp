#include "mlrank/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string_view>

namespace mlrank {

DatasetError::DatasetError(const std::string& what, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

void MultiLabelDataset::validate() const {
  if (features.rows() != labels.rows()) throw DatasetError("feature and label row counts differ");
  if (features.rows() < 1) throw DatasetError("dataset has no instances");
  if (features.cols() < 1) throw DatasetError("dataset has no features");
  if (labels.cols() < 2) throw DatasetError("dataset needs at least two labels");
  if (!((labels.array() == 1) || (labels.array() == -1)).all())
    throw DatasetError("label entries must be -1 or +1");
}

Index MultiLabelDataset::nontrivial_count() const {
  Index count = 0;
  for (Index i = 0; i < labels.rows(); ++i) {
    const Index pos = (labels.row(i).array() == 1).count();
    if (pos > 0 && pos < labels.cols()) ++count;
  }
  return count;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> tokenize(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

struct SparseRow {
  std::vector<Index> positives;
  std::vector<std::pair<Index, double>> entries;
  std::size_t line;
};

bool is_trivial_row(const LabelMatrix& labels, Index i) {
  const Index pos = (labels.row(i).array() == 1).count();
  return pos == 0 || pos == labels.cols();
}

MultiLabelDataset drop_trivial(MultiLabelDataset data, const LoadOptions& options, LoadReport* report) {
  std::vector<Index> keep;
  Index dropped = 0;
  for (Index i = 0; i < data.instance_count(); ++i) {
    if (!options.keep_trivial && is_trivial_row(data.labels, i)) {
      ++dropped;
    } else {
      keep.push_back(i);
    }
  }
  if (report) {
    report->dropped_trivial = dropped;
    report->retained = static_cast<Index>(keep.size());
  }
  if (keep.empty()) throw DatasetError("no instances left after dropping trivial label vectors");
  if (dropped == 0) return data;
  std::string name = data.name;
  MultiLabelDataset out = subset(data, keep);
  out.name = std::move(name);
  return out;
}

void write_double(std::ostream& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, ptr - buf);
}

std::string stem_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  const auto dot = base.find('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

} // namespace

MultiLabelDataset read_sparse(std::istream& in, const LoadOptions& options, LoadReport* report) {
  std::vector<SparseRow> rows;
  std::optional<Index> header_n, header_d, header_c;
  bool seen_content = false;
  Index max_feature = 0;
  Index max_label = -1;
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tokens = tokenize(line);

    if (!seen_content) {
      seen_content = true;
      if (tokens.size() == 3 && line.find(':') == std::string_view::npos && line.find(',') == std::string_view::npos) {
        const auto n = parse_number<Index>(tokens[0]);
        const auto d = parse_number<Index>(tokens[1]);
        const auto c = parse_number<Index>(tokens[2]);
        if (!n || !d || !c || *n < 0 || *d < 1 || *c < 2) throw DatasetError("malformed header, expected `n d c`", line_no);
        header_n = *n;
        header_d = *d;
        header_c = *c;
        continue;
      }
    }

    SparseRow row;
    row.line = line_no;
    std::size_t first_feature = 0;
    if (tokens.front().find(':') == std::string_view::npos) {
      first_feature = 1;
      for (std::string_view label_token : split(tokens.front(), ',')) {
        if (trim(label_token).empty()) continue;
        const auto label = parse_number<Index>(label_token);
        if (!label || *label < 0) throw DatasetError("bad label index `" + std::string(label_token) + "`", line_no);
        row.positives.push_back(*label);
        max_label = std::max(max_label, *label);
      }
    }
    for (std::size_t t = first_feature; t < tokens.size(); ++t) {
      const auto colon = tokens[t].find(':');
      if (colon == std::string_view::npos)
        throw DatasetError("expected feature token `index:value`, got `" + std::string(tokens[t]) + "`", line_no);
      const auto index = parse_number<Index>(tokens[t].substr(0, colon));
      const auto value = parse_number<double>(tokens[t].substr(colon + 1));
      if (!index || *index < 1) throw DatasetError("bad feature index in `" + std::string(tokens[t]) + "`", line_no);
      if (!value || !std::isfinite(*value))
        throw DatasetError("bad feature value in `" + std::string(tokens[t]) + "`", line_no);
      row.entries.emplace_back(*index - 1, *value);
      max_feature = std::max(max_feature, *index);
    }
    rows.push_back(std::move(row));
  }

  if (rows.empty()) throw DatasetError("empty dataset file");
  if (header_n && *header_n != static_cast<Index>(rows.size()))
    throw DatasetError("header declares " + std::to_string(*header_n) + " instances, found " +
                       std::to_string(rows.size()));

  const Index d = options.feature_count.value_or(header_d.value_or(max_feature));
  const Index c = options.label_count.value_or(header_c.value_or(max_label + 1));
  if (d < 1) throw DatasetError("could not infer a positive feature count");
  if (c < 2) throw DatasetError("dataset needs at least two labels");

  MultiLabelDataset data;
  data.features = RowMatrixXd::Zero(static_cast<Index>(rows.size()), d);
  data.labels = LabelMatrix::Constant(static_cast<Index>(rows.size()), c, -1);
  for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
    const SparseRow& row = rows[i];
    for (Index label : row.positives) {
      if (label >= c)
        throw DatasetError("label index " + std::to_string(label) + " >= label count " + std::to_string(c), row.line);
      data.labels(i, label) = 1;
    }
    for (const auto& [j, v] : row.entries) {
      if (j >= d)
        throw DatasetError("feature index " + std::to_string(j + 1) + " exceeds feature count " + std::to_string(d),
                           row.line);
      data.features(i, j) = v;
    }
  }
  if (report) report->lines_parsed = static_cast<Index>(rows.size());
  return drop_trivial(std::move(data), options, report);
}

MultiLabelDataset load_sparse(const std::string& path, const LoadOptions& options, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path);
  MultiLabelDataset data = read_sparse(in, options, report);
  data.name = stem_of(path);
  return data;
}

MultiLabelDataset read_csv(std::istream& in, Index label_count, const LoadOptions& options, LoadReport* report) {
  if (label_count < 2) throw DatasetError("CSV input needs a label count of at least 2");
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line, ',');
    std::vector<double> values;
    values.reserve(cells.size());
    bool numeric = true;
    for (std::string_view cell : cells) {
      const auto v = parse_number<double>(cell);
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (!numeric) {
      if (rows.empty() && width == 0) {
        width = cells.size();  // header row
        continue;
      }
      throw DatasetError("non-numeric CSV cell", line_no);
    }
    if (width == 0) width = values.size();
    if (values.size() != width)
      throw DatasetError("expected " + std::to_string(width) + " columns, got " + std::to_string(values.size()),
                         line_no);
    rows.push_back(std::move(values));
    row_lines.push_back(line_no);
  }
  if (rows.empty()) throw DatasetError("empty dataset file");
  const Index c = options.label_count.value_or(label_count);
  const Index d = static_cast<Index>(width) - c;
  if (d < 1) throw DatasetError("CSV has no feature columns");

  MultiLabelDataset data;
  data.features.resize(static_cast<Index>(rows.size()), d);
  data.labels.resize(static_cast<Index>(rows.size()), c);
  for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
    for (Index j = 0; j < d; ++j) data.features(i, j) = rows[i][j];
    for (Index j = 0; j < c; ++j) {
      const double v = rows[i][d + j];
      if (v == 1.0) {
        data.labels(i, j) = 1;
      } else if (v == -1.0 || v == 0.0) {
        data.labels(i, j) = -1;
      } else {
        throw DatasetError("label cells must be in {-1,+1} or {0,1}", row_lines[i]);
      }
    }
  }
  if (report) report->lines_parsed = static_cast<Index>(rows.size());
  return drop_trivial(std::move(data), options, report);
}

MultiLabelDataset load_csv(const std::string& path, Index label_count, const LoadOptions& options,
                           LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path);
  MultiLabelDataset data = read_csv(in, label_count, options, report);
  data.name = stem_of(path);
  return data;
}

MultiLabelDataset load_dataset(const std::string& path, DataFormat format, const LoadOptions& options,
                               LoadReport* report) {
  if (format == DataFormat::sparse) return load_sparse(path, options, report);
  if (!options.label_count) throw DatasetError("CSV input requires an explicit label count");
  return load_csv(path, *options.label_count, options, report);
}

void write_sparse(std::ostream& out, const MultiLabelDataset& data, bool header) {
  if (header) out << data.instance_count() << ' ' << data.feature_count() << ' ' << data.label_count() << '\n';
  for (Index i = 0; i < data.instance_count(); ++i) {
    bool first = true;
    for (Index j = 0; j < data.label_count(); ++j) {
      if (data.labels(i, j) != 1) continue;
      if (!first) out << ',';
      out << j;
      first = false;
    }
    bool any_feature = false;
    for (Index j = 0; j < data.feature_count(); ++j) {
      const double v = data.features(i, j);
      if (v == 0.0) continue;
      if (!first || any_feature) out << ' ';
      out << (j + 1) << ':';
      write_double(out, v);
      any_feature = true;
    }
    // A line with neither labels nor features would read back as blank.
    if (first && !any_feature) out << "1:0";
    out << '\n';
  }
}

void write_csv(std::ostream& out, const MultiLabelDataset& data) {
  for (Index i = 0; i < data.instance_count(); ++i) {
    for (Index j = 0; j < data.feature_count(); ++j) {
      if (j > 0) out << ',';
      write_double(out, data.features(i, j));
    }
    for (Index j = 0; j < data.label_count(); ++j) out << ',' << data.labels(i, j);
    out << '\n';
  }
}

StandardizationParams standardize_fit(const MultiLabelDataset& data) {
  const Index n = data.instance_count();
  if (n < 2) throw DatasetError("standardization needs at least two instances");
  StandardizationParams params;
  params.mean = data.features.colwise().mean().transpose();
  const RowMatrixXd centered = data.features.rowwise() - params.mean.transpose();
  params.std = (centered.array().square().colwise().sum() / static_cast<double>(n)).sqrt().transpose();
  for (Index j = 0; j < params.std.size(); ++j)
    if (params.std(j) < kStdFloor) params.std(j) = 1.0;
  return params;
}

MultiLabelDataset standardize_apply(const MultiLabelDataset& data, const StandardizationParams& params) {
  if (params.mean.size() != data.feature_count() || params.std.size() != data.feature_count())
    throw DatasetError("standardization expects " + std::to_string(params.mean.size()) + " features, data has " +
                       std::to_string(data.feature_count()));
  MultiLabelDataset out = data;
  out.features = ((data.features.rowwise() - params.mean.transpose()).array().rowwise() /
                  params.std.transpose().array())
                     .matrix();
  return out;
}

MultiLabelDataset append_bias(const MultiLabelDataset& data) {
  MultiLabelDataset out;
  out.name = data.name;
  out.labels = data.labels;
  out.features.resize(data.instance_count(), data.feature_count() + 1);
  out.features.leftCols(data.feature_count()) = data.features;
  out.features.col(data.feature_count()).setOnes();
  return out;
}

MultiLabelDataset subset(const MultiLabelDataset& data, std::span<const Index> rows) {
  MultiLabelDataset out;
  out.name = data.name;
  out.features.resize(static_cast<Index>(rows.size()), data.feature_count());
  out.labels.resize(static_cast<Index>(rows.size()), data.label_count());
  for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
    out.features.row(i) = data.features.row(rows[i]);
    out.labels.row(i) = data.labels.row(rows[i]);
  }
  return out;
}

std::vector<Index> FoldAssignment::members(int fold) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < fold_of_instance.size(); ++i)
    if (fold_of_instance[i] == fold) out.push_back(static_cast<Index>(i));
  return out;
}

std::vector<Index> FoldAssignment::complement(int fold) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < fold_of_instance.size(); ++i)
    if (fold_of_instance[i] != fold) out.push_back(static_cast<Index>(i));
  return out;
}

FoldAssignment kfold_split(Index n, int k, std::uint64_t seed) {
  if (k < 2) throw DatasetError("need at least two folds");
  if (n < k) throw DatasetError("cannot split " + std::to_string(n) + " instances into " + std::to_string(k) + " folds");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  FoldAssignment folds;
  folds.fold_count = k;
  folds.fold_of_instance.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < perm.size(); ++i) folds.fold_of_instance[perm[i]] = static_cast<int>(i % k);
  return folds;
}

std::pair<std::vector<Index>, std::vector<Index>> holdout_split(std::span<const Index> rows, double train_fraction,
                                                                std::uint64_t seed) {
  std::vector<Index> shuffled(rows.begin(), rows.end());
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto m = static_cast<Index>(shuffled.size());
  Index n_train = static_cast<Index>(std::llround(train_fraction * static_cast<double>(m)));
  if (m >= 2) n_train = std::clamp<Index>(n_train, 1, m - 1);
  std::vector<Index> train(shuffled.begin(), shuffled.begin() + n_train);
  std::vector<Index> valid(shuffled.begin() + n_train, shuffled.end());
  std::sort(train.begin(), train.end());
  std::sort(valid.begin(), valid.end());
  return {std::move(train), std::move(valid)};
}

Preprocessing Preprocessing::fit(const MultiLabelDataset& train, bool standardize, bool bias) {
  Preprocessing p;
  if (standardize) p.standardization = standardize_fit(train);
  p.bias = bias;
  return p;
}

MultiLabelDataset Preprocessing::apply(const MultiLabelDataset& data) const {
  MultiLabelDataset out = standardization ? standardize_apply(data, *standardization) : data;
  return bias ? append_bias(out) : out;
}

Index Preprocessing::raw_feature_count() const {
  return standardization ? standardization->mean.size() : -1;
}

} // namespace mlrank
