#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlrank/types.hpp"

namespace mlrank {

class DatasetError : public std::runtime_error {
 public:
  explicit DatasetError(const std::string& what, std::size_t line = 0);
  /// 1-based input line, 0 when not tied to a line.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Dense features (n x d, row per instance) with {-1,+1} labels (n x c).
struct MultiLabelDataset {
  RowMatrixXd features;
  LabelMatrix labels;
  std::string name;

  Index instance_count() const { return features.rows(); }
  Index feature_count() const { return features.cols(); }
  Index label_count() const { return labels.cols(); }

  /// Throws DatasetError on shape mismatch or labels outside {-1,+1}.
  void validate() const;
  /// Instances with at least one positive and one negative label.
  Index nontrivial_count() const;
};

struct LoadOptions {
  bool keep_trivial = false;
  std::optional<Index> feature_count;
  std::optional<Index> label_count;
};

struct LoadReport {
  Index lines_parsed = 0;
  Index dropped_trivial = 0;
  Index retained = 0;
};

enum class DataFormat { sparse, csv };

/// Sparse multilabel text: `L F:V F:V ...`, L a comma-separated list of
/// 0-based positive labels, F 1-based feature indices. Optional header `n d c`.
MultiLabelDataset read_sparse(std::istream& in, const LoadOptions& options = {}, LoadReport* report = nullptr);
MultiLabelDataset load_sparse(const std::string& path, const LoadOptions& options = {}, LoadReport* report = nullptr);

/// Dense CSV whose last `label_count` columns are labels in {-1,+1} or {0,1}.
MultiLabelDataset read_csv(std::istream& in, Index label_count, const LoadOptions& options = {},
                           LoadReport* report = nullptr);
MultiLabelDataset load_csv(const std::string& path, Index label_count, const LoadOptions& options = {},
                           LoadReport* report = nullptr);

MultiLabelDataset load_dataset(const std::string& path, DataFormat format, const LoadOptions& options = {},
                               LoadReport* report = nullptr);

/// Writers use 17 significant digits so a reload reproduces the values exactly.
void write_sparse(std::ostream& out, const MultiLabelDataset& data, bool header = true);
void write_csv(std::ostream& out, const MultiLabelDataset& data);

struct StandardizationParams {
  VectorXd mean;
  VectorXd std;
};

/// Population std below this is replaced by 1.
inline constexpr double kStdFloor = 1e-12;

StandardizationParams standardize_fit(const MultiLabelDataset& data);
MultiLabelDataset standardize_apply(const MultiLabelDataset& data, const StandardizationParams& params);

/// Appends a constant-1 feature column used as the intercept.
MultiLabelDataset append_bias(const MultiLabelDataset& data);

MultiLabelDataset subset(const MultiLabelDataset& data, std::span<const Index> rows);

struct FoldAssignment {
  std::vector<int> fold_of_instance;
  int fold_count = 0;

  std::vector<Index> members(int fold) const;
  std::vector<Index> complement(int fold) const;
};

/// Seeded permutation followed by round-robin fold assignment.
FoldAssignment kfold_split(Index n, int k, std::uint64_t seed);

/// Deterministic train/validation split of `rows` with `train_fraction` in the first part.
std::pair<std::vector<Index>, std::vector<Index>> holdout_split(std::span<const Index> rows, double train_fraction,
                                                                std::uint64_t seed);

/// Preprocessing a trained model expects: optional standardization, then optional bias column.
struct Preprocessing {
  std::optional<StandardizationParams> standardization;
  bool bias = false;

  static Preprocessing fit(const MultiLabelDataset& train, bool standardize, bool bias);
  MultiLabelDataset apply(const MultiLabelDataset& data) const;
  Index raw_feature_count() const;
};

} // namespace mlrank
