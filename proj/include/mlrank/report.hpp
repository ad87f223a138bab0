#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mlrank/trainer.hpp"

namespace mlrank {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One line of a metrics CSV: dataset,algo,fold,lambda,rankloss,partial_rankloss,seconds.
struct ResultRecord {
  std::string dataset;
  std::string algo;
  int fold = 0;
  double lambda = 0.0;
  double ranking_loss = 0.0;
  double partial_ranking_loss = 0.0;
  double seconds = 0.0;
};

inline constexpr const char* kResultHeader = "dataset,algo,fold,lambda,rankloss,partial_rankloss,seconds";

/// Test-fold records of a cross-validation run.
std::vector<ResultRecord> test_records(const std::string& dataset, const std::vector<CvResult>& results);
/// Every (fold, lambda) selection record.
std::vector<ResultRecord> validation_records(const std::string& dataset, const std::vector<CvResult>& results);

/// Metrics use 17 significant digits; seconds use 6 decimals.
void write_results_csv(std::ostream& out, const std::vector<ResultRecord>& records, bool header = true);
std::vector<ResultRecord> read_results_csv(std::istream& in);

struct SummaryCell {
  double mean;
  double std;
};

/// Rows are datasets, columns algorithms, cells the mean and population std over folds.
struct SummaryTable {
  std::vector<std::string> algorithms;
  std::vector<std::string> datasets;
  std::vector<std::vector<std::optional<SummaryCell>>> cells;
};

/// Groups records by (dataset, algo) in first-appearance order.
SummaryTable summarize(const std::vector<ResultRecord>& records);

/// Column indices of the smallest and second smallest means in a row; ties keep column order.
std::vector<std::size_t> leading_columns(const std::vector<std::optional<SummaryCell>>& row, std::size_t count);

/// Markdown table of `mean ± std`; the two best cells in a row are bold and the best carries †.
void write_summary_markdown(std::ostream& out, const SummaryTable& table, int decimals = 4);

struct RuntimeRecord {
  std::string dataset;
  std::string algo;
  double wall_seconds;
  double mean_epoch_seconds;
};

std::vector<RuntimeRecord> runtime_records(const std::string& dataset, const std::vector<CvResult>& results);
void write_runtime_csv(std::ostream& out, const std::vector<RuntimeRecord>& records);
std::vector<RuntimeRecord> read_runtime_csv(std::istream& in);

/// Grouped bar chart of wall seconds per dataset and algorithm on a log10 axis.
void write_runtime_svg(std::ostream& out, const std::vector<RuntimeRecord>& records);

} // namespace mlrank
