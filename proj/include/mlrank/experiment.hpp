#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mlrank/config.hpp"
#include "mlrank/dataset.hpp"
#include "mlrank/report.hpp"

namespace mlrank {

enum ExitCode : int { kExitOk = 0, kExitTaskFailure = 1, kExitBadConfig = 2, kExitIoError = 3 };

/// Dataset name used in reports: the file name without directories and extension.
std::string dataset_label(const std::string& path);

/// Loads with the config's format and trivial-instance rule; smoke mode keeps
/// the first kSmokeMaxInstances instances.
MultiLabelDataset load_for_experiment(const std::string& path, const ExperimentConfig& cfg, LoadReport* report = nullptr);

struct BenchArtifacts {
  std::string results_csv;
  std::string validation_csv;
  std::string summary_md;
  std::string runtime_csv;
  std::string runtime_svg;
  std::string config_copy;
};

/// Artifact paths under cfg.output, each embedding the config hash.
BenchArtifacts artifact_paths(const ExperimentConfig& cfg);

struct BenchOutcome {
  int exit_code = kExitOk;
  BenchArtifacts artifacts;
  std::vector<CvResult> results;
  std::vector<std::string> failures;
};

/// Cross-validates every configured algorithm on every dataset and rewrites the
/// artifacts after each dataset, so a failure keeps earlier results on disk.
BenchOutcome run_bench(const ExperimentConfig& cfg, std::ostream& log);

} // namespace mlrank
