#include "mlrank/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "mlrank/parallel.hpp"

namespace mlrank {

namespace fs = std::filesystem;

std::string dataset_label(const std::string& path) {
  std::string stem = fs::path(path).stem().string();
  for (char& ch : stem)
    if (ch == ',' || ch == '|') ch = '_';
  return stem.empty() ? "dataset" : stem;
}

MultiLabelDataset load_for_experiment(const std::string& path, const ExperimentConfig& cfg, LoadReport* report) {
  LoadOptions options;
  options.keep_trivial = cfg.keep_trivial;
  MultiLabelDataset data = cfg.format == DataFormat::csv ? load_csv(path, cfg.csv_labels, options, report)
                                                         : load_sparse(path, options, report);
  data.name = dataset_label(path);
  if (cfg.smoke && data.instance_count() > kSmokeMaxInstances) {
    std::vector<Index> head(static_cast<std::size_t>(kSmokeMaxInstances));
    for (Index i = 0; i < kSmokeMaxInstances; ++i) head[static_cast<std::size_t>(i)] = i;
    data = subset(data, head);
  }
  return data;
}

BenchArtifacts artifact_paths(const ExperimentConfig& cfg) {
  const std::string hash = config_hash(cfg);
  const fs::path dir(cfg.output);
  auto at = [&](const std::string& stem, const char* ext) { return (dir / (stem + "_" + hash + ext)).string(); };
  return {at("results", ".csv"), at("validation", ".csv"), at("summary", ".md"),
          at("runtime", ".csv"), at("runtime", ".svg"),    at("config", ".txt")};
}

namespace {

template <typename Writer>
void write_file(const std::string& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  writer(out);
  if (!out) throw std::ios_base::failure("write failed for " + path);
}

} // namespace

BenchOutcome run_bench(const ExperimentConfig& requested, std::ostream& log) {
  BenchOutcome outcome;
  requested.validate();
  if (requested.datasets.empty()) throw ConfigError("no datasets configured");
  const ExperimentConfig cfg = requested.effective();
  outcome.artifacts = artifact_paths(requested);

  std::error_code ec;
  fs::create_directories(cfg.output, ec);
  if (ec) {
    log << "error: cannot create " << cfg.output << ": " << ec.message() << '\n';
    outcome.exit_code = kExitIoError;
    return outcome;
  }
  write_file(outcome.artifacts.config_copy, [&](std::ostream& out) { write_config(out, requested); });

  std::vector<AlgorithmSpec> algos;
  for (const auto id : cfg.algorithms) algos.push_back({id, cfg.base});
  const int threads = resolve_thread_count(cfg.threads > 0 ? std::optional<int>(cfg.threads) : std::nullopt);
  const CvOptions options = cfg.cv_options(threads);

  std::vector<ResultRecord> tests, validations;
  std::vector<RuntimeRecord> runtimes;
  bool io_failure = false, task_failure = false;
  for (const auto& path : cfg.datasets) {
    MultiLabelDataset data;
    try {
      LoadReport report;
      data = load_for_experiment(path, cfg, &report);
      log << data.name << ": n=" << data.instance_count() << " d=" << data.feature_count()
          << " c=" << data.label_count() << " (dropped " << report.dropped_trivial << " trivial)\n";
    } catch (const std::exception& e) {
      log << "error: " << path << ": " << e.what() << '\n';
      outcome.failures.push_back(path + ": " + e.what());
      io_failure = true;
      continue;
    }
    try {
      auto results = cross_validate_many(data, algos, options);
      for (const auto& r : results)
        log << "  " << to_string(r.algo.id) << ": rankloss " << r.mean_ranking_loss << " +- " << r.std_ranking_loss
            << " (lambda " << r.best_lambda << ", " << r.wall_seconds << " s)\n";
      const auto t = test_records(data.name, results);
      const auto v = validation_records(data.name, results);
      const auto w = runtime_records(data.name, results);
      tests.insert(tests.end(), t.begin(), t.end());
      validations.insert(validations.end(), v.begin(), v.end());
      runtimes.insert(runtimes.end(), w.begin(), w.end());
      outcome.results.insert(outcome.results.end(), results.begin(), results.end());
    } catch (const std::exception& e) {
      log << "error: " << data.name << ": " << e.what() << '\n';
      outcome.failures.push_back(data.name + ": " + e.what());
      task_failure = true;
      continue;
    }

    write_file(outcome.artifacts.results_csv, [&](std::ostream& out) { write_results_csv(out, tests); });
    write_file(outcome.artifacts.validation_csv, [&](std::ostream& out) { write_results_csv(out, validations); });
    write_file(outcome.artifacts.summary_md, [&](std::ostream& out) { write_summary_markdown(out, summarize(tests)); });
    write_file(outcome.artifacts.runtime_csv, [&](std::ostream& out) { write_runtime_csv(out, runtimes); });
    write_file(outcome.artifacts.runtime_svg, [&](std::ostream& out) { write_runtime_svg(out, runtimes); });
  }
  outcome.exit_code = io_failure ? kExitIoError : (task_failure ? kExitTaskFailure : kExitOk);
  return outcome;
}

} // namespace mlrank
