// mlrank: command-line driver for training, cross-validation, benchmarks,
// consistency checks and bound tables.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mlrank/bounds.hpp"
#include "mlrank/config.hpp"
#include "mlrank/consistency.hpp"
#include "mlrank/experiment.hpp"
#include "mlrank/parallel.hpp"
#include "mlrank/report.hpp"
#include "mlrank/trainer.hpp"

namespace {

using namespace mlrank;
using nlohmann::json;

/// Failure classes mapped onto exit codes.
struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  std::string s = buf;
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::string rational_text(const Rational& r) {
  return r.denominator() == 1 ? std::to_string(r.numerator())
                              : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

json labels_json(const LabelVector& y) { return std::vector<int>(y.data(), y.data() + y.size()); }

json distribution_json(const ConditionalDistribution& dist) {
  json atoms = json::array();
  for (const auto& a : dist.support()) atoms.push_back({{"y", labels_json(a.labels)}, {"p", a.probability}});
  return atoms;
}

json scores_json(const BayesPredictor& f) {
  json out = json::array();
  for (const auto& s : f) out.push_back(s.to_string());
  return out;
}

MultiLabelDataset load_data(const std::string& path, const std::string& format, Index csv_labels, bool keep_trivial,
                            LoadReport* report = nullptr) {
  if (!std::filesystem::exists(path)) throw IoFailure("no such file: " + path);
  LoadOptions options;
  options.keep_trivial = keep_trivial;
  try {
    MultiLabelDataset d = format == "csv" ? load_csv(path, csv_labels, options, report)
                                          : load_sparse(path, options, report);
    d.name = dataset_label(path);
    return d;
  } catch (const DatasetError& e) {
    throw IoFailure(path + ": " + e.what());
  }
}

PenaltyAssignment penalties_for(const std::string& scheme) {
  if (scheme == "unit") {
    const auto one = [](const LabelVector&) { return 1.0; };
    return PenaltyAssignment::general(one, one);
  }
  const auto kind = parse_penalty_kind(scheme);
  if (!kind || *kind == PenaltyKind::general) throw ConfigError("scheme must be u1, u2, u3, u4 or unit");
  return PenaltyAssignment::from_scheme(*kind);
}

// ---------------------------------------------------------------- convert

struct ConvertArgs {
  std::string input, output, from = "sparse", to = "csv";
  Index csv_labels = 0;
  bool keep_trivial = false;
  bool no_header = false;
};

int run_convert(const ConvertArgs& a) {
  if (a.from == "csv" && a.csv_labels < 2) throw ConfigError("--csv-labels is required for csv input");
  LoadReport report;
  const MultiLabelDataset data = load_data(a.input, a.from, a.csv_labels, a.keep_trivial, &report);
  std::ofstream out(a.output);
  if (!out) throw IoFailure("cannot write " + a.output);
  if (a.to == "csv") write_csv(out, data);
  else write_sparse(out, data, !a.no_header);
  std::cout << "converted " << report.retained << " instances (" << report.dropped_trivial
            << " trivial dropped) to " << a.output << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data, format = "sparse", algo = "u3", base = "logistic", model, trace, solver = "svrg_bb";
  Index csv_labels = 0;
  double lambda = 1e-4;
  int epochs = 30;
  Index inner_steps = 0;
  double step = 0.1;
  double tolerance = 1e-7;
  std::uint64_t seed = 0;
  bool no_standardize = false, no_bias = false, keep_trivial = false;
};

int run_train(const TrainArgs& a) {
  const auto algo = parse_algorithm(a.algo);
  const auto base = parse_base_loss(a.base);
  if (!algo || !base) throw ConfigError("unknown algorithm or base loss");
  if (a.solver != "svrg_bb" && a.solver != "batch_gd") throw ConfigError("solver must be svrg_bb or batch_gd");
  LoadReport report;
  const MultiLabelDataset data = load_data(a.data, a.format, a.csv_labels, a.keep_trivial, &report);

  TrainOptions options;
  options.optimizer.outer_epochs = a.epochs;
  options.optimizer.inner_steps = a.inner_steps;
  options.optimizer.initial_step = a.step;
  options.optimizer.tolerance = a.tolerance;
  options.optimizer.seed = a.seed;
  options.solver = a.solver == "svrg_bb" ? Solver::svrg_bb : Solver::batch_gd;
  options.standardize = !a.no_standardize;
  options.bias = !a.no_bias;

  const TrainResult result = train(data, {*algo, *base}, a.lambda, options);
  const Metrics m = evaluate(result.model, data);
  std::cout << data.name << ": n=" << data.instance_count() << " d=" << data.feature_count()
            << " c=" << data.label_count() << " dropped_trivial=" << report.dropped_trivial << '\n'
            << "epochs " << result.trace.epochs.size() - 1 << " (" << result.trace.stop_reason << ", "
            << result.trace.rejected_epochs << " rejected), " << result.seconds << " s\n"
            << "objective " << number(result.trace.epochs.back().objective) << '\n'
            << "train rankloss " << number(m.ranking_loss) << ", partial " << number(m.partial_ranking_loss) << '\n';
  if (!a.model.empty()) {
    try {
      save_model(a.model, result.model);
    } catch (const ModelError& e) {
      throw IoFailure(e.what());
    }
    std::cout << "model written to " << a.model << '\n';
  }
  if (!a.trace.empty()) {
    std::ofstream out(a.trace);
    if (!out) throw IoFailure("cannot write " + a.trace);
    write_trace_csv(out, result.trace);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- bench / cv

struct BenchArgs {
  std::string config;
  std::vector<std::string> datasets;
  std::string algos, lambdas, output, base;
  int threads = 0;
  int epochs = 0;
  std::optional<std::uint64_t> seed;
  bool smoke = false;
  bool select_on_test_folds = false;
};

ExperimentConfig build_config(const BenchArgs& a) {
  ExperimentConfig cfg;
  if (!a.config.empty()) {
    if (!std::filesystem::exists(a.config)) throw IoFailure("no such config file: " + a.config);
    cfg = load_config(a.config);
  }
  if (!a.datasets.empty()) cfg.datasets = a.datasets;
  if (!a.algos.empty()) cfg.set("algos", a.algos);
  if (!a.lambdas.empty()) cfg.set("lambdas", a.lambdas);
  if (!a.output.empty()) cfg.output = a.output;
  if (!a.base.empty()) cfg.set("base", a.base);
  if (a.epochs > 0) cfg.epochs = a.epochs;
  if (a.seed) cfg.seed = *a.seed;
  if (a.smoke) cfg.smoke = true;
  if (a.select_on_test_folds) cfg.select_on_test_folds = true;
  if (a.threads > 0) cfg.threads = a.threads;
  cfg.validate();
  return cfg;
}

int run_bench_command(const BenchArgs& a, bool print_curves) {
  const ExperimentConfig cfg = build_config(a);
  const BenchOutcome outcome = run_bench(cfg, std::cout);
  if (print_curves) {
    for (const auto& r : outcome.results) {
      std::cout << to_string(r.algo.id) << " validation rankloss by lambda:";
      const auto curve = r.mean_validation_curve();
      for (std::size_t l = 0; l < curve.size(); ++l) std::cout << ' ' << r.lambda_grid[l] << ':' << number(curve[l]);
      std::cout << "\n  best lambda " << r.best_lambda << ", test rankloss " << number(r.mean_ranking_loss) << " +- "
                << number(r.std_ranking_loss) << '\n';
    }
  }
  if (std::filesystem::exists(outcome.artifacts.summary_md)) {
    std::ifstream md(outcome.artifacts.summary_md);
    std::cout << '\n' << md.rdbuf();
    std::cout << "\nartifacts: " << outcome.artifacts.results_csv << ", " << outcome.artifacts.summary_md << ", "
              << outcome.artifacts.runtime_svg << '\n';
  }
  for (const auto& f : outcome.failures) std::cerr << "failed: " << f << '\n';
  return outcome.exit_code;
}

// ---------------------------------------------------------------- consistency

struct ConsistencyArgs {
  std::string scheme = "u2", base = "logistic", json_path;
  Index c = 4;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  int threads = 0;
  double mass_y2 = 0.2, mass_y3 = 0.1;
};

int run_consistency(const ConsistencyArgs& a) {
  const auto base = parse_base_loss(a.base);
  if (!base) throw ConfigError("unknown base loss `" + a.base + "`");
  const PenaltyAssignment penalties = penalties_for(a.scheme);

  std::ofstream json_file;
  std::ostream* json_out = nullptr;
  if (a.json_path == "-") {
    json_out = &std::cout;
  } else if (!a.json_path.empty()) {
    json_file.open(a.json_path);
    if (!json_file) throw IoFailure("cannot write " + a.json_path);
    json_out = &json_file;
  }
  auto emit = [&](json record) {
    record["scheme"] = a.scheme;
    record["base"] = a.base;
    record["c"] = a.c;
    if (json_out) *json_out << record.dump() << '\n';
  };

  if (*base == BaseLossKind::hinge) {
    if (a.c != 2) throw ConfigError("the hinge counterexample is built with --c 2");
    const HingeCounterexample h = hinge_counterexample(penalties, {a.mass_y2, a.mass_y3});
    std::cout << "hinge counterexample (c=2), scheme " << a.scheme << '\n'
              << "  masses: (+1,+1) " << number(h.distribution.support()[0].probability) << ", (+1,-1) "
              << number(a.mass_y2) << ", (-1,+1) " << number(a.mass_y3) << "; epsilon " << number(h.epsilon)
              << " < " << number(h.epsilon_bound) << '\n'
              << "  phi+ = (" << number(h.stats.phi_plus(0)) << ", " << number(h.stats.phi_plus(1)) << "), phi- = ("
              << number(h.stats.phi_minus(0)) << ", " << number(h.stats.phi_minus(1)) << ")\n"
              << "  surrogate Bayes f = (" << h.surrogate_bayes[0].to_string() << ", "
              << h.surrogate_bayes[1].to_string() << ")\n"
              << "  Delta_1^+ - Delta_2^+ = " << number(h.delta_gap) << " (requires f_1 != f_2)\n"
              << "  verdict: " << (h.membership.member ? "member of the partial ranking Bayes set"
                                                       : "NOT in the partial ranking Bayes set: inconsistent")
              << '\n';
    emit({{"kind", "hinge_counterexample"},
          {"verdict", h.membership.member ? "member" : "violation"},
          {"distribution", distribution_json(h.distribution)},
          {"scores", scores_json(h.surrogate_bayes)},
          {"delta_gap", h.delta_gap},
          {"epsilon", h.epsilon},
          {"epsilon_bound", h.epsilon_bound}});
    return kExitOk;
  }

  if (*base != BaseLossKind::exponential && *base != BaseLossKind::logistic && *base != BaseLossKind::squared_hinge)
    throw ConfigError("consistency checks support exponential, logistic, squared_hinge and hinge");

  const TauCheck tau = necessary_condition_tau(penalties, a.c);
  if (tau.holds) {
    const std::string tau_text = tau.exact_tau ? rational_text(*tau.exact_tau) : number(tau.tau);
    std::cout << "necessary condition holds, tau=" << tau_text << '\n';
    emit({{"kind", "tau"}, {"verdict", "holds"}, {"tau", tau.tau}, {"tau_exact", tau_text}});
  } else {
    const TauWitness& w = *tau.witness;
    const std::string r1 = w.exact_ratio ? rational_text(*w.exact_ratio) : number(w.ratio);
    const std::string r2 = w.exact_ratio_prime ? rational_text(*w.exact_ratio_prime) : number(w.ratio_prime);
    std::cout << "necessary condition fails: witness ratios " << number(w.ratio) << " vs " << number(w.ratio_prime)
              << " (" << r1 << " vs " << r2 << ")\n";
    emit({{"kind", "tau"},
          {"verdict", "witness"},
          {"witness",
           {{"y", labels_json(w.y)}, {"y_prime", labels_json(w.y_prime)}, {"ratio", w.ratio},
            {"ratio_prime", w.ratio_prime}, {"ratio_exact", r1}, {"ratio_prime_exact", r2}}}});
    if (a.c >= 3) {
      if (const auto ce = corollary_counterexample(penalties, a.c)) {
        std::cout << "constructive counterexample on labels (" << ce->p << ", " << ce->q << "): ";
        if (ce->verdict.violation) {
          const auto& v = *ce->verdict.violation;
          std::cout << "delta determinant " << number(v.delta_determinant) << ", phi determinant "
                    << number(v.phi_determinant) << " -> violation\n";
        } else {
          std::cout << "no violation (unexpected)\n";
        }
        json rec{{"kind", "counterexample"},
                 {"verdict", ce->verdict.consistent_here ? "consistent_here" : "violation"},
                 {"distribution", distribution_json(ce->distribution)}};
        if (ce->verdict.violation)
          rec["witness"] = {{"p", ce->verdict.violation->p}, {"q", ce->verdict.violation->q},
                            {"delta_determinant", ce->verdict.violation->delta_determinant},
                            {"phi_determinant", ce->verdict.violation->phi_determinant}};
        emit(rec);
      }
    }
  }

  if (a.c <= 6) {
    const int threads = resolve_thread_count(a.threads > 0 ? std::optional<int>(a.threads) : std::nullopt);
    const auto violations = random_violation_search(penalties, *base, a.c, a.trials, a.seed, threads);
    if (violations.empty()) {
      std::cout << "no violation in search (" << a.trials << " trials)\n";
    } else {
      const auto& v = violations.front();
      std::cout << violations.size() << " violating distributions in " << a.trials << " trials; first at trial "
                << v.trial << " on labels (" << v.condition.p << ", " << v.condition.q << ")\n";
    }
    json rec{{"kind", "search"},
             {"verdict", violations.empty() ? "no_violation" : "violation"},
             {"trials", a.trials},
             {"seed", a.seed},
             {"violations", violations.size()}};
    if (!violations.empty())
      rec["witness"] = {{"trial", violations.front().trial},
                        {"p", violations.front().condition.p},
                        {"q", violations.front().condition.q},
                        {"distribution", distribution_json(violations.front().distribution)}};
    emit(rec);
  } else {
    std::cout << "random search skipped: it supports c <= 6\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
  std::string model, data, format = "sparse";
  Index csv_labels = 0;
  double delta = 0.05;
  bool log2 = false;
};

int run_bounds(const BoundsArgs& a) {
  if (!std::filesystem::exists(a.model)) throw IoFailure("no such model file: " + a.model);
  LinearModeld model;
  try {
    model = load_model(a.model);
  } catch (const ModelError& e) {
    throw IoFailure(a.model + ": " + e.what());
  }
  const MultiLabelDataset data = load_data(a.data, a.format, a.csv_labels, false);
  if (data.label_count() != model.label_count()) throw ConfigError("model and dataset label counts differ");
  const BoundReport r = bound_report(model, data, a.delta, a.log2 ? LogBase::binary : LogBase::natural);
  std::cout << "n=" << r.inputs.n << " c=" << r.inputs.c << " delta=" << r.inputs.delta
            << " log=" << (a.log2 ? "log2" : "ln") << '\n'
            << "Lambda=|W|_F=" << number(r.inputs.Lambda) << " r=" << number(r.inputs.r) << '\n'
            << to_string(r.base) << " on [-" << number(r.z_max) << ", " << number(r.z_max) << "]: rho="
            << number(r.inputs.rho) << " B=" << number(r.inputs.B) << '\n'
            << "empirical rankloss " << number(r.ranking_loss) << "\n\n"
            << "| scheme | empirical risk | mu | M | bound |\n|---|---|---|---|---|\n";
  for (const auto& row : r.rows)
    std::cout << "| " << to_string(row.scheme) << " | " << number(row.empirical_risk) << " | "
              << number(row.constants.mu) << " | " << number(row.constants.M) << " | " << number(row.bound) << " |\n";
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> results;
  std::string runtime, markdown, svg;
};

int run_report(const ReportArgs& a) {
  std::vector<ResultRecord> records;
  for (const auto& path : a.results) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    const auto r = read_results_csv(in);
    records.insert(records.end(), r.begin(), r.end());
  }
  const SummaryTable table = summarize(records);
  if (a.markdown.empty()) {
    write_summary_markdown(std::cout, table);
  } else {
    std::ofstream out(a.markdown);
    if (!out) throw IoFailure("cannot write " + a.markdown);
    write_summary_markdown(out, table);
  }
  if (!a.runtime.empty()) {
    std::ifstream in(a.runtime);
    if (!in) throw IoFailure("cannot open " + a.runtime);
    const auto runtimes = read_runtime_csv(in);
    const std::string svg = a.svg.empty() ? "runtime.svg" : a.svg;
    std::ofstream out(svg);
    if (!out) throw IoFailure("cannot write " + svg);
    write_runtime_svg(out, runtimes);
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-label ranking with reweighted univariate and pairwise surrogate losses"};
  app.require_subcommand(1);

  ConvertArgs convert;
  auto* c_cmd = app.add_subcommand("convert", "Convert between sparse and dense CSV datasets");
  c_cmd->add_option("--input", convert.input)->required();
  c_cmd->add_option("--output", convert.output)->required();
  c_cmd->add_option("--from", convert.from)->check(CLI::IsMember({"sparse", "csv"}));
  c_cmd->add_option("--to", convert.to)->check(CLI::IsMember({"sparse", "csv"}));
  c_cmd->add_option("--csv-labels", convert.csv_labels, "Label columns at the end of CSV input");
  c_cmd->add_flag("--keep-trivial", convert.keep_trivial);
  c_cmd->add_flag("--no-header", convert.no_header, "Omit the `n d c` header in sparse output");

  TrainArgs tr;
  auto* t_cmd = app.add_subcommand("train", "Train one model");
  t_cmd->add_option("--data", tr.data)->required();
  t_cmd->add_option("--format", tr.format)->check(CLI::IsMember({"sparse", "csv"}));
  t_cmd->add_option("--csv-labels", tr.csv_labels);
  t_cmd->add_option("--algo", tr.algo, "pa, u1, u2, u3 or u4");
  t_cmd->add_option("--base", tr.base);
  t_cmd->add_option("--lambda", tr.lambda);
  t_cmd->add_option("--epochs", tr.epochs);
  t_cmd->add_option("--inner-steps", tr.inner_steps, "0 means 2n");
  t_cmd->add_option("--step", tr.step);
  t_cmd->add_option("--tolerance", tr.tolerance);
  t_cmd->add_option("--seed", tr.seed);
  t_cmd->add_option("--solver", tr.solver);
  t_cmd->add_option("--model", tr.model, "Write the trained model here");
  t_cmd->add_option("--trace", tr.trace, "Write the per-epoch trace CSV here");
  t_cmd->add_flag("--no-standardize", tr.no_standardize);
  t_cmd->add_flag("--no-bias", tr.no_bias);
  t_cmd->add_flag("--keep-trivial", tr.keep_trivial);

  BenchArgs bench, cv;
  auto add_bench_options = [](CLI::App* cmd, BenchArgs& b) {
    cmd->add_option("--config", b.config, "Flat key = value experiment file");
    cmd->add_option("--algos", b.algos, "Comma-separated subset of pa,u1,u2,u3,u4");
    cmd->add_option("--lambdas", b.lambdas, "Comma-separated lambda grid");
    cmd->add_option("--output", b.output, "Artifact directory");
    cmd->add_option("--base", b.base);
    cmd->add_option("--epochs", b.epochs);
    cmd->add_option("--seed", b.seed);
    cmd->add_option("--threads", b.threads, "Worker count; MLRANK_THREADS or core count when 0");
    cmd->add_flag("--smoke", b.smoke, "Cap epochs, grid and instances for quick runs");
    cmd->add_flag("--select-on-test-folds", b.select_on_test_folds, "Choose lambda on the test folds");
  };
  auto* b_cmd = app.add_subcommand("bench", "Cross-validate every algorithm on every dataset");
  add_bench_options(b_cmd, bench);
  b_cmd->add_option("--datasets", bench.datasets);
  auto* v_cmd = app.add_subcommand("cv", "Cross-validate on one dataset and print the lambda curves");
  add_bench_options(v_cmd, cv);
  v_cmd->add_option("--data", cv.datasets)->expected(1);

  ConsistencyArgs cons;
  auto* k_cmd = app.add_subcommand("consistency", "Necessary condition, counterexamples and random search");
  k_cmd->add_option("--scheme", cons.scheme, "u1, u2, u3, u4 or unit (all betas 1)");
  k_cmd->add_option("--base", cons.base);
  k_cmd->add_option("--c", cons.c);
  k_cmd->add_option("--trials", cons.trials);
  k_cmd->add_option("--seed", cons.seed);
  k_cmd->add_option("--threads", cons.threads);
  k_cmd->add_option("--json", cons.json_path, "JSON lines output file, `-` for stdout");
  k_cmd->add_option("--mass-y2", cons.mass_y2, "Hinge construction: mass on (+1,-1)");
  k_cmd->add_option("--mass-y3", cons.mass_y3, "Hinge construction: mass on (-1,+1)");

  BoundsArgs bnd;
  auto* g_cmd = app.add_subcommand("bounds", "Generalization bounds for a trained model");
  g_cmd->add_option("--model", bnd.model)->required();
  g_cmd->add_option("--data", bnd.data)->required();
  g_cmd->add_option("--format", bnd.format)->check(CLI::IsMember({"sparse", "csv"}));
  g_cmd->add_option("--csv-labels", bnd.csv_labels);
  g_cmd->add_option("--delta", bnd.delta);
  g_cmd->add_flag("--log2", bnd.log2, "Use log base 2 in the confidence term");

  ReportArgs rep;
  auto* r_cmd = app.add_subcommand("report", "Rebuild the summary table and runtime chart from CSV results");
  r_cmd->add_option("--results", rep.results)->required();
  r_cmd->add_option("--runtime", rep.runtime);
  r_cmd->add_option("--markdown", rep.markdown);
  r_cmd->add_option("--svg", rep.svg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadConfig;
  }

  try {
    if (*c_cmd) return run_convert(convert);
    if (*t_cmd) return run_train(tr);
    if (*b_cmd) return run_bench_command(bench, false);
    if (*v_cmd) return run_bench_command(cv, true);
    if (*k_cmd) return run_consistency(cons);
    if (*g_cmd) return run_bounds(bnd);
    if (*r_cmd) return run_report(rep);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const ConsistencyError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const BoundError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const IoFailure& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const ReportError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitTaskFailure;
  }
  return kExitOk;
}
