// mcfa: simulate, fit, cross-validate, evaluate and benchmark low-rank
// matrix completion over finite alphabets.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mcfa/data.hpp"
#include "mcfa/errors.hpp"
#include "mcfa/evaluation.hpp"
#include "mcfa/model.hpp"
#include "mcfa/parallel.hpp"
#include "mcfa/pipeline.hpp"
#include "mcfa/tuning.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int {
  kOk = 0,
  kIoError = 1,
  kUsage = 2,
  kDataError = 3,
  kNumerical = 4,
  kNotConverged = 5,
};

struct RunConfig {
  std::string command;
  std::string model = "logistic";
  std::size_t m1 = 500;
  std::size_t m2 = 300;
  int classes = 2;
  std::size_t n = 100000;
  std::size_t n_test = 0;
  double gamma_scale = 0.6;
  std::optional<double> lambda;
  std::optional<double> epsilon;
  std::uint64_t seed = 0;
  int threads = mcfa::default_threads();
  std::string data;
  std::string out = ".";
  int folds = 5;
  int patience = 2;
  int max_iters = 2000;
  std::string model_file;
  std::string baseline_file;
  std::string truth;
  std::string table = "all";
  int seeds = 5;
  std::string sizes = "1000x1000:100000";
  int repeats = 1;
  double lambda_ratio = 0.1;
  double test_frac = 0.2;
  bool row_column = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path out_path(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.out);
  return fs::path(c.out) / name;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << j.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

mcfa::SolverConfig solver_config(const RunConfig& c) {
  mcfa::SolverConfig s;
  s.epsilon = c.epsilon;
  s.max_outer_iters = c.max_iters;
  s.seed = c.seed;
  if (c.lambda) s.lambda = *c.lambda;
  return s;
}

mcfa::CrossValidationOptions cv_options(const RunConfig& c) {
  mcfa::CrossValidationOptions o;
  o.folds = c.folds;
  o.seed = c.seed;
  o.patience = c.patience;
  o.threads = c.threads;
  return o;
}

mcfa::SyntheticSpec synthetic_spec(const RunConfig& c) {
  mcfa::SyntheticSpec s;
  s.m1 = c.m1;
  s.m2 = c.m2;
  s.classes = c.classes;
  s.gamma_scale = c.gamma_scale;
  s.seed = c.seed;
  s.validate();
  return s;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

mcfa::ObservationSet load_observations(const std::string& path) {
  // Raw MovieLens files are accepted anywhere a dataset is expected.
  if (fs::path(path).extension() == ".data") return mcfa::load_movielens(path);
  return mcfa::read_dataset(path);
}

json report_json(const mcfa::FitReport& r) {
  return {{"lambda", r.lambda},
          {"epsilon", r.epsilon},
          {"iterations", r.iterations},
          {"atoms", r.decomposition.size()},
          {"atoms_added", r.atoms_added},
          {"reoptimizations", r.reoptimizations},
          {"peak_atoms", r.peak_atoms},
          {"converged", r.converged},
          {"g_min", r.final_certificate.g_min},
          {"g_max_support", r.final_certificate.g_max_support},
          {"objective", r.objective_trace.empty() ? 0.0 : r.objective_trace.back()},
          {"max_abs_entry", r.max_abs_entry},
          {"wall_time", r.wall_time.count()}};
}

int cmd_simulate(const RunConfig& c) {
  if (c.n == 0) throw mcfa::DomainError("simulate: --n must be positive");
  const auto spec = synthetic_spec(c);
  const auto truth = mcfa::generate_truth(spec);
  const mcfa::LinkModel link(c.classes);
  const auto dist = c.row_column
                        ? mcfa::SamplingDistribution::row_column(c.m1, c.m2, c.seed ^ 0x5a5a5a5aULL)
                        : mcfa::SamplingDistribution::uniform(c.m1, c.m2);
  json meta{{"spec", mcfa::to_json(spec)}, {"sampling", c.row_column ? "row_column" : "uniform"}};
  meta["part"] = "train";
  const auto train = mcfa::sample_observations(truth, dist, link, c.n, c.seed + 1);
  mcfa::write_dataset(out_path(c, "train.mcfa"), train, meta);
  if (c.n_test > 0) {
    meta["part"] = "test";
    const auto test = mcfa::sample_observations(truth, dist, link, c.n_test, c.seed + 2);
    mcfa::write_dataset(out_path(c, "test.mcfa"), test, meta);
  }
  mcfa::write_tensor(out_path(c, "truth.mcfat"), truth);
  std::cout << "wrote " << train.size() << " observations to " << c.out << '\n';
  return kOk;
}

int cmd_fit(const RunConfig& c) {
  require(!c.data.empty(), "fit: --data is required");
  const auto obs = load_observations(c.data);
  const auto kind = mcfa::model_kind_from_string(c.model);
  auto cfg = solver_config(c);
  json out;
  if (!c.lambda) {
    const auto cv = mcfa::cross_validate(obs, kind, cfg, cv_options(c));
    cfg.lambda = cv.best_lambda;
    out["crossval"] = {{"grid", cv.grid.values}, {"best_lambda", cv.best_lambda}};
  }
  const auto fit = mcfa::fit_model(obs, kind, cfg, {}, c.threads);
  bool converged = true;
  json slices = json::array();
  for (const auto& r : fit.reports) {
    slices.push_back(report_json(r));
    converged = converged && r.converged;
  }
  out["model"] = c.model;
  out["lambda"] = cfg.lambda;
  out["n"] = obs.size();
  out["rows"] = obs.rows();
  out["cols"] = obs.cols();
  out["classes"] = obs.classes();
  out["seed"] = c.seed;
  out["converged"] = converged;
  out["slices"] = slices;
  if (kind == mcfa::ModelKind::gaussian) out["sigma_hat"] = fit.model.sigma_hat;
  mcfa::save_model(out_path(c, "model.json"), fit.model);
  write_json(out_path(c, "fit_report.json"), out);
  std::cout << "fit " << c.model << " lambda=" << cfg.lambda
            << (converged ? " converged" : " NOT CONVERGED") << '\n';
  return converged ? kOk : kNotConverged;
}

int cmd_crossval(const RunConfig& c) {
  require(!c.data.empty(), "crossval: --data is required");
  const auto obs = load_observations(c.data);
  const auto kind = mcfa::model_kind_from_string(c.model);
  const auto cv = mcfa::cross_validate(obs, kind, solver_config(c), cv_options(c));
  auto csv = open_csv(out_path(c, "crossval.csv"));
  std::vector<std::string> header{"lambda", "mean_score"};
  for (int f = 0; f < c.folds; ++f) header.push_back("fold" + std::to_string(f));
  mcfa::write_csv_row(csv, header);
  for (std::size_t i = 0; i < cv.grid.size(); ++i) {
    std::vector<std::string> row{mcfa::format_double(cv.grid.values[i]),
                                 mcfa::format_double(cv.scores[i])};
    for (const auto& fs : cv.fold_scores) row.push_back(mcfa::format_double(fs[i]));
    mcfa::write_csv_row(csv, row);
  }
  write_json(out_path(c, "crossval.json"),
             {{"model", c.model},
              {"ceiling", cv.grid.ceiling},
              {"grid", cv.grid.values},
              {"best_lambda", cv.best_lambda},
              {"best_index", cv.best_index}});
  std::cout << "best lambda " << cv.best_lambda << '\n';
  return kOk;
}

int cmd_evaluate(const RunConfig& c) {
  require(!c.model_file.empty() && !c.data.empty(),
          "evaluate: --model-file and --data are required");
  const auto model = mcfa::load_model(c.model_file);
  const auto test = load_observations(c.data);
  std::optional<mcfa::ParameterTensor> truth;
  if (!c.truth.empty()) truth = mcfa::read_tensor(c.truth);
  const auto report = mcfa::evaluate(model, test, truth ? &*truth : nullptr);
  write_json(out_path(c, "evaluation.json"), mcfa::to_json(report));
  std::cout << "prediction error " << report.prediction_error << '\n';
  if (!c.baseline_file.empty()) {
    const auto base = mcfa::load_model(c.baseline_file);
    const auto other = mcfa::evaluate(base, test, truth ? &*truth : nullptr);
    const bool logistic_first = model.kind == mcfa::ModelKind::logistic;
    const auto rows = logistic_first ? mcfa::compare_models(report, other)
                                     : mcfa::compare_models(other, report);
    auto csv = open_csv(out_path(c, "comparison.csv"));
    mcfa::write_comparison_csv(csv, rows);
  }
  return kOk;
}

struct BenchSize {
  std::size_t m1, m2, n;
};

std::vector<BenchSize> parse_sizes(const std::string& s) {
  std::vector<BenchSize> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    BenchSize b{};
    char x = 0, colon = 0;
    std::istringstream is(item);
    if (!(is >> b.m1 >> x >> b.m2 >> colon >> b.n) || x != 'x' || colon != ':' || b.n == 0)
      throw UsageError("--sizes: expected M1xM2:N[,M1xM2:N...], got '" + item + "'");
    out.push_back(b);
  }
  if (out.empty()) throw UsageError("--sizes: empty");
  return out;
}

int cmd_bench(const RunConfig& c) {
  const auto sizes = parse_sizes(c.sizes);
  auto csv = open_csv(out_path(c, "bench.csv"));
  mcfa::write_csv_row(csv, std::vector<std::string>{"m1", "m2", "n", "repeat", "lambda",
                                                    "wall_time", "peak_atoms", "iterations",
                                                    "converged"});
  const mcfa::LinkModel link(2);
  int status = kOk;
  for (const auto& b : sizes) {
    try {
      auto spec_cfg = c;
      spec_cfg.m1 = b.m1;
      spec_cfg.m2 = b.m2;
      spec_cfg.classes = 2;
      const auto truth = mcfa::generate_truth(synthetic_spec(spec_cfg));
      const auto obs = mcfa::sample_observations(
          truth, mcfa::SamplingDistribution::uniform(b.m1, b.m2), link, b.n, c.seed + 1);
      const auto problem = mcfa::SliceProblem::multinomial(obs, link, 0);
      auto cfg = solver_config(c);
      const mcfa::SliceProblem one[] = {problem};
      if (!c.lambda) cfg.lambda = c.lambda_ratio * mcfa::null_lambda(one);
      for (int r = 0; r < c.repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        const auto rep = mcfa::solve_slice(problem, cfg);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        mcfa::write_csv_row(
            csv, std::vector<std::string>{std::to_string(b.m1), std::to_string(b.m2),
                                          std::to_string(b.n), std::to_string(r),
                                          mcfa::format_double(cfg.lambda),
                                          mcfa::format_double(secs),
                                          std::to_string(rep.peak_atoms),
                                          std::to_string(rep.iterations),
                                          rep.converged ? "true" : "false"});
        csv.flush();
        std::printf("%zux%zu n=%zu  %.2f s  atoms=%zu  iterations=%d\n", b.m1, b.m2, b.n,
                    secs, rep.peak_atoms, rep.iterations);
        if (!rep.converged) status = kNotConverged;
      }
    } catch (const std::bad_alloc&) {
      std::cerr << "bench: out of memory at " << b.m1 << "x" << b.m2 << " n=" << b.n
                << "; partial results kept\n";
      return kNumerical;
    }
  }
  return status;
}

// Long-format rows for every synthetic replicate.
void write_trial_row(std::ostream& csv, const std::string& table, std::size_t m1,
                     std::size_t m2, int classes, std::size_t n, std::uint64_t seed,
                     const std::string& model, const mcfa::ModelOutcome& o) {
  mcfa::write_csv_row(
      csv, std::vector<std::string>{table, std::to_string(m1), std::to_string(m2),
                                    std::to_string(classes), std::to_string(n),
                                    std::to_string(seed), model,
                                    mcfa::format_double(o.report.prediction_error),
                                    mcfa::format_double(o.report.kl),
                                    mcfa::format_double(o.report.kl_per_class),
                                    mcfa::format_double(o.report.hellinger_sq),
                                    mcfa::format_double(o.lambda),
                                    mcfa::format_double(o.seconds)});
  csv.flush();
}

const std::vector<std::string> kTrialHeader{"table", "m1", "m2", "classes", "n", "seed",
                                            "model", "prediction_error", "kl",
                                            "kl_per_class", "hellinger_sq", "lambda",
                                            "seconds"};

struct Averages {
  std::map<std::size_t, std::pair<double, double>> by_n;  // n -> (logistic, gaussian)
};

Averages run_grid(const RunConfig& c, const std::string& table, std::size_t m1,
                  std::size_t m2, int classes, const std::vector<std::size_t>& ns,
                  bool use_kl, std::ostream& long_csv) {
  Averages avg;
  for (std::size_t n : ns) {
    double lsum = 0.0, gsum = 0.0;
    for (int s = 0; s < c.seeds; ++s) {
      mcfa::TrialConfig t;
      t.spec = synthetic_spec(c);
      t.spec.m1 = m1;
      t.spec.m2 = m2;
      t.spec.classes = classes;
      t.spec.seed = c.seed + static_cast<std::uint64_t>(s);
      t.n = n;
      t.n_test = c.n_test > 0 ? c.n_test : 100000;
      t.solver = solver_config(c);
      t.cv = cv_options(c);
      const auto r = mcfa::run_synthetic_trial(t);
      write_trial_row(long_csv, table, m1, m2, classes, n, t.spec.seed, "logistic", r.logistic);
      write_trial_row(long_csv, table, m1, m2, classes, n, t.spec.seed, "gaussian", *r.gaussian);
      lsum += use_kl ? r.logistic.report.kl_per_class : r.logistic.report.prediction_error;
      gsum += use_kl ? r.gaussian->report.kl_per_class : r.gaussian->report.prediction_error;
    }
    avg.by_n[n] = {lsum / c.seeds, gsum / c.seeds};
    std::printf("%s %zux%zu K=%d n=%zu: logistic %.4f gaussian %.4f\n", table.c_str(), m1, m2,
                classes, n, avg.by_n[n].first, avg.by_n[n].second);
  }
  return avg;
}

void write_shaped_table(const fs::path& p, const std::string& label, const Averages& a,
                        const std::string& metric) {
  auto csv = open_csv(p);
  std::vector<std::string> header{label};
  std::vector<std::string> g{"Gaussian " + metric}, l{"Logistic " + metric};
  for (const auto& [n, v] : a.by_n) {
    header.push_back(std::to_string(n));
    l.push_back(mcfa::format_double(v.first));
    g.push_back(mcfa::format_double(v.second));
  }
  mcfa::write_csv_row(csv, header);
  mcfa::write_csv_row(csv, g);
  mcfa::write_csv_row(csv, l);
}

int cmd_reproduce(const RunConfig& c) {
  const bool all = c.table == "all";
  auto want = [&](const std::string& t) { return all || c.table == t; };
  if (!all && !want("2") && !want("3") && !want("fig1") && !want("4"))
    throw UsageError("--table must be one of 2, 3, fig1, 4, all");
  auto long_csv = open_csv(out_path(c, "trials.csv"));
  mcfa::write_csv_row(long_csv, kTrialHeader);

  if (want("2")) {
    const auto a = run_grid(c, "2", 1000, 600, 2, {10000, 50000, 250000, 500000}, false, long_csv);
    write_shaped_table(out_path(c, "table2.csv"), "Number of observations", a,
                       "prediction error");
  }
  if (want("3")) {
    const auto a = run_grid(c, "3", 1000, 600, 5, {10000, 50000, 250000, 500000}, false, long_csv);
    write_shaped_table(out_path(c, "table3.csv"), "Number of observations", a,
                       "prediction error");
  }
  if (want("fig1")) {
    auto csv = open_csv(out_path(c, "figure1.csv"));
    mcfa::write_csv_row(csv, std::vector<std::string>{"classes", "m1", "m2", "fraction", "n",
                                                      "logistic_kl_per_class",
                                                      "gaussian_kl_per_class"});
    for (int k : {2, 5}) {
      for (auto [m1, m2] : {std::pair<std::size_t, std::size_t>{500, 300}, {1000, 600}}) {
        std::vector<std::size_t> ns;
        for (double f : {1.0 / 60, 1.0 / 12, 5.0 / 12})
          ns.push_back(static_cast<std::size_t>(std::llround(f * static_cast<double>(m1 * m2))));
        const auto a = run_grid(c, "fig1", m1, m2, k, ns, true, long_csv);
        for (const auto& [n, v] : a.by_n)
          mcfa::write_csv_row(
              csv, std::vector<std::string>{
                       std::to_string(k), std::to_string(m1), std::to_string(m2),
                       mcfa::format_double(static_cast<double>(n) / static_cast<double>(m1 * m2)),
                       std::to_string(n), mcfa::format_double(v.first),
                       mcfa::format_double(v.second)});
      }
    }
  }
  if (want("4")) {
    if (c.data.empty()) {
      if (!all)
        throw mcfa::DataError(
            "table 4 needs MovieLens 100k: download ml-100k.zip from "
            "https://grouplens.org/datasets/movielens/100k/ and pass --data path/to/u.data");
      std::cout << "skipping table 4 (no --data given)\n";
      return kOk;
    }
    const auto ratings = load_observations(c.data);
    const auto r = mcfa::run_ratings_experiment(ratings, c.test_frac, solver_config(c),
                                                cv_options(c), c.seed);
    auto csv = open_csv(out_path(c, "table4.csv"));
    std::vector<std::string> header{"Rating against the others"}, g{"Gaussian prediction error"},
        l{"Logistic prediction error"};
    for (std::size_t i = 0; i < r.one_vs_rest.size(); ++i) {
      header.push_back(std::to_string(i + 1));
      l.push_back(mcfa::format_double(r.one_vs_rest[i].first.report.prediction_error));
      g.push_back(mcfa::format_double(r.one_vs_rest[i].second.report.prediction_error));
    }
    header.push_back("multinomial");
    l.push_back(mcfa::format_double(r.multinomial.first.report.prediction_error));
    g.push_back(mcfa::format_double(r.multinomial.second.report.prediction_error));
    mcfa::write_csv_row(csv, header);
    mcfa::write_csv_row(csv, g);
    mcfa::write_csv_row(csv, l);
  }
  return kOk;
}

// Turns a JSON object into "--key value" arguments placed ahead of the real
// command line, so that flags given explicitly take precedence.
std::vector<std::string> config_arguments(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot open config " + p.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw mcfa::ParseError(p.string() + ": " + e.what(), 0);
  }
  if (!j.is_object()) throw mcfa::ParseError(p.string() + ": expected a JSON object", 0);
  std::vector<std::string> args;
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + key);
      continue;
    }
    args.push_back("--" + key);
    args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank matrix completion over finite alphabets"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  RunConfig c;
  std::string config_file;
  app.add_option("--config", config_file, "JSON file of flag values; explicit flags win");
  app.add_option("--command", c.command, "simulate | fit | crossval | evaluate | bench | reproduce")
      ->required()
      ->check(CLI::IsMember({"simulate", "fit", "crossval", "evaluate", "bench", "reproduce"}));
  app.add_option("--model", c.model, "logistic | gaussian")
      ->check(CLI::IsMember({"logistic", "gaussian"}));
  app.add_option("--m1", c.m1, "rows")->check(CLI::PositiveNumber);
  app.add_option("--m2", c.m2, "columns")->check(CLI::PositiveNumber);
  app.add_option("--classes", c.classes, "number of classes K")->check(CLI::Range(2, 1000));
  app.add_option("--n", c.n, "number of observations");
  app.add_option("--n-test", c.n_test, "size of an independent test sample");
  app.add_option("--gamma-scale", c.gamma_scale, "signal scale of the synthetic truth");
  app.add_option("--lambda", c.lambda, "regularization; cross-validated when absent");
  app.add_option("--epsilon", c.epsilon, "solver precision; default 1e-4 Psi(0)");
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--data", c.data, "dataset (.mcfa) or MovieLens u.data");
  app.add_option("--out", c.out, "output directory");
  app.add_option("--folds", c.folds, "cross-validation folds")->check(CLI::Range(2, 1000));
  app.add_option("--patience", c.patience, "early stop on the lambda grid; 0 = full grid");
  app.add_option("--max-iters", c.max_iters, "outer iteration cap")->check(CLI::PositiveNumber);
  app.add_option("--model-file", c.model_file, "fitted model (evaluate)");
  app.add_option("--baseline-file", c.baseline_file, "second model to compare against");
  app.add_option("--truth", c.truth, "true tensor (.mcfat) for divergence metrics");
  app.add_option("--table", c.table, "reproduce: 2 | 3 | fig1 | 4 | all");
  app.add_option("--seeds", c.seeds, "reproduce: replicates per cell")->check(CLI::PositiveNumber);
  app.add_option("--sizes", c.sizes, "bench: M1xM2:N[,M1xM2:N...]");
  app.add_option("--repeats", c.repeats, "bench: runs per size")->check(CLI::PositiveNumber);
  app.add_option("--lambda-ratio", c.lambda_ratio, "bench: lambda as a fraction of the null lambda");
  app.add_option("--test-frac", c.test_frac, "real data: held-out fraction");
  app.add_flag("--row-column", c.row_column, "non-uniform row/column sampling");

  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
  try {
    // Pre-scan for --config so its values can be placed first.
    for (std::size_t i = 0; i < args.size(); ++i) {
      const std::string& a = args[i];
      if (a.rfind("--config=", 0) == 0) config_file = a.substr(9);
      if (a == "--config" && i > 0) config_file = args[i - 1];
    }
    if (!config_file.empty()) {
      auto extra = config_arguments(config_file);
      for (auto it = extra.rbegin(); it != extra.rend(); ++it) args.push_back(*it);
    }
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  } catch (const mcfa::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }

  try {
    if (c.command == "simulate") return cmd_simulate(c);
    if (c.command == "fit") return cmd_fit(c);
    if (c.command == "crossval") return cmd_crossval(c);
    if (c.command == "evaluate") return cmd_evaluate(c);
    if (c.command == "bench") return cmd_bench(c);
    return cmd_reproduce(c);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const mcfa::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const mcfa::DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const mcfa::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const mcfa::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
}
