#include "sketchreg/cli.hpp"

#include "sketchreg/bench.hpp"
#include "sketchreg/error.hpp"
#include "sketchreg/preconditioner.hpp"
#include "sketchreg/solvers.hpp"

#include "CLI11.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sketchreg {

namespace {

namespace fs = std::filesystem;

// Counts are read as doubles so that 1e5 and 16384 are both accepted.
std::size_t to_count(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
    throw Error(Errc::invalid_argument, fmt::format("{} must be a nonnegative integer, got {}", what, v));
  }
  return static_cast<std::size_t>(v);
}

struct SolveFlags {
  std::string solver = "pwgrad";
  std::string constraint = "none";
  double radius_scale = 1.0;
  std::string sketch = "countsketch";
  double sketch_size = 0;
  double batch = 1;
  double iters = 1000;
  std::optional<double> eta;
  double epochs = 10;
  double seed = 42;
  double record_every = 1;
  bool fixed_sketch = false;
  std::optional<double> v0;
  std::optional<double> sigma2;
  std::optional<double> distance_bound;
  double tolerance = 0.0;
};

void add_solver_flags(CLI::App* app, SolveFlags& f, bool with_solver) {
  if (with_solver) {
    app->add_option("--solver", f.solver, "hdpwbatch | hdpwacc | pwgrad | ihs | sgd")->capture_default_str();
    app->add_flag("--fixed-sketch", f.fixed_sketch, "ihs: reuse one sketch (matches pwgrad at eta 1/2)");
  }
  app->add_option("--constraint", f.constraint, "none | l1 | l2")->capture_default_str();
  app->add_option("--radius-scale", f.radius_scale, "ball radius as a multiple of the unconstrained optimum's norm")
      ->capture_default_str();
  app->add_option("--sketch", f.sketch, "gaussian | countsketch | srht | identity")->capture_default_str();
  app->add_option("--sketch-size", f.sketch_size, "sketch rows; 0 picks the solver default")->capture_default_str();
  app->add_option("--batch", f.batch, "mini-batch size r")->capture_default_str();
  app->add_option("--iters", f.iters, "iterations T (total inner iterations cap for hdpwacc)")->capture_default_str();
  app->add_option("--eta", f.eta, "step size; default 1/2 for pwgrad, 1 for ihs, automatic for the SGD solvers");
  app->add_option("--epochs", f.epochs, "epochs S for hdpwacc")->capture_default_str();
  app->add_option("--record-every", f.record_every, "trace stride; 0 keeps only the first and last point")
      ->capture_default_str();
  app->add_option("--v0", f.v0, "hdpwacc: bound on f(x0) - f*; default f(x0)");
  app->add_option("--sigma2", f.sigma2, "gradient variance bound; default probed at x0");
  app->add_option("--distance-bound", f.distance_bound, "unconstrained step-size rule: bound on ||R (x0 - x*)||");
  app->add_option("--tolerance", f.tolerance, "stop at this relative error")->capture_default_str();
}

SolverConfig make_config(const SolveFlags& f) {
  SolverConfig cfg;
  cfg.batch_size = to_count(f.batch, "--batch");
  cfg.iterations = to_count(f.iters, "--iters");
  cfg.step_size = f.eta;
  cfg.epochs = to_count(f.epochs, "--epochs");
  cfg.v0 = f.v0;
  cfg.sigma2 = f.sigma2;
  cfg.distance_bound = f.distance_bound;
  cfg.seed = to_count(f.seed, "--seed");
  cfg.record_every = to_count(f.record_every, "--record-every");
  cfg.sketch = parse_sketch_kind(f.sketch);
  cfg.sketch_size = to_count(f.sketch_size, "--sketch-size");
  cfg.tolerance = f.tolerance;
  if (cfg.batch_size == 0) throw Error(Errc::invalid_argument, "--batch must be at least 1");
  return cfg;
}

SolverId solver_from_flags(const SolveFlags& f) {
  SolverId id = parse_solver_id(f.solver);
  if (id == SolverId::ihs && f.fixed_sketch) id = SolverId::ihs_fixed;
  return id;
}

double final_error(const SolveReport& rep) { return rep.trace.back().relative_error; }

// ---- gen ----

struct GenFlags {
  double n = 0;
  double d = 0;
  double kappa = 1e3;
  double noise_std = 0.1;
  double seed = 42;
  std::string out;
};

int cmd_gen(const GenFlags& f, std::ostream& out) {
  DatasetSpec spec;
  spec.n = to_count(f.n, "--n");
  spec.d = to_count(f.d, "--d");
  spec.target_kappa = f.kappa;
  spec.noise_std = f.noise_std;
  spec.seed = to_count(f.seed, "--seed");
  const SyntheticData data = gen_synthetic(spec);
  write_dataset_csv(f.out, data.a, data.b);
  out << fmt::format("wrote {} rows x {} columns to {}\n", spec.n, spec.d + 1, f.out);
  out << fmt::format("measured kappa(A) = {:.6g}\n", condition_number(data.a));
  return 0;
}

// ---- solve ----

struct DataFlags {
  std::string path;
  bool normalize = false;
};

int cmd_solve(const DataFlags& data_flags, const SolveFlags& f, const std::string& trace_out, std::ostream& out) {
  const Dataset data = load_csv(data_flags.path, data_flags.normalize);
  const SolverId id = solver_from_flags(f);
  SolverConfig cfg = make_config(f);
  const FeasibleSet w = make_feasible_set(parse_constraint_kind(f.constraint), data.a, data.b, f.radius_scale);
  const GroundTruth truth = ground_truth(data.a, data.b, w);
  cfg.f_star = truth.objective;

  const SolveReport rep = run_solver(id, data.a, data.b, w, cfg);
  if (!trace_out.empty()) write_trace_csv(trace_out, {TraceRow{std::string(to_string(id)), cfg.seed, &rep}});

  out << fmt::format(
      "solver={} n={} d={} iterations={} final_rel_err={:.6e} objective={:.12g} f_star={:.12g} "
      "solve_seconds={:.6f} preconditioning_seconds={:.6f} step={:.6g} sketch_size={}\n",
      to_string(id), data.a.rows(), data.a.cols(), rep.iterations_run, final_error(rep), rep.trace.back().objective,
      truth.objective, rep.solve_seconds, rep.preconditioning_seconds, rep.step_size, rep.sketch_size);
  return 0;
}

// ---- bench ----

struct BenchFlags {
  std::string config;
  std::string out_dir;
  DataFlags data;
  GenFlags synthetic;
  std::vector<std::string> solvers;
  std::vector<double> batches;
  std::vector<double> budgets;
  double seeds = 10;
  double threads = 1;
  std::optional<double> sweep_target;
  SolveFlags solve;
};

struct BenchPlan {
  Matrix a;
  Vector b;
  FeasibleSet w = FeasibleSet::unconstrained(1);
  ExperimentSpec spec;
  std::vector<std::size_t> budgets;
  std::vector<std::size_t> batches;
  std::optional<double> sweep_target;
  SolverConfig sweep_base;
};

template <typename T>
T yaml_or(const YAML::Node& node, const char* key, T fallback) {
  return node[key] ? node[key].as<T>() : fallback;
}

void apply_yaml_solver_keys(const YAML::Node& node, SolveFlags& f) {
  if (!node) return;
  f.constraint = yaml_or(node, "constraint", f.constraint);
  f.radius_scale = yaml_or(node, "radius_scale", f.radius_scale);
  f.sketch = yaml_or(node, "sketch", f.sketch);
  f.sketch_size = yaml_or(node, "sketch_size", f.sketch_size);
  f.batch = yaml_or(node, "batch", f.batch);
  f.iters = yaml_or(node, "iters", f.iters);
  if (node["eta"]) f.eta = node["eta"].as<double>();
  f.epochs = yaml_or(node, "epochs", f.epochs);
  f.record_every = yaml_or(node, "record_every", f.record_every);
  f.fixed_sketch = yaml_or(node, "fixed_sketch", f.fixed_sketch);
  if (node["v0"]) f.v0 = node["v0"].as<double>();
  if (node["sigma2"]) f.sigma2 = node["sigma2"].as<double>();
  if (node["distance_bound"]) f.distance_bound = node["distance_bound"].as<double>();
  f.tolerance = yaml_or(node, "tolerance", f.tolerance);
}

// Expands solver names x batch sizes into labelled entries.
void add_entries(BenchPlan& plan, const std::vector<std::pair<std::string, SolveFlags>>& solvers) {
  for (const auto& [label, flags] : solvers) {
    SolverEntry entry;
    entry.id = solver_from_flags(flags);
    entry.cfg = make_config(flags);
    const bool batched = entry.id == SolverId::hdpwbatch || entry.id == SolverId::hdpwacc || entry.id == SolverId::sgd;
    if (batched && !plan.batches.empty()) {
      for (std::size_t r : plan.batches) {
        SolverEntry e = entry;
        e.cfg.batch_size = r;
        e.label = fmt::format("{}-r{}", label, r);
        plan.spec.solvers.push_back(e);
      }
    } else {
      entry.label = label;
      plan.spec.solvers.push_back(entry);
    }
  }
}

BenchPlan plan_from_yaml(const std::string& path, const SolveFlags& cli_defaults) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw Error(Errc::io_error, fmt::format("cannot read config '{}'", path));
  } catch (const YAML::Exception& e) {
    throw Error(Errc::parse_error, fmt::format("config '{}': {}", path, e.what()));
  }

  BenchPlan plan;
  try {
    if (root["data"]) {
      const Dataset data = load_csv(root["data"].as<std::string>(), yaml_or(root, "normalize", false));
      plan.a = data.a;
      plan.b = data.b;
    } else if (const YAML::Node syn = root["synthetic"]) {
      DatasetSpec spec;
      spec.n = to_count(yaml_or(syn, "n", 8192.0), "synthetic.n");
      spec.d = to_count(yaml_or(syn, "d", 20.0), "synthetic.d");
      spec.target_kappa = yaml_or(syn, "kappa", 1e3);
      spec.noise_std = yaml_or(syn, "noise_std", 0.1);
      spec.seed = to_count(yaml_or(syn, "seed", 42.0), "synthetic.seed");
      SyntheticData data = gen_synthetic(spec);
      plan.a = std::move(data.a);
      plan.b = std::move(data.b);
    } else {
      throw Error(Errc::invalid_argument, "config needs a 'data' path or a 'synthetic' block");
    }

    SolveFlags defaults = cli_defaults;
    apply_yaml_solver_keys(root["defaults"], defaults);
    plan.w = make_feasible_set(parse_constraint_kind(yaml_or(root, "constraint", defaults.constraint)), plan.a, plan.b,
                               yaml_or(root, "radius_scale", defaults.radius_scale));

    if (const YAML::Node seeds = root["seeds"]) {
      plan.spec.seeds.clear();
      if (seeds.IsSequence()) {
        for (const auto& s : seeds) plan.spec.seeds.push_back(to_count(s.as<double>(), "seeds"));
      } else {
        for (std::size_t s = 1; s <= to_count(seeds.as<double>(), "seeds"); ++s) plan.spec.seeds.push_back(s);
      }
    }
    plan.spec.threads = to_count(yaml_or(root, "threads", 1.0), "threads");
    for (const auto& v : root["budgets"]) plan.budgets.push_back(to_count(v.as<double>(), "budgets"));
    for (const auto& v : root["batches"]) plan.batches.push_back(to_count(v.as<double>(), "batches"));
    if (root["sweep_target"]) plan.sweep_target = root["sweep_target"].as<double>();

    std::vector<std::pair<std::string, SolveFlags>> solvers;
    for (const auto& node : root["solvers"]) {
      SolveFlags f = defaults;
      if (node.IsScalar()) {
        f.solver = node.as<std::string>();
      } else {
        f.solver = node["name"].as<std::string>();
        apply_yaml_solver_keys(node, f);
      }
      const std::string label = node.IsMap() && node["label"] ? node["label"].as<std::string>() : f.solver;
      solvers.emplace_back(label, f);
    }
    add_entries(plan, solvers);
    plan.sweep_base = make_config(defaults);
  } catch (const YAML::Exception& e) {
    throw Error(Errc::parse_error, fmt::format("config '{}': {}", path, e.what()));
  }
  return plan;
}

BenchPlan plan_from_flags(const BenchFlags& f) {
  BenchPlan plan;
  if (!f.data.path.empty()) {
    const Dataset data = load_csv(f.data.path, f.data.normalize);
    plan.a = data.a;
    plan.b = data.b;
  } else {
    DatasetSpec spec;
    spec.n = to_count(f.synthetic.n, "--n");
    spec.d = to_count(f.synthetic.d, "--d");
    spec.target_kappa = f.synthetic.kappa;
    spec.noise_std = f.synthetic.noise_std;
    spec.seed = to_count(f.synthetic.seed, "--data-seed");
    SyntheticData data = gen_synthetic(spec);
    plan.a = std::move(data.a);
    plan.b = std::move(data.b);
  }
  plan.w = make_feasible_set(parse_constraint_kind(f.solve.constraint), plan.a, plan.b, f.solve.radius_scale);
  plan.spec.seeds.clear();
  for (std::size_t s = 1; s <= to_count(f.seeds, "--seeds"); ++s) plan.spec.seeds.push_back(s);
  plan.spec.threads = to_count(f.threads, "--threads");
  for (double v : f.budgets) plan.budgets.push_back(to_count(v, "--budgets"));
  for (double v : f.batches) plan.batches.push_back(to_count(v, "--batches"));
  plan.sweep_target = f.sweep_target;

  std::vector<std::pair<std::string, SolveFlags>> solvers;
  for (const auto& name : f.solvers) {
    SolveFlags s = f.solve;
    s.solver = name;
    solvers.emplace_back(name, s);
  }
  add_entries(plan, solvers);
  plan.sweep_base = make_config(f.solve);
  return plan;
}

std::string sanitize(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return out;
}

int cmd_bench(const BenchFlags& f, std::ostream& out) {
  if (f.out_dir.empty()) throw Error(Errc::invalid_argument, "--out-dir is required");
  BenchPlan plan = f.config.empty() ? plan_from_flags(f) : plan_from_yaml(f.config, f.solve);
  if (plan.spec.solvers.empty()) throw Error(Errc::invalid_argument, "the solver list is empty");
  if (plan.spec.seeds.empty()) throw Error(Errc::invalid_argument, "the seed list is empty");

  std::error_code ec;
  fs::create_directories(f.out_dir, ec);
  if (ec || !fs::is_directory(f.out_dir)) {
    throw Error(Errc::io_error, fmt::format("cannot create output directory '{}'", f.out_dir));
  }

  const GroundTruth truth = ground_truth(plan.a, plan.b, plan.w);
  const ExperimentResult result = run_experiment(plan.a, plan.b, plan.w, truth, plan.spec);

  for (const auto& runs : result.runs) {
    std::vector<TraceRow> rows;
    for (std::size_t k = 0; k < runs.reports.size(); ++k) rows.push_back({runs.label, runs.seeds[k], &runs.reports[k]});
    write_trace_csv(fs::path(f.out_dir) / (sanitize(runs.label) + ".csv"), rows);
  }

  out << fmt::format("n={} d={} f_star={:.12g} constraint={} seeds={}\n", result.n, result.d, result.f_star,
                     to_string(plan.w.kind()), plan.spec.seeds.size());
  std::string header = fmt::format("{:<20} {:>12} {:>12}", "solver", "best", "median");
  for (std::size_t budget : plan.budgets) header += fmt::format(" {:>14}", fmt::format("@{}", budget));
  out << header << "\n";
  for (const auto& runs : result.runs) {
    std::string line = fmt::format("{:<20} {:>12.4e} {:>12.4e}", runs.label, runs.best_error, runs.median_error);
    for (std::size_t budget : plan.budgets) {
      std::vector<double> errs;
      for (const auto& rep : runs.reports) errs.push_back(error_at_iteration(rep, budget));
      line += fmt::format(" {:>14.4e}", median(errs));
    }
    out << line << "\n";
  }

  if (plan.sweep_target) {
    if (plan.batches.empty()) throw Error(Errc::invalid_argument, "sweep_target needs a batch list");
    const auto sweep = batch_sweep(plan.a, plan.b, plan.w, truth.objective, plan.batches, plan.spec.seeds,
                                   *plan.sweep_target, plan.sweep_base);
    out << fmt::format("iterations of hdpwbatch to relative error {:.3g} (median over seeds)\n", *plan.sweep_target);
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : sweep) {
      const double ratio = prev / row.median;
      out << fmt::format("r={:<4} iterations={:<12.1f} speedup_vs_previous={}\n", row.batch, row.median,
                         std::isfinite(ratio) ? fmt::format("{:.3f}", ratio) : std::string("-"));
      prev = row.median;
    }
  }
  return 0;
}

// ---- diag ----

struct DiagFlags {
  DataFlags data;
  std::string sketch = "srht";
  double sketch_size = 0;
  double seed = 42;
  double trials = 100;
};

int cmd_diag(const DiagFlags& f, std::ostream& out) {
  const Dataset raw = load_csv(f.data.path, false);
  const Dataset data = f.data.normalize ? load_csv(f.data.path, true) : raw;
  const auto n = static_cast<std::size_t>(data.a.rows());
  const auto d = static_cast<std::size_t>(data.a.cols());
  if (n <= d) throw Error(Errc::invalid_size, fmt::format("need more rows than columns, got {}x{}", n, d));

  PreconditionerOptions opts;
  opts.sketch = parse_sketch_kind(f.sketch);
  opts.sketch_size = to_count(f.sketch_size, "--sketch-size");
  opts.seed = to_count(f.seed, "--seed");
  opts.with_hadamard = false;
  const Preconditioner pre = build_preconditioner(data.a, data.b, opts);

  Matrix u = data.a;
  for (Eigen::Index i = 0; i < u.rows(); ++i) u.row(i) = tri_solve(pre.r_factor, data.a.row(i).transpose(), true);
  const Vector sv = singular_values(u);
  const auto sk = SketchOperator::make(pre.sketch_kind, pre.sketch_size, n, pre.sketch_seed);
  const double distortion = embedding_distortion(sk, data.a, to_count(f.trials, "--trials"), opts.seed);

  const HadamardTransformed hdu = build_hd(u, Vector::Zero(u.rows()), derive_seed(opts.seed, SeedStream::hadamard_signs));
  std::vector<double> norms(static_cast<std::size_t>(hdu.hda.rows()));
  for (Eigen::Index i = 0; i < hdu.hda.rows(); ++i) norms[static_cast<std::size_t>(i)] = hdu.hda.row(i).norm();
  const RowNormSpread spread = row_norm_spread(norms);

  out << fmt::format("n={} d={} sketch={} sketch_size={}\n", n, d, to_string(pre.sketch_kind), pre.sketch_size);
  if (f.data.normalize) out << fmt::format("kappa(A) raw = {:.6g}\n", condition_number(raw.a));
  out << fmt::format("kappa(A) = {:.6g}\n", condition_number(data.a));
  out << fmt::format("kappa(AR^-1) = {:.6g}\n", sv(0) / sv(sv.size() - 1));
  out << fmt::format("sigma_min(AR^-1) = {:.6g} (beta = {:.6g})\n", sv(sv.size() - 1), 1.0 / sv(sv.size() - 1));
  out << fmt::format("embedding distortion = {:.6g}\n", distortion);
  out << fmt::format("max row norm of HDU = {:.6g}, bound = {:.6g}, holds = {}\n", spread.max_norm, spread.bound,
                     spread.max_norm <= spread.bound ? "yes" : "no");
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sketch-preconditioned solvers for constrained least squares"};
  app.name("sketchreg");
  app.require_subcommand(1);

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "write a synthetic dataset as CSV");
  gen_cmd->add_option("--n", gen.n, "rows")->required();
  gen_cmd->add_option("--d", gen.d, "columns")->required();
  gen_cmd->add_option("--kappa", gen.kappa, "condition number of A")->capture_default_str();
  gen_cmd->add_option("--noise-std", gen.noise_std, "standard deviation of the noise in b")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "random seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "output CSV path")->required();

  DataFlags solve_data;
  SolveFlags solve;
  std::string trace_out;
  auto* solve_cmd = app.add_subcommand("solve", "run one solver on a CSV dataset");
  solve_cmd->add_option("--data", solve_data.path, "dataset CSV (last column is b)")->required();
  solve_cmd->add_flag("--normalize", solve_data.normalize, "standardize the columns of A");
  solve_cmd->add_option("--seed", solve.seed, "random seed")->capture_default_str();
  solve_cmd->add_option("--trace-out", trace_out, "write the trace CSV here");
  add_solver_flags(solve_cmd, solve, true);

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "run several solvers over several seeds");
  bench_cmd->add_option("--config", bench.config, "YAML experiment description");
  bench_cmd->add_option("--out-dir", bench.out_dir, "directory for the per-solver trace CSVs")->required();
  bench_cmd->add_option("--data", bench.data.path, "dataset CSV; otherwise a synthetic one is generated");
  bench_cmd->add_flag("--normalize", bench.data.normalize, "standardize the columns of A");
  bench_cmd->add_option("--n", bench.synthetic.n, "synthetic rows")->default_val(8192);
  bench_cmd->add_option("--d", bench.synthetic.d, "synthetic columns")->default_val(20);
  bench_cmd->add_option("--kappa", bench.synthetic.kappa, "synthetic condition number")->capture_default_str();
  bench_cmd->add_option("--noise-std", bench.synthetic.noise_std, "synthetic noise level")->capture_default_str();
  bench_cmd->add_option("--data-seed", bench.synthetic.seed, "seed of the synthetic dataset")->capture_default_str();
  bench_cmd->add_option("--solvers", bench.solvers, "solver names")->delimiter(',');
  bench_cmd->add_option("--batches", bench.batches, "batch sizes to sweep")->delimiter(',');
  bench_cmd->add_option("--budgets", bench.budgets, "iteration budgets for the summary table")->delimiter(',');
  bench_cmd->add_option("--seeds", bench.seeds, "number of seeds (1..k)")->capture_default_str();
  bench_cmd->add_option("--threads", bench.threads, "worker threads")->capture_default_str();
  bench_cmd->add_option("--sweep-target", bench.sweep_target, "report iterations to this relative error per batch");
  add_solver_flags(bench_cmd, bench.solve, false);

  DiagFlags diag;
  auto* diag_cmd = app.add_subcommand("diag", "conditioning diagnostics of the preconditioner");
  diag_cmd->add_option("--data", diag.data.path, "dataset CSV")->required();
  diag_cmd->add_flag("--normalize", diag.data.normalize, "standardize the columns of A");
  diag_cmd->add_option("--sketch", diag.sketch, "gaussian | countsketch | srht | identity")->capture_default_str();
  diag_cmd->add_option("--sketch-size", diag.sketch_size, "sketch rows; 0 picks the default")->capture_default_str();
  diag_cmd->add_option("--seed", diag.seed, "random seed")->capture_default_str();
  diag_cmd->add_option("--trials", diag.trials, "random directions for the distortion estimate")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << app.help();
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*solve_cmd) return cmd_solve(solve_data, solve, trace_out, out);
    if (*bench_cmd) return cmd_bench(bench, out);
    if (*diag_cmd) return cmd_diag(diag, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_numerical_failure(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace sketchreg
