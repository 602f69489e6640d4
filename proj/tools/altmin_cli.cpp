#include "altmin/data.hpp"
#include "altmin/error.hpp"
#include "altmin/solver.hpp"
#include "altmin/theory.hpp"
#include "options.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace altmin::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

PermutationModel make_model(const std::string& name, std::size_t n, std::size_t r, std::size_t k) {
  if (name == "rlocal") {
    if (r == 0 || r > n) {
      throw Error(ErrorCode::InvalidConfig, "block size r must be in [1, n], got " + std::to_string(r));
    }
    return RLocalModel{BlockPartition::equal(n, r)};
  }
  if (name == "ksparse") return KSparseModel{k};
  throw Error(ErrorCode::InvalidConfig, "unknown model '" + name + "'");
}

// ---- synth ------------------------------------------------------------------

struct SynthOptions {
  std::size_t n = 100, d = 10, m = 10, r = 5, k = 0;
  std::string model = "rlocal";
  std::string b_dist = "gaussian";
  double sigma = 0.0;
};

int run_synth(const SynthOptions& o, const GlobalOptions& g) {
  SynthConfig cfg;
  cfg.n = o.n;
  cfg.d = o.d;
  cfg.m = o.m;
  cfg.model = make_model(o.model, o.n, o.r, o.k);
  cfg.sigma = o.sigma;
  cfg.B_dist = o.b_dist == "uniform" ? MeasurementDist::Uniform01 : MeasurementDist::Gaussian;
  cfg.seed = g.seed;
  const ProblemInstance inst = generate(cfg);

  const fs::path dir = g.out.empty() ? fs::path("instance") : fs::path(g.out);
  const json meta = {{"seed", g.seed}, {"n", o.n}, {"d", o.d}, {"m", o.m},
                     {"b_dist", o.b_dist}, {"model", model_to_json(cfg.model)}};
  write_bundle(dir, inst, meta);
  std::cout << "wrote " << dir.string() << " (n=" << o.n << ", d=" << o.d << ", m=" << o.m
            << ", " << o.model << ")\n";
  return kExitOk;
}

// ---- ingest -----------------------------------------------------------------

struct IngestCliOptions {
  std::string csv;
  std::vector<std::string> targets, features, block_keys;
  int decimals = 0;
  bool intercept = false;
};

int run_ingest(const IngestCliOptions& o, const GlobalOptions& g) {
  IngestOptions opt;
  opt.target_cols = o.targets;
  opt.feature_cols = o.features;
  opt.block_rule = {o.block_keys, o.decimals};
  opt.intercept = o.intercept;
  opt.seed = g.seed;
  const ProblemInstance inst = ingest_csv(o.csv, opt);

  const fs::path dir = g.out.empty() ? fs::path("instance") : fs::path(g.out);
  json meta = {{"seed", g.seed}, {"source", o.csv}, {"row_order", inst.row_order},
               {"block_keys", o.block_keys}, {"decimals", o.decimals}};
  write_bundle(dir, inst, meta);
  std::cout << "wrote " << dir.string() << " (n=" << inst.n() << ", d=" << inst.d()
            << ", blocks=" << inst.partition->count()
            << ", largest=" << inst.partition->max_size() << ")\n";
  return kExitOk;
}

// ---- solve ------------------------------------------------------------------

struct SolveOptions {
  std::string instance;
  std::string mode = "auto";
  double epsilon = 0.01;
  std::size_t max_iters = 100;
};

Mode resolve_mode(const std::string& name, const ProblemInstance& inst) {
  if (name == "rlocal") return Mode::RLocal;
  if (name == "ksparse") return Mode::KSparse;
  return inst.partition ? Mode::RLocal : Mode::KSparse;
}

json metrics_json(const EvalMetrics& ev) {
  json j = {{"relative_error", ev.relative_error}, {"r2", ev.r2}};
  if (ev.frac_distortion) j["frac_distortion"] = *ev.frac_distortion;
  return j;
}

int run_solve(const SolveOptions& o, const GlobalOptions& g) {
  const ProblemInstance inst = read_bundle(o.instance);
  SolverConfig cfg;
  cfg.mode = resolve_mode(o.mode, inst);
  cfg.epsilon = o.epsilon;
  cfg.max_iters = o.max_iters;
  const SolveResult res = solve(inst, cfg);

  const fs::path dir = g.out.empty() ? fs::path(o.instance) : fs::path(g.out);
  ensure_dir(dir);
  open_output(dir / "P_hat.json") << permutation_to_json(res.P_hat).dump() << "\n";
  write_matrix_csv(dir / "X_hat.csv", res.X_hat);

  json result = {{"mode", cfg.mode == Mode::RLocal ? "rlocal" : "ksparse"},
                 {"epsilon", cfg.epsilon},
                 {"max_iters", cfg.max_iters},
                 {"iters", res.iters},
                 {"converged", res.converged},
                 {"objective", res.objective_trace.empty() ? 0.0 : res.objective_trace.back()},
                 {"objective_trace", res.objective_trace}};
  if (inst.truth) {
    const Matrix Y_star = inst.Y_star ? *inst.Y_star : Matrix(inst.B * inst.truth->X_star);
    const RegressionEstimates est = oracle_and_naive(inst.B, Y_star, inst.Y);
    result["metrics"] = metrics_json(
        evaluate(res.X_hat, inst.truth->X_star, inst.B, Y_star, &res.P_hat, &inst.truth->P_star));
    result["naive"] = metrics_json(evaluate(est.X_naive, inst.truth->X_star, inst.B, Y_star));
  }
  open_output(dir / "result.json") << result.dump(2) << "\n";

  std::cout << "iters=" << res.iters << " converged=" << (res.converged ? "true" : "false")
            << " F=" << fmt(result["objective"].get<double>());
  if (inst.truth) {
    std::cout << " d_H/n=" << fmt(result["metrics"]["frac_distortion"].get<double>())
              << " rel_error=" << fmt(result["metrics"]["relative_error"].get<double>());
  }
  std::cout << "\n";
  return kExitOk;
}

// ---- bench ------------------------------------------------------------------

struct BenchOptions {
  std::string sweep = "r";
  std::vector<double> grid{2, 5, 10, 25, 50};
  std::size_t seeds = 15;
  std::size_t n = 100, d = 10, m = 10, r = 5, k = 0;
  std::string model = "rlocal";
  std::string b_dist = "gaussian";
  double sigma = 0.0;
  double epsilon = 0.01;
  std::size_t max_iters = 100;
  bool no_timing = false;
};

struct BenchRow {
  double value = 0;
  std::uint64_t seed = 0;
  double frac_distortion = 0, rel_error = 0, wall_ms = 0, objective = 0;
  std::size_t iters = 0;
  bool converged = false;
};

std::size_t as_count(double v, const char* what) {
  if (!(v >= 0) || std::floor(v) != v) {
    throw Error(ErrorCode::InvalidSpec, std::string(what) + " grid values must be nonnegative integers");
  }
  return static_cast<std::size_t>(v);
}

// Instance config for one grid point; validated before any work starts.
SynthConfig point_config(const BenchOptions& o, double value) {
  SynthConfig cfg;
  cfg.n = o.n;
  cfg.d = o.d;
  cfg.m = o.m;
  cfg.sigma = o.sigma;
  cfg.B_dist = o.b_dist == "uniform" ? MeasurementDist::Uniform01 : MeasurementDist::Gaussian;
  if (o.sweep == "r") {
    const std::size_t r = as_count(value, "r");
    if (r == 0 || r > o.n) throw Error(ErrorCode::InvalidSpec, "r grid values must lie in [1, n]");
    cfg.model = RLocalModel{BlockPartition::equal(o.n, r)};
  } else if (o.sweep == "k") {
    const std::size_t k = as_count(value, "k");
    if (k == 1 || k > o.n) throw Error(ErrorCode::InvalidSpec, "k grid values must be 0 or in [2, n]");
    cfg.model = KSparseModel{k};
  } else if (o.sweep == "sigma") {
    if (!(value >= 0)) throw Error(ErrorCode::InvalidSpec, "sigma grid values must be >= 0");
    cfg.sigma = value;
    try {
      cfg.model = make_model(o.model, o.n, o.r, o.k);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidSpec, e.what());
    }
  } else {
    throw Error(ErrorCode::InvalidSpec, "sweep must be one of r, k, sigma");
  }
  return cfg;
}

BenchRow run_point(const BenchOptions& o, double value, std::uint64_t seed) {
  SynthConfig cfg = point_config(o, value);
  cfg.seed = seed;
  const ProblemInstance inst = generate(cfg);
  SolverConfig scfg;
  scfg.mode = std::holds_alternative<RLocalModel>(cfg.model) ? Mode::RLocal : Mode::KSparse;
  scfg.epsilon = o.epsilon;
  scfg.max_iters = o.max_iters;

  const auto start = std::chrono::steady_clock::now();
  const SolveResult res = solve(inst, scfg);
  const auto stop = std::chrono::steady_clock::now();

  BenchRow row;
  row.value = value;
  row.seed = seed;
  row.frac_distortion = double(hamming_distortion(res.P_hat, inst.truth->P_star)) / double(o.n);
  row.rel_error = (inst.truth->X_star - res.X_hat).norm() / inst.truth->X_star.norm();
  row.iters = res.iters;
  row.converged = res.converged;
  row.objective = res.objective_trace.back();
  row.wall_ms =
      o.no_timing ? 0.0 : std::chrono::duration<double, std::milli>(stop - start).count();
  return row;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

int run_bench(const BenchOptions& o, const GlobalOptions& g) {
  if (o.grid.empty()) throw Error(ErrorCode::InvalidSpec, "empty sweep grid");
  if (o.seeds == 0) throw Error(ErrorCode::InvalidSpec, "need at least one seed per point");
  std::vector<double> grid = o.grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (double v : grid) point_config(o, v);

  const std::size_t tasks = grid.size() * o.seeds;
  std::vector<BenchRow> rows(tasks);
  std::vector<std::exception_ptr> failures(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks; i = next++) {
      try {
        rows[i] = run_point(o, grid[i / o.seeds], g.seed + i % o.seeds);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < std::min(g.threads, tasks); ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  const json config = {{"sweep", o.sweep}, {"grid", grid}, {"seeds", o.seeds},
                       {"seed", g.seed}, {"n", o.n}, {"d", o.d}, {"m", o.m},
                       {"r", o.r}, {"k", o.k}, {"model", o.model}, {"b_dist", o.b_dist},
                       {"sigma", o.sigma}, {"epsilon", o.epsilon}, {"max_iters", o.max_iters}};
  const std::string hash = fnv1a_hex(config.dump());

  const fs::path dir = g.out.empty() ? fs::path("bench_out") : fs::path(g.out);
  ensure_dir(dir);
  std::ofstream sweep = open_output(dir / "sweep.csv");
  std::ofstream ledger = open_output(dir / "runs.jsonl");
  sweep << "sweep_value,seed,d_H_over_n,rel_error,iters,wall_ms\n";
  for (const BenchRow& row : rows) {
    sweep << fmt(row.value) << ',' << row.seed << ',' << fmt(row.frac_distortion) << ','
          << fmt(row.rel_error) << ',' << row.iters << ',' << fmt(row.wall_ms) << '\n';
    ledger << json{{"config_hash", hash}, {"sweep", o.sweep}, {"sweep_value", row.value},
                   {"seed", row.seed}, {"d_H_over_n", row.frac_distortion},
                   {"rel_error", row.rel_error}, {"iters", row.iters},
                   {"converged", row.converged}, {"objective", row.objective},
                   {"wall_ms", row.wall_ms}}
                  .dump()
           << '\n';
  }

  std::ofstream summary = open_output(dir / "summary.csv");
  summary << "sweep_value,runs,mean_d_H_over_n,exact_fraction,mean_rel_error,mean_iters,mean_wall_ms\n";
  std::cout << std::setw(12) << o.sweep << std::setw(16) << "mean d_H/n" << std::setw(16)
            << "exact" << std::setw(16) << "mean rel_err" << '\n';
  for (std::size_t p = 0; p < grid.size(); ++p) {
    double dh = 0, exact = 0, err = 0, iters = 0, ms = 0;
    for (std::size_t s = 0; s < o.seeds; ++s) {
      const BenchRow& row = rows[p * o.seeds + s];
      dh += row.frac_distortion;
      exact += row.frac_distortion == 0.0;
      err += row.rel_error;
      iters += double(row.iters);
      ms += row.wall_ms;
    }
    const double cnt = double(o.seeds);
    summary << fmt(grid[p]) << ',' << o.seeds << ',' << fmt(dh / cnt) << ',' << fmt(exact / cnt)
            << ',' << fmt(err / cnt) << ',' << fmt(iters / cnt) << ',' << fmt(ms / cnt) << '\n';
    std::cout << std::setw(12) << fmt(grid[p]) << std::setw(16) << fmt(dh / cnt) << std::setw(16)
              << fmt(exact / cnt) << std::setw(16) << fmt(err / cnt) << '\n';
  }
  std::cout << "wrote " << (dir / "sweep.csv").string() << " (config " << hash << ")\n";
  return kExitOk;
}

// ---- validate-theory -----------------------------------------------------------

const std::vector<std::string> kChecks = {"lemma1", "theorem1", "lemma2", "theorem2",
                                          "lemma4", "theorem3", "chi2"};

json default_check_params(const std::string& name) {
  if (name == "lemma1") return {{"d", 100}, {"s", 75}, {"t", 0.5}, {"trials", 500}};
  if (name == "theorem1") return {{"d", 64}, {"s", 48}, {"m", 8}, {"t", 0.5}, {"trials", 300}};
  if (name == "lemma2") return {{"d", 80}, {"s", 40}, {"t", 2.0}, {"trials", 2000}};
  if (name == "theorem2") return {{"d", 60}, {"s", 30}, {"m", 4}, {"t", 1.0}, {"trials", 1000}};
  if (name == "lemma4") return {{"n", 200}, {"d", 10}, {"k", 20}, {"t", 3.0}, {"trials", 1000}};
  if (name == "theorem3") {
    return {{"n", 150}, {"d", 8}, {"k", 15}, {"m", 3}, {"t", std::log(9.0) + 2}, {"trials", 500}};
  }
  return {{"D", 50}, {"t", 1.0}, {"trials", 10000}};
}

struct TheoryOptions {
  std::vector<std::string> checks = kChecks;
  /// Negative keeps each check's default.
  long long trials = -1;
  json overrides = json::object();
};

theory::BoundReport run_check(const std::string& name, const json& p, const Rng& rng) {
  auto z = [&](const char* key) { return p.at(key).get<std::size_t>(); };
  const double t = p.at("t").get<double>();
  const std::size_t trials = z("trials");
  if (name == "lemma1") return theory::check_lemma1(z("d"), z("s"), t, trials, rng);
  if (name == "theorem1") return theory::check_theorem1(z("d"), z("s"), z("m"), t, trials, rng);
  if (name == "lemma2") return theory::check_lemma2(z("d"), z("s"), t, trials, rng);
  if (name == "theorem2") return theory::check_theorem2(z("d"), z("s"), z("m"), t, trials, rng);
  if (name == "lemma4") return theory::check_lemma4(z("n"), z("d"), z("k"), t, trials, rng);
  if (name == "theorem3") return theory::check_theorem3(z("n"), z("d"), z("k"), z("m"), t, trials, rng);
  return theory::chi2_tail_check(z("D"), t, trials, rng);
}

int run_theory(const TheoryOptions& o, const GlobalOptions& g) {
  if (!o.overrides.is_object()) throw Error(ErrorCode::InvalidSpec, "'params' must be an object");
  for (const auto& [name, _] : o.overrides.items()) {
    if (std::find(kChecks.begin(), kChecks.end(), name) == kChecks.end()) {
      throw Error(ErrorCode::InvalidSpec, "unknown check '" + name + "'");
    }
  }
  std::vector<std::pair<std::string, json>> suite;
  for (const std::string& name : o.checks) {
    if (std::find(kChecks.begin(), kChecks.end(), name) == kChecks.end()) {
      throw Error(ErrorCode::InvalidSpec, "unknown check '" + name + "'");
    }
    json params = default_check_params(name);
    if (o.overrides.contains(name)) params.update(o.overrides.at(name));
    if (o.trials >= 0) params["trials"] = o.trials;
    if (!params.at("trials").is_number_integer() || params.at("trials").get<long long>() <= 0) {
      throw Error(ErrorCode::InvalidSpec, name + ": trials must be a positive integer");
    }
    suite.emplace_back(name, std::move(params));
  }
  if (suite.empty()) throw Error(ErrorCode::InvalidSpec, "no checks selected");

  const Rng root(g.seed);
  json reports = json::array();
  bool all = true;
  for (const auto& [name, params] : suite) {
    const auto ordinal = static_cast<std::uint64_t>(
        std::find(kChecks.begin(), kChecks.end(), name) - kChecks.begin());
    theory::BoundReport rep;
    try {
      rep = run_check(name, params, root.split(ordinal));
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidSpec, name + ": " + e.what());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidSpec, name + ": " + e.what());
    }
    all = all && rep.passed;
    std::cout << (rep.passed ? "PASS " : "FAIL ") << std::left << std::setw(10) << name
              << std::right << " empirical=" << fmt(rep.empirical)
              << " threshold=" << fmt(rep.threshold);
    if (rep.bound) std::cout << " bound=" << fmt(*rep.bound);
    std::cout << " trials=" << rep.trials << '\n';
    reports.push_back(theory::to_json(rep));
  }

  const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
  ensure_dir(dir);
  open_output(dir / "reports.json")
      << json{{"seed", g.seed}, {"all_passed", all}, {"reports", reports}}.dump(2) << '\n';
  return all ? kExitOk : kExitValidation;
}

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, "config " + path + ": " + e.what());
  }
}

}  // namespace
}  // namespace altmin::cli

int main(int argc, char** argv) {
  using namespace altmin::cli;
  CLI::App app{"Permuted linear regression by alternating minimization"};
  app.require_subcommand(1);
  ConfigBinder binder;

  GlobalOptions global;
  binder.option(&app, "seed", global.seed, "Base random seed");
  binder.option(&app, "out", global.out, "Output file or directory");
  app.add_option("--config", global.config, "JSON config; explicit flags take precedence")
      ->check(CLI::ExistingFile);
  binder.option(&app, "threads", global.threads, "Worker threads for bench")
      ->check(CLI::PositiveNumber);

  const auto models = CLI::IsMember({"rlocal", "ksparse"});
  const auto dists = CLI::IsMember({"gaussian", "uniform"});

  SynthOptions synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic instance bundle");
  binder.option(synth_cmd, "n", synth.n, "Rows");
  binder.option(synth_cmd, "d", synth.d, "Signal dimension");
  binder.option(synth_cmd, "m", synth.m, "Signal columns");
  binder.option(synth_cmd, "model", synth.model, "Permutation model")->check(models);
  binder.option(synth_cmd, "r", synth.r, "Block size (rlocal)");
  binder.option(synth_cmd, "k", synth.k, "Displaced rows (ksparse)");
  binder.option(synth_cmd, "sigma", synth.sigma, "Noise standard deviation");
  binder.option(synth_cmd, "b-dist", synth.b_dist, "Measurement entries")->check(dists);

  IngestCliOptions ingest;
  CLI::App* ingest_cmd = app.add_subcommand("ingest", "Build a bundle from a CSV with a blocking rule");
  binder.option(ingest_cmd, "csv", ingest.csv, "Input CSV with a header row")->required();
  binder.option(ingest_cmd, "targets", ingest.targets, "Target columns")->required()->delimiter(',');
  binder.option(ingest_cmd, "features", ingest.features, "Feature columns")->delimiter(',');
  binder.option(ingest_cmd, "block-keys", ingest.block_keys, "Blocking key columns")
      ->required()
      ->delimiter(',');
  binder.option(ingest_cmd, "decimals", ingest.decimals, "Decimals kept when rounding keys");
  binder.flag(ingest_cmd, "intercept", ingest.intercept, "Prepend a column of ones");

  SolveOptions solve_opts;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Run alternating minimization on a bundle");
  binder.option(solve_cmd, "instance", solve_opts.instance, "Instance bundle directory")->required();
  binder.option(solve_cmd, "mode", solve_opts.mode, "rlocal, ksparse or auto (rlocal if the bundle has blocks)")
      ->check(CLI::IsMember({"auto", "rlocal", "ksparse"}));
  binder.option(solve_cmd, "epsilon", solve_opts.epsilon, "Relative-change stopping threshold");
  binder.option(solve_cmd, "max-iters", solve_opts.max_iters, "Iteration cap");

  BenchOptions bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Monte-Carlo sweep over r, k or sigma");
  binder.option(bench_cmd, "sweep", bench.sweep, "Swept variable")
      ->check(CLI::IsMember({"r", "k", "sigma"}));
  binder.option(bench_cmd, "grid", bench.grid, "Sweep values")->delimiter(',');
  binder.option(bench_cmd, "seeds", bench.seeds, "Seeds per sweep value");
  binder.option(bench_cmd, "n", bench.n, "Rows");
  binder.option(bench_cmd, "d", bench.d, "Signal dimension");
  binder.option(bench_cmd, "m", bench.m, "Signal columns");
  binder.option(bench_cmd, "model", bench.model, "Model for sigma sweeps")->check(models);
  binder.option(bench_cmd, "r", bench.r, "Block size for sigma sweeps");
  binder.option(bench_cmd, "k", bench.k, "Displaced rows for sigma sweeps");
  binder.option(bench_cmd, "sigma", bench.sigma, "Noise level for r and k sweeps");
  binder.option(bench_cmd, "b-dist", bench.b_dist, "Measurement entries")->check(dists);
  binder.option(bench_cmd, "epsilon", bench.epsilon, "Relative-change stopping threshold");
  binder.option(bench_cmd, "max-iters", bench.max_iters, "Iteration cap");
  binder.flag(bench_cmd, "no-timing", bench.no_timing, "Write wall_ms as 0 for byte-identical output");

  TheoryOptions theory_opts;
  CLI::App* theory_cmd = app.add_subcommand("validate-theory", "Monte-Carlo checks of the error bounds");
  binder.option(theory_cmd, "checks", theory_opts.checks, "Checks to run")->delimiter(',');
  binder.option(theory_cmd, "trials", theory_opts.trials, "Trials for every check (negative keeps defaults)");
  binder.config_only(theory_cmd, "params", theory_opts.overrides);

  for (CLI::App* sub : {synth_cmd, ingest_cmd, solve_cmd, bench_cmd, theory_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    if (!global.config.empty()) binder.apply(read_config(global.config), &app, active);
    if (active == synth_cmd) return run_synth(synth, global);
    if (active == ingest_cmd) return run_ingest(ingest, global);
    if (active == solve_cmd) return run_solve(solve_opts, global);
    if (active == bench_cmd) return run_bench(bench, global);
    return run_theory(theory_opts, global);
  } catch (const altmin::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
