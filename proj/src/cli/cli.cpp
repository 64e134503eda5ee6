#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pevp/analysis.hpp"
#include "pevp/chebyshev.hpp"
#include "pevp/cli.hpp"
#include "pevp/config.hpp"
#include "pevp/io.hpp"
#include "pevp/sampling.hpp"
#include "pevp/taylor.hpp"

namespace pevp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Bad flag combination or value detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

template <class T>
std::string join_ints(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

ExecPolicy policy_for(bool serial) { return serial ? ExecPolicy::Serial : ExecPolicy::Parallel; }

void finish_manifest(RunManifest& manifest, const fs::path& dir) {
  const fs::path path = dir / "manifest.txt";
  manifest.outputs.push_back(path.string());
  write_atomic(path, manifest.render());
}

// ---------------------------------------------------------------------------
// expand

struct ExpandArgs {
  std::string problem;
  int n = 8;
  std::string method;
  std::optional<double> mu0;
  std::vector<double> interval;
  int order = -1;
  std::string eig = "all";
  int quad_m = 0;
  bool single_e = false;
  double newton_tol = 1e-12;
  int newton_max_iter = 25;
  bool serial = false;
  std::string out;
};

void add_expand(CLI::App& app, ExpandArgs& a) {
  auto* cmd = app.add_subcommand("expand", "Series expansion of eigenpairs");
  cmd->add_option("--problem", a.problem, "example1|example2|example3|config:<path>")->required();
  cmd->add_option("--n", a.n, "Dimension of built-in problems");
  cmd->add_option("--method", a.method, "taylor|chebyshev")
      ->required()
      ->check(CLI::IsMember({"taylor", "chebyshev"}));
  cmd->add_option("--mu0", a.mu0, "Expansion point (taylor)");
  cmd->add_option("--interval", a.interval, "a,b (chebyshev)")->delimiter(',')->expected(2);
  cmd->add_option("--order", a.order, "Expansion order p")->required();
  cmd->add_option("--eig", a.eig, "all or an eigenpair index");
  cmd->add_option("--quad-m", a.quad_m, "Quadrature nodes (chebyshev, 0 = automatic)");
  cmd->add_flag("--single-precision-e", a.single_e, "Store the bordered matrix in single precision");
  cmd->add_option("--newton-tol", a.newton_tol, "Newton residual tolerance (chebyshev)");
  cmd->add_option("--newton-max-iter", a.newton_max_iter, "Newton iteration cap (chebyshev)");
  cmd->add_flag("--serial", a.serial, "Disable OpenMP parallelism");
  cmd->add_option("--out", a.out, "Output directory")->required();
}

std::optional<std::size_t> parse_eig(const std::string& eig) {
  if (eig == "all") return std::nullopt;
  std::size_t pos = 0;
  long k = -1;
  try {
    k = std::stol(eig, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != eig.size() || k < 0) throw UsageError("--eig must be 'all' or a nonnegative index");
  return static_cast<std::size_t>(k);
}

int cmd_expand(const ExpandArgs& a, std::ostream& out, std::ostream& err) {
  const bool taylor = a.method == "taylor";
  if (taylor && !a.interval.empty()) throw UsageError("--interval is for --method chebyshev; use --mu0");
  if (!taylor && a.mu0) throw UsageError("--mu0 is for --method taylor; use --interval a,b");
  if (taylor && !a.mu0) throw UsageError("--method taylor needs --mu0");
  if (!taylor && a.interval.size() != 2) throw UsageError("--method chebyshev needs --interval a,b");
  if (!taylor && a.single_e) throw UsageError("--single-precision-e applies to --method taylor only");
  if (taylor && a.quad_m != 0) throw UsageError("--quad-m applies to --method chebyshev only");
  if (a.order < 0) throw UsageError("--order must be nonnegative");
  const auto index = parse_eig(a.eig);

  const ParametricProblem problem = make_problem(a.problem, a.n);
  RunManifest manifest;
  manifest.command = "expand";
  manifest.config_hash = problem_hash(a.problem);
  manifest.set("problem", a.problem);
  manifest.set("n", std::to_string(problem.dimension()));
  manifest.set("method", a.method);
  if (taylor) {
    manifest.set("mu0", format_double(*a.mu0));
    manifest.set("single_precision_e", a.single_e ? "true" : "false");
  } else {
    manifest.set("interval", join(a.interval));
    manifest.set("quad_m", std::to_string(a.quad_m == 0 ? default_quadrature_size(a.order) : a.quad_m));
    manifest.set("newton_tol", format_double(a.newton_tol));
    manifest.set("newton_max_iter", std::to_string(a.newton_max_iter));
  }
  manifest.set("order", std::to_string(a.order));
  manifest.set("eig", a.eig);

  std::vector<PairOutcome> outcomes;
  if (taylor) {
    TaylorOptions opt;
    opt.single_precision_e = a.single_e;
    opt.policy = policy_for(a.serial);
    if (index) {
      outcomes.push_back({*index, taylor_expand_eigenpair(problem, *a.mu0, a.order, *index, opt), {}});
    } else {
      outcomes = taylor_expand_all(problem, *a.mu0, a.order, opt);
    }
  } else {
    ChebOptions opt;
    opt.quadrature_m = a.quad_m;
    opt.newton_tol = a.newton_tol;
    opt.newton_max_iter = a.newton_max_iter;
    opt.policy = policy_for(a.serial);
    if (index) {
      outcomes.push_back({*index,
                          cheb_expand_eigenpair(problem, a.interval[0], a.interval[1], a.order,
                                                *index, opt),
                          {}});
    } else {
      outcomes = cheb_expand_all(problem, a.interval[0], a.interval[1], a.order, opt);
    }
  }

  const fs::path dir(a.out);
  int failures = 0;
  for (const auto& o : outcomes) {
    if (!o.ok()) {
      ++failures;
      err << "pair " << o.index << ": " << to_string(o.error->kind()) << ": " << o.error->what()
          << '\n';
      continue;
    }
    const auto& s = *o.series;
    json j = to_json(s);
    j["problem"] = json{{"spec", a.problem}, {"n", problem.dimension()}};
    const fs::path path = dir / ("series_" + std::to_string(o.index) + ".json");
    write_atomic(path, j.dump(1) + "\n");
    manifest.outputs.push_back(path.string());
    out << "pair " << o.index << ": lambda(" << (taylor ? "mu0" : "U_0") << ") = "
        << format_double(s.lambda[0].real()) << (s.lambda[0].imag() < 0 ? " - " : " + ")
        << format_double(std::abs(s.lambda[0].imag())) << "i, residual "
        << format_double(s.diagnostics.residual_norm);
    if (!taylor) out << ", newton " << s.diagnostics.newton_iterations;
    if (s.diagnostics.collision) out << ", COLLISION";
    out << '\n';
  }
  manifest.set("failed_pairs", std::to_string(failures));
  finish_manifest(manifest, dir);
  return failures ? kExitNumerical : kExitOk;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::vector<std::string> series;
  std::vector<double> grid;
  std::vector<std::string> metrics{"eig-error", "vec-deviation"};
  std::string problem;
  int n = 0;
  bool serial = false;
  std::string out;
};

void add_report(CLI::App& app, ReportArgs& a) {
  auto* cmd = app.add_subcommand("report", "Compare series with direct eigensolves on a grid");
  cmd->add_option("--series", a.series, "Series JSON files")->required()->expected(1, -1);
  cmd->add_option("--grid", a.grid, "a,b,count")->required()->delimiter(',')->expected(3);
  cmd->add_option("--metrics", a.metrics, "eig-error, vec-deviation, rayleigh")
      ->delimiter(',')
      ->check(CLI::IsMember({"eig-error", "vec-deviation", "rayleigh"}));
  cmd->add_option("--problem", a.problem, "Override the problem recorded in the series");
  cmd->add_option("--n", a.n, "Override the recorded dimension");
  cmd->add_flag("--serial", a.serial, "Disable OpenMP parallelism");
  cmd->add_option("--out", a.out, "Output directory")->required();
}

struct LoadedSeries {
  EigenPairSeries series;
  std::string problem;
  int n = 0;
};

LoadedSeries load_series(const std::string& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::InvalidArgument, "series file '" + path + "' not found");
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "series file '" + path + "': " + e.what());
  }
  LoadedSeries out{eigenpair_series_from_json(j), "", 0};
  if (j.contains("problem")) {
    out.problem = j["problem"].value("spec", "");
    out.n = j["problem"].value("n", 0);
  }
  return out;
}

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream&) {
  const double count = a.grid.at(2);
  if (!(count >= 1.0) || count != std::floor(count)) {
    throw UsageError("--grid count must be a positive integer");
  }
  std::vector<EigenPairSeries> series;
  std::string spec = a.problem;
  int n = a.n;
  for (const auto& path : a.series) {
    auto loaded = load_series(path);
    if (a.problem.empty()) {
      if (loaded.problem.empty()) throw UsageError("'" + path + "' records no problem; pass --problem");
      if (!spec.empty() && spec != loaded.problem) throw UsageError("series come from different problems");
      spec = loaded.problem;
    }
    if (a.n == 0) n = loaded.n;
    series.push_back(std::move(loaded.series));
  }
  const ParametricProblem problem = make_problem(spec, n);
  const bool rayleigh =
      std::find(a.metrics.begin(), a.metrics.end(), "rayleigh") != a.metrics.end();
  ReportOptions opt;
  opt.rayleigh = rayleigh;
  opt.policy = policy_for(a.serial);
  const auto grid = linear_grid(a.grid[0], a.grid[1], static_cast<int>(count));
  const auto report = error_report(problem, series, grid, opt);

  RunManifest manifest;
  manifest.command = "report";
  manifest.config_hash = problem_hash(spec);
  manifest.set("problem", spec);
  manifest.set("n", std::to_string(problem.dimension()));
  std::string files;
  for (const auto& s : a.series) files += (files.empty() ? "" : ",") + s;
  manifest.set("series", files);
  manifest.set("grid", join(a.grid));
  std::string metrics;
  for (const auto& m : a.metrics) metrics += (metrics.empty() ? "" : ",") + m;
  manifest.set("metrics", metrics);

  const fs::path dir(a.out);
  const fs::path csv = dir / "error_report.csv";
  write_atomic(csv, error_report_csv(report));
  manifest.outputs.push_back(csv.string());
  finish_manifest(manifest, dir);

  out << "max eig-error " << format_double(report.max_eig_error()) << '\n';
  out << "median eig-error " << format_double(report.median_eig_error()) << '\n';
  out << "max vec-deviation " << format_double(report.max_vec_deviation()) << '\n';
  if (rayleigh) out << "median rayleigh-error " << format_double(report.median_rayleigh_error()) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sample

struct SampleArgs {
  std::string problem;
  int n = 8;
  std::string method;
  std::vector<double> dist;
  long count = 0;
  std::uint64_t seed = 0;
  int order = 6;
  std::optional<double> mu0;
  std::vector<double> interval;
  std::vector<std::size_t> ranks{1, 2};
  bool no_baseline = false;
  bool serial = false;
  std::string out;
};

void add_sample(CLI::App& app, SampleArgs& a) {
  auto* cmd = app.add_subcommand("sample", "Monte-Carlo sampling of selected eigenvalues");
  cmd->add_option("--problem", a.problem, "example1|example2|example3|config:<path>")->required();
  cmd->add_option("--n", a.n, "Dimension of built-in problems");
  cmd->add_option("--method", a.method, "taylor-eval|cheb-eval|rayleigh|direct")
      ->required()
      ->check(CLI::IsMember({"taylor-eval", "cheb-eval", "rayleigh", "direct"}));
  cmd->add_option("--dist", a.dist, "mean,stddev of the normal distribution")
      ->required()
      ->delimiter(',')
      ->expected(2);
  cmd->add_option("--count", a.count, "Number of samples")->required();
  cmd->add_option("--seed", a.seed, "Generator seed");
  cmd->add_option("--order", a.order, "Expansion order for series methods");
  cmd->add_option("--mu0", a.mu0, "Taylor expansion point (default: distribution mean)");
  cmd->add_option("--interval", a.interval,
                  "Chebyshev interval a,b (default: mean -/+ 3 stddev)")
      ->delimiter(',')
      ->expected(2);
  cmd->add_option("--ranks", a.ranks, "Tracked ranks, 0 = largest (default 1,2)")->delimiter(',');
  cmd->add_flag("--no-baseline", a.no_baseline, "Skip the direct-sampling reference run");
  cmd->add_flag("--serial", a.serial, "Disable OpenMP parallelism");
  cmd->add_option("--out", a.out, "Output directory")->required();
}

int cmd_sample(const SampleArgs& a, std::ostream& out, std::ostream&) {
  if (a.count < 1) throw UsageError("--count must be positive");
  if (a.dist.size() != 2 || !(a.dist[1] >= 0.0)) throw UsageError("--dist needs mean,stddev with stddev >= 0");
  const NormalDist dist{a.dist[0], a.dist[1]};
  const SampleMethod method = sample_method_from_string(a.method);
  const bool cheb = method == SampleMethod::ChebEval ||
                    (method == SampleMethod::Rayleigh && !a.interval.empty());
  if (method == SampleMethod::TaylorEval && !a.interval.empty()) {
    throw UsageError("--interval is for cheb-eval or rayleigh");
  }
  if (cheb && a.mu0) throw UsageError("--mu0 is for taylor-based sampling");

  const ParametricProblem problem = make_problem(a.problem, a.n);
  const auto count = static_cast<std::size_t>(a.count);
  SampleOptions sopt;
  sopt.policy = policy_for(a.serial);

  RunManifest manifest;
  manifest.command = "sample";
  manifest.seed = a.seed;
  manifest.config_hash = problem_hash(a.problem);
  manifest.set("problem", a.problem);
  manifest.set("n", std::to_string(problem.dimension()));
  manifest.set("method", a.method);
  manifest.set("dist", join(a.dist));
  manifest.set("count", std::to_string(count));
  manifest.set("ranks", join_ints(a.ranks));

  std::vector<EigenPairSeries> series;
  double expansion_seconds = 0.0;
  if (method != SampleMethod::Direct) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<PairOutcome> outcomes;
    manifest.set("order", std::to_string(a.order));
    if (cheb) {
      const std::vector<double> iv = a.interval.empty()
                                         ? std::vector<double>{dist.mean - 3 * dist.stddev,
                                                               dist.mean + 3 * dist.stddev}
                                         : a.interval;
      manifest.set("interval", join(iv));
      ChebOptions opt;
      opt.policy = sopt.policy;
      outcomes = cheb_expand_all(problem, iv[0], iv[1], a.order, opt);
    } else {
      const double mu0 = a.mu0.value_or(dist.mean);
      manifest.set("mu0", format_double(mu0));
      TaylorOptions opt;
      opt.policy = sopt.policy;
      outcomes = taylor_expand_all(problem, mu0, a.order, opt);
    }
    for (auto& o : outcomes) {
      if (!o.ok()) throw *o.error;
      series.push_back(std::move(*o.series));
    }
    expansion_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  auto set = sample_eigenvalues(problem, series, a.ranks, dist, count, a.seed, method, sopt);
  set.setup_seconds += expansion_seconds;

  const fs::path dir(a.out);
  std::vector<std::pair<fs::path, std::string>> files;
  files.emplace_back(dir / "samples.csv", samples_csv(set));

  std::string summary = "method,setup_seconds,sampling_seconds,total_seconds,speedup_vs_direct\n";
  auto row = [](const SampleSet& s, double speedup) {
    return std::string(to_string(s.method)) + ',' + format_double(s.setup_seconds) + ',' +
           format_double(s.sampling_seconds) + ',' +
           format_double(s.setup_seconds + s.sampling_seconds) + ',' + format_double(speedup) + '\n';
  };
  const double total = set.setup_seconds + set.sampling_seconds;
  if (method != SampleMethod::Direct && !a.no_baseline) {
    const auto base =
        sample_eigenvalues(problem, {}, a.ranks, dist, count, a.seed, SampleMethod::Direct, sopt);
    const double base_total = base.setup_seconds + base.sampling_seconds;
    const double speedup = base_total / total;
    summary += row(set, speedup) + row(base, 1.0);
    for (std::size_t r = 0; r < a.ranks.size(); ++r) {
      const auto h = histogram(tracked_real_parts(set, r), tracked_real_parts(base, r));
      files.emplace_back(dir / ("histogram_rank" + std::to_string(a.ranks[r]) + ".csv"),
                         histogram_csv(h, std::string(to_string(method)), "direct"));
    }
    out << "speedup vs direct " << format_double(speedup) << '\n';
  } else {
    summary += row(set, method == SampleMethod::Direct ? 1.0 : 0.0);
    for (std::size_t r = 0; r < a.ranks.size(); ++r) {
      const auto v = tracked_real_parts(set, r);
      files.emplace_back(dir / ("histogram_rank" + std::to_string(a.ranks[r]) + ".csv"),
                         histogram_csv(histogram(v, v), std::string(to_string(method)),
                                       std::string(to_string(method))));
    }
  }
  files.emplace_back(dir / "summary.csv", summary);
  for (const auto& [path, content] : files) {
    write_atomic(path, content);
    manifest.outputs.push_back(path.string());
  }
  finish_manifest(manifest, dir);
  out << "sampling " << format_double(set.sampling_seconds) << " s, setup "
      << format_double(set.setup_seconds) << " s\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string problem = "example1";
  std::vector<int> n_list;
  std::vector<int> p_list;
  double mu0 = 0.2;
  int reps = 3;
  bool serial = false;
  std::string out;
};

void add_bench(CLI::App& app, BenchArgs& a) {
  auto* cmd = app.add_subcommand("bench", "Time taylor_expand_all over (n, p)");
  cmd->add_option("--problem", a.problem, "example1|example2|example3")
      ->check(CLI::IsMember({"example1", "example2", "example3"}));
  cmd->add_option("--n-list", a.n_list, "Comma-separated n values")->required()->delimiter(',');
  cmd->add_option("--p-list", a.p_list, "Comma-separated p values")->required()->delimiter(',');
  cmd->add_option("--mu0", a.mu0, "Expansion point");
  cmd->add_option("--reps", a.reps, "Timed batches per cell (median reported)");
  cmd->add_flag("--serial", a.serial, "Disable OpenMP parallelism");
  cmd->add_option("--out", a.out, "Output directory")->required();
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  if (a.reps < 1) throw UsageError("--reps must be positive");
  for (int p : a.p_list) {
    if (p < 0) throw UsageError("--p-list entries must be nonnegative");
  }
  BenchOptions opt;
  opt.mu0 = a.mu0;
  opt.repetitions = a.reps;
  opt.policy = policy_for(a.serial);
  const auto rows = bench_complexity(
      [&a](int n) { return make_problem(a.problem, n); }, a.n_list, a.p_list, opt);

  RunManifest manifest;
  manifest.command = "bench";
  manifest.config_hash = "builtin";
  manifest.set("problem", a.problem);
  manifest.set("n_list", join_ints(a.n_list));
  manifest.set("p_list", join_ints(a.p_list));
  manifest.set("mu0", format_double(a.mu0));
  manifest.set("reps", std::to_string(a.reps));
  const fs::path dir(a.out);
  const fs::path csv = dir / "timing.csv";
  write_atomic(csv, timing_csv(rows));
  manifest.outputs.push_back(csv.string());
  finish_manifest(manifest, dir);

  out << "     n     p        seconds   ratio\n";
  for (const auto& r : rows) {
    char line[96];
    std::snprintf(line, sizeof line, "%6d %5d %14.6g %7.2f\n", r.n, r.p, r.seconds, r.ratio);
    out << line;
    if (r.failed_pairs) {
      err << "n=" << r.n << " p=" << r.p << ": " << r.failed_pairs
          << " pairs rejected (non-simple eigenvalues)\n";
    }
  }
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::Config:
    case ErrorKind::Parse:
      return kExitUsage;
    default:
      return kExitNumerical;
  }
}

ParametricProblem make_problem(const std::string& spec, int n) {
  constexpr std::string_view prefix = "config:";
  if (spec.rfind(prefix, 0) == 0) return problem_from_config(fs::path(spec.substr(prefix.size())));
  if (spec == "example1") return make_torus_kernel(n);
  if (spec == "example2") return make_spring_chain(n);
  if (spec == "example3") return make_jordan(n);
  throw Error(ErrorKind::InvalidArgument,
              "unknown problem '" + spec + "' (expected example1|example2|example3|config:<path>)");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Series expansions of parametric eigenpairs", "pevp"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  ExpandArgs expand;
  ReportArgs report;
  SampleArgs sample;
  BenchArgs bench;
  add_expand(app, expand);
  add_report(app, report);
  add_sample(app, sample);
  add_bench(app, bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand("expand")) return cmd_expand(expand, out, err);
    if (app.got_subcommand("report")) return cmd_report(report, out, err);
    if (app.got_subcommand("sample")) return cmd_sample(sample, out, err);
    return cmd_bench(bench, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace pevp::cli
