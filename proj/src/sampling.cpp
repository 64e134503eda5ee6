#include "pevp/sampling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "pevp/analysis.hpp"
#include "pevp/error.hpp"
#include "pevp/linalg.hpp"
#include "pevp/taylor.hpp"

namespace pevp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

std::string_view to_string(SampleMethod method) {
  switch (method) {
    case SampleMethod::TaylorEval: return "taylor-eval";
    case SampleMethod::ChebEval: return "cheb-eval";
    case SampleMethod::Rayleigh: return "rayleigh";
    case SampleMethod::Direct: return "direct";
  }
  return "unknown";
}

SampleMethod sample_method_from_string(std::string_view name) {
  for (auto m : {SampleMethod::TaylorEval, SampleMethod::ChebEval, SampleMethod::Rayleigh,
                 SampleMethod::Direct}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown sampling method '" + std::string(name) + "'");
}

std::vector<double> draw_samples(std::uint64_t seed, const NormalDist& dist, std::size_t count) {
  if (!(dist.stddev >= 0.0) || !std::isfinite(dist.mean)) {
    throw Error(ErrorKind::InvalidArgument, "normal distribution needs finite mean, stddev >= 0");
  }
  std::vector<double> out(count, dist.mean);
  if (dist.stddev == 0.0) return out;
  const auto lo = static_cast<std::uint32_t>(seed);
  const auto hi = static_cast<std::uint32_t>(seed >> 32);
  for (std::size_t i = 0; i < count; ++i) {
    std::seed_seq seq{lo, hi, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal(dist.mean, dist.stddev);
    out[i] = normal(engine);
  }
  return out;
}

SampleSet sample_eigenvalues(const ParametricProblem& problem,
                             const std::vector<EigenPairSeries>& series,
                             const std::vector<std::size_t>& ranks, const NormalDist& dist,
                             std::size_t count, std::uint64_t seed, SampleMethod method,
                             const SampleOptions& options) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "sample count must be positive");
  if (ranks.empty()) throw Error(ErrorKind::InvalidArgument, "no eigenvalues selected for sampling");
  const bool direct = method == SampleMethod::Direct;
  const std::size_t available = direct ? static_cast<std::size_t>(problem.dimension()) : series.size();
  for (auto r : ranks) {
    if (r >= available) {
      throw Error(ErrorKind::InvalidArgument, "rank " + std::to_string(r) + " exceeds the " +
                                                  std::to_string(available) + " available pairs");
    }
  }

  SampleSet set;
  set.seed = seed;
  set.dist = dist;
  set.method = method;
  set.ranks = ranks;
  set.mu = draw_samples(seed, dist, count);
  set.values.assign(count, std::vector<cplx>(ranks.size()));

  const auto setup_start = Clock::now();
  std::vector<const EigenPairSeries*> tracked;
  if (!direct) {
    std::vector<std::size_t> order(series.size());
    std::vector<double> at_mean(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
      order[i] = i;
      at_mean[i] = evaluate(series[i].eigenvalue_series(), dist.mean).value.real();
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return at_mean[a] > at_mean[b]; });
    for (auto r : ranks) tracked.push_back(&series[order[r]]);
  }
  set.setup_seconds = seconds_since(setup_start);

  std::vector<std::string> failures(count);
  const auto start = Clock::now();
#pragma omp parallel for schedule(static) if (options.policy == ExecPolicy::Parallel)
  for (long li = 0; li < static_cast<long>(count); ++li) {
    const auto i = static_cast<std::size_t>(li);
    const double mu = set.mu[i];
    auto& row = set.values[i];
    try {
      switch (method) {
        case SampleMethod::Direct: {
          const auto vals = eigenvalues_only(problem.eval_at(mu), problem.hermitian());
          for (std::size_t r = 0; r < ranks.size(); ++r) row[r] = vals[ranks[r]];
          break;
        }
        case SampleMethod::Rayleigh: {
          const CMatrix a = problem.eval_at(mu);
          for (std::size_t r = 0; r < ranks.size(); ++r) {
            row[r] = rayleigh_quotient(a, eigpath_eval(*tracked[r], mu).vector);
          }
          break;
        }
        case SampleMethod::TaylorEval:
        case SampleMethod::ChebEval:
          for (std::size_t r = 0; r < ranks.size(); ++r) {
            row[r] = evaluate(tracked[r]->eigenvalue_series(), mu).value;
          }
          break;
      }
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  }
  set.sampling_seconds = seconds_since(start);
  for (std::size_t i = 0; i < count; ++i) {
    if (!failures[i].empty()) {
      throw Error(ErrorKind::Domain,
                  "sample " + std::to_string(i) + " (mu = " + std::to_string(set.mu[i]) + "): " +
                      failures[i]);
    }
  }
  return set;
}

std::vector<HistogramRow> histogram(const std::vector<double>& a, const std::vector<double>& b,
                                    int bins) {
  if (bins < 1) throw Error(ErrorKind::InvalidArgument, "histogram needs at least one bin");
  if (a.empty() && b.empty()) throw Error(ErrorKind::InvalidArgument, "histogram of no samples");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* v : {&a, &b}) {
    for (double x : *v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (hi == lo) hi = lo + 1.0;
  const double width = (hi - lo) / bins;
  std::vector<HistogramRow> rows(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k) {
    rows[static_cast<std::size_t>(k)] = {lo + k * width, k + 1 == bins ? hi : lo + (k + 1) * width,
                                         0, 0};
  }
  auto bin_of = [&](double x) {
    const auto k = static_cast<long>(std::floor((x - lo) / width));
    return static_cast<std::size_t>(std::clamp(k, 0L, static_cast<long>(bins) - 1));
  };
  for (double x : a) ++rows[bin_of(x)].count_a;
  for (double x : b) ++rows[bin_of(x)].count_b;
  return rows;
}

std::vector<double> tracked_real_parts(const SampleSet& set, std::size_t r) {
  std::vector<double> out;
  out.reserve(set.values.size());
  for (const auto& row : set.values) out.push_back(row.at(r).real());
  return out;
}

double time_median(const std::function<void()>& f, int repetitions, double min_batch_seconds) {
  std::vector<double> per_call;
  for (int rep = 0; rep < std::max(repetitions, 1); ++rep) {
    long calls = 0;
    const auto t0 = Clock::now();
    double elapsed = 0.0;
    do {
      f();
      ++calls;
      elapsed = seconds_since(t0);
    } while (elapsed < min_batch_seconds);
    per_call.push_back(elapsed / static_cast<double>(calls));
  }
  return median(per_call);
}

std::vector<TimingRow> bench_complexity(
    const std::function<ParametricProblem(int n)>& family, const std::vector<int>& n_list,
    const std::vector<int>& p_list, const BenchOptions& options) {
  if (n_list.empty() || p_list.empty()) {
    throw Error(ErrorKind::InvalidArgument, "benchmark needs nonempty n and p lists");
  }
  std::vector<TimingRow> rows;
  for (int n : n_list) {
    const ParametricProblem problem = family(n);
    for (int p : p_list) {
      TaylorOptions topt;
      topt.policy = options.policy;
      std::size_t failed = 0;
      const double t = time_median(
          [&] {
            const auto out = taylor_expand_all(problem, options.mu0, p, topt);
            failed = static_cast<std::size_t>(
                std::count_if(out.begin(), out.end(), [](const PairOutcome& o) { return !o.ok(); }));
          },
          options.repetitions, options.min_batch_seconds);
      const double ratio = rows.empty() ? 0.0 : t / rows.back().seconds;
      rows.push_back({n, p, t, ratio, failed});
    }
  }
  return rows;
}

}  // namespace pevp
