#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pevp/problem.hpp"
#include "pevp/series.hpp"
#include "pevp/types.hpp"

namespace pevp {

struct NormalDist {
  double mean = 0.0;
  double stddev = 1.0;
};

enum class SampleMethod { TaylorEval, ChebEval, Rayleigh, Direct };

std::string_view to_string(SampleMethod method);
/// Accepts "taylor-eval", "cheb-eval", "rayleigh", "direct".
SampleMethod sample_method_from_string(std::string_view name);

/// Sample i comes from its own generator seeded with (seed, i), so the
/// sequence does not depend on the thread schedule. stddev = 0 returns the
/// mean exactly.
std::vector<double> draw_samples(std::uint64_t seed, const NormalDist& dist, std::size_t count);

struct SampleSet {
  std::uint64_t seed = 0;
  NormalDist dist;
  SampleMethod method = SampleMethod::Direct;
  /// Ranks (0 = largest real part at the distribution mean) being tracked.
  std::vector<std::size_t> ranks;
  std::vector<double> mu;
  /// values[i][r]: eigenvalue of rank ranks[r] at sample mu[i].
  std::vector<std::vector<cplx>> values;
  double setup_seconds = 0.0;
  double sampling_seconds = 0.0;
};

struct SampleOptions {
  ExecPolicy policy = ExecPolicy::Parallel;
};

/// Evaluate the tracked eigenvalues at `count` normal samples.
///
/// Series methods rank the series by the real part of lambda at the mean and
/// then follow each selected series through every sample. The direct method
/// takes the same ranks from a fresh eigensolve at every sample. `series` may
/// be empty for the direct method. Setup time covers the ranking step only;
/// callers add expansion time themselves.
SampleSet sample_eigenvalues(const ParametricProblem& problem,
                             const std::vector<EigenPairSeries>& series,
                             const std::vector<std::size_t>& ranks, const NormalDist& dist,
                             std::size_t count, std::uint64_t seed, SampleMethod method,
                             const SampleOptions& options = {});

struct HistogramRow {
  double lo;
  double hi;
  std::size_t count_a;
  std::size_t count_b;
};

inline constexpr int kHistogramBins = 50;

/// Shared-bin histogram of two real samples over the joint range. The last
/// bin is closed on the right.
std::vector<HistogramRow> histogram(const std::vector<double>& a, const std::vector<double>& b,
                                    int bins = kHistogramBins);

/// Real parts of values[i][r] for one tracked rank.
std::vector<double> tracked_real_parts(const SampleSet& set, std::size_t r);

struct TimingRow {
  int n;
  int p;
  double seconds;
  /// seconds / previous row's seconds; 0 for the first row.
  double ratio;
  /// Pairs rejected by taylor_expand_all (e.g. numerically coincident
  /// eigenvalues); their early exit is included in `seconds`.
  std::size_t failed_pairs = 0;
};

struct BenchOptions {
  double mu0 = 0.2;
  int repetitions = 3;
  /// Each timed batch repeats the call until at least this long has passed.
  double min_batch_seconds = 0.02;
  ExecPolicy policy = ExecPolicy::Parallel;
};

/// Median wall time per call of f, over `repetitions` batches.
double time_median(const std::function<void()>& f, int repetitions, double min_batch_seconds);

/// Time taylor_expand_all for every (n, p) in row-major order of nList x pList.
std::vector<TimingRow> bench_complexity(
    const std::function<ParametricProblem(int n)>& family, const std::vector<int>& n_list,
    const std::vector<int>& p_list, const BenchOptions& options = {});

}  // namespace pevp
