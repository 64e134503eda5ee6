#include "pevp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "pevp/error.hpp"
#include "pevp/linalg.hpp"

namespace pevp {

EigenpairValue eigpath_eval(const EigenPairSeries& series, double mu) {
  const auto lam = evaluate(series.eigenvalue_series(), mu);
  auto vec = evaluate(series.eigenvector_series(), mu);
  const double norm = vec.value.norm();
  if (!(norm >= 1e-14)) {
    throw Error(ErrorKind::DegenerateEvaluation,
                "eigenvector series vanishes at mu = " + std::to_string(mu) +
                    " (norm " + std::to_string(norm) + ")");
  }
  vec.value /= norm;
  fix_phase(vec.value);
  return {lam.value, std::move(vec.value), lam.extrapolated};
}

cplx rayleigh_quotient(const CMatrix& a, const CVector& q) {
  return q.dot(a * q) / q.squaredNorm();
}

cplx rayleigh_refine(const ParametricProblem& problem, const EigenPairSeries& series, double mu) {
  const auto ev = eigpath_eval(series, mu);
  return rayleigh_quotient(problem.eval_at(mu), ev.vector);
}

std::vector<std::size_t> greedy_match(const std::vector<cplx>& approx,
                                      const std::vector<cplx>& ref) {
  if (approx.size() > ref.size()) {
    throw Error(ErrorKind::InvalidArgument, "more approximations than reference values");
  }
  std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
  edges.reserve(approx.size() * ref.size());
  for (std::size_t i = 0; i < approx.size(); ++i) {
    for (std::size_t j = 0; j < ref.size(); ++j) {
      edges.emplace_back(std::abs(approx[i] - ref[j]), i, j);
    }
  }
  std::sort(edges.begin(), edges.end());
  constexpr auto none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> match(approx.size(), none);
  std::vector<bool> taken(ref.size(), false);
  std::size_t left = approx.size();
  for (const auto& [d, i, j] : edges) {
    if (left == 0) break;
    if (match[i] != none || taken[j]) continue;
    match[i] = j;
    taken[j] = true;
    --left;
  }
  return match;
}

double vector_deviation(const std::vector<CVector>& direct, const CVector& v) {
  double best = 0.0;
  for (const auto& d : direct) best = std::max(best, std::abs(d.dot(v)));
  return std::abs(best - 1.0);
}

namespace {

double max_of(const std::vector<std::vector<double>>& table) {
  double m = 0.0;
  for (const auto& row : table) {
    for (double x : row) m = std::max(m, x);
  }
  return m;
}

std::vector<double> flatten(const std::vector<std::vector<double>>& table) {
  std::vector<double> out;
  for (const auto& row : table) out.insert(out.end(), row.begin(), row.end());
  return out;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<long>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<long>(mid));
  return 0.5 * (lower + upper);
}

double ErrorReport::max_eig_error() const { return max_of(eig_error); }
double ErrorReport::median_eig_error() const { return median(flatten(eig_error)); }
double ErrorReport::max_vec_deviation() const { return max_of(vec_deviation); }
double ErrorReport::median_rayleigh_error() const { return median(flatten(rayleigh_error)); }

double ErrorReport::eig_error_at(std::size_t g) const {
  const auto& row = eig_error.at(g);
  return row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
}

double ErrorReport::vec_deviation_at(std::size_t g) const {
  const auto& row = vec_deviation.at(g);
  return row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
}

ErrorReport error_report(const ParametricProblem& problem,
                         const std::vector<EigenPairSeries>& series,
                         const std::vector<double>& grid, const ReportOptions& options) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "error report needs a nonempty grid");
  if (series.size() > static_cast<std::size_t>(problem.dimension())) {
    throw Error(ErrorKind::InvalidArgument, "more series than eigenvalues of the problem");
  }
  const std::size_t g_count = grid.size();
  const std::size_t s_count = series.size();
  ErrorReport report;
  report.grid = grid;
  for (const auto& s : series) report.pair_index.push_back(s.diagnostics.index);
  report.eig_error.assign(g_count, std::vector<double>(s_count, 0.0));
  report.vec_deviation.assign(g_count, std::vector<double>(s_count, 0.0));
  report.matching.assign(g_count, std::vector<std::size_t>(s_count, 0));
  if (options.rayleigh) report.rayleigh_error.assign(g_count, std::vector<double>(s_count, 0.0));
  std::vector<std::string> failures(g_count);

#pragma omp parallel for schedule(dynamic) if (options.policy == ExecPolicy::Parallel)
  for (long gi = 0; gi < static_cast<long>(g_count); ++gi) {
    const auto g = static_cast<std::size_t>(gi);
    try {
      const double mu = grid[g];
      const CMatrix a = problem.eval_at(mu);
      const auto direct = eigen_all(a, problem.hermitian());
      std::vector<EigenpairValue> approx;
      std::vector<cplx> lambdas;
      for (const auto& s : series) {
        approx.push_back(eigpath_eval(s, mu));
        lambdas.push_back(approx.back().lambda);
      }
      const auto match = greedy_match(lambdas, direct.values);
      for (std::size_t i = 0; i < s_count; ++i) {
        const cplx ref = direct.values[match[i]];
        report.matching[g][i] = match[i];
        report.eig_error[g][i] = std::abs(lambdas[i] - ref);
        report.vec_deviation[g][i] = vector_deviation(direct.vectors, approx[i].vector);
        if (options.rayleigh) {
          report.rayleigh_error[g][i] = std::abs(rayleigh_quotient(a, approx[i].vector) - ref);
        }
      }
    } catch (const Error& e) {
      failures[g] = e.what();
    }
  }
  for (std::size_t g = 0; g < g_count; ++g) {
    if (!failures[g].empty()) {
      throw Error(ErrorKind::DegenerateEvaluation,
                  "error report at mu = " + std::to_string(grid[g]) + ": " + failures[g]);
    }
  }
  return report;
}

std::vector<double> linear_grid(double a, double b, int count) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "grid count must be positive");
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = a;
    return grid;
  }
  for (int i = 0; i < count; ++i) {
    grid[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / (count - 1);
  }
  grid.back() = b;
  return grid;
}

std::vector<double> interior_grid(double mu1, double mu2, int count) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "grid count must be positive");
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    grid[static_cast<std::size_t>(i - 1)] = mu1 + (mu2 - mu1) * static_cast<double>(i) / (count + 1);
  }
  return grid;
}

}  // namespace pevp
