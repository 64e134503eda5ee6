#pragma once

#include <vector>

#include "pevp/problem.hpp"
#include "pevp/series.hpp"
#include "pevp/types.hpp"

namespace pevp {

struct EigenpairValue {
  cplx lambda;
  /// Unit 2-norm, largest-magnitude entry real positive.
  CVector vector;
  /// mu lies outside the Chebyshev interval.
  bool extrapolated = false;
};

/// Evaluate a series at mu and normalize the eigenvector.
/// Throws DegenerateEvaluation when ||v(mu)||_2 < 1e-14.
EigenpairValue eigpath_eval(const EigenPairSeries& series, double mu);

/// q^H A q / q^H q.
cplx rayleigh_quotient(const CMatrix& a, const CVector& q);

/// Rayleigh quotient of A(mu) at the normalized series eigenvector.
cplx rayleigh_refine(const ParametricProblem& problem, const EigenPairSeries& series, double mu);

/// Greedy nearest matching of approximations to reference values: all
/// (approx, ref) distances are visited in ascending order and a pair is taken
/// when both ends are still free. result[i] is the reference index matched to
/// approx[i]. Requires approx.size() <= ref.size().
std::vector<std::size_t> greedy_match(const std::vector<cplx>& approx,
                                      const std::vector<cplx>& ref);

/// max_d |v_d^H v| - 1| for unit v against the unit columns v_d of a direct
/// eigenbasis, i.e. how far v is from its best-aligned direct eigenvector.
double vector_deviation(const std::vector<CVector>& direct, const CVector& v);

struct ReportOptions {
  bool rayleigh = false;
  ExecPolicy policy = ExecPolicy::Parallel;
};

struct ErrorReport {
  std::vector<double> grid;
  /// diagnostics.index of each series, in input order.
  std::vector<std::size_t> pair_index;
  /// [grid point][series]
  std::vector<std::vector<double>> eig_error;
  std::vector<std::vector<double>> vec_deviation;
  std::vector<std::vector<std::size_t>> matching;
  /// Filled only when ReportOptions::rayleigh is set.
  std::vector<std::vector<double>> rayleigh_error;

  double max_eig_error() const;
  double median_eig_error() const;
  double max_vec_deviation() const;
  double median_rayleigh_error() const;
  /// Largest eigenvalue error over series at grid point g.
  double eig_error_at(std::size_t g) const;
  /// Largest eigenvector deviation over series at grid point g.
  double vec_deviation_at(std::size_t g) const;
};

/// Compare series against direct eigensolves of A(mu) on a grid.
ErrorReport error_report(const ParametricProblem& problem,
                         const std::vector<EigenPairSeries>& series,
                         const std::vector<double>& grid, const ReportOptions& options = {});

/// count points from a to b inclusive (count = 1 gives {a}).
std::vector<double> linear_grid(double a, double b, int count);

/// Strictly interior points mu1 + i (mu2 - mu1) / (count + 1), i = 1..count.
std::vector<double> interior_grid(double mu1, double mu2, int count);

double median(std::vector<double> values);

}  // namespace pevp
