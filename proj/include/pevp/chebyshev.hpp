#pragma once

#include <functional>
#include <vector>

#include "pevp/linalg.hpp"
#include "pevp/problem.hpp"
#include "pevp/series.hpp"
#include "pevp/taylor.hpp"

namespace pevp {

struct ChebOptions {
  /// Quadrature size; 0 selects max(64, 4(p+1)).
  int quadrature_m = 0;
  /// Newton stops when ||R||_inf <= newton_tol * (1 + max_i ||A_i||_F).
  double newton_tol = 1e-12;
  int newton_max_iter = 25;
  ExecPolicy policy = ExecPolicy::Parallel;
};

int default_quadrature_size(int order);

/// Gauss-Chebyshev rule of the second kind on [-1, 1]:
/// s_j = cos(j pi / (m+1)), w_j = pi/(m+1) sin^2(j pi / (m+1)), j = 1..m.
struct GaussChebyshevU {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussChebyshevU(int m);
};

/// Coefficients A_0..A_p of `a` in the unnormalized U basis on [mu1, mu2]:
/// A_i = (2/pi) sum_j w_j A(mu(s_j)) U_i(s_j). Requires m > 2p.
MatrixSeries project_matrix_coeffs(const std::function<CMatrix(double)>& a, double mu1,
                                   double mu2, int order, int m,
                                   ExecPolicy policy = ExecPolicy::Parallel);
MatrixSeries project_matrix_coeffs(const ParametricProblem& problem, double mu1, double mu2,
                                   int order, int m = 0, ExecPolicy policy = ExecPolicy::Parallel);

/// Unknown vector layout: block k (k = 0..p) occupies entries
/// [k(n+1), (k+1)(n+1)) and holds (lambda_k, v_k).
CVector pack(const EigenPairSeries& series);
EigenPairSeries unpack(const CVector& x, Eigen::Index n, const SeriesBasis& basis);

/// Warm start from the leading-term (block lower triangular) system, solved
/// by forward substitution. v0 is scaled so that v0^T v0 = 1.
CVector warm_start(const MatrixSeries& coeffs, const EigenDecomposition& a0_decomposition,
                   std::size_t index);
CVector warm_start(const MatrixSeries& coeffs, std::size_t index, bool hermitian = false);

/// Galerkin-truncated residual of the coupled system. Block k:
///   entry 0:   sum_{(i,j): k in U_i U_j} v_i^T v_j - delta_k0
///   entries 1..n: sum_{(i,j): k in U_i U_j} (A_i v_j - lambda_i v_j)
/// Product terms of degree > p are dropped.
CVector cheb_residual(const CVector& x, const MatrixSeries& coeffs);

/// Exact Jacobian of cheb_residual, dimension (p+1)(n+1).
CMatrix cheb_jacobian(const CVector& x, const MatrixSeries& coeffs);

/// Newton ran out of iterations. Carries the iterate with the smallest
/// residual seen.
class NewtonFailure : public Error {
 public:
  NewtonFailure(const std::string& message, EigenPairSeries best)
      : Error(ErrorKind::NoConvergence, message), best_(std::move(best)) {}
  const EigenPairSeries& best_iterate() const { return best_; }

 private:
  EigenPairSeries best_;
};

/// Full-step Newton x <- x - J^{-1} R. The result records the iteration
/// count and the residual history (one entry per residual evaluation).
EigenPairSeries newton_refine(const CVector& x0, const MatrixSeries& coeffs, double tol,
                              int max_iter);

EigenPairSeries cheb_expand_eigenpair(const ParametricProblem& problem, double mu1, double mu2,
                                      int order, std::size_t index,
                                      const ChebOptions& options = {});

/// Warm start + Newton for every eigenpair of A_0, sharing one projection
/// and one Schur factorization. Results whose eigenvalue series agree at
/// five probe points are flagged as collisions.
std::vector<PairOutcome> cheb_expand_all(const ParametricProblem& problem, double mu1, double mu2,
                                         int order, const ChebOptions& options = {});

/// Flag pairs of successful outcomes whose eigenvalue series agree within
/// `tol` at five interior probe points. Returns the number of flagged series.
std::size_t flag_collisions(std::vector<PairOutcome>& outcomes, double tol = 1e-8);

}  // namespace pevp
