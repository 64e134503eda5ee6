#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pevp/error.hpp"
#include "pevp/linalg.hpp"
#include "pevp/problem.hpp"
#include "pevp/series.hpp"

namespace pevp {

/// Result for one eigenpair of a batch expansion: either a series or the
/// error that stopped it.
struct PairOutcome {
  std::size_t index = 0;
  std::optional<EigenPairSeries> series;
  std::optional<Error> error;

  bool ok() const { return series.has_value(); }
};

struct TaylorOptions {
  /// Round the bordered matrix to single precision before factorizing.
  bool single_precision_e = false;
  ExecPolicy policy = ExecPolicy::Parallel;
};

/// Weights of the order-k recurrence: binomial coefficients for Taylor
/// derivative values, all ones for the leading-term Chebyshev warm start.
enum class RecurrenceWeights { Binomial, Unit };

struct StackedRhs {
  cplx z;
  CVector y;
};

/// Right-hand side of the order-k bordered system given A_0..A_k and the
/// already computed (lambda_l, v_l), l < k:
///
///   y = sum_{l=0}^{k-1} C(k,l) A_{k-l} v_l - sum_{l=1}^{k-1} C(k,l) v_{k-l} lambda_l
///   z = -1/2 sum_{l=1}^{k-1} C(k,l) <v_{k-l}, v_l>
StackedRhs taylor_rhs(int k, std::span<const CMatrix> a, std::span<const CVector> v,
                      std::span<const cplx> lambda, Pairing pairing,
                      RecurrenceWeights weights = RecurrenceWeights::Binomial);

/// Pascal's triangle up to row `max_order`, in double precision.
std::vector<std::vector<double>> pascal_triangle(int max_order);

/// Solves one bordered system for the order loop.
using BorderedSolve = std::function<BorderedSolution(cplx z, const CVector& y)>;

/// Order loop shared by the Taylor expansion and the Chebyshev warm start:
/// starting from (lambda0, v0), computes coefficients 1..p of `a`'s order.
/// `order_residuals` receives ||E x - rhs||_inf per order, measured with the
/// exact (double precision) bordered matrix.
EigenPairSeries expand_recursively(const MatrixSeries& a, cplx lambda0, const CVector& v0,
                                   Pairing pairing, RecurrenceWeights weights,
                                   const BorderedSolve& solve);

/// Taylor coefficients of the eigenpair that starts at (lambda0, v0), using a
/// dense factorization of the bordered matrix.
EigenPairSeries taylor_expand_from(const MatrixSeries& derivs, cplx lambda0, const CVector& v0,
                                   Pairing pairing, bool single_precision_e = false);

/// Expand eigenpair `index` (position in the spectral order of A(mu0)).
/// Eigenvalue indices permute as mu0 moves across crossings.
EigenPairSeries taylor_expand_eigenpair(const ParametricProblem& problem, double mu0, int order,
                                        std::size_t index, const TaylorOptions& options = {});

/// Expand every eigenpair from one shared Schur factorization of A(mu0).
/// Failures are reported per pair.
std::vector<PairOutcome> taylor_expand_all(const ParametricProblem& problem, double mu0,
                                           int order, const TaylorOptions& options = {});

}  // namespace pevp
