#include "pevp/taylor.hpp"

#include <algorithm>
#include <string>

namespace pevp {

std::vector<std::vector<double>> pascal_triangle(int max_order) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(std::max(max_order, 0)) + 1);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].assign(k + 1, 1.0);
    for (std::size_t l = 1; l < k; ++l) rows[k][l] = rows[k - 1][l - 1] + rows[k - 1][l];
  }
  return rows;
}

namespace {

double binomial(const std::vector<std::vector<double>>& pascal, int k, int l) {
  return pascal[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
}

StackedRhs rhs_with_table(int k, std::span<const CMatrix> a, std::span<const CVector> v,
                          std::span<const cplx> lambda, Pairing pairing,
                          const std::vector<std::vector<double>>* pascal) {
  auto w = [&](int l) { return pascal ? binomial(*pascal, k, l) : 1.0; };
  CVector y = CVector::Zero(v[0].size());
  cplx z = 0.0;
  for (int l = 0; l < k; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    const auto ukl = static_cast<std::size_t>(k - l);
    y.noalias() += w(l) * (a[ukl] * v[ul]);
    if (l >= 1) {
      y -= (w(l) * lambda[ul]) * v[ukl];
      z += w(l) * pair_dot(v[ukl], v[ul], pairing);
    }
  }
  return {-0.5 * z, std::move(y)};
}

double bordered_residual(const CMatrix& a0, cplx lambda0, const CVector& v0, Pairing pairing,
                         const BorderedSolution& x, const StackedRhs& rhs) {
  const double border = std::abs(pair_dot(v0, x.vector, pairing) - rhs.z);
  const CVector body = v0 * x.lambda + lambda0 * x.vector - a0 * x.vector - rhs.y;
  return std::max(border, body.cwiseAbs().maxCoeff());
}

Pairing pairing_for(const ParametricProblem& problem) {
  return problem.hermitian() ? Pairing::ConjugateTranspose : Pairing::Transpose;
}

}  // namespace

StackedRhs taylor_rhs(int k, std::span<const CMatrix> a, std::span<const CVector> v,
                      std::span<const cplx> lambda, Pairing pairing, RecurrenceWeights weights) {
  if (k < 1 || a.size() < static_cast<std::size_t>(k) + 1 ||
      v.size() < static_cast<std::size_t>(k) || lambda.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::InvalidArgument,
                "taylor_rhs(k=" + std::to_string(k) + ") needs A_0..A_k and all prior orders");
  }
  if (weights == RecurrenceWeights::Unit) return rhs_with_table(k, a, v, lambda, pairing, nullptr);
  const auto pascal = pascal_triangle(k);
  return rhs_with_table(k, a, v, lambda, pairing, &pascal);
}

EigenPairSeries expand_recursively(const MatrixSeries& a, cplx lambda0, const CVector& v0,
                                   Pairing pairing, RecurrenceWeights weights,
                                   const BorderedSolve& solve) {
  const int p = a.order();
  EigenPairSeries out{a.basis, {lambda0}, {v0}, {}};
  out.lambda.reserve(static_cast<std::size_t>(p) + 1);
  out.vectors.reserve(static_cast<std::size_t>(p) + 1);
  const auto pascal =
      weights == RecurrenceWeights::Binomial ? pascal_triangle(p) : std::vector<std::vector<double>>{};
  const CMatrix& a0 = a.coeffs[0];
  double worst = 0.0;
  for (int k = 1; k <= p; ++k) {
    const auto rhs = rhs_with_table(k, a.coeffs, out.vectors, out.lambda, pairing,
                                    weights == RecurrenceWeights::Binomial ? &pascal : nullptr);
    BorderedSolution x = solve(rhs.z, rhs.y);
    const double res = bordered_residual(a0, lambda0, v0, pairing, x, rhs);
    out.diagnostics.order_residuals.push_back(res);
    worst = std::max(worst, res);
    out.lambda.push_back(x.lambda);
    out.vectors.push_back(std::move(x.vector));
  }
  out.diagnostics.residual_norm = worst;
  return out;
}

EigenPairSeries taylor_expand_from(const MatrixSeries& derivs, cplx lambda0, const CVector& v0,
                                   Pairing pairing, bool single_precision_e) {
  if (!derivs.basis.is_taylor()) {
    throw Error(ErrorKind::InvalidArgument, "Taylor expansion needs a Taylor matrix series");
  }
  const BorderedSystem sys(derivs.coeffs[0], v0, lambda0, pairing, single_precision_e);
  return expand_recursively(derivs, lambda0, v0, pairing, RecurrenceWeights::Binomial,
                            [&sys](cplx z, const CVector& y) {
                              return solve_bordered(sys, stack_rhs(z, y));
                            });
}

EigenPairSeries taylor_expand_eigenpair(const ParametricProblem& problem, double mu0, int order,
                                        std::size_t index, const TaylorOptions& options) {
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "expansion order must be nonnegative");
  const MatrixSeries derivs = problem.taylor_series(mu0, order);
  const auto dec = eigen_all(derivs.coeffs[0], problem.hermitian());
  if (index >= dec.size()) {
    throw Error(ErrorKind::InvalidArgument, "eigenpair index " + std::to_string(index) +
                                                " out of range for n=" +
                                                std::to_string(dec.size()));
  }
  auto series = taylor_expand_from(derivs, dec.values[index], dec.vectors[index],
                                   pairing_for(problem), options.single_precision_e);
  series.diagnostics.index = index;
  return series;
}

std::vector<PairOutcome> taylor_expand_all(const ParametricProblem& problem, double mu0, int order,
                                           const TaylorOptions& options) {
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "expansion order must be nonnegative");
  const MatrixSeries derivs = problem.taylor_series(mu0, order);
  const auto dec = eigen_all(derivs.coeffs[0], problem.hermitian());
  const Pairing pairing = pairing_for(problem);
  const auto count = static_cast<long>(dec.size());
  std::vector<PairOutcome> outcomes(dec.size());

#pragma omp parallel for schedule(dynamic) if (options.policy == ExecPolicy::Parallel)
  for (long i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    PairOutcome& out = outcomes[idx];
    out.index = idx;
    try {
      const cplx lambda0 = dec.values[idx];
      const CVector& v0 = dec.vectors[idx];
      EigenPairSeries series = [&] {
        if (options.single_precision_e) {
          return taylor_expand_from(derivs, lambda0, v0, pairing, true);
        }
        const ReducedBorderedSolver solver(dec.schur_q, dec.schur_t, v0, lambda0,
                                           dec.schur_position[idx], pairing, dec.hermitian);
        return expand_recursively(derivs, lambda0, v0, pairing, RecurrenceWeights::Binomial,
                                  [&solver](cplx z, const CVector& y) { return solver.solve(z, y); });
      }();
      series.diagnostics.index = idx;
      out.series = std::move(series);
    } catch (const Error& e) {
      out.error = e;
    }
  }
  return outcomes;
}

}  // namespace pevp
