#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pevp/series.hpp"
#include "pevp/types.hpp"

namespace pevp {

/// Admissible parameter values: a closed interval minus finitely many points.
struct ParameterDomain {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  std::vector<double> excluded;

  bool contains(double mu) const;
  std::string describe() const;
};

/// A(mu) together with exact derivative matrices. Immutable and cheap to
/// copy; the evaluators must be reentrant.
class ParametricProblem {
 public:
  using Evaluator = std::function<CMatrix(double)>;
  /// Returns A_0..A_p at mu0 where A_k holds k-th derivative values.
  using DerivativeEvaluator = std::function<std::vector<CMatrix>(double, int)>;

  ParametricProblem(std::string name, Eigen::Index n, bool hermitian, ParameterDomain domain,
                    Evaluator eval, DerivativeEvaluator derivs);

  const std::string& name() const { return name_; }
  Eigen::Index dimension() const { return n_; }
  bool hermitian() const { return hermitian_; }
  const ParameterDomain& domain() const { return domain_; }

  CMatrix eval_at(double mu) const;
  std::vector<CMatrix> derivs_at(double mu0, int order) const;
  /// derivs_at packaged as a Taylor MatrixSeries about mu0.
  MatrixSeries taylor_series(double mu0, int order) const;

 private:
  void require_admissible(double mu) const;

  std::string name_;
  Eigen::Index n_;
  bool hermitian_;
  ParameterDomain domain_;
  Evaluator eval_;
  DerivativeEvaluator derivs_;
};

/// Entrywise exp(-mu U) where U holds the pairwise distances of n points on
/// a curve wound twice around a torus.
ParametricProblem make_torus_kernel(Eigen::Index n);

/// Chain of n unit springs whose two middle masses equal mu: A = M(mu)^{-1} K.
ParametricProblem make_spring_chain(Eigen::Index n);

/// Jordan block of ones with mu in the lower-left corner.
ParametricProblem make_jordan(Eigen::Index n);

/// The n roots of (lambda - 1)^n = mu, sorted by spectral_order.
std::vector<cplx> jordan_eigenvalues(Eigen::Index n, double mu);

struct DerivativeCheck {
  int order = 0;
  double max_relative_error = 0.0;
  bool passed = false;
};

/// Compare derivs_at against central finite differences of eval_at for
/// orders 1..max_order. Relative errors are measured against the larger of
/// ||A_k||_max and the largest A(mu) entry.
std::vector<DerivativeCheck> derivative_self_test(const ParametricProblem& problem, double mu0,
                                                  int max_order = 3, double tol = 1e-5);

}  // namespace pevp
