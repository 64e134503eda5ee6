#include "pevp/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/LU>

namespace pevp {

int default_quadrature_size(int order) { return std::max(64, 4 * (order + 1)); }

GaussChebyshevU::GaussChebyshevU(int m) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "quadrature size must be positive");
  using std::numbers::pi;
  nodes.reserve(static_cast<std::size_t>(m));
  weights.reserve(static_cast<std::size_t>(m));
  const double h = pi / static_cast<double>(m + 1);
  for (int j = 1; j <= m; ++j) {
    const double angle = h * static_cast<double>(j);
    const double s = std::sin(angle);
    nodes.push_back(std::cos(angle));
    weights.push_back(h * s * s);
  }
}

MatrixSeries project_matrix_coeffs(const std::function<CMatrix(double)>& a, double mu1,
                                   double mu2, int order, int m, ExecPolicy policy) {
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "expansion order must be nonnegative");
  if (m <= 2 * order) {
    throw Error(ErrorKind::InvalidArgument, "quadrature size m=" + std::to_string(m) +
                                                " must exceed 2p=" + std::to_string(2 * order));
  }
  const SeriesBasis basis = SeriesBasis::chebyshev(mu1, mu2);
  const GaussChebyshevU rule(m);
  std::vector<CMatrix> samples(static_cast<std::size_t>(m));
  std::vector<std::string> failures(static_cast<std::size_t>(m));

#pragma omp parallel for schedule(static) if (policy == ExecPolicy::Parallel)
  for (int j = 0; j < m; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    const double mu = basis.from_unit(rule.nodes[uj]);
    try {
      samples[uj] = a(mu);
      if (!samples[uj].allFinite()) failures[uj] = "non-finite entries";
    } catch (const Error& e) {
      failures[uj] = e.what();
    }
  }
  for (int j = 0; j < m; ++j) {
    const auto& f = failures[static_cast<std::size_t>(j)];
    if (!f.empty()) {
      throw Error(ErrorKind::Domain,
                  "A(mu) sample at quadrature node " + std::to_string(j + 1) + " (mu = " +
                      std::to_string(basis.from_unit(rule.nodes[static_cast<std::size_t>(j)])) +
                      "): " + f);
    }
  }

  const Eigen::Index n = samples[0].rows();
  MatrixSeries out{basis, std::vector<CMatrix>(static_cast<std::size_t>(order) + 1,
                                               CMatrix::Zero(n, n))};
  const double scale = 2.0 / std::numbers::pi;
  for (int j = 0; j < m; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    const auto u = chebyshev_u_values(order, rule.nodes[uj]);
    for (int i = 0; i <= order; ++i) {
      out.coeffs[static_cast<std::size_t>(i)] +=
          (scale * rule.weights[uj] * u[static_cast<std::size_t>(i)]) * samples[uj];
    }
  }
  return out;
}

MatrixSeries project_matrix_coeffs(const ParametricProblem& problem, double mu1, double mu2,
                                   int order, int m, ExecPolicy policy) {
  if (m == 0) m = default_quadrature_size(order);
  return project_matrix_coeffs([&problem](double mu) { return problem.eval_at(mu); }, mu1, mu2,
                               order, m, policy);
}

// ---------------------------------------------------------------------------
// Packing

CVector pack(const EigenPairSeries& series) {
  const Eigen::Index n = series.dimension();
  const Eigen::Index blocks = series.order() + 1;
  CVector x(blocks * (n + 1));
  for (Eigen::Index k = 0; k < blocks; ++k) {
    x(k * (n + 1)) = series.lambda[static_cast<std::size_t>(k)];
    x.segment(k * (n + 1) + 1, n) = series.vectors[static_cast<std::size_t>(k)];
  }
  return x;
}

EigenPairSeries unpack(const CVector& x, Eigen::Index n, const SeriesBasis& basis) {
  if (n < 1 || x.size() % (n + 1) != 0) {
    throw Error(ErrorKind::InvalidArgument, "packed vector length is not a multiple of n+1");
  }
  EigenPairSeries out{basis, {}, {}, {}};
  const Eigen::Index blocks = x.size() / (n + 1);
  for (Eigen::Index k = 0; k < blocks; ++k) {
    out.lambda.push_back(x(k * (n + 1)));
    out.vectors.push_back(x.segment(k * (n + 1) + 1, n));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Warm start

CVector warm_start(const MatrixSeries& coeffs, const EigenDecomposition& dec, std::size_t index) {
  if (coeffs.basis.is_taylor()) {
    throw Error(ErrorKind::InvalidArgument, "warm start needs Chebyshev coefficients");
  }
  if (index >= dec.size()) {
    throw Error(ErrorKind::InvalidArgument, "eigenpair index out of range");
  }
  const cplx lambda0 = dec.values[index];
  CVector v0 = dec.vectors[index];
  const cplx self = (v0.transpose() * v0).value();
  if (std::abs(self) < 1e-8) {
    throw Error(ErrorKind::NonSimpleEigenvalue,
                "eigenvector " + std::to_string(index) +
                    " of A_0 is nearly isotropic (v^T v ~ 0); cannot normalize");
  }
  v0 /= std::sqrt(self);

  const ReducedBorderedSolver solver(dec.schur_q, dec.schur_t, v0, lambda0,
                                     dec.schur_position[index], Pairing::Transpose,
                                     dec.hermitian);
  const auto series =
      expand_recursively(coeffs, lambda0, v0, Pairing::Transpose, RecurrenceWeights::Unit,
                         [&solver](cplx z, const CVector& y) { return solver.solve(z, y); });
  return pack(series);
}

CVector warm_start(const MatrixSeries& coeffs, std::size_t index, bool hermitian) {
  return warm_start(coeffs, eigen_all(coeffs.coeffs[0], hermitian), index);
}

// ---------------------------------------------------------------------------
// Coupled system

namespace {

struct Unpacked {
  Eigen::Index n;
  int p;
  std::vector<cplx> lambda;
  std::vector<CVector> v;
};

Unpacked split(const CVector& x, const MatrixSeries& coeffs) {
  const Eigen::Index n = coeffs.coeffs.at(0).rows();
  const int p = coeffs.order();
  if (x.size() != (p + 1) * (n + 1)) {
    throw Error(ErrorKind::InvalidArgument, "packed unknowns do not match (p+1)(n+1)");
  }
  Unpacked u{n, p, {}, {}};
  for (int k = 0; k <= p; ++k) {
    u.lambda.push_back(x(k * (n + 1)));
    u.v.push_back(x.segment(k * (n + 1) + 1, n));
  }
  return u;
}

double max_frobenius(const MatrixSeries& coeffs) {
  double m = 0.0;
  for (const auto& a : coeffs.coeffs) m = std::max(m, a.norm());
  return m;
}

}  // namespace

CVector cheb_residual(const CVector& x, const MatrixSeries& coeffs) {
  const auto u = split(x, coeffs);
  const Eigen::Index n = u.n;
  const int p = u.p;
  CVector r = CVector::Zero(x.size());
  for (int i = 0; i <= p; ++i) {
    const CMatrix& ai = coeffs.coeffs[static_cast<std::size_t>(i)];
    const cplx li = u.lambda[static_cast<std::size_t>(i)];
    const CVector& vi = u.v[static_cast<std::size_t>(i)];
    for (int j = 0; j <= p; ++j) {
      const CVector& vj = u.v[static_cast<std::size_t>(j)];
      const int lo = std::abs(i - j);
      if (lo > p) continue;
      const CVector term = ai * vj - li * vj;
      const cplx dot = (vi.transpose() * vj).value();
      for (int k = lo; k <= std::min(i + j, p); k += 2) {
        r(k * (n + 1)) += dot;
        r.segment(k * (n + 1) + 1, n) += term;
      }
    }
  }
  r(0) -= 1.0;
  return r;
}

CMatrix cheb_jacobian(const CVector& x, const MatrixSeries& coeffs) {
  const auto u = split(x, coeffs);
  const Eigen::Index n = u.n;
  const int p = u.p;
  const Eigen::Index size = (p + 1) * (n + 1);
  CMatrix jac = CMatrix::Zero(size, size);
  for (int i = 0; i <= p; ++i) {
    const CMatrix& ai = coeffs.coeffs[static_cast<std::size_t>(i)];
    const cplx li = u.lambda[static_cast<std::size_t>(i)];
    for (int j = 0; j <= p; ++j) {
      const int lo = std::abs(i - j);
      if (lo > p) continue;
      const CVector& vj = u.v[static_cast<std::size_t>(j)];
      const CVector& vi = u.v[static_cast<std::size_t>(i)];
      for (int k = lo; k <= std::min(i + j, p); k += 2) {
        const Eigen::Index row = k * (n + 1);
        // d(A_i v_j - lambda_i v_j)/d v_j and d/d lambda_i
        auto block = jac.block(row + 1, j * (n + 1) + 1, n, n);
        block += ai;
        block.diagonal().array() -= li;
        jac.block(row + 1, i * (n + 1), n, 1) -= vj;
        jac.block(row, j * (n + 1) + 1, 1, n) += vi.transpose();
        jac.block(row, i * (n + 1) + 1, 1, n) += vj.transpose();
      }
    }
  }
  return jac;
}

EigenPairSeries newton_refine(const CVector& x0, const MatrixSeries& coeffs, double tol,
                              int max_iter) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "Newton tolerance must be positive");
  const Eigen::Index n = coeffs.coeffs.at(0).rows();
  const double threshold = tol * (1.0 + max_frobenius(coeffs));
  CVector x = x0;
  CVector best = x0;
  double best_norm = std::numeric_limits<double>::infinity();
  std::vector<double> history;

  auto finish = [&](const CVector& xf, int iterations) {
    EigenPairSeries s = unpack(xf, n, coeffs.basis);
    s.diagnostics.newton_iterations = iterations;
    s.diagnostics.residual_history = history;
    s.diagnostics.residual_norm = history.empty() ? 0.0 : *std::min_element(history.begin(), history.end());
    return s;
  };

  for (int iter = 0;; ++iter) {
    const CVector r = cheb_residual(x, coeffs);
    const double norm = r.cwiseAbs().maxCoeff();
    history.push_back(norm);
    if (!std::isfinite(norm)) break;
    if (norm < best_norm) {
      best_norm = norm;
      best = x;
    }
    if (norm <= threshold) return finish(x, iter);
    if (iter >= max_iter) break;

    const CMatrix jac = cheb_jacobian(x, coeffs);
    const Eigen::PartialPivLU<CMatrix> lu(jac);
    const auto diag = lu.matrixLU().diagonal().cwiseAbs();
    if (diag.minCoeff() < 1e-14 * std::max(1.0, diag.maxCoeff())) {
      throw Error(ErrorKind::SingularJacobian,
                  "Jacobian singular at Newton iteration " + std::to_string(iter) +
                      " (smallest pivot " + std::to_string(diag.minCoeff()) + ")");
    }
    x -= lu.solve(r);
  }
  throw NewtonFailure("Newton did not reach residual " + std::to_string(threshold) + " in " +
                          std::to_string(max_iter) + " iterations (best " +
                          std::to_string(best_norm) + ")",
                      finish(best, max_iter));
}

// ---------------------------------------------------------------------------

namespace {

EigenPairSeries refine_pair(const MatrixSeries& coeffs, const EigenDecomposition& dec,
                            std::size_t index, const ChebOptions& options) {
  const CVector x0 = warm_start(coeffs, dec, index);
  auto series = newton_refine(x0, coeffs, options.newton_tol, options.newton_max_iter);
  series.diagnostics.index = index;
  return series;
}

}  // namespace

EigenPairSeries cheb_expand_eigenpair(const ParametricProblem& problem, double mu1, double mu2,
                                      int order, std::size_t index, const ChebOptions& options) {
  const auto coeffs =
      project_matrix_coeffs(problem, mu1, mu2, order, options.quadrature_m, options.policy);
  const auto dec = eigen_all(coeffs.coeffs[0], problem.hermitian());
  return refine_pair(coeffs, dec, index, options);
}

std::vector<PairOutcome> cheb_expand_all(const ParametricProblem& problem, double mu1, double mu2,
                                         int order, const ChebOptions& options) {
  const auto coeffs =
      project_matrix_coeffs(problem, mu1, mu2, order, options.quadrature_m, options.policy);
  const auto dec = eigen_all(coeffs.coeffs[0], problem.hermitian());
  const auto count = static_cast<long>(dec.size());
  std::vector<PairOutcome> outcomes(dec.size());

#pragma omp parallel for schedule(dynamic) if (options.policy == ExecPolicy::Parallel)
  for (long i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    outcomes[idx].index = idx;
    try {
      outcomes[idx].series = refine_pair(coeffs, dec, idx, options);
    } catch (const Error& e) {
      outcomes[idx].error = e;
    }
  }
  flag_collisions(outcomes);
  return outcomes;
}

std::size_t flag_collisions(std::vector<PairOutcome>& outcomes, double tol) {
  constexpr double probes[] = {-0.8, -0.4, 0.0, 0.4, 0.8};
  auto probe_values = [&](const EigenPairSeries& s) {
    std::vector<cplx> vals;
    const auto lam = s.eigenvalue_series();
    for (double t : probes) {
      const double mu = s.basis.is_taylor() ? s.basis.mu0() + 0.1 * t : s.basis.from_unit(t);
      vals.push_back(evaluate(lam, mu).value);
    }
    return vals;
  };
  std::vector<std::vector<cplx>> values(outcomes.size());
  for (std::size_t a = 0; a < outcomes.size(); ++a) {
    if (outcomes[a].ok()) values[a] = probe_values(*outcomes[a].series);
  }
  std::size_t flagged = 0;
  for (std::size_t a = 0; a < outcomes.size(); ++a) {
    for (std::size_t b = a + 1; b < outcomes.size(); ++b) {
      if (!outcomes[a].ok() || !outcomes[b].ok()) continue;
      bool same = true;
      for (std::size_t q = 0; q < values[a].size() && same; ++q) {
        same = std::abs(values[a][q] - values[b][q]) <= tol * std::max(1.0, std::abs(values[a][q]));
      }
      if (same) {
        for (auto* s : {&*outcomes[a].series, &*outcomes[b].series}) {
          if (!s->diagnostics.collision) ++flagged;
          s->diagnostics.collision = true;
        }
      }
    }
  }
  return flagged;
}

}  // namespace pevp
