#include "pevp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "pevp/error.hpp"
#include "pevp/linalg.hpp"

namespace pevp {

bool ParameterDomain::contains(double mu) const {
  if (!std::isfinite(mu) || mu < lo || mu > hi) return false;
  return std::find(excluded.begin(), excluded.end(), mu) == excluded.end();
}

std::string ParameterDomain::describe() const {
  std::ostringstream os;
  os << "[" << lo << ", " << hi << "]";
  for (double x : excluded) os << " \\ {" << x << "}";
  return os.str();
}

ParametricProblem::ParametricProblem(std::string name, Eigen::Index n, bool hermitian,
                                     ParameterDomain domain, Evaluator eval,
                                     DerivativeEvaluator derivs)
    : name_(std::move(name)),
      n_(n),
      hermitian_(hermitian),
      domain_(std::move(domain)),
      eval_(std::move(eval)),
      derivs_(std::move(derivs)) {
  if (n_ < 1) throw Error(ErrorKind::InvalidArgument, "problem dimension must be positive");
}

void ParametricProblem::require_admissible(double mu) const {
  if (!domain_.contains(mu)) {
    throw Error(ErrorKind::Domain, "mu = " + std::to_string(mu) + " is outside the domain " +
                                       domain_.describe() + " of problem '" + name_ + "'");
  }
}

CMatrix ParametricProblem::eval_at(double mu) const {
  require_admissible(mu);
  return eval_(mu);
}

std::vector<CMatrix> ParametricProblem::derivs_at(double mu0, int order) const {
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "derivative order must be nonnegative");
  require_admissible(mu0);
  auto out = derivs_(mu0, order);
  if (static_cast<int>(out.size()) < order + 1) {
    throw Error(ErrorKind::MissingDerivative,
                "problem '" + name_ + "' provides no derivative of order " +
                    std::to_string(out.size()));
  }
  out.resize(static_cast<std::size_t>(order) + 1);
  return out;
}

MatrixSeries ParametricProblem::taylor_series(double mu0, int order) const {
  return {SeriesBasis::taylor(mu0), derivs_at(mu0, order)};
}

// ---------------------------------------------------------------------------

ParametricProblem make_torus_kernel(Eigen::Index n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "torus kernel needs n >= 2");
  using std::numbers::pi;
  Eigen::MatrixX3d pts(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double theta = static_cast<double>(i + 1) / static_cast<double>(n);
    const double r = 5.0 + std::cos(4.0 * pi * theta);
    pts(i, 0) = std::cos(2.0 * pi * theta) * r;
    pts(i, 1) = std::sin(2.0 * pi * theta) * r;
    pts(i, 2) = std::sin(4.0 * pi * theta);
  }
  auto dist = std::make_shared<Eigen::MatrixXd>(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) (*dist)(i, j) = (pts.row(i) - pts.row(j)).norm();
  }

  auto eval = [dist](double mu) -> CMatrix {
    return (-mu * dist->array()).exp().matrix().cast<cplx>();
  };
  auto derivs = [dist](double mu0, int order) {
    std::vector<CMatrix> out;
    out.reserve(static_cast<std::size_t>(order) + 1);
    Eigen::MatrixXd term = (-mu0 * dist->array()).exp().matrix();
    for (int k = 0; k <= order; ++k) {
      out.push_back(term.cast<cplx>());
      term = (term.array() * (-dist->array())).matrix();
    }
    return out;
  };
  return ParametricProblem("example1", n, true, ParameterDomain{}, eval, derivs);
}

ParametricProblem make_spring_chain(Eigen::Index n) {
  if (n < 4 || n % 2 != 0) {
    throw Error(ErrorKind::InvalidArgument, "spring chain needs an even n >= 4");
  }
  auto stiffness = std::make_shared<CMatrix>(CMatrix::Zero(n, n));
  for (Eigen::Index i = 0; i < n; ++i) {
    (*stiffness)(i, i) = 2.0;
    if (i + 1 < n) {
      (*stiffness)(i, i + 1) = -1.0;
      (*stiffness)(i + 1, i) = -1.0;
    }
  }
  // 0-based rows of the two middle masses (rows n/2 and n/2 + 1 1-based).
  const Eigen::Index r0 = n / 2 - 1;
  const Eigen::Index r1 = n / 2;

  auto eval = [stiffness, r0, r1](double mu) -> CMatrix {
    CMatrix a = *stiffness;
    a.row(r0) /= mu;
    a.row(r1) /= mu;
    return a;
  };
  auto derivs = [stiffness, r0, r1, n](double mu0, int order) {
    std::vector<CMatrix> out;
    out.reserve(static_cast<std::size_t>(order) + 1);
    CMatrix a0 = *stiffness;
    a0.row(r0) /= mu0;
    a0.row(r1) /= mu0;
    out.push_back(std::move(a0));
    // d^k/dmu^k mu^{-1} = (-1)^k k! mu^{-(k+1)}
    double factor = 1.0 / mu0;
    for (int k = 1; k <= order; ++k) {
      factor *= -static_cast<double>(k) / mu0;
      CMatrix ak = CMatrix::Zero(n, n);
      ak.row(r0) = stiffness->row(r0) * factor;
      ak.row(r1) = stiffness->row(r1) * factor;
      out.push_back(std::move(ak));
    }
    return out;
  };
  ParameterDomain domain;
  domain.excluded = {0.0};
  return ParametricProblem("example2", n, false, domain, eval, derivs);
}

ParametricProblem make_jordan(Eigen::Index n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "Jordan block needs n >= 2");
  auto base = std::make_shared<CMatrix>(CMatrix::Identity(n, n));
  for (Eigen::Index i = 0; i + 1 < n; ++i) (*base)(i, i + 1) = 1.0;

  auto eval = [base, n](double mu) -> CMatrix {
    CMatrix a = *base;
    a(n - 1, 0) = mu;
    return a;
  };
  auto derivs = [eval, n](double mu0, int order) {
    std::vector<CMatrix> out;
    out.push_back(eval(mu0));
    for (int k = 1; k <= order; ++k) {
      CMatrix ak = CMatrix::Zero(n, n);
      if (k == 1) ak(n - 1, 0) = 1.0;
      out.push_back(std::move(ak));
    }
    return out;
  };
  return ParametricProblem("example3", n, false, ParameterDomain{}, eval, derivs);
}

std::vector<cplx> jordan_eigenvalues(Eigen::Index n, double mu) {
  using std::numbers::pi;
  std::vector<cplx> roots;
  roots.reserve(static_cast<std::size_t>(n));
  const double nd = static_cast<double>(n);
  const double radius = std::pow(std::abs(mu), 1.0 / nd);
  // mu > 0: radius * n-th roots of unity; mu < 0: rotate by pi / n.
  const double offset = mu < 0.0 ? pi / nd : 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double angle = offset + 2.0 * pi * static_cast<double>(k) / nd;
    roots.push_back(1.0 + std::polar(radius, angle));
  }
  std::sort(roots.begin(), roots.end(), spectral_order);
  return roots;
}

// ---------------------------------------------------------------------------

namespace {

CMatrix central_difference(const ParametricProblem& p, double mu0, int order, double h) {
  auto f = [&](double d) { return p.eval_at(mu0 + d); };
  switch (order) {
    case 1: return (f(h) - f(-h)) / (2.0 * h);
    case 2: return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
    case 3: return (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h);
    default: break;
  }
  throw Error(ErrorKind::InvalidArgument, "finite differences implemented up to order 3");
}

}  // namespace

std::vector<DerivativeCheck> derivative_self_test(const ParametricProblem& problem, double mu0,
                                                  int max_order, double tol) {
  const auto exact = problem.derivs_at(mu0, max_order);
  std::vector<DerivativeCheck> checks;
  const double span = std::max(1.0, std::abs(mu0));
  for (int k = 1; k <= max_order; ++k) {
    const double h = (k == 1 ? 1e-4 : 1e-3) * span;
    // Richardson: two step sizes cancel the O(h^2) term.
    const CMatrix fd = (4.0 * central_difference(problem, mu0, k, h / 2.0) -
                        central_difference(problem, mu0, k, h)) /
                       3.0;
    const CMatrix& ak = exact[static_cast<std::size_t>(k)];
    const double scale = std::max({ak.cwiseAbs().maxCoeff(),
                                   exact[0].cwiseAbs().maxCoeff(), 1e-300});
    const double err = (fd - ak).cwiseAbs().maxCoeff() / scale;
    checks.push_back({k, err, err <= tol});
  }
  return checks;
}

}  // namespace pevp
