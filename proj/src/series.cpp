#include "pevp/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "pevp/error.hpp"

namespace pevp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::NonSimpleEigenvalue: return "non-simple-eigenvalue";
    case ErrorKind::MissingDerivative: return "missing-derivative";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::SingularJacobian: return "singular-jacobian";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::DegenerateEvaluation: return "degenerate-evaluation";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

SeriesBasis SeriesBasis::taylor(double mu0) {
  if (!std::isfinite(mu0)) {
    throw Error(ErrorKind::InvalidArgument, "Taylor expansion point must be finite");
  }
  return SeriesBasis(Kind::Taylor, mu0, mu0);
}

SeriesBasis SeriesBasis::chebyshev(double mu1, double mu2) {
  if (!std::isfinite(mu1) || !std::isfinite(mu2) || !(mu2 - mu1 > 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "Chebyshev interval must satisfy mu1 < mu2, got [" +
                    std::to_string(mu1) + ", " + std::to_string(mu2) + "]");
  }
  return SeriesBasis(Kind::ChebyshevU, mu1, mu2);
}

double SeriesBasis::mu0() const {
  if (kind_ != Kind::Taylor) throw Error(ErrorKind::InvalidArgument, "mu0 of a Chebyshev basis");
  return a_;
}

double SeriesBasis::mu1() const {
  if (kind_ != Kind::ChebyshevU) throw Error(ErrorKind::InvalidArgument, "interval of a Taylor basis");
  return a_;
}

double SeriesBasis::mu2() const {
  if (kind_ != Kind::ChebyshevU) throw Error(ErrorKind::InvalidArgument, "interval of a Taylor basis");
  return b_;
}

double SeriesBasis::to_unit(double mu) const {
  return (2.0 * mu - b_ - a_) / (b_ - a_);
}

double SeriesBasis::from_unit(double s) const {
  return 0.5 * ((b_ - a_) * s + b_ + a_);
}

bool SeriesBasis::contains(double mu) const {
  return kind_ == Kind::Taylor || (mu >= a_ && mu <= b_);
}

namespace {

void require_finite(double mu) {
  if (!std::isfinite(mu)) {
    throw Error(ErrorKind::InvalidArgument, "series evaluated at a non-finite point");
  }
}

template <class T>
void require_nonempty(const Series<T>& s) {
  if (s.coeffs.empty()) throw Error(ErrorKind::InvalidArgument, "empty series");
}

// sum_k c_k t^k / k! = c_0 + t/1 (c_1 + t/2 (c_2 + ...)), so the factorials
// never materialize.
template <class T>
T taylor_horner(const Series<T>& s, double mu) {
  require_finite(mu);
  require_nonempty(s);
  if (!s.basis.is_taylor()) {
    throw Error(ErrorKind::InvalidArgument, "eval_taylor on a Chebyshev series");
  }
  const double t = mu - s.basis.mu0();
  const int p = s.order();
  T acc = s.coeffs[static_cast<std::size_t>(p)];
  for (int k = p - 1; k >= 0; --k) {
    acc = s.coeffs[static_cast<std::size_t>(k)] + acc * (t / static_cast<double>(k + 1));
  }
  return acc;
}

template <class T>
T clenshaw_u(const Series<T>& s, double mu) {
  require_finite(mu);
  require_nonempty(s);
  if (s.basis.is_taylor()) {
    throw Error(ErrorKind::InvalidArgument, "eval_chebU on a Taylor series");
  }
  const double two_s = 2.0 * s.basis.to_unit(mu);
  const int p = s.order();
  T b1 = s.coeffs[static_cast<std::size_t>(p)];
  T b2 = b1 * 0.0;
  for (int k = p - 1; k >= 0; --k) {
    T b0 = s.coeffs[static_cast<std::size_t>(k)] + b1 * two_s - b2;
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  return b1;
}

}  // namespace

cplx eval_taylor(const ScalarSeries& s, double mu) { return taylor_horner(s, mu); }
CVector eval_taylor(const VectorSeries& s, double mu) { return taylor_horner(s, mu); }
CMatrix eval_taylor(const MatrixSeries& s, double mu) { return taylor_horner(s, mu); }

cplx eval_chebU(const ScalarSeries& s, double mu) { return clenshaw_u(s, mu); }
CVector eval_chebU(const VectorSeries& s, double mu) { return clenshaw_u(s, mu); }
CMatrix eval_chebU(const MatrixSeries& s, double mu) { return clenshaw_u(s, mu); }

std::vector<double> chebyshev_u_values(int order, double s) {
  std::vector<double> u(static_cast<std::size_t>(std::max(order, 0)) + 1);
  u[0] = 1.0;
  if (order >= 1) u[1] = 2.0 * s;
  for (int k = 1; k < order; ++k) {
    u[static_cast<std::size_t>(k + 1)] =
        2.0 * s * u[static_cast<std::size_t>(k)] - u[static_cast<std::size_t>(k - 1)];
  }
  return u;
}

std::vector<int> u_product_degrees(int i, int j) {
  if (i < 0 || j < 0) {
    throw Error(ErrorKind::InvalidArgument, "u_product_degrees needs nonnegative degrees");
  }
  std::vector<int> degrees;
  degrees.reserve(static_cast<std::size_t>(std::min(i, j)) + 1);
  for (int k = i + j; k >= std::abs(i - j); k -= 2) degrees.push_back(k);
  return degrees;
}

// ---------------------------------------------------------------------------
// JSON

using nlohmann::json;

namespace {

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorKind::Config, "complex value must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json vector_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

CVector vector_from(const json& j, Eigen::Index n) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw Error(ErrorKind::Config, "vector coefficient has wrong length");
  }
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_from(j[static_cast<std::size_t>(i)]);
  return v;
}

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from(const json& j, Eigen::Index n) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw Error(ErrorKind::Config, "matrix coefficient has wrong row count");
  }
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) m.row(r) = vector_from(j[static_cast<std::size_t>(r)], n).transpose();
  return m;
}

template <class T, class Emit>
json series_json(const Series<T>& s, Eigen::Index n, Emit emit) {
  json coeffs = json::array();
  for (const auto& c : s.coeffs) coeffs.push_back(emit(c));
  return json{{"basis", to_json(s.basis)}, {"n", n}, {"p", s.order()}, {"coeffs", std::move(coeffs)}};
}

void check_order(const json& j, std::size_t count) {
  const int p = j.at("p").get<int>();
  if (p < 0 || static_cast<std::size_t>(p) + 1 != count) {
    throw Error(ErrorKind::Config, "series order does not match coefficient count");
  }
}

}  // namespace

json to_json(const SeriesBasis& basis) {
  if (basis.is_taylor()) return json{{"kind", "taylor"}, {"mu0", basis.mu0()}};
  return json{{"kind", "chebyshev_u"}, {"interval", json::array({basis.mu1(), basis.mu2()})}};
}

SeriesBasis basis_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "taylor") return SeriesBasis::taylor(j.at("mu0").get<double>());
  if (kind == "chebyshev_u") {
    const auto& iv = j.at("interval");
    return SeriesBasis::chebyshev(iv.at(0).get<double>(), iv.at(1).get<double>());
  }
  throw Error(ErrorKind::Config, "unknown basis kind '" + kind + "'");
}

json to_json(const ScalarSeries& s) { return series_json(s, 1, complex_json); }
json to_json(const VectorSeries& s) {
  return series_json(s, s.coeffs.empty() ? 0 : s.coeffs[0].size(), vector_json);
}
json to_json(const MatrixSeries& s) {
  return series_json(s, s.coeffs.empty() ? 0 : s.coeffs[0].rows(), matrix_json);
}

ScalarSeries scalar_series_from_json(const json& j) {
  ScalarSeries s{basis_from_json(j.at("basis")), {}};
  for (const auto& c : j.at("coeffs")) s.coeffs.push_back(complex_from(c));
  check_order(j, s.coeffs.size());
  return s;
}

VectorSeries vector_series_from_json(const json& j) {
  VectorSeries s{basis_from_json(j.at("basis")), {}};
  const auto n = j.at("n").get<Eigen::Index>();
  for (const auto& c : j.at("coeffs")) s.coeffs.push_back(vector_from(c, n));
  check_order(j, s.coeffs.size());
  return s;
}

MatrixSeries matrix_series_from_json(const json& j) {
  MatrixSeries s{basis_from_json(j.at("basis")), {}};
  const auto n = j.at("n").get<Eigen::Index>();
  for (const auto& c : j.at("coeffs")) s.coeffs.push_back(matrix_from(c, n));
  check_order(j, s.coeffs.size());
  return s;
}

json to_json(const EigenPairSeries& s) {
  const auto& d = s.diagnostics;
  json diag{{"index", d.index},
            {"residual_norm", d.residual_norm},
            {"newton_iterations", d.newton_iterations},
            {"residual_history", d.residual_history},
            {"order_residuals", d.order_residuals},
            {"collision", d.collision}};
  return json{{"basis", to_json(s.basis)},
              {"n", s.dimension()},
              {"p", s.order()},
              {"lambda", to_json(s.eigenvalue_series()).at("coeffs")},
              {"vectors", to_json(s.eigenvector_series()).at("coeffs")},
              {"diagnostics", std::move(diag)}};
}

EigenPairSeries eigenpair_series_from_json(const json& j) {
  try {
    EigenPairSeries s{basis_from_json(j.at("basis")), {}, {}, {}};
    const auto n = j.at("n").get<Eigen::Index>();
    for (const auto& c : j.at("lambda")) s.lambda.push_back(complex_from(c));
    for (const auto& c : j.at("vectors")) s.vectors.push_back(vector_from(c, n));
    check_order(j, s.lambda.size());
    if (s.vectors.size() != s.lambda.size()) {
      throw Error(ErrorKind::Config, "eigenvalue and eigenvector series differ in length");
    }
    if (j.contains("diagnostics")) {
      const auto& d = j.at("diagnostics");
      auto& out = s.diagnostics;
      out.index = d.value("index", std::size_t{0});
      out.residual_norm = d.value("residual_norm", 0.0);
      out.newton_iterations = d.value("newton_iterations", 0);
      out.residual_history = d.value("residual_history", std::vector<double>{});
      out.order_residuals = d.value("order_residuals", std::vector<double>{});
      out.collision = d.value("collision", false);
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed eigenpair series: ") + e.what());
  }
}

}  // namespace pevp
