#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pevp/types.hpp"

namespace pevp {

/// Basis of a truncated series in the parameter mu.
///
/// Taylor: coefficient k is the k-th derivative at mu0, so the represented
/// function is sum_k c_k (mu - mu0)^k / k!.
///
/// ChebyshevU: the represented function is sum_k c_k U_k(s(mu)) with the
/// unnormalized second-kind polynomials (U_0 = 1, U_1 = 2s) and the affine
/// map s(mu) = (2 mu - mu2 - mu1) / (mu2 - mu1) onto [-1, 1].
class SeriesBasis {
 public:
  enum class Kind { Taylor, ChebyshevU };

  static SeriesBasis taylor(double mu0);
  static SeriesBasis chebyshev(double mu1, double mu2);

  Kind kind() const noexcept { return kind_; }
  bool is_taylor() const noexcept { return kind_ == Kind::Taylor; }
  double mu0() const;
  double mu1() const;
  double mu2() const;

  /// Affine map onto [-1, 1]; ChebyshevU only.
  double to_unit(double mu) const;
  /// Inverse of to_unit.
  double from_unit(double s) const;
  /// True when mu lies in the approximation interval (always true for Taylor).
  bool contains(double mu) const;

  bool operator==(const SeriesBasis&) const = default;

 private:
  SeriesBasis(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;
  double b_;
};

template <class T>
struct Series {
  SeriesBasis basis;
  std::vector<T> coeffs;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

using ScalarSeries = Series<cplx>;
using VectorSeries = Series<CVector>;
using MatrixSeries = Series<CMatrix>;

/// Value of a series at a point; `extrapolated` is set when mu lies outside
/// the Chebyshev interval.
template <class T>
struct SeriesValue {
  T value;
  bool extrapolated = false;
};

cplx eval_taylor(const ScalarSeries& series, double mu);
CVector eval_taylor(const VectorSeries& series, double mu);
CMatrix eval_taylor(const MatrixSeries& series, double mu);

cplx eval_chebU(const ScalarSeries& series, double mu);
CVector eval_chebU(const VectorSeries& series, double mu);
CMatrix eval_chebU(const MatrixSeries& series, double mu);

template <class T>
SeriesValue<T> evaluate(const Series<T>& series, double mu) {
  if (series.basis.is_taylor()) return {eval_taylor(series, mu), false};
  return {eval_chebU(series, mu), !series.basis.contains(mu)};
}

/// U_k(s) for k = 0..order by the three-term recurrence.
std::vector<double> chebyshev_u_values(int order, double s);

/// Degrees k with U_i U_j = sum_k U_k: {i+j, i+j-2, ..., |i-j|}.
std::vector<int> u_product_degrees(int i, int j);

/// Eigenpair path approximation in one basis plus how it was obtained.
struct EigenPairSeries {
  struct Diagnostics {
    std::size_t index = 0;                 // position in the sorted spectrum
    double residual_norm = 0.0;            // final bordered / Newton residual
    int newton_iterations = 0;
    std::vector<double> residual_history;  // Newton only
    std::vector<double> order_residuals;   // Taylor/warm start, per order
    bool collision = false;
  };

  SeriesBasis basis;
  std::vector<cplx> lambda;
  std::vector<CVector> vectors;
  Diagnostics diagnostics;

  int order() const { return static_cast<int>(lambda.size()) - 1; }
  Eigen::Index dimension() const {
    return vectors.empty() ? 0 : vectors.front().size();
  }
  ScalarSeries eigenvalue_series() const { return {basis, lambda}; }
  VectorSeries eigenvector_series() const { return {basis, vectors}; }
};

nlohmann::json to_json(const SeriesBasis& basis);
SeriesBasis basis_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ScalarSeries& s);
nlohmann::json to_json(const VectorSeries& s);
nlohmann::json to_json(const MatrixSeries& s);
ScalarSeries scalar_series_from_json(const nlohmann::json& j);
VectorSeries vector_series_from_json(const nlohmann::json& j);
MatrixSeries matrix_series_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EigenPairSeries& s);
EigenPairSeries eigenpair_series_from_json(const nlohmann::json& j);

}  // namespace pevp
