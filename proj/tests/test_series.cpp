#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pevp/chebyshev.hpp"
#include "pevp/error.hpp"
#include "pevp/series.hpp"
#include "test_util.hpp"

using namespace pevp;

TEST_CASE("basis maps the Chebyshev interval onto [-1, 1]") {
  const auto b = SeriesBasis::chebyshev(0.25, 1.0);
  CHECK(b.to_unit(0.25) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(b.to_unit(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.from_unit(b.to_unit(0.6)) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK_THROWS_AS(SeriesBasis::chebyshev(1.0, 1.0), Error);
  CHECK_THROWS_AS(SeriesBasis::chebyshev(2.0, 1.0), Error);
}

TEST_CASE("eval_taylor") {
  SUBCASE("degree one") {
    const ScalarSeries s{SeriesBasis::taylor(0.0), {1.0, 2.0}};
    CHECK(std::abs(eval_taylor(s, 0.5) - cplx(2.0)) < 1e-15);
  }
  SUBCASE("constant") {
    const ScalarSeries s{SeriesBasis::taylor(0.7), {cplx(3.0, -1.0)}};
    CHECK(eval_taylor(s, -12.0) == cplx(3.0, -1.0));
  }
  SUBCASE("random coefficients against direct summation") {
    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    std::vector<cplx> c;
    for (int k = 0; k <= 6; ++k) c.emplace_back(nd(rng), nd(rng));
    const ScalarSeries s{SeriesBasis::taylor(0.1), c};
    const cplx got = eval_taylor(s, 0.37);
    const cplx want = oracle::taylor_direct(c, 0.27);
    CHECK(std::abs(got - want) <= 1e-14 * std::abs(want));
  }
  SUBCASE("vector series evaluates componentwise") {
    std::mt19937 rng(8);
    std::vector<CVector> c;
    for (int k = 0; k <= 5; ++k) c.push_back(testutil::random_vector(rng, 4));
    const VectorSeries s{SeriesBasis::taylor(-0.3), c};
    const CVector v = eval_taylor(s, 0.1);
    for (Eigen::Index i = 0; i < 4; ++i) {
      std::vector<cplx> comp;
      for (const auto& ck : c) comp.push_back(ck(i));
      CHECK(std::abs(v(i) - oracle::taylor_direct(comp, 0.4)) < 1e-13);
    }
  }
  SUBCASE("non-finite mu") {
    const ScalarSeries s{SeriesBasis::taylor(0.0), {1.0}};
    CHECK_THROWS_AS(eval_taylor(s, std::nan("")), Error);
  }
}

TEST_CASE("eval_chebU") {
  const auto unit = SeriesBasis::chebyshev(-1.0, 1.0);
  CHECK(std::abs(eval_chebU(ScalarSeries{unit, {0.0, 1.0}}, 0.5) - cplx(1.0)) < 1e-15);
  CHECK(eval_chebU(ScalarSeries{unit, {cplx(2.0, 1.0)}}, 0.9) == cplx(2.0, 1.0));
  CHECK(std::abs(eval_chebU(ScalarSeries{unit, {0.0, 0.0, 1.0}}, 0.3) - cplx(-0.64)) < 1e-15);

  SUBCASE("Clenshaw matches naive summation, p <= 40, |s| <= 1.25") {
    std::mt19937 rng(11);
    std::normal_distribution<double> nd;
    std::vector<cplx> c;
    for (int k = 0; k <= 40; ++k) c.emplace_back(nd(rng), nd(rng));
    const auto b = SeriesBasis::chebyshev(2.0, 3.0);
    for (double s : {-1.25, -0.99, -0.4, 0.0, 0.31, 0.97, 1.1, 1.25}) {
      const cplx got = eval_chebU(ScalarSeries{b, c}, b.from_unit(s));
      cplx naive = 0.0;
      const auto u = chebyshev_u_values(40, s);
      for (int k = 0; k <= 40; ++k) naive += c[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(k)];
      double scale = 0.0;
      for (int k = 0; k <= 40; ++k) scale += std::abs(c[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(k)]);
      CHECK(std::abs(got - naive) <= 1e-12 * scale);
    }
  }
  SUBCASE("U values agree with sin((k+1)t)/sin(t)") {
    for (double s : {-0.9, -0.2, 0.45, 0.8}) {
      const auto u = chebyshev_u_values(15, s);
      for (int k = 0; k <= 15; ++k) {
        CHECK(u[static_cast<std::size_t>(k)] == doctest::Approx(oracle::chebyshev_u_trig(k, s)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("extrapolation is flagged") {
    const ScalarSeries s{SeriesBasis::chebyshev(0.0, 1.0), {1.0, 1.0}};
    CHECK_FALSE(evaluate(s, 0.5).extrapolated);
    CHECK(evaluate(s, 1.2).extrapolated);
  }
}

TEST_CASE("evaluation is linear in the coefficients") {
  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  std::vector<cplx> x, y, z;
  const cplx alpha(0.3, -1.2), beta(-2.0, 0.5);
  for (int k = 0; k <= 9; ++k) {
    x.emplace_back(nd(rng), nd(rng));
    y.emplace_back(nd(rng), nd(rng));
    z.push_back(alpha * x.back() + beta * y.back());
  }
  for (const auto& basis : {SeriesBasis::taylor(0.2), SeriesBasis::chebyshev(0.0, 2.0)}) {
    const double mu = 0.83;
    const cplx lhs = evaluate(ScalarSeries{basis, z}, mu).value;
    const cplx rhs = alpha * evaluate(ScalarSeries{basis, x}, mu).value +
                     beta * evaluate(ScalarSeries{basis, y}, mu).value;
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("u_product_degrees") {
  CHECK(u_product_degrees(1, 1) == std::vector<int>{2, 0});
  CHECK(u_product_degrees(0, 5) == std::vector<int>{5});
  CHECK(u_product_degrees(2, 3) == std::vector<int>{5, 3, 1});

  SUBCASE("matches polynomial multiplication for i, j <= 12") {
    for (int i = 0; i <= 12; ++i) {
      for (int j = 0; j <= 12; ++j) {
        const auto product = oracle::poly_mul(oracle::chebyshev_u_monomial(i), oracle::chebyshev_u_monomial(j));
        std::vector<double> sum(product.size(), 0.0);
        for (int k : u_product_degrees(i, j)) {
          const auto u = oracle::chebyshev_u_monomial(k);
          for (std::size_t d = 0; d < u.size(); ++d) sum[d] += u[d];
        }
        CHECK(sum == product);
      }
    }
  }
}

TEST_CASE("Gauss-Chebyshev rule is orthonormal for the U basis") {
  const int m = 64;
  const GaussChebyshevU rule(m);
  double worst = 0.0;
  for (int a = 0; a <= 30; ++a) {
    for (int b = 0; b <= 30; ++b) {
      double sum = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        sum += rule.weights[j] * oracle::chebyshev_u_trig(a, rule.nodes[j]) *
               oracle::chebyshev_u_trig(b, rule.nodes[j]);
      }
      worst = std::max(worst, std::abs(2.0 / M_PI * sum - (a == b ? 1.0 : 0.0)));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("series JSON round trip is exact") {
  std::mt19937 rng(5);
  EigenPairSeries s{SeriesBasis::chebyshev(-0.5, 2.0), {}, {}, {}};
  for (int k = 0; k <= 4; ++k) {
    s.lambda.emplace_back(std::normal_distribution<double>()(rng), 1e-300);
    s.vectors.push_back(testutil::random_vector(rng, 3));
  }
  s.diagnostics.index = 2;
  s.diagnostics.newton_iterations = 4;
  s.diagnostics.residual_history = {1e-3, 1e-8, 1e-15};
  const auto back = eigenpair_series_from_json(nlohmann::json::parse(to_json(s).dump()));
  CHECK(back.basis == s.basis);
  CHECK(back.lambda == s.lambda);
  for (std::size_t k = 0; k < s.vectors.size(); ++k) CHECK(back.vectors[k] == s.vectors[k]);
  CHECK(back.diagnostics.index == 2);
  CHECK(back.diagnostics.residual_history == s.diagnostics.residual_history);

  const auto t = SeriesBasis::taylor(0.2);
  CHECK(basis_from_json(to_json(t)) == t);
  CHECK_THROWS_AS(eigenpair_series_from_json(nlohmann::json::parse(R"({"basis":{"kind":"x"}})")), Error);
}
