#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pevp/error.hpp"
#include "pevp/linalg.hpp"
#include "pevp/problem.hpp"
#include "pevp/taylor.hpp"
#include "test_util.hpp"

using namespace pevp;
using testutil::random_hermitian;
using testutil::random_matrix;
using testutil::random_vector;

namespace {

cplx lambda_at(const EigenPairSeries& s, double mu) {
  return eval_taylor(ScalarSeries{s.basis, s.lambda}, mu);
}

CVector vector_at(const EigenPairSeries& s, double mu) {
  return eval_taylor(VectorSeries{s.basis, s.vectors}, mu);
}

double eig_residual(const ParametricProblem& p, const EigenPairSeries& s, double mu) {
  const CVector v = vector_at(s, mu);
  return (p.eval_at(mu) * v - lambda_at(s, mu) * v).norm();
}

cplx tdot(const CVector& a, const CVector& b) { return (a.array() * b.array()).sum(); }

}  // namespace

TEST_CASE("pascal_triangle") {
  const auto t = pascal_triangle(10);
  for (int k = 0; k <= 10; ++k) {
    for (int l = 0; l <= k; ++l) CHECK(t[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] == oracle::binomial(k, l));
  }
}

TEST_CASE("taylor_rhs against hand-expanded orders 1 to 3") {
  std::mt19937 rng(71);
  const Eigen::Index n = 4;
  std::vector<CMatrix> a;
  for (int k = 0; k <= 3; ++k) a.push_back(random_matrix(rng, n, n));
  std::vector<CVector> v;
  for (int k = 0; k < 3; ++k) v.push_back(random_vector(rng, n));
  const std::vector<cplx> lam{cplx(0.3, 0.1), cplx(-1.0, 2.0), cplx(0.5, -0.7)};

  const auto r1 = taylor_rhs(1, a, v, lam, Pairing::Transpose);
  CHECK(r1.z == cplx(0.0));
  CHECK((r1.y - a[1] * v[0]).norm() < 1e-14);

  const auto r2 = taylor_rhs(2, a, v, lam, Pairing::Transpose);
  CHECK(std::abs(r2.z + tdot(v[1], v[1])) < 1e-14);
  CHECK((r2.y - (a[2] * v[0] + 2.0 * a[1] * v[1] - 2.0 * lam[1] * v[1])).norm() < 1e-13);

  const auto r3 = taylor_rhs(3, a, v, lam, Pairing::Transpose);
  const cplx z3 = -3.0 * tdot(v[1], v[2]);
  CHECK(std::abs(r3.z - z3) < 1e-13);
  const CVector y3 = a[3] * v[0] + 3.0 * a[2] * v[1] + 3.0 * a[1] * v[2] - 3.0 * lam[1] * v[2] -
                     3.0 * lam[2] * v[1];
  CHECK((r3.y - y3).norm() < 1e-12);

  const auto h3 = taylor_rhs(3, a, v, lam, Pairing::ConjugateTranspose);
  CHECK(std::abs(h3.z + 3.0 * v[1].dot(v[2]).real()) < 1e-13);

  const auto u3 = taylor_rhs(3, a, v, lam, Pairing::Transpose, RecurrenceWeights::Unit);
  const CVector yu = a[3] * v[0] + a[2] * v[1] + a[1] * v[2] - lam[1] * v[2] - lam[2] * v[1];
  CHECK((u3.y - yu).norm() < 1e-12);
  CHECK(std::abs(u3.z + tdot(v[1], v[2])) < 1e-13);

  CHECK_THROWS_AS(taylor_rhs(0, a, v, lam, Pairing::Transpose), Error);
  CHECK_THROWS_AS(taylor_rhs(4, a, v, lam, Pairing::Transpose), Error);
}

TEST_CASE("scalar problem A(mu) = [mu]") {
  const ParametricProblem p("scalar", 1, true, {},
                            [](double mu) { return CMatrix::Constant(1, 1, mu); },
                            [](double mu, int order) {
                              std::vector<CMatrix> d(static_cast<std::size_t>(order) + 1, CMatrix::Zero(1, 1));
                              d[0](0, 0) = mu;
                              if (order >= 1) d[1](0, 0) = 1.0;
                              return d;
                            });
  const auto s = taylor_expand_eigenpair(p, 0.4, 5, 0);
  CHECK(std::abs(s.lambda[0] - 0.4) < 1e-15);
  CHECK(std::abs(s.lambda[1] - 1.0) < 1e-15);
  for (int k = 2; k <= 5; ++k) CHECK(std::abs(s.lambda[static_cast<std::size_t>(k)]) < 1e-15);
  CHECK(std::abs(std::abs(s.vectors[0](0)) - 1.0) < 1e-15);
  for (int k = 1; k <= 5; ++k) CHECK(s.vectors[static_cast<std::size_t>(k)].norm() < 1e-15);
}

TEST_CASE("uniform shift A0 + (mu - mu0) I") {
  std::mt19937 rng(81);
  const CMatrix a0 = random_hermitian(rng, 6);
  const auto p = testutil::affine_problem(a0, CMatrix::Identity(6, 6), 0.3, true);
  for (const auto& o : taylor_expand_all(p, 0.3, 4)) {
    REQUIRE(o.ok());
    CHECK(std::abs(o.series->lambda[1] - 1.0) < 1e-13);
    for (int k = 1; k <= 4; ++k) CHECK(o.series->vectors[static_cast<std::size_t>(k)].norm() < 1e-13);
    for (int k = 2; k <= 4; ++k) CHECK(std::abs(o.series->lambda[static_cast<std::size_t>(k)]) < 1e-13);
  }
}

TEST_CASE("Jordan n = 2 matches derivatives of 1 + sqrt(mu)") {
  const auto s = taylor_expand_eigenpair(make_jordan(2), 0.2, 5, 0);
  const double mu = 0.2;
  // d^k/dmu^k mu^(1/2) = (1/2)(1/2 - 1)...(1/2 - k + 1) mu^(1/2 - k)
  double falling = 1.0;
  CHECK(std::abs(s.lambda[0] - (1.0 + std::sqrt(mu))) < 1e-14);
  for (int k = 1; k <= 5; ++k) {
    falling *= 0.5 - (k - 1);
    const double want = falling * std::pow(mu, 0.5 - k);
    CHECK(std::abs(s.lambda[static_cast<std::size_t>(k)] - want) <= 1e-10 * std::abs(want));
  }
  CHECK(std::abs(s.lambda[1] - 1.0 / (2.0 * std::sqrt(0.2))) < 1e-13);
  CHECK_THROWS_AS(taylor_expand_eigenpair(make_jordan(2), 0.0, 3, 0), Error);
}

TEST_CASE("torus kernel: eigenvalue derivatives sum to the trace of A^(k)") {
  const auto p = make_torus_kernel(8);
  const int order = 6;
  const auto all = taylor_expand_all(p, 0.2, order);
  const auto d = p.derivs_at(0.2, order);
  for (int k = 0; k <= order; ++k) {
    cplx sum = 0.0;
    for (const auto& o : all) {
      REQUIRE(o.ok());
      sum += o.series->lambda[static_cast<std::size_t>(k)];
    }
    const cplx tr = d[static_cast<std::size_t>(k)].trace();
    CHECK(std::abs(sum - tr) <= 1e-9 * std::max(1.0, std::abs(tr)));
  }
}

TEST_CASE("first derivative against finite differences of direct eigenvalues") {
  for (const auto& [p, mu0] : {std::pair{make_spring_chain(8), 0.8}, std::pair{make_torus_kernel(8), 0.2}}) {
    const auto all = taylor_expand_all(p, mu0, 2);
    for (const auto& o : all) {
      REQUIRE(o.ok());
      const std::size_t i = o.index;
      const auto f = [&](double mu) { return eigenvalues_only(p.eval_at(mu), p.hermitian())[i].real(); };
      const double fd = oracle::central_diff(f, mu0, 1e-4);
      CHECK(std::abs(o.series->lambda[1].real() - fd) <= 1e-7 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("normalization is preserved order by order") {
  SUBCASE("Hermitian: derivatives of v^H v vanish") {
    const auto all = taylor_expand_all(make_torus_kernel(8), 0.2, 6);
    for (const auto& o : all) {
      const auto& v = o.series->vectors;
      CHECK(std::abs(v[0].squaredNorm() - 1.0) < 1e-14);
      for (int k = 1; k <= 6; ++k) {
        cplx sum = 0.0;
        for (int l = 0; l <= k; ++l) {
          sum += oracle::binomial(k, l) * v[static_cast<std::size_t>(k - l)].dot(v[static_cast<std::size_t>(l)]);
        }
        CHECK(std::abs(sum) <= 1e-9 * std::max(1.0, v[static_cast<std::size_t>(k)].norm()));
      }
    }
  }
  SUBCASE("general: border rows b^T v_k equal z_k") {
    const auto p = make_spring_chain(8);
    const auto s = taylor_expand_eigenpair(p, 0.8, 5, 2);
    const auto d = p.derivs_at(0.8, 5);
    for (int k = 1; k <= 5; ++k) {
      const auto rhs = taylor_rhs(k, d, s.vectors, s.lambda, Pairing::Transpose);
      const cplx got = tdot(s.vectors[0], s.vectors[static_cast<std::size_t>(k)]);
      CHECK(std::abs(got - rhs.z) <= 1e-12 * std::max(1.0, std::abs(rhs.z)));
    }
    for (double r : s.diagnostics.order_residuals) CHECK(r < 1e-10);
  }
}

TEST_CASE("rotating v0 rotates every vector coefficient") {
  const auto p = make_torus_kernel(8);
  const auto dec = eigen_all(p.eval_at(0.2), true);
  const auto ser = p.taylor_series(0.2, 5);
  const cplx gamma = std::polar(1.0, -1.1);
  const auto a = taylor_expand_from(ser, dec.values[1], dec.vectors[1], Pairing::ConjugateTranspose);
  const auto b = taylor_expand_from(ser, dec.values[1], gamma * dec.vectors[1], Pairing::ConjugateTranspose);
  for (int k = 0; k <= 5; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    CHECK(std::abs(a.lambda[uk] - b.lambda[uk]) <= 1e-10 * std::max(1.0, std::abs(a.lambda[uk])));
    CHECK((gamma * a.vectors[uk] - b.vectors[uk]).norm() <= 1e-8 * std::max(1.0, a.vectors[uk].norm()));
  }
}

TEST_CASE("truncated residual decays like t^(p+1)") {
  std::mt19937 rng(91);
  const CMatrix a0 = random_hermitian(rng, 5);
  const CMatrix a1 = random_hermitian(rng, 5);
  const auto p = testutil::affine_problem(a0, a1, 0.0, true);
  const int order = 3;
  const auto s = taylor_expand_eigenpair(p, 0.0, order, 0);
  const double t = 0.02;
  const double r1 = eig_residual(p, s, t);
  const double r2 = eig_residual(p, s, t / 2);
  const double rate = std::log2(r1 / r2);
  CHECK(rate == doctest::Approx(order + 1).epsilon(0.1));
}

TEST_CASE("single-precision E agrees with the double path to single accuracy") {
  const auto p = make_torus_kernel(8);
  const auto dbl = taylor_expand_eigenpair(p, 0.2, 6, 0);
  const auto sgl = taylor_expand_eigenpair(p, 0.2, 6, 0, {.single_precision_e = true});
  const double diff = std::abs(lambda_at(dbl, 0.25) - lambda_at(sgl, 0.25));
  CHECK(diff > 0.0);
  CHECK(diff < 1e-4);
}

TEST_CASE("serial and parallel batch expansions are identical") {
  const auto p = make_spring_chain(8);
  const auto par = taylor_expand_all(p, 0.8, 6, {.policy = ExecPolicy::Parallel});
  const auto ser = taylor_expand_all(p, 0.8, 6, {.policy = ExecPolicy::Serial});
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    REQUIRE(par[i].ok());
    CHECK(par[i].series->lambda == ser[i].series->lambda);
    for (std::size_t k = 0; k < par[i].series->vectors.size(); ++k) {
      CHECK(par[i].series->vectors[k] == ser[i].series->vectors[k]);
    }
  }
}

TEST_CASE("non-simple eigenvalues fail per pair") {
  const auto out = taylor_expand_all(make_torus_kernel(8), 0.0, 3);
  std::size_t failed = 0;
  for (const auto& o : out) {
    if (!o.ok()) {
      ++failed;
      CHECK(o.error->kind() == ErrorKind::NonSimpleEigenvalue);
    }
  }
  CHECK(failed >= 7);
}
