#include "pevp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "pevp/error.hpp"

namespace pevp {

bool spectral_order(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

void fix_phase(CVector& v) {
  if (v.size() == 0) return;
  const double peak = v.cwiseAbs().maxCoeff();
  if (peak == 0.0) return;
  Eigen::Index pos = 0;
  while (std::abs(v(pos)) < peak * (1.0 - 1e-10)) ++pos;
  const cplx rot = std::conj(v(pos)) / std::abs(v(pos));
  v *= rot;
  v(pos) = cplx(v(pos).real(), 0.0);
}

namespace {

void require_square_finite(const CMatrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw Error(ErrorKind::InvalidArgument, "eigen_all needs a nonempty square matrix");
  }
  if (!a.allFinite()) throw Error(ErrorKind::InvalidArgument, "matrix has non-finite entries");
}

std::vector<std::size_t> spectral_permutation(const std::vector<cplx>& values) {
  std::vector<std::size_t> perm(values.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) {
    return spectral_order(values[x], values[y]);
  });
  return perm;
}

// Eigenvector of upper-triangular T for diagonal position j; near-equal
// diagonal entries are perturbed to a tiny positive gap as in LAPACK trevc.
CVector triangular_eigenvector(const CMatrix& t, Eigen::Index j, double small) {
  CVector y = CVector::Zero(t.rows());
  y(j) = 1.0;
  for (Eigen::Index i = j - 1; i >= 0; --i) {
    cplx acc = 0.0;
    for (Eigen::Index k = i + 1; k <= j; ++k) acc += t(i, k) * y(k);
    cplx den = t(j, j) - t(i, i);
    if (std::abs(den) < small) den = small;
    y(i) = acc / den;
  }
  return y;
}

}  // namespace

EigenDecomposition eigen_all(const CMatrix& a, bool hermitian) {
  require_square_finite(a);
  const Eigen::Index n = a.rows();
  EigenDecomposition out;
  out.hermitian = hermitian;
  std::vector<cplx> raw(static_cast<std::size_t>(n));
  std::vector<CVector> raw_vectors(static_cast<std::size_t>(n));

  if (hermitian) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(a);
    if (solver.info() != Eigen::Success) {
      throw NoConvergenceError("self-adjoint eigensolver did not converge for n=" +
                                   std::to_string(n),
                               Eigen::SelfAdjointEigenSolver<CMatrix>::m_maxIterations * n);
    }
    out.schur_q = solver.eigenvectors();
    out.schur_t = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      raw[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
      out.schur_t(i, i) = solver.eigenvalues()(i);
      raw_vectors[static_cast<std::size_t>(i)] = out.schur_q.col(i);
    }
  } else {
    Eigen::ComplexSchur<CMatrix> schur(a);
    if (schur.info() != Eigen::Success) {
      throw NoConvergenceError("complex Schur iteration did not converge for n=" +
                                   std::to_string(n) + " after " +
                                   std::to_string(schur.getMaxIterations()) + " iterations",
                               static_cast<long>(schur.getMaxIterations()));
    }
    out.schur_q = schur.matrixU();
    out.schur_t = schur.matrixT().triangularView<Eigen::Upper>();
    const double norm_t = std::max(out.schur_t.cwiseAbs().maxCoeff(),
                                   std::numeric_limits<double>::min());
    const double small = norm_t * std::numeric_limits<double>::epsilon();
    for (Eigen::Index j = 0; j < n; ++j) {
      raw[static_cast<std::size_t>(j)] = out.schur_t(j, j);
      CVector y = triangular_eigenvector(out.schur_t, j, small);
      raw_vectors[static_cast<std::size_t>(j)] = out.schur_q * y;
    }
  }

  const auto perm = spectral_permutation(raw);
  out.values.reserve(perm.size());
  out.vectors.reserve(perm.size());
  out.schur_position.reserve(perm.size());
  for (std::size_t idx : perm) {
    out.values.push_back(raw[idx]);
    CVector v = raw_vectors[idx];
    v.normalize();
    fix_phase(v);
    out.vectors.push_back(std::move(v));
    out.schur_position.push_back(static_cast<Eigen::Index>(idx));
  }
  return out;
}

std::vector<cplx> eigenvalues_only(const CMatrix& a, bool hermitian) {
  require_square_finite(a);
  std::vector<cplx> values(static_cast<std::size_t>(a.rows()));
  if (hermitian) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw NoConvergenceError("self-adjoint eigensolver did not converge", 0);
    }
    for (Eigen::Index i = 0; i < a.rows(); ++i) values[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  } else {
    Eigen::ComplexEigenSolver<CMatrix> solver(a, false);
    if (solver.info() != Eigen::Success) {
      throw NoConvergenceError("complex eigensolver did not converge", 0);
    }
    for (Eigen::Index i = 0; i < a.rows(); ++i) values[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  }
  std::sort(values.begin(), values.end(), spectral_order);
  return values;
}

// ---------------------------------------------------------------------------
// Bordered systems

CVector stack_rhs(cplx z, const CVector& y) {
  CVector rhs(y.size() + 1);
  rhs(0) = z;
  rhs.tail(y.size()) = y;
  return rhs;
}

namespace {

double pivot_ratio(const Eigen::VectorXd& pivots) {
  const double hi = pivots.maxCoeff();
  return hi > 0.0 ? pivots.minCoeff() / hi : 0.0;
}

}  // namespace

BorderedSystem::BorderedSystem(const CMatrix& a0, const CVector& v0, cplx lambda0,
                               Pairing pairing, bool single_precision) {
  const Eigen::Index n = a0.rows();
  if (a0.cols() != n || v0.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "bordered system dimension mismatch");
  }
  matrix_ = CMatrix::Zero(n + 1, n + 1);
  if (pairing == Pairing::Transpose) {
    matrix_.block(0, 1, 1, n) = v0.transpose();
  } else {
    matrix_.block(0, 1, 1, n) = v0.adjoint();
  }
  matrix_.block(1, 0, n, 1) = v0;
  matrix_.block(1, 1, n, n) = -a0;
  matrix_.block(1, 1, n, n).diagonal().array() += lambda0;
  single_ = single_precision;
  if (single_) {
    const Eigen::MatrixXcf stored = matrix_.cast<std::complex<float>>();
    matrix_ = stored.cast<cplx>();
    lu_single_.compute(stored);
    rcond_ = std::min(static_cast<double>(lu_single_.rcond()),
                      pivot_ratio(lu_single_.matrixLU().diagonal().cwiseAbs().cast<double>()));
  } else {
    lu_.compute(matrix_);
    // The estimator returns 1 when a pivot is exactly zero.
    rcond_ = std::min(lu_.rcond(), pivot_ratio(lu_.matrixLU().diagonal().cwiseAbs()));
  }
  if (!(rcond_ >= kSingularThreshold)) {
    throw Error(ErrorKind::NonSimpleEigenvalue,
                "non-simple eigenvalue at expansion point (A(mu0) is defective or has a repeated "
                "eigenvalue): bordered matrix is singular "
                "(reciprocal condition " + std::to_string(rcond_) + ")");
  }
}

CVector BorderedSystem::solve(const CVector& rhs) const {
  if (rhs.size() != matrix_.rows()) {
    throw Error(ErrorKind::InvalidArgument, "bordered rhs has wrong length");
  }
  if (single_) {
    // Derivative-value right-hand sides grow like k! and overflow float.
    const double scale = rhs.cwiseAbs().maxCoeff();
    if (scale == 0.0) return CVector::Zero(rhs.size());
    const Eigen::VectorXcf x = lu_single_.solve((rhs / scale).cast<std::complex<float>>().eval());
    return x.cast<cplx>() * scale;
  }
  return lu_.solve(rhs);
}

double BorderedSystem::residual(const CVector& x, const CVector& rhs) const {
  return (matrix_ * x - rhs).cwiseAbs().maxCoeff();
}

BorderedSystem build_bordered(const CMatrix& a0, const CVector& v0, cplx lambda0,
                              Pairing pairing, bool single_precision) {
  const double norm = v0.norm();
  if (std::abs(norm - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidArgument,
                "border vector must have unit 2-norm, got " + std::to_string(norm));
  }
  return BorderedSystem(a0, v0, lambda0, pairing, single_precision);
}

BorderedSolution solve_bordered(const BorderedSystem& sys, const CVector& rhs) {
  CVector x = sys.solve(rhs);
  return {x(0), x.tail(x.size() - 1)};
}

// In the Schur basis w = Q^H v the system reads
//
//   sum_k d_k w_k                                = z
//   c_i lambda + (lambda0 - T_ii) w_i - sum_{k>i} T_ik w_k = yhat_i
//
// Every w_i with i != j is affine in (lambda, w_j): w_i = a_i + b_i lambda +
// g_i w_j. The b and g parts do not depend on the rhs, so they are built
// once; each solve back-substitutes for a and finishes with a 2x2 system
// formed by row j and the border row.
ReducedBorderedSolver::ReducedBorderedSolver(const CMatrix& q, const CMatrix& t,
                                             const CVector& v0, cplx lambda0,
                                             Eigen::Index position, Pairing pairing,
                                             bool diagonal_core)
    : q_(&q), t_(&t), lambda0_(lambda0), j_(position), diagonal_(diagonal_core) {
  const Eigen::Index n = t.rows();
  if (q.rows() != n || q.cols() != n || t.cols() != n || v0.size() != n || position < 0 ||
      position >= n) {
    throw Error(ErrorKind::InvalidArgument, "reduced bordered solver dimension mismatch");
  }
  c_ = q.adjoint() * v0;
  d_ = pairing == Pairing::Transpose ? CVector(q.transpose() * v0) : CVector(c_.conjugate());

  double scale = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, std::abs(t(i, i)));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i != j_ && std::abs(lambda0 - t(i, i)) < kSingularThreshold * scale) {
      throw Error(ErrorKind::NonSimpleEigenvalue,
                  "non-simple eigenvalue at expansion point (A(mu0) is defective or has a repeated "
                  "eigenvalue): diagonal entries " +
                      std::to_string(i) + " and " + std::to_string(j_) +
                      " of the Schur factor coincide");
    }
  }

  b_ = CVector::Zero(n);
  g_ = CVector::Zero(n);
  g_(j_) = 1.0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    if (i == j_) continue;
    cplx bi = -c_(i);
    cplx gi = 0.0;
    if (!diagonal_) {
      for (Eigen::Index k = i + 1; k < n; ++k) {
        bi += t(i, k) * b_(k);
        gi += t(i, k) * g_(k);
      }
    }
    const cplx piv = lambda0 - t(i, i);
    b_(i) = bi / piv;
    g_(i) = gi / piv;
  }

  // Row j and the border row, coefficients of (lambda, w_j).
  m11_ = c_(j_);
  m12_ = lambda0 - t(j_, j_);
  if (!diagonal_) {
    for (Eigen::Index k = j_ + 1; k < n; ++k) {
      m11_ -= t(j_, k) * b_(k);
      m12_ -= t(j_, k) * g_(k);
    }
  }
  m21_ = (d_.transpose() * b_).value();
  m22_ = (d_.transpose() * g_).value();

  det_ = m11_ * m22_ - m12_ * m21_;
  const double det_scale = std::abs(m11_) * std::abs(m22_) + std::abs(m12_) * std::abs(m21_);
  if (!(std::abs(det_) >= kSingularThreshold * det_scale) || det_scale == 0.0) {
    throw Error(ErrorKind::NonSimpleEigenvalue,
                "non-simple eigenvalue at expansion point (A(mu0) is defective or has a repeated "
                "eigenvalue): eliminated pivot vanishes");
  }
}

BorderedSolution ReducedBorderedSolver::solve(cplx z, const CVector& y) const {
  const CMatrix& q = *q_;
  const CMatrix& t = *t_;
  const Eigen::Index n = t.rows();
  if (y.size() != n) throw Error(ErrorKind::InvalidArgument, "reduced rhs has wrong length");

  const CVector yhat = q.adjoint() * y;
  CVector a = CVector::Zero(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    if (i == j_) continue;
    cplx ai = yhat(i);
    if (!diagonal_) {
      for (Eigen::Index k = i + 1; k < n; ++k) ai += t(i, k) * a(k);
    }
    a(i) = ai / (lambda0_ - t(i, i));
  }

  cplx r1 = yhat(j_);
  if (!diagonal_) {
    for (Eigen::Index k = j_ + 1; k < n; ++k) r1 += t(j_, k) * a(k);
  }
  const cplx r2 = z - (d_.transpose() * a).value();

  const cplx lambda = (r1 * m22_ - m12_ * r2) / det_;
  const cplx wj = (m11_ * r2 - r1 * m21_) / det_;
  const CVector w = a + b_ * lambda + g_ * wj;
  return {lambda, q * w};
}

BorderedSolution solve_bordered_reduced(const CMatrix& q, const CMatrix& t,
                                        const CVector& v0, cplx lambda0,
                                        const CVector& rhs, Pairing pairing) {
  const Eigen::Index n = t.rows();
  if (rhs.size() != n + 1) throw Error(ErrorKind::InvalidArgument, "reduced rhs has wrong length");
  Eigen::Index position = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (std::abs(t(i, i) - lambda0) < std::abs(t(position, position) - lambda0)) position = i;
  }
  const bool diagonal = t.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().isZero(0.0);
  ReducedBorderedSolver solver(q, t, v0, lambda0, position, pairing, diagonal);
  return solver.solve(rhs(0), rhs.tail(n));
}

}  // namespace pevp
