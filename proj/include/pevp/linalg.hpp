#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/LU>

#include "pevp/types.hpp"

namespace pevp {

/// Full eigendecomposition of a dense matrix together with the Schur factors
/// it was derived from.
///
/// Eigenpairs are sorted by descending real part (ties: descending imaginary
/// part). Each eigenvector has unit 2-norm and its largest-magnitude
/// component is real and positive. `schur_position[i]` is the diagonal index
/// of T that carries eigenvalue i.
struct EigenDecomposition {
  std::vector<cplx> values;
  std::vector<CVector> vectors;
  CMatrix schur_q;
  CMatrix schur_t;
  std::vector<Eigen::Index> schur_position;
  bool hermitian = false;

  std::size_t size() const { return values.size(); }
};

/// Eigenvalues and phase-fixed eigenvectors of `a`. The Hermitian path uses
/// a self-adjoint solver and reports a diagonal T.
EigenDecomposition eigen_all(const CMatrix& a, bool hermitian);

/// Eigenvalues only, in the same order as eigen_all. Cheaper; used for
/// direct sampling.
std::vector<cplx> eigenvalues_only(const CMatrix& a, bool hermitian);

/// Scale `v` so that its largest-magnitude entry is real and positive.
void fix_phase(CVector& v);

/// Sort key used throughout: descending real part, then descending imaginary.
bool spectral_order(cplx a, cplx b);

/// The (n+1)x(n+1) bordered matrix
///
///     [ 0  | b^T           ]
///     [ v0 | lambda0 I - A0 ]
///
/// with b = v0 (Pairing::Transpose) or conj(v0) (Pairing::ConjugateTranspose),
/// factorized once on construction. Immutable afterwards; solves may run
/// concurrently.
class BorderedSystem {
 public:
  /// `single_precision` stores E in single precision: entries are rounded to
  /// float and the factorization and solves run in float arithmetic.
  BorderedSystem(const CMatrix& a0, const CVector& v0, cplx lambda0,
                 Pairing pairing, bool single_precision = false);

  Eigen::Index size() const { return matrix_.rows(); }
  const CMatrix& matrix() const { return matrix_; }
  double condition_estimate() const { return rcond_; }

  /// Solve E [lambda_k; v_k] = rhs. Returns the stacked solution.
  CVector solve(const CVector& rhs) const;

  /// ||E x - rhs||_inf.
  double residual(const CVector& x, const CVector& rhs) const;

 private:
  CMatrix matrix_;
  Eigen::PartialPivLU<CMatrix> lu_;
  Eigen::PartialPivLU<Eigen::MatrixXcf> lu_single_;
  bool single_ = false;
  double rcond_ = 0.0;
};

inline constexpr double kSingularThreshold = 1e-12;

BorderedSystem build_bordered(const CMatrix& a0, const CVector& v0, cplx lambda0,
                              Pairing pairing = Pairing::Transpose,
                              bool single_precision = false);

struct BorderedSolution {
  cplx lambda;
  CVector vector;
};

BorderedSolution solve_bordered(const BorderedSystem& sys, const CVector& rhs);

/// Solver for the same bordered system that works in the Schur basis of A0:
/// rhs is rotated by Q^H, the core lambda0 I - T is eliminated by two
/// triangular back substitutions around the singular diagonal position, and
/// the result is rotated back with Q. O(n^2) per solve.
class ReducedBorderedSolver {
 public:
  /// `position` is the diagonal index of T equal to lambda0. When T is
  /// diagonal (Hermitian input), pass `diagonal_core = true` to skip the
  /// off-diagonal sweeps.
  ReducedBorderedSolver(const CMatrix& q, const CMatrix& t, const CVector& v0,
                        cplx lambda0, Eigen::Index position, Pairing pairing,
                        bool diagonal_core);

  BorderedSolution solve(cplx z, const CVector& y) const;

 private:
  const CMatrix* q_;
  const CMatrix* t_;
  CVector c_;       // Q^H v0
  CVector d_;       // border row in the Schur basis
  CVector b_;       // d w / d lambda
  CVector g_;       // d w / d w_j
  cplx m11_, m12_, m21_, m22_, det_;
  cplx lambda0_;
  Eigen::Index j_;
  bool diagonal_;
};

/// Convenience wrapper matching the stacked-rhs interface of solve_bordered.
BorderedSolution solve_bordered_reduced(const CMatrix& q, const CMatrix& t,
                                        const CVector& v0, cplx lambda0,
                                        const CVector& rhs,
                                        Pairing pairing = Pairing::Transpose);

/// Stack (z, y) into one (n+1)-vector.
CVector stack_rhs(cplx z, const CVector& y);

}  // namespace pevp
