#pragma once

#include <complex>

#include <Eigen/Core>

namespace pevp {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// How the border row of a bordered system (and the normalization rows of
/// the series recurrences) pairs two vectors: plain transpose keeps every
/// equation complex-analytic, conjugate transpose matches the Hermitian
/// inner product.
enum class Pairing { Transpose, ConjugateTranspose };

inline cplx pair_dot(const CVector& a, const CVector& b, Pairing pairing) {
  return pairing == Pairing::Transpose ? (a.transpose() * b).value()
                                       : a.dot(b);
}

/// Serial reference path or OpenMP-parallel path over independent work items.
enum class ExecPolicy { Serial, Parallel };

}  // namespace pevp
