/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef HQMM_LINALG_HPP
#define HQMM_LINALG_HPP

#include <Eigen/Dense>
#include <complex>

namespace hqmm {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Column-major vectorization: vec(M)[c*n + r] = M(r, c). With this
// convention vec(A X B) = (B^T (x) A) vec(X), and the operator-sum action
// vec(K rho K^dag) = (conj(K) (x) K) vec(rho).
CVec vectorize(const CMat &m);

// Inverse of vectorize for a square n x n target. Throws DimensionError if
// v.size() != n * n.
CMat devectorize(const CVec &v, int n);

// Inference variant; throws DimensionError if v.size() is not a perfect
// square.
CMat devectorize(const CVec &v);

// Kronecker product: out[(a*r + b, c*s + d)] = A(a, c) * B(b, d) for
// A of shape p x q and B of shape r x s.
CMat kron(const CMat &a, const CMat &b);
RMat kron(const RMat &a, const RMat &b);

// vec(I_n), the row functional implementing the matrix trace.
CVec vectorized_identity(int n);

// ||k^dag k - I||_F, the orthonormality residual of a column-orthonormal
// candidate.
double orthonormality_residual(const CMat &k);

// Nearest matrix with orthonormal columns (polar factor U V^dag of the thin
// SVD). Throws StepError when the input is numerically rank deficient.
CMat polar_orthonormal(const CMat &m);

bool all_finite(const CMat &m);
bool all_finite(const RMat &m);

} // namespace hqmm

#endif
