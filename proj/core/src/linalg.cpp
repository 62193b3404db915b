/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "hqmm/linalg.hpp"

#include <cmath>

#include "hqmm/errors.hpp"

namespace hqmm {

CVec vectorize(const CMat &m) {
  // Eigen is column-major, so the storage order is already the vec order.
  return Eigen::Map<const CVec>(m.data(), m.size());
}

CMat devectorize(const CVec &v, int n) {
  if (n < 1 || v.size() != static_cast<Eigen::Index>(n) * n) {
    throw DimensionError("devectorize: vector of length " +
                         std::to_string(v.size()) +
                         " does not match target dimension " +
                         std::to_string(n));
  }
  return Eigen::Map<const CMat>(v.data(), n, n);
}

CMat devectorize(const CVec &v) {
  const auto n = static_cast<int>(std::llround(std::sqrt(
      static_cast<double>(v.size()))));
  if (static_cast<Eigen::Index>(n) * n != v.size()) {
    throw DimensionError("devectorize: length " + std::to_string(v.size()) +
                         " is not a perfect square");
  }
  return devectorize(v, n);
}

namespace {

template <typename Mat> Mat kron_impl(const Mat &a, const Mat &b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index ac = 0; ac < a.cols(); ++ac) {
    for (Eigen::Index ar = 0; ar < a.rows(); ++ar) {
      out.block(ar * b.rows(), ac * b.cols(), b.rows(), b.cols()) =
          a(ar, ac) * b;
    }
  }
  return out;
}

} // namespace

CMat kron(const CMat &a, const CMat &b) { return kron_impl(a, b); }
RMat kron(const RMat &a, const RMat &b) { return kron_impl(a, b); }

CVec vectorized_identity(int n) {
  return vectorize(CMat::Identity(n, n));
}

double orthonormality_residual(const CMat &k) {
  const Eigen::Index n = k.cols();
  return (k.adjoint() * k - CMat::Identity(n, n)).norm();
}

CMat polar_orthonormal(const CMat &m) {
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto &sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) <= 1e-12 * sv(0)) {
    throw StepError("polar projection: rank-deficient step matrix");
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

bool all_finite(const CMat &m) {
  return m.real().allFinite() && m.imag().allFinite();
}

bool all_finite(const RMat &m) { return m.allFinite(); }

} // namespace hqmm
