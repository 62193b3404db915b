/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "hqmm/types.hpp"

#include <string>

#include "hqmm/errors.hpp"
#include "hqmm/rng.hpp"

namespace hqmm {

DensityMatrix DensityMatrix::validated(CMat m, const Tolerances &tols) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionError("density matrix must be square and nonempty");
  }
  if (!all_finite(m)) {
    throw ValidityError("density matrix has non-finite entries");
  }
  DensityMatrix rho(std::move(m));
  if (rho.hermiticity_residual() > tols.density_hermitian) {
    throw ValidityError("density matrix not Hermitian: residual " +
                        std::to_string(rho.hermiticity_residual()));
  }
  if (rho.min_eigenvalue() < -tols.density_min_eig) {
    throw ValidityError("density matrix not PSD: min eigenvalue " +
                        std::to_string(rho.min_eigenvalue()));
  }
  if (rho.trace_residual() > tols.density_trace) {
    throw ValidityError("density matrix trace differs from 1 by " +
                        std::to_string(rho.trace_residual()));
  }
  return rho;
}

DensityMatrix DensityMatrix::unchecked(CMat m) {
  return DensityMatrix(std::move(m));
}

double DensityMatrix::hermiticity_residual() const {
  return (matrix_ - matrix_.adjoint()).norm();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMat> es(
      ((matrix_ + matrix_.adjoint()) / 2.0).eval(),
      Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::trace_residual() const {
  return std::abs(matrix_.trace() - Complex(1.0, 0.0));
}

StiefelPoint StiefelPoint::validated(CMat stack, int outputs, int per_output,
                                     const Tolerances &tols) {
  if (outputs < 1 || per_output < 1) {
    throw DimensionError("Stiefel point needs at least one block");
  }
  const Eigen::Index n = stack.cols();
  if (n < 1 || stack.rows() != static_cast<Eigen::Index>(outputs) *
                                   per_output * n) {
    throw DimensionError(
        "Stiefel stack of shape " + std::to_string(stack.rows()) + "x" +
        std::to_string(stack.cols()) + " does not tile into " +
        std::to_string(outputs * per_output) + " square blocks");
  }
  if (!all_finite(stack)) {
    throw ValidityError("Stiefel stack has non-finite entries");
  }
  StiefelPoint p(std::move(stack), outputs, per_output);
  const double res = p.orthonormality_residual();
  if (res > tols.stiefel_orthonormal) {
    throw ValidityError("Stiefel stack not orthonormal: residual " +
                        std::to_string(res));
  }
  return p;
}

StiefelPoint StiefelPoint::unchecked(CMat stack, int outputs, int per_output) {
  return StiefelPoint(std::move(stack), outputs, per_output);
}

CMat StiefelPoint::block(int output, int op) const {
  return block(output * per_output_ + op);
}

CMat StiefelPoint::block(int flat_index) const {
  const int dim = n();
  return stack_.block(static_cast<Eigen::Index>(flat_index) * dim, 0, dim,
                      dim);
}

double StiefelPoint::orthonormality_residual() const {
  return hqmm::orthonormality_residual(stack_);
}

CMat random_orthonormal(int rows, int cols, Rng &rng) {
  if (rows < cols || cols < 1) {
    throw DimensionError("random_orthonormal needs rows >= cols >= 1");
  }
  const CMat g = complex_gaussian(rng, rows, cols);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ() * CMat::Identity(rows, cols);
  const CMat r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (int j = 0; j < cols; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) {
      q.col(j) *= d / mag;
    }
  }
  return q;
}

CMat random_orthonormal(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  return random_orthonormal(rows, cols, rng);
}

RMat random_orthonormal_real(int rows, int cols, std::uint64_t seed) {
  if (rows < cols || cols < 1) {
    throw DimensionError("random_orthonormal needs rows >= cols >= 1");
  }
  Rng rng(seed);
  const RMat g = real_gaussian(rng, rows, cols);
  Eigen::HouseholderQR<RMat> qr(g);
  RMat q = qr.householderQ() * RMat::Identity(rows, cols);
  const RMat r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (int j = 0; j < cols; ++j) {
    if (r(j, j) < 0.0) {
      q.col(j) = -q.col(j);
    }
  }
  return q;
}

StiefelPoint random_stiefel(int n, int outputs, int per_output,
                            std::uint64_t seed) {
  return StiefelPoint::unchecked(
      random_orthonormal(n * outputs * per_output, n, seed), outputs,
      per_output);
}

DensityMatrix random_density(int n, Rng &rng) {
  if (n < 1) {
    throw DimensionError("random_density needs dimension >= 1");
  }
  const CMat g = complex_gaussian(rng, n, n);
  CMat rho = g * g.adjoint();
  rho /= rho.trace().real();
  // Symmetrize away the last bits of rounding noise.
  rho = ((rho + rho.adjoint()) / 2.0).eval();
  return DensityMatrix::unchecked(std::move(rho));
}

DensityMatrix random_density(int n, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(n, rng);
}

void validate_belief(const RVec &v, const Tolerances &tols) {
  if (v.size() < 1) {
    throw DimensionError("belief vector is empty");
  }
  if (!v.allFinite()) {
    throw ValidityError("belief vector has non-finite entries");
  }
  if (v.minCoeff() < -tols.stochastic) {
    throw ValidityError("belief vector has negative entry " +
                        std::to_string(v.minCoeff()));
  }
  if (std::abs(v.sum() - 1.0) > tols.stochastic) {
    throw ValidityError("belief vector sums to " + std::to_string(v.sum()));
  }
}

} // namespace hqmm
