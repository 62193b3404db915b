/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef HQMM_TYPES_HPP
#define HQMM_TYPES_HPP

#include <cstdint>

#include "hqmm/linalg.hpp"
#include "hqmm/tolerances.hpp"

namespace hqmm {

class Rng;

// Hermitian, positive-semidefinite, trace-one complex matrix: the latent
// state of an HQMM.
class DensityMatrix {
public:
  // Checks all three invariants and throws ValidityError on failure.
  static DensityMatrix validated(CMat m,
                                 const Tolerances &tols = default_tolerances());

  // For states produced by operations that preserve the invariants by
  // construction (tests re-validate these).
  static DensityMatrix unchecked(CMat m);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const CMat &matrix() const { return matrix_; }

  double hermiticity_residual() const;
  double min_eigenvalue() const;
  double trace_residual() const;

private:
  explicit DensityMatrix(CMat m) : matrix_(std::move(m)) {}
  CMat matrix_;
};

// Column-orthonormal stack of s*w Kraus operators of size n x n. Block
// (y, u) occupies rows [(y*w + u)*n, (y*w + u + 1)*n).
class StiefelPoint {
public:
  static StiefelPoint validated(CMat stack, int outputs, int per_output,
                                const Tolerances &tols = default_tolerances());
  static StiefelPoint unchecked(CMat stack, int outputs, int per_output);

  int n() const { return static_cast<int>(stack_.cols()); }
  int outputs() const { return outputs_; }
  int per_output() const { return per_output_; }
  int block_count() const { return outputs_ * per_output_; }

  const CMat &stack() const { return stack_; }

  // The (y, u) Kraus operator.
  CMat block(int output, int op) const;
  CMat block(int flat_index) const;

  double orthonormality_residual() const;

private:
  StiefelPoint(CMat stack, int outputs, int per_output)
      : stack_(std::move(stack)), outputs_(outputs), per_output_(per_output) {}
  CMat stack_;
  int outputs_;
  int per_output_;
};

// Haar-like random column-orthonormal matrix: thin QR of a complex Gaussian
// with the phase ambiguity removed by absorbing the phases of diag(R).
CMat random_orthonormal(int rows, int cols, std::uint64_t seed);
CMat random_orthonormal(int rows, int cols, Rng &rng);

// Real variant (sign fix instead of phase fix); used for real model families.
RMat random_orthonormal_real(int rows, int cols, std::uint64_t seed);

StiefelPoint random_stiefel(int n, int outputs, int per_output,
                            std::uint64_t seed);

// Ginibre ensemble: rho = G G^dag / tr(G G^dag) with G an n x n standard
// complex Gaussian; full rank with probability one.
DensityMatrix random_density(int n, std::uint64_t seed);
DensityMatrix random_density(int n, Rng &rng);

// Throws ValidityError unless v is entrywise nonnegative and sums to one.
void validate_belief(const RVec &v,
                     const Tolerances &tols = default_tolerances());

} // namespace hqmm

#endif
