/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef HQMM_TOLERANCES_HPP
#define HQMM_TOLERANCES_HPP

namespace hqmm {

// Every numerical tolerance used by validators, conversions and filtering
// lives here so that implementations and tests agree on the same numbers.
// All values are magnitudes; "min eigenvalue >= -psd" style comparisons are
// spelled out at the point of use.
struct Tolerances {
  // Density matrices.
  double density_hermitian = 1e-10; // ||rho - rho^dag||_F
  double density_min_eig = 1e-10;   // min eig >= -density_min_eig
  double density_trace = 1e-10;     // |tr(rho) - 1|

  // Stacked Kraus parameters and random orthonormal draws.
  double stiefel_orthonormal = 1e-8;
  double random_orthonormal = 1e-10;

  // Classical models.
  double stochastic = 1e-10;      // column sums / belief normalization
  double oom_functional = 1e-10;  // sigma^dag x0 = 1 and marginal condition
  double noom_completeness = 1e-10;

  // Quantum channels (Liouville / Choi form).
  double channel_tp = 1e-8;
  double channel_hermitian = 1e-8;
  double channel_min_eig = 1e-8; // Choi min eig >= -channel_min_eig
  double khqmm_tp = 1e-8;

  // Probability extraction and the negative-probability guard.
  double imaginary_part = 1e-9; // |Im p| above this is a hard error
  double npp = 1e-9;            // p < -npp is an NPP violation

  // Filtering.
  double underflow_floor = 1e-300; // normalizers at or below raise

  // Canonical Kraus decomposition: gamma_i <= rel * gamma_max is truncated.
  double kraus_truncation_rel = 1e-10;
};

inline const Tolerances &default_tolerances() {
  static const Tolerances tols{};
  return tols;
}

} // namespace hqmm

#endif
