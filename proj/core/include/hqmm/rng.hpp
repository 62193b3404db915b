/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef HQMM_RNG_HPP
#define HQMM_RNG_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace hqmm {

// Deterministic random stream. Gaussian variates are produced by an
// explicit Box-Muller transform on top of mt19937_64 so that identical
// seeds give identical draws on every platform and standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal.
  double normal();

  std::uint64_t next_u64() { return engine_(); }

  // Draws an index from an (approximately normalized) probability vector.
  int categorical(const Eigen::VectorXd &probs);

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Mixes a base seed with a stream tag so independent jobs (restarts, folds,
// hyperparameter trials, per-sequence draws) get decorrelated streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Matrix with i.i.d. standard complex Gaussian entries (real and imaginary
// parts each standard normal).
Eigen::MatrixXcd complex_gaussian(Rng &rng, int rows, int cols);

Eigen::MatrixXd real_gaussian(Rng &rng, int rows, int cols);

// Probability vector with Dirichlet(1) distribution (uniform on the simplex).
Eigen::VectorXd dirichlet_uniform(Rng &rng, int dim);

} // namespace hqmm

#endif
