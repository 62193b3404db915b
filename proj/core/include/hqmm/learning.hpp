/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef HQMM_LEARNING_HPP
#define HQMM_LEARNING_HPP

#include <memory>
#include <string>

#include "hqmm/models.hpp"

namespace hqmm {

//=========================================================================
// Configuration
//=========================================================================

struct Arch {
  int n = 1; // latent dimension
  int s = 2; // alphabet size
  int w = 1; // Kraus operators per output

  void validate() const;
};

enum class UpdateScheme { wen_yin, projection };

const char *update_scheme_name(UpdateScheme scheme);
UpdateScheme parse_update_scheme(const std::string &name);

struct TrainingConfig {
  double tau = 0.75;   // step size
  double alpha = 0.92; // per-epoch step-size decay
  double beta = 0.9;   // momentum coefficient
  int batches = 0;     // batches per epoch; 0 = every chunk of batch_size
  int batch_size = 20; // sequences per batch; 0 = derive from batches
  int epochs = 60;
  int burn_in = 100;
  std::uint64_t seed = 0;
  UpdateScheme update_scheme = UpdateScheme::wen_yin;
  int reorth_period = 50;   // steps between orthonormality checks
  double reorth_tol = 1e-8; // re-project when the residual exceeds this

  void validate() const; // throws ConfigError
};

//=========================================================================
// Loss and gradient
//=========================================================================

// Vertical stack of the per-operator conjugate gradients dL/dK_i^*, with the
// same block layout as the Stiefel point it differentiates.
struct GradientStack {
  CMat stack;
  int outputs = 0;
  int per_output = 0;

  CMat block(int output, int op) const;
};

// Mean over the batch of the per-sequence negative log-likelihood under the
// K-HQMM (kappa, rho0). Defined for arbitrary operator stacks, also slightly
// off the manifold, so finite-difference probes are meaningful.
double batch_loss(const StiefelPoint &kappa, const DensityMatrix &rho0,
                  std::span<const Sequence> batch, int burn_in);

// Analytic gradient of batch_loss with respect to conj(kappa), obtained by
// reverse accumulation through the scaled filtering recursion.
GradientStack conjugate_gradient(const StiefelPoint &kappa,
                                 const DensityMatrix &rho0,
                                 std::span<const Sequence> batch, int burn_in);

struct LossAndGradient {
  double loss;
  GradientStack gradient;
};

// One fused pass; cheaper than calling the two functions separately.
LossAndGradient loss_and_gradient(const StiefelPoint &kappa,
                                  const DensityMatrix &rho0,
                                  std::span<const Sequence> batch,
                                  int burn_in);

// Component of g tangent to the Stiefel manifold at kappa:
// g - kappa sym(kappa^dag g). Vanishes at manifold-constrained stationary
// points.
CMat stiefel_tangent_component(const StiefelPoint &kappa, const CMat &g);

//=========================================================================
// Updates
//=========================================================================

// Normalizes the gradient, folds it into the momentum buffer, and
// normalizes again, so update magnitudes depend only on the step size.
// Returns (direction, updated buffer); norms below 1e-15 skip the
// corresponding normalization.
std::pair<CMat, CMat> momentum_renorm(const CMat &g, const CMat &momentum,
                                      double beta);

// Feasible curve gamma(tau) = kappa0 - tau U (I + (tau/2) V^dag U)^{-1}
// V^dag kappa0 with U = [G | kappa0], V = [kappa0 | -G]; stays on the
// manifold for any tau via a 2n x 2n solve. Throws StepError when that
// system's condition number exceeds 1e12.
StiefelPoint wen_yin_retraction(const StiefelPoint &kappa0, const CMat &g,
                                double tau);

// Euclidean step followed by polar projection back onto the manifold.
StiefelPoint projection_update(const StiefelPoint &kappa0, const CMat &g,
                               double tau);

//=========================================================================
// Training loop
//=========================================================================

struct EpochRecord {
  int epoch = 0; // 1-based
  double mean_loss = 0.0;
  double validation_da = 0.0;
  double seconds = 0.0; // wall clock since training start
  double max_orthonormality_residual = 0.0;
};

struct TrainingRun {
  Arch arch;
  TrainingConfig config;
  std::vector<EpochRecord> epochs;
  // ||kappa^dag kappa - I||_F after every gradient step.
  std::vector<double> step_orthonormality_residuals;
  KHqmm best_model;
  double best_validation_da = 0.0;
  int best_epoch = 0; // 0 = initialization
  KHqmm final_model;
  double initial_validation_da = 0.0;
  long skipped_batches = 0;
  long step_size_halvings = 0;
};

// Incremental trainer so schedulers can resume a run; train() below is the
// one-shot wrapper.
class Trainer {
public:
  Trainer(SequenceList data, Arch arch, TrainingConfig config,
          SequenceList validation);
  ~Trainer();
  Trainer(Trainer &&) noexcept;
  Trainer &operator=(Trainer &&) noexcept;

  void run_epochs(int epochs);

  int epochs_trained() const;
  double latest_validation_da() const;
  double best_validation_da() const;
  KHqmm current_model() const;
  TrainingRun snapshot_run() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

TrainingRun train(SequenceList data, Arch arch, const TrainingConfig &config,
                  SequenceList validation);

//=========================================================================
// Hyperband tuning
//=========================================================================

struct HyperbandRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct HyperbandTrial {
  int trial_id = 0;
  double tau = 0.0;
  double alpha = 0.0;
  double latest_validation_da = 0.0;
  double best_validation_da = 0.0;
  int epochs_trained = 0;
  int eliminated_after_round = -1; // -1 = survived to the end
};

struct HyperbandRound {
  int round_index = 0;
  int survivors = 0;    // configurations entering this round
  int epoch_budget = 0; // epochs each survivor trains in this round
  std::vector<int> trial_ids;
};

struct HyperbandResult {
  std::vector<HyperbandTrial> trials;
  std::vector<HyperbandRound> rounds;
  int best_trial_id = 0;
  TrainingRun best_run;
};

// Successive-elimination schedule over uniformly sampled (tau, alpha)
// configurations. k = 27 runs 27@3, 9@9, 3@9, 1@27 epochs; k = 9 runs
// 9@3, 3@9, 1@27; k = 1 degenerates to a single 27-epoch run. Keeps the
// configuration with the highest validation DA seen anywhere in the
// protocol. Throws ConfigError for any other k.
HyperbandResult hyperband_search(HyperbandRange tau_range,
                                 HyperbandRange alpha_range, int k,
                                 const SequenceList &data, Arch arch,
                                 const TrainingConfig &base,
                                 const SequenceList &validation, int jobs = 1);

} // namespace hqmm

#endif
