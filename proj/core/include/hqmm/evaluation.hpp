/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef HQMM_EVALUATION_HPP
#define HQMM_EVALUATION_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hqmm/models.hpp"

namespace hqmm {

//=========================================================================
// Description accuracy
//=========================================================================

// Length-normalized squashed log-likelihood in (-1, 1]; 0 matches a uniform
// random predictor, 1 is perfect prediction.
struct DaScore {
  double mean = 0.0;
  double stddev = 0.0;           // population std over sequences
  double mean_effective_length = 0.0;
  int alphabet = 0;
  int sequence_count = 0;
  // Sequences whose filtering underflowed; scored at the -1 limit rather
  // than dropped.
  int zero_probability_count = 0;
};

// The squashing map: f(x) = tanh(x / 8) for x <= 0, f(x) = x for x > 0.
double da_squash(double x);

// DA of one sequence from its natural-log probability and effective
// (post-burn-in) length: f(1 + log_s P / ell).
double da_from_log_prob(double natural_log_prob, long effective_length,
                        int alphabet);

DaScore description_accuracy(const ModelSpec &model,
                             std::span<const Sequence> sequences,
                             int burn_in);

//=========================================================================
// Maximum-likelihood classification
//=========================================================================

// Index of the largest score; ties go to the lowest index. tie is set when
// at least two scores are exactly equal to the maximum.
int argmax_label(std::span<const double> scores, bool *tie = nullptr);

// Label whose model assigns the highest log-likelihood to the sequence.
// Models must share one alphabet. Throws ZeroProbabilityError only if every
// model underflows.
int classify(std::span<const ModelSpec> per_label_models,
             std::span<const int> sequence, int burn_in = 0);

struct ClassificationResult {
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;
  // confusion(i, j): sequences with true label i classified as j.
  Eigen::MatrixXi confusion;
  int test_size = 0;
  std::vector<std::string> label_names;
};

// Builds one generative model from the training sequences of a label;
// (label, fold) identify the job for seed derivation.
using LabelModelTrainer =
    std::function<ModelSpec(const SequenceList &sequences, int label,
                            int fold)>;

// Per-label maximum-likelihood classification with stratified k-fold cross
// validation. Training jobs fan out over at most `jobs` threads.
ClassificationResult cross_validated_classification(
    const SequenceList &sequences, std::span<const int> labels,
    int label_count, int folds, std::uint64_t seed,
    const LabelModelTrainer &trainer, int burn_in = 0, int jobs = 1);

//=========================================================================
// EM baseline
//=========================================================================

struct BaumWelchResult {
  Hmm model; // best restart
  std::vector<double> restart_log_likelihoods;
  // Per-iteration training log-likelihood of the best restart.
  std::vector<double> iteration_log_likelihoods;
  int best_restart = 0;
};

// Forward-backward EM from random stochastic initializations; returns the
// restart with the highest training log-likelihood. Iterations stop when
// the improvement falls below 1e-6 or after max_iterations.
BaumWelchResult baum_welch(std::span<const Sequence> data, int n, int s,
                           int restarts, std::uint64_t seed,
                           int max_iterations = 100,
                           double improvement_tol = 1e-6);

//=========================================================================
// Cross validation
//=========================================================================

struct FoldSplit {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Stratified k-fold split of labeled sequences; deterministic given seed.
// Throws InputError when any label has fewer than k examples.
std::vector<FoldSplit> kfold_split(std::span<const int> labels, int k,
                                   std::uint64_t seed);

//=========================================================================
// Speedup extrapolation
//=========================================================================

struct TrajectoryPoint {
  double seconds = 0.0;
  double da = 0.0;
};

using Trajectory = std::vector<TrajectoryPoint>;

struct SpeedupEstimate {
  double speedup = 0.0;
  bool infinite = false; // baseline never reaches the target level
  // The linear fit flatters the baseline, so the reported speedup is a
  // lower bound.
  bool optimistic_for_baseline = true;
  double target_da = 0.0;
  double target_convergence_seconds = 0.0;
  double baseline_crossing_seconds = 0.0;
  bool baseline_crossed_in_data = false;
  double fitted_slope = 0.0;
  double fitted_intercept = 0.0;
};

// Least-squares line through the baseline's last 10 points, extrapolated to
// the time it reaches solution_fraction times the target's final DA; the
// speedup is that time over the target's own convergence time. Requires at
// least 10 baseline points and a target that has converged to within
// convergence_tol of its final DA.
SpeedupEstimate estimate_speedup(const Trajectory &baseline,
                                 const Trajectory &target,
                                 double solution_fraction,
                                 double convergence_tol = 1e-5);

} // namespace hqmm

#endif
