/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef HQMM_MODELS_HPP
#define HQMM_MODELS_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "hqmm/types.hpp"

namespace hqmm {

class Rng;

using Sequence = std::vector<int>;
using SequenceList = std::vector<Sequence>;

//=========================================================================
// Model families
//=========================================================================

// Classical hidden Markov model with column-stochastic transition A
// (A(i,j) = P(next=i | cur=j)) and emission C (C(y,i) = P(obs=y | state=i)).
struct Hmm {
  RMat transition; // n x n
  RMat emission;   // s x n
  RVec initial;    // n

  int n() const { return static_cast<int>(transition.rows()); }
  int s() const { return static_cast<int>(emission.rows()); }
};

// Observable operator model in the original real form: one operator per
// symbol, evaluation functional fixed to the all-ones row.
struct StandardOom {
  std::vector<RMat> operators; // s matrices, n x n
  RVec initial;                // sums to 1

  int n() const { return static_cast<int>(initial.size()); }
  int s() const { return static_cast<int>(operators.size()); }
};

// Complex observable operator model with an explicit evaluation functional
// sigma; probabilities are sigma^dag tau_{y_t} ... tau_{y_1} x0.
struct GeneralOom {
  std::vector<CMat> operators;
  CVec initial;
  CVec functional; // sigma

  int n() const { return static_cast<int>(initial.size()); }
  int s() const { return static_cast<int>(operators.size()); }
};

// Norm-observable operator model: unit state vector, probabilities are
// squared 2-norms of the evolved state.
struct Noom {
  std::vector<RMat> operators; // phi_y
  RVec initial;                // unit 2-norm

  int n() const { return static_cast<int>(initial.size()); }
  int s() const { return static_cast<int>(operators.size()); }
};

// Hidden quantum Markov model in Kraus (operator-sum) form: w operators per
// output stacked into a Stiefel point, density-matrix latent state.
struct KHqmm {
  StiefelPoint kraus;
  DensityMatrix initial;

  int n() const { return kraus.n(); }
  int s() const { return kraus.outputs(); }
  int w() const { return kraus.per_output(); }
};

// Hidden quantum Markov model in Liouville form: one n^2 x n^2 superoperator
// per output acting on vectorized density matrices.
struct LHqmm {
  std::vector<CMat> superoperators;
  CVec initial_vec; // vec(rho0)

  int dim() const { return static_cast<int>(initial_vec.size()); }
  int n() const;
  int s() const { return static_cast<int>(superoperators.size()); }
};

using ModelSpec =
    std::variant<Hmm, StandardOom, GeneralOom, Noom, KHqmm, LHqmm>;

int model_alphabet(const ModelSpec &model);
const char *family_name(const ModelSpec &model);

//=========================================================================
// Validity checks (throw ValidityError / DimensionError)
//=========================================================================

void validate_hmm(const Hmm &h, const Tolerances &tols = default_tolerances());
void validate_standard_oom(const StandardOom &m,
                           const Tolerances &tols = default_tolerances());
void validate_general_oom(const GeneralOom &m,
                          const Tolerances &tols = default_tolerances());
void validate_noom(const Noom &m,
                   const Tolerances &tols = default_tolerances());
void validate_khqmm(const KHqmm &m,
                    const Tolerances &tols = default_tolerances());
void validate_lhqmm(const LHqmm &m,
                    const Tolerances &tols = default_tolerances());
void validate_model(const ModelSpec &model,
                    const Tolerances &tols = default_tolerances());

//=========================================================================
// Single-step filtering
//=========================================================================

// Condition the belief state on observing y; returns the updated state and
// the step probability 1^T diag(C_y) A x.
std::pair<RVec, double> hmm_step(const Hmm &h, const RVec &x, int y);

std::pair<CVec, double> oom_step_and_prob(const GeneralOom &m, const CVec &x,
                                          int y);
std::pair<RVec, double> oom_step_and_prob(const StandardOom &m, const RVec &x,
                                          int y);

// p = ||phi_y v||^2, new state phi_y v / ||phi_y v||.
std::pair<RVec, double> noom_step_and_prob(const Noom &m, const RVec &v,
                                           int y);

// p = tr(sum_u K_{y,u} rho K_{y,u}^dag), state is that sum renormalized.
std::pair<DensityMatrix, double> khqmm_step(const KHqmm &m,
                                            const DensityMatrix &rho, int y);

// p = vec(I)^T L_y rho_vec, state L_y rho_vec / p.
std::pair<CVec, double> lhqmm_step_and_prob(const LHqmm &m, const CVec &rho_vec,
                                            int y);

//=========================================================================
// Sequence-level filtering
//=========================================================================

// Scaled filtering: each step renormalizes the state and accumulates the log
// of its normalizer. Burn-in steps advance the state but contribute no log
// terms. Natural log.
double hmm_sequence_log_prob(const Hmm &h, std::span<const int> seq,
                             int burn_in);
double khqmm_sequence_log_likelihood(const KHqmm &m, std::span<const int> seq,
                                     int burn_in);

// Generic dispatch over any family.
double sequence_log_prob(const ModelSpec &model, std::span<const int> seq,
                         int burn_in);

// Stateful filter over any family; one instance per sequence (or chained
// across subsequences when states must carry over).
class Filter {
public:
  explicit Filter(const ModelSpec &model);

  int alphabet() const;

  // p(y | current state) for every symbol.
  RVec symbol_probabilities() const;

  // Applies the step for y and returns its probability.
  double advance(int y);

  void reset();

  long steps_taken() const { return steps_; }

private:
  const ModelSpec *model_;
  std::variant<RVec, CVec, CMat> state_;
  long steps_ = 0;
};

// Accumulates log probabilities of seq through an existing filter, skipping
// the first burn_in symbols in the accounting.
double accumulate_log_prob(Filter &f, std::span<const int> seq, int burn_in);

//=========================================================================
// Sampling
//=========================================================================

std::vector<int> sample_sequence(const ModelSpec &model, int length,
                                 std::uint64_t seed);

// Continues from the filter's current state; useful for burned-in sampling.
std::vector<int> sample_sequence(Filter &f, int length, Rng &rng);

//=========================================================================
// Bounded OOM validity check
//=========================================================================

// Exhaustive scan of all sequences up to a depth. This is a bounded check:
// it can expose negative-probability violations but can never certify the
// model (the general problem is undecidable).
struct OomDepthReport {
  int depth = 0;
  long sequences_checked = 0;
  double min_probability = 0.0;
  struct Violation {
    std::vector<int> sequence;
    double probability;
  };
  std::vector<Violation> violations; // capped at 32 entries
  long violation_count = 0;
  // Per-history normalization diagnostic: max |sum_y p(h y) - p(h)|.
  double max_marginal_residual = 0.0;
  double max_imaginary = 0.0;
  bool bounded_check = true;
};

OomDepthReport validate_oom_depth(const GeneralOom &m, int depth,
                                  const Tolerances &tols =
                                      default_tolerances());
OomDepthReport validate_oom_depth(const StandardOom &m, int depth,
                                  const Tolerances &tols =
                                      default_tolerances());

} // namespace hqmm

#endif
