/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "hqmm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>

#include "hqmm/errors.hpp"
#include "hqmm/rng.hpp"

namespace hqmm {

//=========================================================================
// Description accuracy
//=========================================================================

double da_squash(double x) { return x <= 0.0 ? std::tanh(x / 8.0) : x; }

double da_from_log_prob(double natural_log_prob, long effective_length,
                        int alphabet) {
  if (effective_length < 1 || alphabet < 2) {
    throw InputError("DA needs effective length >= 1 and alphabet >= 2");
  }
  const double log_s = natural_log_prob / std::log(static_cast<double>(
                                              alphabet));
  return da_squash(1.0 + log_s / static_cast<double>(effective_length));
}

DaScore description_accuracy(const ModelSpec &model,
                             std::span<const Sequence> sequences,
                             int burn_in) {
  if (sequences.empty()) {
    throw InputError("description accuracy needs at least one sequence");
  }
  DaScore score;
  score.alphabet = model_alphabet(model);
  score.sequence_count = static_cast<int>(sequences.size());
  std::vector<double> das;
  das.reserve(sequences.size());
  double ell_sum = 0.0;
  for (const auto &seq : sequences) {
    const long ell = static_cast<long>(seq.size()) - burn_in;
    ell_sum += static_cast<double>(ell);
    try {
      const double ll = sequence_log_prob(model, seq, burn_in);
      das.push_back(da_from_log_prob(ll, ell, score.alphabet));
    } catch (const ZeroProbabilityError &) {
      // The x -> -inf limit of the squash.
      das.push_back(-1.0);
      ++score.zero_probability_count;
    }
  }
  const double mean =
      std::accumulate(das.begin(), das.end(), 0.0) /
      static_cast<double>(das.size());
  double var = 0.0;
  for (double d : das) {
    var += (d - mean) * (d - mean);
  }
  var /= static_cast<double>(das.size());
  score.mean = mean;
  score.stddev = std::sqrt(var);
  score.mean_effective_length = ell_sum / static_cast<double>(das.size());
  return score;
}

//=========================================================================
// Classification
//=========================================================================

int argmax_label(std::span<const double> scores, bool *tie) {
  if (scores.empty()) {
    throw InputError("argmax over empty score list");
  }
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i) {
    if (scores[static_cast<std::size_t>(i)] >
        scores[static_cast<std::size_t>(best)]) {
      best = i;
    }
  }
  if (tie != nullptr) {
    *tie = false;
    for (int i = 0; i < static_cast<int>(scores.size()); ++i) {
      if (i != best && scores[static_cast<std::size_t>(i)] ==
                           scores[static_cast<std::size_t>(best)]) {
        *tie = true;
        break;
      }
    }
  }
  return best;
}

int classify(std::span<const ModelSpec> per_label_models,
             std::span<const int> sequence, int burn_in) {
  if (per_label_models.size() < 2) {
    throw InputError("classification needs at least two labels");
  }
  const int s = model_alphabet(per_label_models.front());
  for (const auto &m : per_label_models) {
    if (model_alphabet(m) != s) {
      throw InputError("per-label models must share one alphabet");
    }
  }
  std::vector<double> scores;
  scores.reserve(per_label_models.size());
  int underflows = 0;
  for (const auto &m : per_label_models) {
    try {
      scores.push_back(sequence_log_prob(m, sequence, burn_in));
    } catch (const ZeroProbabilityError &) {
      scores.push_back(-std::numeric_limits<double>::infinity());
      ++underflows;
    }
  }
  if (underflows == static_cast<int>(per_label_models.size())) {
    throw ZeroProbabilityError(
        "every per-label model assigned zero probability; sequence is "
        "unclassifiable");
  }
  bool tie = false;
  const int label = argmax_label(scores, &tie);
  if (tie) {
    std::clog << "classify: tie broken toward label " << label << "\n";
  }
  return label;
}

//=========================================================================
// Baum-Welch
//=========================================================================

namespace {

struct EmAccumulators {
  RMat xi_sum;      // n x n, indexed (to, from)
  RMat gamma_obs;   // s x n
  RVec gamma_from;  // n, sum of gamma_0..T-1 (transition denominators)
  RVec gamma_state; // n, sum of gamma_1..T (emission denominators)
  RVec initial;     // n
  double log_likelihood = 0.0;
  long sequences = 0;
};

// One scaled forward-backward pass; accumulates sufficient statistics.
void em_expectation(const Hmm &h, const Sequence &seq, EmAccumulators &acc) {
  const int n = h.n();
  const auto len = static_cast<long>(seq.size());
  std::vector<RVec> alpha(static_cast<std::size_t>(len) + 1);
  std::vector<double> scale(static_cast<std::size_t>(len) + 1, 1.0);
  alpha[0] = h.initial;
  for (long t = 1; t <= len; ++t) {
    const int y = seq[static_cast<std::size_t>(t - 1)];
    RVec a = h.emission.row(y).transpose().cwiseProduct(
        h.transition * alpha[static_cast<std::size_t>(t - 1)]);
    const double c = a.sum();
    if (c <= default_tolerances().underflow_floor) {
      throw ZeroProbabilityError("EM forward pass underflowed", y, t - 1);
    }
    alpha[static_cast<std::size_t>(t)] = a / c;
    scale[static_cast<std::size_t>(t)] = c;
    acc.log_likelihood += std::log(c);
  }

  std::vector<RVec> beta(static_cast<std::size_t>(len) + 1);
  beta[static_cast<std::size_t>(len)] = RVec::Ones(n);
  for (long t = len; t >= 1; --t) {
    const int y = seq[static_cast<std::size_t>(t - 1)];
    const RVec weighted = h.emission.row(y).transpose().cwiseProduct(
        beta[static_cast<std::size_t>(t)]);
    beta[static_cast<std::size_t>(t - 1)] =
        (h.transition.transpose() * weighted) /
        scale[static_cast<std::size_t>(t)];
  }

  for (long t = 0; t <= len; ++t) {
    const RVec gamma = alpha[static_cast<std::size_t>(t)].cwiseProduct(
        beta[static_cast<std::size_t>(t)]);
    if (t == 0) {
      acc.initial += gamma;
      acc.gamma_from += gamma;
    } else {
      const int y = seq[static_cast<std::size_t>(t - 1)];
      acc.gamma_obs.row(y) += gamma.transpose();
      acc.gamma_state += gamma;
      if (t < len) {
        acc.gamma_from += gamma;
      }
    }
  }
  for (long t = 1; t <= len; ++t) {
    const int y = seq[static_cast<std::size_t>(t - 1)];
    const RVec weighted = h.emission.row(y).transpose().cwiseProduct(
        beta[static_cast<std::size_t>(t)]);
    acc.xi_sum += (weighted * alpha[static_cast<std::size_t>(t - 1)]
                                  .transpose())
                      .cwiseProduct(h.transition) /
                  scale[static_cast<std::size_t>(t)];
  }
  ++acc.sequences;
}

Hmm em_maximization(const Hmm &prev, const EmAccumulators &acc) {
  const int n = prev.n();
  const int s = prev.s();
  Hmm next = prev;
  for (int j = 0; j < n; ++j) {
    if (acc.gamma_from[j] > 0.0) {
      next.transition.col(j) = acc.xi_sum.col(j) / acc.gamma_from[j];
      const double colsum = next.transition.col(j).sum();
      if (colsum > 0.0) {
        next.transition.col(j) /= colsum;
      }
    }
    if (acc.gamma_state[j] > 0.0) {
      for (int y = 0; y < s; ++y) {
        next.emission(y, j) = acc.gamma_obs(y, j) / acc.gamma_state[j];
      }
      const double colsum = next.emission.col(j).sum();
      if (colsum > 0.0) {
        next.emission.col(j) /= colsum;
      }
    }
  }
  next.initial = acc.initial / static_cast<double>(acc.sequences);
  next.initial /= next.initial.sum();
  return next;
}

Hmm random_stochastic_hmm(int n, int s, Rng &rng) {
  Hmm h;
  h.transition.resize(n, n);
  h.emission.resize(s, n);
  for (int j = 0; j < n; ++j) {
    h.transition.col(j) = dirichlet_uniform(rng, n);
    h.emission.col(j) = dirichlet_uniform(rng, s);
  }
  h.initial = dirichlet_uniform(rng, n);
  return h;
}

} // namespace

BaumWelchResult baum_welch(std::span<const Sequence> data, int n, int s,
                           int restarts, std::uint64_t seed,
                           int max_iterations, double improvement_tol) {
  if (data.empty()) {
    throw InputError("Baum-Welch needs nonempty data");
  }
  if (n < 1 || s < 1 || restarts < 1) {
    throw InputError("Baum-Welch needs n, s, restarts >= 1");
  }
  for (const auto &seq : data) {
    if (seq.empty()) {
      throw InputError("Baum-Welch sequences must be nonempty");
    }
    for (int y : seq) {
      if (y < 0 || y >= s) {
        throw InputError("symbol outside alphabet in EM training data");
      }
    }
  }

  BaumWelchResult best;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Hmm model = random_stochastic_hmm(n, s, rng);
    std::vector<double> trace;
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iterations; ++it) {
      EmAccumulators acc{RMat::Zero(n, n), RMat::Zero(s, n), RVec::Zero(n),
                         RVec::Zero(n),    RVec::Zero(n),    0.0,
                         0};
      for (const auto &seq : data) {
        em_expectation(model, seq, acc);
      }
      trace.push_back(acc.log_likelihood);
      model = em_maximization(model, acc);
      if (it > 0 && acc.log_likelihood - prev_ll < improvement_tol) {
        prev_ll = acc.log_likelihood;
        break;
      }
      prev_ll = acc.log_likelihood;
    }
    if (prev_ll > best_ll) {
      best_ll = prev_ll;
      best.model = model;
      best.iteration_log_likelihoods = trace;
      best.best_restart = r;
    }
    best.restart_log_likelihoods.push_back(prev_ll);
  }
  return best;
}

//=========================================================================
// Cross validation
//=========================================================================

std::vector<FoldSplit> kfold_split(std::span<const int> labels, int k,
                                   std::uint64_t seed) {
  if (k < 2) {
    throw InputError("k-fold split needs k >= 2");
  }
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_label[labels[i]].push_back(i);
  }
  for (const auto &[label, indices] : by_label) {
    if (static_cast<int>(indices.size()) < k) {
      throw InputError("label " + std::to_string(label) + " has only " +
                       std::to_string(indices.size()) +
                       " examples; needs at least " + std::to_string(k));
    }
  }
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (auto &[label, indices] : by_label) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    for (std::size_t i = indices.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(
          rng.uniform() * static_cast<double>(i + 1));
      std::swap(indices[i], indices[std::min(j, i)]);
    }
    for (std::size_t i = 0; i < indices.size(); ++i) {
      folds[i % static_cast<std::size_t>(k)].push_back(indices[i]);
    }
  }
  std::vector<FoldSplit> out(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    auto &split = out[static_cast<std::size_t>(f)];
    split.test_indices = folds[static_cast<std::size_t>(f)];
    std::sort(split.test_indices.begin(), split.test_indices.end());
    for (int g = 0; g < k; ++g) {
      if (g == f) {
        continue;
      }
      split.train_indices.insert(split.train_indices.end(),
                                 folds[static_cast<std::size_t>(g)].begin(),
                                 folds[static_cast<std::size_t>(g)].end());
    }
    std::sort(split.train_indices.begin(), split.train_indices.end());
  }
  return out;
}

//=========================================================================
// Speedup extrapolation
//=========================================================================

SpeedupEstimate estimate_speedup(const Trajectory &baseline,
                                 const Trajectory &target,
                                 double solution_fraction,
                                 double convergence_tol) {
  constexpr std::size_t kFitPoints = 10;
  if (baseline.size() < kFitPoints) {
    throw InputError("baseline trajectory needs at least 10 points");
  }
  if (target.size() < 2) {
    throw InputError("target trajectory needs at least 2 points");
  }
  const double final_da = target.back().da;
  if (std::abs(target[target.size() - 2].da - final_da) > convergence_tol) {
    throw InputError("target trajectory has not converged");
  }
  // First point after which the target stays within tolerance of its final
  // DA.
  std::size_t conv = target.size() - 1;
  while (conv > 0 &&
         std::abs(target[conv - 1].da - final_da) <= convergence_tol) {
    --conv;
  }

  SpeedupEstimate est;
  est.target_da = solution_fraction * final_da;
  est.target_convergence_seconds = target[conv].seconds;

  // Fit the last 10 baseline points (the paper's optimistic linear model).
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = baseline.size() - kFitPoints; i < baseline.size();
       ++i) {
    sx += baseline[i].seconds;
    sy += baseline[i].da;
    sxx += baseline[i].seconds * baseline[i].seconds;
    sxy += baseline[i].seconds * baseline[i].da;
  }
  const double np = static_cast<double>(kFitPoints);
  const double denom = np * sxx - sx * sx;
  est.fitted_slope = denom != 0.0 ? (np * sxy - sx * sy) / denom : 0.0;
  est.fitted_intercept = (sy - est.fitted_slope * sx) / np;

  // Prefer an observed crossing; extrapolate only beyond the data.
  for (const auto &point : baseline) {
    if (point.da >= est.target_da) {
      est.baseline_crossing_seconds = point.seconds;
      est.baseline_crossed_in_data = true;
      break;
    }
  }
  if (!est.baseline_crossed_in_data) {
    if (est.fitted_slope <= 0.0) {
      est.infinite = true;
      est.speedup = std::numeric_limits<double>::infinity();
      return est;
    }
    est.baseline_crossing_seconds =
        (est.target_da - est.fitted_intercept) / est.fitted_slope;
  }
  est.speedup =
      est.baseline_crossing_seconds / est.target_convergence_seconds;
  return est;
}

} // namespace hqmm
