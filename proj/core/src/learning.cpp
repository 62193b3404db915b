/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "hqmm/learning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "hqmm/errors.hpp"
#include "hqmm/evaluation.hpp"
#include "hqmm/parallel.hpp"
#include "hqmm/rng.hpp"

namespace hqmm {

void Arch::validate() const {
  if (n < 1 || s < 1 || w < 1) {
    throw ConfigError("architecture (n, s, w) must be positive");
  }
}

const char *update_scheme_name(UpdateScheme scheme) {
  return scheme == UpdateScheme::wen_yin ? "wen-yin" : "projection";
}

UpdateScheme parse_update_scheme(const std::string &name) {
  if (name == "wen-yin" || name == "wen_yin") {
    return UpdateScheme::wen_yin;
  }
  if (name == "projection") {
    return UpdateScheme::projection;
  }
  throw ConfigError("unknown update scheme '" + name + "'");
}

void TrainingConfig::validate() const {
  if (!(tau > 0.0)) {
    throw ConfigError("step size tau must be positive");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("decay rate alpha must lie in (0, 1]");
  }
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw ConfigError("momentum beta must lie in [0, 1)");
  }
  if (epochs < 0 || burn_in < 0 || batches < 0 || batch_size < 0) {
    throw ConfigError("counts must be nonnegative");
  }
  if (batches == 0 && batch_size == 0) {
    throw ConfigError("one of batches / batch_size must be set");
  }
  if (reorth_period < 1 || !(reorth_tol > 0.0)) {
    throw ConfigError("invalid reorthonormalization policy");
  }
}

CMat GradientStack::block(int output, int op) const {
  const Eigen::Index n = stack.cols();
  return stack.block((static_cast<Eigen::Index>(output) * per_output + op) * n,
                     0, n, n);
}

//=========================================================================
// Loss and gradient
//=========================================================================

namespace {

std::vector<CMat> unpack_blocks(const StiefelPoint &kappa) {
  std::vector<CMat> ops;
  ops.reserve(static_cast<std::size_t>(kappa.block_count()));
  for (int i = 0; i < kappa.block_count(); ++i) {
    ops.push_back(kappa.block(i));
  }
  return ops;
}

// Negative log-likelihood of one sequence and (optionally) its gradient
// with respect to the conjugated Kraus operators, accumulated into grad.
// Positions before burn_in normalize the state but contribute no log terms;
// burn_in >= length gives a zero contribution.
double sequence_nll(const std::vector<CMat> &ops, int s, int w,
                    const CMat &rho0, std::span<const int> seq, int burn_in,
                    CMat *grad) {
  const int n = static_cast<int>(rho0.rows());
  const auto len = static_cast<long>(seq.size());
  const double floor = default_tolerances().underflow_floor;

  // Forward pass: normalized states and per-step normalizers.
  std::vector<CMat> states;
  states.reserve(static_cast<std::size_t>(len) + 1);
  states.push_back(rho0);
  std::vector<double> probs(static_cast<std::size_t>(len));
  double nll = 0.0;
  for (long t = 0; t < len; ++t) {
    const int y = seq[static_cast<std::size_t>(t)];
    if (y < 0 || y >= s) {
      throw InputError("symbol " + std::to_string(y) +
                       " outside alphabet of size " + std::to_string(s));
    }
    CMat conditioned = CMat::Zero(n, n);
    const CMat &rho = states.back();
    for (int u = 0; u < w; ++u) {
      const CMat &k = ops[static_cast<std::size_t>(y * w + u)];
      conditioned.noalias() += k * rho * k.adjoint();
    }
    const double p = conditioned.trace().real();
    if (p <= floor) {
      throw ZeroProbabilityError("step probability for symbol " +
                                     std::to_string(y) +
                                     " fell below the underflow floor",
                                 y, t);
    }
    conditioned /= p;
    states.push_back(std::move(conditioned));
    probs[static_cast<std::size_t>(t)] = p;
    if (t >= burn_in) {
      nll -= std::log(p);
    }
  }

  if (grad == nullptr) {
    return nll;
  }

  // Backward pass. D = d(nll)/d(rho_t); A = d(nll)/d(sigma_t) where
  // sigma_t is the unnormalized conditioned state. The contribution of
  // step t to each active operator is conj(A + A^dag) K rho_{t-1}.
  CMat d = CMat::Zero(n, n);
  const CMat id = CMat::Identity(n, n);
  for (long t = len - 1; t >= 0; --t) {
    const int y = seq[static_cast<std::size_t>(t)];
    const double p = probs[static_cast<std::size_t>(t)];
    const CMat &rho_t = states[static_cast<std::size_t>(t) + 1];
    const CMat &rho_prev = states[static_cast<std::size_t>(t)];
    const double counted = (t >= burn_in) ? 1.0 : 0.0;
    const double d_dot_rho = d.cwiseProduct(rho_t).sum().real();
    const double s_total = -counted / p - (2.0 / p) * d_dot_rho;
    const CMat a = d / p + (0.5 * s_total) * id;
    const CMat bc = (a + a.adjoint()).conjugate();
    CMat d_next = CMat::Zero(n, n);
    for (int u = 0; u < w; ++u) {
      const CMat &k = ops[static_cast<std::size_t>(y * w + u)];
      grad->block((static_cast<Eigen::Index>(y) * w + u) * n, 0, n, n)
          .noalias() += bc * k * rho_prev;
      d_next.noalias() += k.transpose() * a * k.conjugate();
    }
    d = std::move(d_next);
  }
  return nll;
}

struct BatchResult {
  double loss = 0.0;
  CMat grad;
};

BatchResult batch_pass(const StiefelPoint &kappa, const DensityMatrix &rho0,
                       std::span<const Sequence> batch, int burn_in,
                       bool want_grad) {
  if (burn_in < 0) {
    throw InputError("burn-in must be nonnegative");
  }
  const auto ops = unpack_blocks(kappa);
  const int s = kappa.outputs();
  const int w = kappa.per_output();
  BatchResult out;
  if (want_grad) {
    out.grad = CMat::Zero(kappa.stack().rows(), kappa.stack().cols());
  }
  if (batch.empty()) {
    return out;
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    try {
      out.loss += sequence_nll(ops, s, w, rho0.matrix(), batch[i], burn_in,
                               want_grad ? &out.grad : nullptr);
    } catch (const ZeroProbabilityError &e) {
      throw ZeroProbabilityError(std::string(e.what()) + " in sequence " +
                                     std::to_string(i),
                                 e.symbol, e.position, static_cast<long>(i));
    }
  }
  const double m = static_cast<double>(batch.size());
  out.loss /= m;
  if (want_grad) {
    out.grad /= m;
  }
  return out;
}

} // namespace

double batch_loss(const StiefelPoint &kappa, const DensityMatrix &rho0,
                  std::span<const Sequence> batch, int burn_in) {
  return batch_pass(kappa, rho0, batch, burn_in, false).loss;
}

GradientStack conjugate_gradient(const StiefelPoint &kappa,
                                 const DensityMatrix &rho0,
                                 std::span<const Sequence> batch,
                                 int burn_in) {
  auto result = batch_pass(kappa, rho0, batch, burn_in, true);
  return GradientStack{std::move(result.grad), kappa.outputs(),
                       kappa.per_output()};
}

LossAndGradient loss_and_gradient(const StiefelPoint &kappa,
                                  const DensityMatrix &rho0,
                                  std::span<const Sequence> batch,
                                  int burn_in) {
  auto result = batch_pass(kappa, rho0, batch, burn_in, true);
  return {result.loss, GradientStack{std::move(result.grad), kappa.outputs(),
                                     kappa.per_output()}};
}

CMat stiefel_tangent_component(const StiefelPoint &kappa, const CMat &g) {
  const CMat &x = kappa.stack();
  const CMat xg = x.adjoint() * g;
  return g - x * ((xg + xg.adjoint()) / 2.0);
}

//=========================================================================
// Updates
//=========================================================================

std::pair<CMat, CMat> momentum_renorm(const CMat &g, const CMat &momentum,
                                      double beta) {
  if (momentum.size() != 0 &&
      (momentum.rows() != g.rows() || momentum.cols() != g.cols())) {
    throw DimensionError("momentum buffer shape mismatch");
  }
  CMat gn = g;
  const double gnorm = gn.norm();
  if (gnorm >= 1e-15) {
    gn /= gnorm;
  }
  CMat buffer = momentum.size() == 0
                    ? gn
                    : CMat(beta * momentum + gn);
  CMat direction = buffer;
  const double mnorm = direction.norm();
  if (mnorm >= 1e-15) {
    direction /= mnorm;
  }
  return {std::move(direction), std::move(buffer)};
}

StiefelPoint wen_yin_retraction(const StiefelPoint &kappa0, const CMat &g,
                                double tau) {
  const CMat &x = kappa0.stack();
  if (g.rows() != x.rows() || g.cols() != x.cols()) {
    throw DimensionError("gradient shape does not match the Stiefel point");
  }
  const Eigen::Index n = x.cols();
  CMat u(x.rows(), 2 * n);
  u << g, x;
  CMat v(x.rows(), 2 * n);
  v << x, -g;
  const CMat m = CMat::Identity(2 * n, 2 * n) + (tau / 2.0) * (v.adjoint() * u);
  Eigen::PartialPivLU<CMat> lu(m);
  if (lu.rcond() < 1e-12) {
    throw StepError("retraction system is ill conditioned; reduce the step "
                    "size");
  }
  CMat out = x - tau * (u * lu.solve(v.adjoint() * x));
  return StiefelPoint::unchecked(std::move(out), kappa0.outputs(),
                                 kappa0.per_output());
}

StiefelPoint projection_update(const StiefelPoint &kappa0, const CMat &g,
                               double tau) {
  const CMat &x = kappa0.stack();
  if (g.rows() != x.rows() || g.cols() != x.cols()) {
    throw DimensionError("gradient shape does not match the Stiefel point");
  }
  CMat stepped = x - tau * g;
  return StiefelPoint::unchecked(polar_orthonormal(stepped),
                                 kappa0.outputs(), kappa0.per_output());
}

//=========================================================================
// Trainer
//=========================================================================

struct Trainer::Impl {
  SequenceList data;
  SequenceList validation;
  Arch arch;
  TrainingConfig config;

  CMat kappa;
  CMat momentum;
  CMat rho0;
  double tau = 0.0;
  int epoch = 0; // epochs completed
  long steps = 0;
  int steps_since_reorth = 0;
  std::chrono::steady_clock::time_point start;

  std::vector<EpochRecord> records;
  std::vector<double> step_residuals;
  double initial_da = 0.0;
  CMat best_kappa;
  double best_da = 0.0;
  int best_epoch = 0;
  long skipped_batches = 0;
  long halvings = 0;

  KHqmm model_from(const CMat &k) const {
    return KHqmm{StiefelPoint::unchecked(k, arch.s, arch.w),
                 DensityMatrix::unchecked(rho0)};
  }

  double validation_da() const {
    if (validation.empty()) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return description_accuracy(ModelSpec(model_from(kappa)), validation,
                                config.burn_in)
        .mean;
  }

  StiefelPoint point() const {
    return StiefelPoint::unchecked(kappa, arch.s, arch.w);
  }

  void apply_update(const CMat &direction, double step_tau) {
    if (config.update_scheme == UpdateScheme::wen_yin) {
      kappa = wen_yin_retraction(point(), direction, step_tau).stack();
    } else {
      kappa = projection_update(point(), direction, step_tau).stack();
    }
  }

  void run_one_epoch();
};

void Trainer::Impl::run_one_epoch() {
  const long m = static_cast<long>(data.size());
  // Reshuffle every epoch with a seed derived from the run seed so resumed
  // runs see the same order.
  std::vector<long> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(derive_seed(config.seed, 0x9100u + epoch));
  for (long i = m - 1; i > 0; --i) {
    const long j = static_cast<long>(shuffle_rng.uniform() *
                                     static_cast<double>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(std::min(j, i))]);
  }

  int chunk = config.batch_size;
  if (chunk == 0) {
    chunk = static_cast<int>((m + config.batches - 1) / config.batches);
  }
  long available = (m + chunk - 1) / chunk;
  long n_batches = config.batches == 0
                       ? available
                       : std::min<long>(config.batches, available);

  double loss_sum = 0.0;
  long loss_count = 0;
  double max_residual = 0.0;
  for (long b = 0; b < n_batches; ++b) {
    SequenceList batch;
    const long lo = b * chunk;
    const long hi = std::min(m, lo + chunk);
    batch.reserve(static_cast<std::size_t>(hi - lo));
    for (long i = lo; i < hi; ++i) {
      batch.push_back(data[static_cast<std::size_t>(order[
          static_cast<std::size_t>(i)])]);
    }

    LossAndGradient lg = [&] {
      try {
        return loss_and_gradient(point(),
                                 DensityMatrix::unchecked(rho0), batch,
                                 config.burn_in);
      } catch (const ZeroProbabilityError &e) {
        throw ZeroProbabilityError(
            "training aborted: " + std::string(e.what()) + " in batch " +
                std::to_string(b) + " of epoch " + std::to_string(epoch + 1),
            e.symbol, e.position, e.sequence_index);
      }
    }();
    loss_sum += lg.loss;
    ++loss_count;

    auto [direction, buffer] =
        momentum_renorm(lg.gradient.stack, momentum, config.beta);
    momentum = std::move(buffer);

    // Ill-conditioned steps retry with halved tau, then skip the batch.
    double step_tau = tau;
    bool applied = false;
    for (int attempt = 0; attempt < 5; ++attempt) {
      try {
        apply_update(direction, step_tau);
        applied = true;
        break;
      } catch (const StepError &) {
        step_tau /= 2.0;
        ++halvings;
      }
    }
    if (!applied) {
      ++skipped_batches;
      continue;
    }

    ++steps;
    const double residual = orthonormality_residual(kappa);
    step_residuals.push_back(residual);
    max_residual = std::max(max_residual, residual);
    if (++steps_since_reorth >= config.reorth_period) {
      steps_since_reorth = 0;
      if (residual > config.reorth_tol) {
        kappa = polar_orthonormal(kappa);
      }
    }
  }

  tau *= config.alpha;
  ++epoch;

  EpochRecord rec;
  rec.epoch = epoch;
  rec.mean_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count)
                                 : 0.0;
  rec.validation_da = validation_da();
  rec.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  rec.max_orthonormality_residual = max_residual;
  records.push_back(rec);

  if (!validation.empty() && rec.validation_da > best_da) {
    best_da = rec.validation_da;
    best_epoch = epoch;
    best_kappa = kappa;
  }
}

Trainer::Trainer(SequenceList data, Arch arch, TrainingConfig config,
                 SequenceList validation)
    : impl_(std::make_unique<Impl>()) {
  arch.validate();
  config.validate();
  if (data.empty()) {
    throw InputError("training data is empty");
  }
  for (const auto &seq : data) {
    for (int y : seq) {
      if (y < 0 || y >= arch.s) {
        throw InputError("training symbol " + std::to_string(y) +
                         " outside alphabet of size " + std::to_string(arch.s));
      }
    }
  }
  impl_->data = std::move(data);
  impl_->validation = std::move(validation);
  impl_->arch = arch;
  impl_->config = config;
  impl_->kappa =
      random_orthonormal(arch.n * arch.s * arch.w, arch.n,
                         derive_seed(config.seed, 0xA11u));
  impl_->rho0 = random_density(arch.n, derive_seed(config.seed, 0xB22u))
                    .matrix();
  impl_->momentum = CMat();
  impl_->tau = config.tau;
  impl_->start = std::chrono::steady_clock::now();
  impl_->initial_da = impl_->validation_da();
  impl_->best_da = impl_->validation.empty()
                       ? -std::numeric_limits<double>::infinity()
                       : impl_->initial_da;
  impl_->best_kappa = impl_->kappa;
}

Trainer::~Trainer() = default;
Trainer::Trainer(Trainer &&) noexcept = default;
Trainer &Trainer::operator=(Trainer &&) noexcept = default;

void Trainer::run_epochs(int epochs) {
  for (int e = 0; e < epochs; ++e) {
    impl_->run_one_epoch();
  }
}

int Trainer::epochs_trained() const { return impl_->epoch; }

double Trainer::latest_validation_da() const {
  return impl_->records.empty() ? impl_->initial_da
                                : impl_->records.back().validation_da;
}

double Trainer::best_validation_da() const { return impl_->best_da; }

KHqmm Trainer::current_model() const {
  return impl_->model_from(impl_->kappa);
}

TrainingRun Trainer::snapshot_run() const {
  const Impl &s = *impl_;
  TrainingRun run{
      s.arch,
      s.config,
      s.records,
      s.step_residuals,
      s.model_from(s.best_kappa),
      s.best_da,
      s.best_epoch,
      s.model_from(s.kappa),
      s.initial_da,
      s.skipped_batches,
      s.halvings,
  };
  return run;
}

TrainingRun train(SequenceList data, Arch arch, const TrainingConfig &config,
                  SequenceList validation) {
  Trainer trainer(std::move(data), arch, config, std::move(validation));
  trainer.run_epochs(config.epochs);
  return trainer.snapshot_run();
}

//=========================================================================
// Hyperband
//=========================================================================

namespace {

std::vector<int> hyperband_budgets(int k) {
  switch (k) {
  case 27:
    return {3, 9, 9, 27};
  case 9:
    return {3, 9, 27};
  case 1:
    return {27};
  default:
    throw ConfigError("hyperband supports k in {1, 9, 27}; got " +
                      std::to_string(k));
  }
}

} // namespace

HyperbandResult hyperband_search(HyperbandRange tau_range,
                                 HyperbandRange alpha_range, int k,
                                 const SequenceList &data, Arch arch,
                                 const TrainingConfig &base,
                                 const SequenceList &validation, int jobs) {
  const std::vector<int> budgets = hyperband_budgets(k);
  if (!(tau_range.lo <= tau_range.hi) ||
      !(alpha_range.lo <= alpha_range.hi)) {
    throw ConfigError("hyperband ranges must satisfy lo <= hi");
  }

  HyperbandResult result;
  std::vector<Trainer> trainers;
  trainers.reserve(static_cast<std::size_t>(k));
  Rng sampler(derive_seed(base.seed, 0xC0FFEEu));
  for (int i = 0; i < k; ++i) {
    TrainingConfig config = base;
    config.tau = sampler.uniform(tau_range.lo, tau_range.hi);
    config.alpha = sampler.uniform(alpha_range.lo, alpha_range.hi);
    config.seed = derive_seed(base.seed, static_cast<std::uint64_t>(i));
    config.epochs = 0; // epochs are scheduled per round
    HyperbandTrial trial;
    trial.trial_id = i;
    trial.tau = config.tau;
    trial.alpha = config.alpha;
    result.trials.push_back(trial);
    trainers.emplace_back(data, arch, config, validation);
  }

  std::vector<int> active(static_cast<std::size_t>(k));
  std::iota(active.begin(), active.end(), 0);

  for (std::size_t round = 0; round < budgets.size(); ++round) {
    const int budget = budgets[round];
    HyperbandRound record;
    record.round_index = static_cast<int>(round);
    record.survivors = static_cast<int>(active.size());
    record.epoch_budget = budget;
    record.trial_ids = active;
    result.rounds.push_back(record);

    parallel_for(static_cast<int>(active.size()), jobs, [&](int idx) {
      trainers[static_cast<std::size_t>(active[
          static_cast<std::size_t>(idx)])].run_epochs(budget);
    });
    for (int id : active) {
      auto &trial = result.trials[static_cast<std::size_t>(id)];
      auto &trainer = trainers[static_cast<std::size_t>(id)];
      trial.latest_validation_da = trainer.latest_validation_da();
      trial.best_validation_da = trainer.best_validation_da();
      trial.epochs_trained = trainer.epochs_trained();
    }

    if (round + 1 < budgets.size()) {
      // Keep the top third by current validation DA; ties favor lower ids.
      std::stable_sort(active.begin(), active.end(), [&](int a, int b) {
        return result.trials[static_cast<std::size_t>(a)]
                   .latest_validation_da >
               result.trials[static_cast<std::size_t>(b)]
                   .latest_validation_da;
      });
      const auto keep = active.size() / 3;
      for (std::size_t i = keep; i < active.size(); ++i) {
        result.trials[static_cast<std::size_t>(active[i])]
            .eliminated_after_round = static_cast<int>(round);
      }
      active.resize(keep);
      std::sort(active.begin(), active.end());
    }
  }

  // The winner is the configuration with the highest validation DA seen at
  // any point in the protocol.
  int best_id = 0;
  double best_da = -std::numeric_limits<double>::infinity();
  for (const auto &trial : result.trials) {
    if (trial.best_validation_da > best_da) {
      best_da = trial.best_validation_da;
      best_id = trial.trial_id;
    }
  }
  result.best_trial_id = best_id;
  result.best_run = trainers[static_cast<std::size_t>(best_id)].snapshot_run();
  return result;
}

} // namespace hqmm
