/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "hqmm/models.hpp"

#include <cmath>
#include <string>

#include "hqmm/errors.hpp"
#include "hqmm/representations.hpp"
#include "hqmm/rng.hpp"

namespace hqmm {

namespace {

void check_symbol(int y, int s) {
  if (y < 0 || y >= s) {
    throw InputError("symbol " + std::to_string(y) +
                     " outside alphabet of size " + std::to_string(s));
  }
}

void check_burn_in(int burn_in, std::size_t length) {
  if (burn_in < 0 || static_cast<std::size_t>(burn_in) >= length) {
    throw InputError("burn-in " + std::to_string(burn_in) +
                     " must be shorter than the sequence (length " +
                     std::to_string(length) + ")");
  }
}

[[noreturn]] void throw_zero_probability(int symbol) {
  throw ZeroProbabilityError("step probability for symbol " +
                                 std::to_string(symbol) +
                                 " fell below the underflow floor",
                             symbol);
}

// Takes the real part of a nominally real quantity; imaginary noise above
// the tolerance means the model itself is broken.
double extract_probability(Complex z, const Tolerances &tols,
                           const char *context) {
  if (std::abs(z.imag()) > tols.imaginary_part) {
    throw ValidityError(std::string(context) +
                        ": probability has imaginary part " +
                        std::to_string(z.imag()));
  }
  return z.real();
}

} // namespace

int LHqmm::n() const {
  return static_cast<int>(std::llround(std::sqrt(static_cast<double>(dim()))));
}

int model_alphabet(const ModelSpec &model) {
  return std::visit([](const auto &m) { return m.s(); }, model);
}

const char *family_name(const ModelSpec &model) {
  struct Visitor {
    const char *operator()(const Hmm &) const { return "hmm"; }
    const char *operator()(const StandardOom &) const { return "standard_oom"; }
    const char *operator()(const GeneralOom &) const { return "general_oom"; }
    const char *operator()(const Noom &) const { return "noom"; }
    const char *operator()(const KHqmm &) const { return "khqmm"; }
    const char *operator()(const LHqmm &) const { return "lhqmm"; }
  };
  return std::visit(Visitor{}, model);
}

//=========================================================================
// Validation
//=========================================================================

void validate_hmm(const Hmm &h, const Tolerances &tols) {
  const int n = h.n();
  if (n < 1 || h.transition.cols() != n || h.emission.cols() != n ||
      h.initial.size() != n || h.s() < 1) {
    throw DimensionError("HMM has inconsistent shapes");
  }
  if (!all_finite(h.transition) || !all_finite(h.emission) ||
      !h.initial.allFinite()) {
    throw ValidityError("HMM has non-finite parameters");
  }
  if (h.transition.minCoeff() < -tols.stochastic ||
      h.emission.minCoeff() < -tols.stochastic) {
    throw ValidityError("HMM parameters must be nonnegative");
  }
  for (int j = 0; j < n; ++j) {
    if (std::abs(h.transition.col(j).sum() - 1.0) > tols.stochastic) {
      throw ValidityError("HMM transition column " + std::to_string(j) +
                          " sums to " + std::to_string(h.transition.col(j).sum()));
    }
    if (std::abs(h.emission.col(j).sum() - 1.0) > tols.stochastic) {
      throw ValidityError("HMM emission column " + std::to_string(j) +
                          " sums to " + std::to_string(h.emission.col(j).sum()));
    }
  }
  validate_belief(h.initial, tols);
}

void validate_standard_oom(const StandardOom &m, const Tolerances &tols) {
  const int n = m.n();
  if (n < 1 || m.s() < 1) {
    throw DimensionError("OOM has empty state or alphabet");
  }
  RMat sum = RMat::Zero(n, n);
  for (const auto &op : m.operators) {
    if (op.rows() != n || op.cols() != n) {
      throw DimensionError("OOM operator shape mismatch");
    }
    if (!all_finite(op)) {
      throw ValidityError("OOM operator has non-finite entries");
    }
    sum += op;
  }
  // 1^T sum_y T_y = 1^T; validity against negative probabilities is only
  // checked to bounded depth (validate_oom_depth), never proven.
  const RVec colsums = sum.colwise().sum();
  if ((colsums.array() - 1.0).abs().maxCoeff() > tols.oom_functional) {
    throw ValidityError("OOM operators do not satisfy 1^T sum T_y = 1^T");
  }
  if (std::abs(m.initial.sum() - 1.0) > tols.oom_functional) {
    throw ValidityError("OOM initial state sums to " +
                        std::to_string(m.initial.sum()));
  }
}

void validate_general_oom(const GeneralOom &m, const Tolerances &tols) {
  const int n = m.n();
  if (n < 1 || m.s() < 1 || m.functional.size() != n) {
    throw DimensionError("general OOM has inconsistent shapes");
  }
  CMat sum = CMat::Zero(n, n);
  for (const auto &op : m.operators) {
    if (op.rows() != n || op.cols() != n) {
      throw DimensionError("general OOM operator shape mismatch");
    }
    if (!all_finite(op)) {
      throw ValidityError("general OOM operator has non-finite entries");
    }
    sum += op;
  }
  const Complex norm = m.functional.adjoint() * m.initial;
  if (std::abs(norm - Complex(1.0, 0.0)) > tols.oom_functional) {
    throw ValidityError("general OOM: sigma^dag x0 differs from 1");
  }
  // Sufficient condition for the per-history marginal normalization.
  const CVec lhs = (m.functional.adjoint() * sum).adjoint();
  if ((lhs - m.functional).norm() > tols.oom_functional) {
    throw ValidityError("general OOM: sigma^dag sum tau_y != sigma^dag");
  }
}

void validate_noom(const Noom &m, const Tolerances &tols) {
  const int n = m.n();
  if (n < 1 || m.s() < 1) {
    throw DimensionError("NOOM has empty state or alphabet");
  }
  RMat sum = RMat::Zero(n, n);
  for (const auto &op : m.operators) {
    if (op.rows() != n || op.cols() != n) {
      throw DimensionError("NOOM operator shape mismatch");
    }
    sum += op.transpose() * op;
  }
  if ((sum - RMat::Identity(n, n)).norm() > tols.noom_completeness) {
    throw ValidityError("NOOM operators do not satisfy sum phi^T phi = I");
  }
  if (std::abs(m.initial.norm() - 1.0) > tols.noom_completeness) {
    throw ValidityError("NOOM initial state is not unit norm");
  }
}

void validate_khqmm(const KHqmm &m, const Tolerances &tols) {
  const int n = m.n();
  if (m.initial.dim() != n) {
    throw DimensionError("K-HQMM initial state dimension mismatch");
  }
  CMat sum = CMat::Zero(n, n);
  for (int i = 0; i < m.kraus.block_count(); ++i) {
    const CMat k = m.kraus.block(i);
    sum += k.adjoint() * k;
  }
  if ((sum - CMat::Identity(n, n)).norm() > tols.khqmm_tp) {
    throw ValidityError("K-HQMM Kraus operators are not trace preserving");
  }
  DensityMatrix::validated(m.initial.matrix(), tols);
}

void validate_lhqmm(const LHqmm &m, const Tolerances &tols) {
  const int d = m.dim();
  const int n = m.n();
  if (n * n != d || m.s() < 1) {
    throw DimensionError("L-HQMM dimension is not a perfect square");
  }
  CMat sum = CMat::Zero(d, d);
  for (const auto &l : m.superoperators) {
    if (l.rows() != d || l.cols() != d) {
      throw DimensionError("L-HQMM superoperator shape mismatch");
    }
    sum += l;
    const CMat choi = reshuffle(l);
    const double hp = (choi - choi.adjoint()).norm();
    if (hp > tols.channel_hermitian) {
      throw ValidityError("L-HQMM Choi matrix not Hermitian: residual " +
                          std::to_string(hp));
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(
        ((choi + choi.adjoint()) / 2.0).eval(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tols.channel_min_eig) {
      throw ValidityError("L-HQMM Choi matrix not PSD: min eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()));
    }
  }
  const CVec id = vectorized_identity(n);
  const CVec tp = (id.transpose() * sum).transpose();
  if ((tp - id).norm() > tols.channel_tp) {
    throw ValidityError("L-HQMM superoperators are not trace preserving");
  }
  DensityMatrix::validated(devectorize(m.initial_vec, n), tols);
}

void validate_model(const ModelSpec &model, const Tolerances &tols) {
  std::visit([&tols](const auto &m) {
    using T = std::decay_t<decltype(m)>;
    if constexpr (std::is_same_v<T, Hmm>) {
      validate_hmm(m, tols);
    } else if constexpr (std::is_same_v<T, StandardOom>) {
      validate_standard_oom(m, tols);
    } else if constexpr (std::is_same_v<T, GeneralOom>) {
      validate_general_oom(m, tols);
    } else if constexpr (std::is_same_v<T, Noom>) {
      validate_noom(m, tols);
    } else if constexpr (std::is_same_v<T, KHqmm>) {
      validate_khqmm(m, tols);
    } else {
      validate_lhqmm(m, tols);
    }
  }, model);
}

//=========================================================================
// Single-step filtering
//=========================================================================

std::pair<RVec, double> hmm_step(const Hmm &h, const RVec &x, int y) {
  check_symbol(y, h.s());
  const auto &tols = default_tolerances();
  RVec conditioned =
      h.emission.row(y).transpose().cwiseProduct(h.transition * x);
  const double p = conditioned.sum();
  if (p <= tols.underflow_floor) {
    throw_zero_probability(y);
  }
  conditioned /= p;
  return {std::move(conditioned), p};
}

std::pair<CVec, double> oom_step_and_prob(const GeneralOom &m, const CVec &x,
                                          int y) {
  check_symbol(y, m.s());
  if (x.size() != m.n()) {
    throw DimensionError("OOM state dimension mismatch");
  }
  const auto &tols = default_tolerances();
  CVec next = m.operators[static_cast<std::size_t>(y)] * x;
  const Complex pz = m.functional.adjoint() * next;
  const double p = extract_probability(pz, tols, "oom_step_and_prob");
  if (p < -tols.npp) {
    throw NppViolationError("OOM assigned probability " + std::to_string(p) +
                            " to symbol " + std::to_string(y));
  }
  if (std::abs(p) <= tols.underflow_floor) {
    throw_zero_probability(y);
  }
  next /= p;
  return {std::move(next), p};
}

std::pair<RVec, double> oom_step_and_prob(const StandardOom &m, const RVec &x,
                                          int y) {
  check_symbol(y, m.s());
  if (x.size() != m.n()) {
    throw DimensionError("OOM state dimension mismatch");
  }
  const auto &tols = default_tolerances();
  RVec next = m.operators[static_cast<std::size_t>(y)] * x;
  const double p = next.sum();
  if (p < -tols.npp) {
    throw NppViolationError("OOM assigned probability " + std::to_string(p) +
                            " to symbol " + std::to_string(y));
  }
  if (std::abs(p) <= tols.underflow_floor) {
    throw_zero_probability(y);
  }
  next /= p;
  return {std::move(next), p};
}

std::pair<RVec, double> noom_step_and_prob(const Noom &m, const RVec &v,
                                           int y) {
  check_symbol(y, m.s());
  if (v.size() != m.n()) {
    throw DimensionError("NOOM state dimension mismatch");
  }
  RVec next = m.operators[static_cast<std::size_t>(y)] * v;
  const double norm = next.norm();
  const double p = norm * norm;
  if (p <= default_tolerances().underflow_floor) {
    throw_zero_probability(y);
  }
  next /= norm;
  return {std::move(next), p};
}

namespace {

// Unnormalized conditioned state sum_u K_{y,u} rho K_{y,u}^dag.
CMat khqmm_conditioned(const KHqmm &m, const CMat &rho, int y) {
  const int n = m.n();
  CMat out = CMat::Zero(n, n);
  for (int u = 0; u < m.w(); ++u) {
    const CMat k = m.kraus.block(y, u);
    out.noalias() += k * rho * k.adjoint();
  }
  return out;
}

} // namespace

std::pair<DensityMatrix, double> khqmm_step(const KHqmm &m,
                                            const DensityMatrix &rho, int y) {
  check_symbol(y, m.s());
  const auto &tols = default_tolerances();
  CMat conditioned = khqmm_conditioned(m, rho.matrix(), y);
  const double p =
      extract_probability(conditioned.trace(), tols, "khqmm_step");
  if (p <= tols.underflow_floor) {
    throw_zero_probability(y);
  }
  conditioned /= p;
  return {DensityMatrix::unchecked(std::move(conditioned)), p};
}

std::pair<CVec, double> lhqmm_step_and_prob(const LHqmm &m, const CVec &rho_vec,
                                            int y) {
  check_symbol(y, m.s());
  if (rho_vec.size() != m.dim()) {
    throw DimensionError("L-HQMM state dimension mismatch");
  }
  const auto &tols = default_tolerances();
  CVec next = m.superoperators[static_cast<std::size_t>(y)] * rho_vec;
  const Complex pz = vectorized_identity(m.n()).adjoint() * next;
  const double p = extract_probability(pz, tols, "lhqmm_step_and_prob");
  if (p <= tols.underflow_floor) {
    throw_zero_probability(y);
  }
  next /= p;
  return {std::move(next), p};
}

//=========================================================================
// Filter
//=========================================================================

Filter::Filter(const ModelSpec &model) : model_(&model) { reset(); }

void Filter::reset() {
  steps_ = 0;
  std::visit([this](const auto &m) {
    using T = std::decay_t<decltype(m)>;
    if constexpr (std::is_same_v<T, Hmm> || std::is_same_v<T, StandardOom> ||
                  std::is_same_v<T, Noom>) {
      state_ = RVec(m.initial);
    } else if constexpr (std::is_same_v<T, GeneralOom>) {
      state_ = CVec(m.initial);
    } else if constexpr (std::is_same_v<T, KHqmm>) {
      state_ = CMat(m.initial.matrix());
    } else {
      state_ = CVec(m.initial_vec);
    }
  }, *model_);
}

int Filter::alphabet() const { return model_alphabet(*model_); }

RVec Filter::symbol_probabilities() const {
  const auto &tols = default_tolerances();
  return std::visit([this, &tols](const auto &m) -> RVec {
    using T = std::decay_t<decltype(m)>;
    RVec probs(m.s());
    if constexpr (std::is_same_v<T, Hmm>) {
      const RVec &x = std::get<RVec>(state_);
      const RVec propagated = m.transition * x;
      for (int y = 0; y < m.s(); ++y) {
        probs[y] = m.emission.row(y).transpose().cwiseProduct(propagated).sum();
      }
    } else if constexpr (std::is_same_v<T, StandardOom>) {
      const RVec &x = std::get<RVec>(state_);
      for (int y = 0; y < m.s(); ++y) {
        probs[y] = (m.operators[static_cast<std::size_t>(y)] * x).sum();
      }
    } else if constexpr (std::is_same_v<T, GeneralOom>) {
      const CVec &x = std::get<CVec>(state_);
      for (int y = 0; y < m.s(); ++y) {
        const Complex p = m.functional.adjoint() *
                          (m.operators[static_cast<std::size_t>(y)] * x);
        probs[y] = extract_probability(p, tols, "symbol_probabilities");
      }
    } else if constexpr (std::is_same_v<T, Noom>) {
      const RVec &v = std::get<RVec>(state_);
      for (int y = 0; y < m.s(); ++y) {
        probs[y] = (m.operators[static_cast<std::size_t>(y)] * v).squaredNorm();
      }
    } else if constexpr (std::is_same_v<T, KHqmm>) {
      const CMat &rho = std::get<CMat>(state_);
      for (int y = 0; y < m.s(); ++y) {
        probs[y] = extract_probability(khqmm_conditioned(m, rho, y).trace(),
                                       tols, "symbol_probabilities");
      }
    } else {
      const CVec &v = std::get<CVec>(state_);
      const CVec id = vectorized_identity(m.n());
      for (int y = 0; y < m.s(); ++y) {
        const Complex p =
            id.adjoint() * (m.superoperators[static_cast<std::size_t>(y)] * v);
        probs[y] = extract_probability(p, tols, "symbol_probabilities");
      }
    }
    return probs;
  }, *model_);
}

double Filter::advance(int y) {
  const double p = std::visit([this, y](const auto &m) -> double {
    using T = std::decay_t<decltype(m)>;
    if constexpr (std::is_same_v<T, Hmm>) {
      auto [next, prob] = hmm_step(m, std::get<RVec>(state_), y);
      state_ = std::move(next);
      return prob;
    } else if constexpr (std::is_same_v<T, StandardOom>) {
      auto [next, prob] = oom_step_and_prob(m, std::get<RVec>(state_), y);
      state_ = std::move(next);
      return prob;
    } else if constexpr (std::is_same_v<T, GeneralOom>) {
      auto [next, prob] = oom_step_and_prob(m, std::get<CVec>(state_), y);
      state_ = std::move(next);
      return prob;
    } else if constexpr (std::is_same_v<T, Noom>) {
      auto [next, prob] = noom_step_and_prob(m, std::get<RVec>(state_), y);
      state_ = std::move(next);
      return prob;
    } else if constexpr (std::is_same_v<T, KHqmm>) {
      auto [next, prob] =
          khqmm_step(m, DensityMatrix::unchecked(std::get<CMat>(state_)), y);
      state_ = next.matrix();
      return prob;
    } else {
      auto [next, prob] = lhqmm_step_and_prob(m, std::get<CVec>(state_), y);
      state_ = std::move(next);
      return prob;
    }
  }, *model_);
  ++steps_;
  return p;
}

double accumulate_log_prob(Filter &f, std::span<const int> seq, int burn_in) {
  double acc = 0.0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    double p = 0.0;
    try {
      p = f.advance(seq[t]);
    } catch (const ZeroProbabilityError &e) {
      throw ZeroProbabilityError(std::string(e.what()) + " at position " +
                                     std::to_string(t),
                                 e.symbol, static_cast<long>(t));
    }
    if (static_cast<int>(t) >= burn_in) {
      acc += std::log(p);
    }
  }
  return acc;
}

namespace {

double sequence_log_prob_impl(const ModelSpec &model, std::span<const int> seq,
                              int burn_in) {
  check_burn_in(burn_in, seq.size());
  const int s = model_alphabet(model);
  for (int y : seq) {
    check_symbol(y, s);
  }
  Filter f(model);
  return accumulate_log_prob(f, seq, burn_in);
}

} // namespace

double hmm_sequence_log_prob(const Hmm &h, std::span<const int> seq,
                             int burn_in) {
  return sequence_log_prob_impl(ModelSpec(h), seq, burn_in);
}

double khqmm_sequence_log_likelihood(const KHqmm &m, std::span<const int> seq,
                                     int burn_in) {
  return sequence_log_prob_impl(ModelSpec(m), seq, burn_in);
}

double sequence_log_prob(const ModelSpec &model, std::span<const int> seq,
                         int burn_in) {
  return sequence_log_prob_impl(model, seq, burn_in);
}

//=========================================================================
// Sampling
//=========================================================================

std::vector<int> sample_sequence(Filter &f, int length, Rng &rng) {
  const auto &tols = default_tolerances();
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(length));
  for (int t = 0; t < length; ++t) {
    RVec probs = f.symbol_probabilities();
    for (int y = 0; y < probs.size(); ++y) {
      if (probs[y] < -tols.npp) {
        throw NppViolationError("sampling found negative probability " +
                                std::to_string(probs[y]) + " for symbol " +
                                std::to_string(y));
      }
      probs[y] = std::max(probs[y], 0.0);
    }
    const int y = rng.categorical(probs);
    f.advance(y);
    out.push_back(y);
  }
  return out;
}

std::vector<int> sample_sequence(const ModelSpec &model, int length,
                                 std::uint64_t seed) {
  Filter f(model);
  Rng rng(seed);
  return sample_sequence(f, length, rng);
}

//=========================================================================
// Bounded OOM validity check
//=========================================================================

namespace {

constexpr long kEnumerationGuard = 1000000;
constexpr std::size_t kMaxReportedViolations = 32;

struct DepthScan {
  const GeneralOom *model;
  const Tolerances *tols;
  OomDepthReport report;
  std::vector<int> prefix;

  // x is the unnormalized state after applying the prefix operators.
  void visit(const CVec &x, double prefix_prob, int remaining) {
    if (remaining == 0) {
      return;
    }
    double marginal = 0.0;
    for (int y = 0; y < model->s(); ++y) {
      const CVec next = model->operators[static_cast<std::size_t>(y)] * x;
      const Complex pz = model->functional.adjoint() * next;
      report.max_imaginary = std::max(report.max_imaginary,
                                      std::abs(pz.imag()));
      const double p = pz.real();
      marginal += p;
      ++report.sequences_checked;
      prefix.push_back(y);
      if (report.sequences_checked == 1 || p < report.min_probability) {
        report.min_probability = p;
      }
      if (p < -tols->npp) {
        ++report.violation_count;
        if (report.violations.size() < kMaxReportedViolations) {
          report.violations.push_back({prefix, p});
        }
      }
      visit(next, p, remaining - 1);
      prefix.pop_back();
    }
    report.max_marginal_residual = std::max(
        report.max_marginal_residual, std::abs(marginal - prefix_prob));
  }
};

} // namespace

OomDepthReport validate_oom_depth(const GeneralOom &m, int depth,
                                  const Tolerances &tols) {
  if (depth < 1) {
    throw InputError("depth must be at least 1");
  }
  const double total = std::pow(static_cast<double>(m.s()), depth);
  if (total > static_cast<double>(kEnumerationGuard)) {
    throw ResourceError("enumeration guard exceeded: s^depth = " +
                        std::to_string(total) + " > " +
                        std::to_string(kEnumerationGuard));
  }
  DepthScan scan{&m, &tols, {}, {}};
  scan.report.depth = depth;
  const double p0 =
      (m.functional.adjoint() * m.initial).real();
  scan.visit(m.initial, p0, depth);
  return scan.report;
}

OomDepthReport validate_oom_depth(const StandardOom &m, int depth,
                                  const Tolerances &tols) {
  GeneralOom g;
  g.operators.reserve(m.operators.size());
  for (const auto &op : m.operators) {
    g.operators.push_back(op.cast<Complex>());
  }
  g.initial = m.initial.cast<Complex>();
  g.functional = CVec::Ones(m.n());
  return validate_oom_depth(g, depth, tols);
}

} // namespace hqmm
