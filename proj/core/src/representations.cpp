/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "hqmm/representations.hpp"

#include <cmath>
#include <string>

#include "hqmm/errors.hpp"

namespace hqmm {

StandardOom hmm_to_oom(const Hmm &h) {
  StandardOom out;
  out.operators.reserve(static_cast<std::size_t>(h.s()));
  for (int y = 0; y < h.s(); ++y) {
    out.operators.push_back(h.emission.row(y).asDiagonal() * h.transition);
  }
  out.initial = h.initial;
  return out;
}

GeneralOom noom_to_oom(const Noom &m) {
  GeneralOom out;
  out.operators.reserve(static_cast<std::size_t>(m.s()));
  for (const auto &phi : m.operators) {
    out.operators.push_back(kron(phi, phi).cast<Complex>());
  }
  out.initial = kron(RMat(m.initial), RMat(m.initial)).col(0).cast<Complex>();
  out.functional = vectorized_identity(m.n());
  return out;
}

CMat kraus_to_liouville(std::span<const CMat> kraus) {
  if (kraus.empty()) {
    throw DimensionError("kraus_to_liouville: empty operator set");
  }
  const Eigen::Index n = kraus.front().rows();
  CMat l = CMat::Zero(n * n, n * n);
  for (const auto &k : kraus) {
    if (k.rows() != n || k.cols() != n) {
      throw DimensionError("kraus_to_liouville: operators must be square "
                           "with a common dimension");
    }
    l += kron(k.conjugate(), k);
  }
  return l;
}

LHqmm khqmm_to_lhqmm(const KHqmm &m) {
  LHqmm out;
  out.superoperators.reserve(static_cast<std::size_t>(m.s()));
  for (int y = 0; y < m.s(); ++y) {
    std::vector<CMat> set;
    set.reserve(static_cast<std::size_t>(m.w()));
    for (int u = 0; u < m.w(); ++u) {
      set.push_back(m.kraus.block(y, u));
    }
    out.superoperators.push_back(kraus_to_liouville(set));
  }
  out.initial_vec = vectorize(m.initial.matrix());
  return out;
}

KHqmm hmm_to_khqmm(const Hmm &h) {
  const int n = h.n();
  const int s = h.s();
  // One operator per source state j: K_{y,j} = sum_i sqrt(C(y,i) A(i,j))
  // e_i e_j^T. Only the diagonal of rho propagates, which reproduces the
  // HMM filter exactly.
  CMat stack = CMat::Zero(static_cast<Eigen::Index>(s) * n * n, n);
  for (int y = 0; y < s; ++y) {
    for (int j = 0; j < n; ++j) {
      const Eigen::Index row0 =
          (static_cast<Eigen::Index>(y) * n + j) * n;
      for (int i = 0; i < n; ++i) {
        stack(row0 + i, j) = std::sqrt(h.emission(y, i) * h.transition(i, j));
      }
    }
  }
  CMat rho0 = h.initial.cast<Complex>().asDiagonal();
  return KHqmm{StiefelPoint::unchecked(std::move(stack), s, n),
               DensityMatrix::unchecked(std::move(rho0))};
}

GeneralOom lhqmm_to_general_oom(const LHqmm &m) {
  GeneralOom out;
  out.operators = m.superoperators;
  out.initial = m.initial_vec;
  out.functional = vectorized_identity(m.n());
  return out;
}

GeneralOom general_to_standard_oom(const GeneralOom &g) {
  const int d = g.n();
  const CVec ones = CVec::Ones(d);
  const Complex sigma_sum = g.functional.sum();
  if (std::abs(sigma_sum) < 1e-12 * static_cast<double>(d)) {
    throw TransformError(
        "similarity transform is singular: functional entries sum to " +
        std::to_string(sigma_sum.real()) + " + " +
        std::to_string(sigma_sum.imag()) + "i");
  }
  // S = I + (1/d) 1 (sigma^dag - 1^T) satisfies 1^T S = sigma^dag, so the
  // transformed functional sigma^dag S^{-1} is the all-ones row.
  const CMat s_mat = CMat::Identity(d, d) +
                     (ones / static_cast<double>(d)) *
                         (g.functional.adjoint() - ones.transpose());
  Eigen::PartialPivLU<CMat> lu(s_mat);
  const CMat s_inv = lu.inverse();
  GeneralOom out;
  out.operators.reserve(g.operators.size());
  for (const auto &tau : g.operators) {
    out.operators.push_back(s_mat * tau * s_inv);
  }
  out.initial = s_mat * g.initial;
  out.functional = (g.functional.adjoint() * s_inv).adjoint();
  const double residual = (out.functional - ones).norm();
  if (residual > 1e-9) {
    throw TransformError("transformed functional differs from all-ones by " +
                         std::to_string(residual));
  }
  return out;
}

CMat reshuffle(const CMat &l) {
  if (l.rows() != l.cols()) {
    throw DimensionError("reshuffle: input must be square");
  }
  const auto n = static_cast<Eigen::Index>(
      std::llround(std::sqrt(static_cast<double>(l.rows()))));
  if (n * n != l.rows()) {
    throw DimensionError("reshuffle: dimension " + std::to_string(l.rows()) +
                         " is not a perfect square");
  }
  CMat out(l.rows(), l.cols());
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index d = 0; d < n; ++d) {
          out(n * d + b, n * c + a) = l(n * a + b, n * c + d);
        }
      }
    }
  }
  return out;
}

CMat CanonicalKrausDecomposition::rebuild_liouville() const {
  if (operators.empty()) {
    return CMat();
  }
  const Eigen::Index n = operators.front().rows();
  CMat l = CMat::Zero(n * n, n * n);
  for (std::size_t i = 0; i < operators.size(); ++i) {
    l += gammas[static_cast<Eigen::Index>(i)] *
         kron(operators[i].conjugate(), operators[i]);
  }
  return l;
}

CanonicalKrausDecomposition choi_to_canonical_kraus(const CMat &choi,
                                                    const Tolerances &tols) {
  if (choi.rows() != choi.cols()) {
    throw DimensionError("choi_to_canonical_kraus: input must be square");
  }
  const double hp = (choi - choi.adjoint()).norm();
  if (hp > tols.channel_hermitian) {
    throw ValidityError("Choi matrix not Hermitian: residual " +
                        std::to_string(hp));
  }
  const auto n = static_cast<int>(
      std::llround(std::sqrt(static_cast<double>(choi.rows()))));
  if (static_cast<Eigen::Index>(n) * n != choi.rows()) {
    throw DimensionError("choi_to_canonical_kraus: dimension is not a "
                         "perfect square");
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(
      ((choi + choi.adjoint()) / 2.0).eval());
  const RVec evals = es.eigenvalues();
  const double gamma_max = evals.cwiseAbs().maxCoeff();
  const double cutoff = tols.kraus_truncation_rel * gamma_max;

  CanonicalKrausDecomposition out;
  std::vector<double> kept;
  // Eigenvalues come back ascending; walk from the top.
  for (Eigen::Index i = evals.size() - 1; i >= 0; --i) {
    if (evals[i] <= cutoff) {
      continue;
    }
    CMat k = devectorize(es.eigenvectors().col(i), n);
    // Fix the SVD phase ambiguity: largest-magnitude entry real positive.
    Eigen::Index rmax = 0;
    Eigen::Index cmax = 0;
    k.cwiseAbs().maxCoeff(&rmax, &cmax);
    const Complex pivot = k(rmax, cmax);
    if (std::abs(pivot) > 0.0) {
      k *= std::conj(pivot) / std::abs(pivot);
    }
    kept.push_back(evals[i]);
    out.operators.push_back(std::move(k));
  }
  out.gammas = Eigen::Map<const RVec>(kept.data(),
                                      static_cast<Eigen::Index>(kept.size()));
  out.kraus_rank = static_cast<int>(kept.size());
  return out;
}

namespace {

int choi_rank(const CMat &choi, double rel_tol) {
  Eigen::JacobiSVD<CMat> svd(choi);
  const RVec sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) {
    return 0;
  }
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > rel_tol * sv[0]) {
      ++rank;
    }
  }
  return rank;
}

} // namespace

ChannelReport validate_channel(std::span<const CMat> liouvilles,
                               ChannelReportMode mode,
                               const Tolerances &tols) {
  if (liouvilles.empty()) {
    throw DimensionError("validate_channel: empty channel set");
  }
  const Eigen::Index d = liouvilles.front().rows();
  const auto n = static_cast<int>(
      std::llround(std::sqrt(static_cast<double>(d))));
  ChannelReport report;
  report.mode = mode;
  const CVec id = vectorized_identity(n);
  CMat sum = CMat::Zero(d, d);
  bool first = true;
  for (const auto &l : liouvilles) {
    if (l.rows() != d || l.cols() != d) {
      throw DimensionError("validate_channel: blocks must share one shape");
    }
    sum += l;
    const CMat choi = reshuffle(l);
    ChannelReport::PerOutput row;
    row.hp_residual = (choi - choi.adjoint()).norm();
    Eigen::SelfAdjointEigenSolver<CMat> es(
        ((choi + choi.adjoint()) / 2.0).eval(), Eigen::EigenvaluesOnly);
    row.cp_min_eig = es.eigenvalues().minCoeff();
    row.kraus_rank = choi_rank(choi, tols.kraus_truncation_rel);
    row.tp_residual = ((id.transpose() * l).transpose() - id).norm();
    report.outputs.push_back(row);
    report.cp_min_eig =
        first ? row.cp_min_eig : std::min(report.cp_min_eig, row.cp_min_eig);
    report.hp_residual = std::max(report.hp_residual, row.hp_residual);
    report.kraus_rank = std::max(report.kraus_rank, row.kraus_rank);
    first = false;
  }
  if (mode == ChannelReportMode::full_model) {
    report.tp_residual = ((id.transpose() * sum).transpose() - id).norm();
  } else {
    double worst = 0.0;
    for (const auto &row : report.outputs) {
      worst = std::max(worst, row.tp_residual);
    }
    report.tp_residual = worst;
  }
  return report;
}

ChannelReport validate_channel(const LHqmm &m, const Tolerances &tols) {
  return validate_channel(m.superoperators, ChannelReportMode::full_model,
                          tols);
}

ChannelReport validate_channel(const KHqmm &m, const Tolerances &tols) {
  return validate_channel(khqmm_to_lhqmm(m), tols);
}

ModelSpec convert_model(const ModelSpec &model, const std::string &target) {
  const std::string from = family_name(model);
  if (target == "standard-oom") {
    if (const auto *h = std::get_if<Hmm>(&model)) {
      return hmm_to_oom(*h);
    }
  } else if (target == "khqmm") {
    if (const auto *h = std::get_if<Hmm>(&model)) {
      return hmm_to_khqmm(*h);
    }
  } else if (target == "lhqmm") {
    if (const auto *k = std::get_if<KHqmm>(&model)) {
      return khqmm_to_lhqmm(*k);
    }
    if (const auto *h = std::get_if<Hmm>(&model)) {
      return khqmm_to_lhqmm(hmm_to_khqmm(*h));
    }
  } else if (target == "general-oom") {
    if (const auto *m = std::get_if<Noom>(&model)) {
      return noom_to_oom(*m);
    }
    if (const auto *l = std::get_if<LHqmm>(&model)) {
      return lhqmm_to_general_oom(*l);
    }
    if (const auto *k = std::get_if<KHqmm>(&model)) {
      return lhqmm_to_general_oom(khqmm_to_lhqmm(*k));
    }
  } else if (target == "standard-form") {
    if (const auto *g = std::get_if<GeneralOom>(&model)) {
      return general_to_standard_oom(*g);
    }
    if (const auto *m = std::get_if<Noom>(&model)) {
      return general_to_standard_oom(noom_to_oom(*m));
    }
    if (const auto *l = std::get_if<LHqmm>(&model)) {
      return general_to_standard_oom(lhqmm_to_general_oom(*l));
    }
    if (const auto *k = std::get_if<KHqmm>(&model)) {
      return general_to_standard_oom(
          lhqmm_to_general_oom(khqmm_to_lhqmm(*k)));
    }
  } else {
    throw InputError("unknown conversion target '" + target + "'");
  }
  throw InputError("no conversion from " + from + " to " + target);
}

} // namespace hqmm
