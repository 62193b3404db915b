/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef HQMM_REPRESENTATIONS_HPP
#define HQMM_REPRESENTATIONS_HPP

#include <span>
#include <vector>

#include "hqmm/models.hpp"

namespace hqmm {

//=========================================================================
// Model-family conversions
//=========================================================================

// T_y = diag(C_{y,:}) A; reproduces the HMM's sequence probabilities
// exactly.
StandardOom hmm_to_oom(const Hmm &h);

// tau_y = phi_y (x) phi_y, omega_0 = v0 (x) v0, sigma = vec(I_n); the
// resulting n^2-dimensional OOM matches the NOOM's squared-norm
// probabilities.
GeneralOom noom_to_oom(const Noom &m);

// L = sum_u conj(K_u) (x) K_u for one output's Kraus set, so that
// L vec(rho) = vec(sum_u K_u rho K_u^dag).
CMat kraus_to_liouville(std::span<const CMat> kraus);

// Lifts every output of a K-HQMM to Liouville form.
LHqmm khqmm_to_lhqmm(const KHqmm &m);

// Embeds an HMM as a K-HQMM with w = n Kraus operators per output, indexed
// by source state: K_{y,j} has column j equal to (sqrt(C(y,i) A(i,j)))_i.
KHqmm hmm_to_khqmm(const Hmm &h);

// Reads an L-HQMM as a general OOM with sigma = vec(I); same arithmetic.
GeneralOom lhqmm_to_general_oom(const LHqmm &m);

// Similarity transform S = I + (1/d) 1 (sigma^dag - 1^T) taking a general
// OOM to standard form (functional = all-ones row). Throws TransformError
// when S is singular (sum of sigma entries is zero).
GeneralOom general_to_standard_oom(const GeneralOom &g);

//=========================================================================
// Liouville / Choi machinery
//=========================================================================

// Involutive index permutation between the Liouville superoperator and the
// Choi matrix: with 0-based index pairs and column-major composite indices,
// choi(n*d + b, n*c + a) = L(n*a + b, n*c + d). For L = sum conj(K) (x) K it
// yields sum vec(K) vec(K)^dag. Throws DimensionError unless the input is
// square with perfect-square dimension.
CMat reshuffle(const CMat &l);

// Canonical factorization of a CP map: L = sum_i gamma_i conj(K_i) (x) K_i
// with gamma_i > 0 descending and ||K_i||_F = 1. The global phase of each
// K_i is fixed by making its largest-magnitude entry real positive.
struct CanonicalKrausDecomposition {
  RVec gammas;                 // descending, truncated
  std::vector<CMat> operators; // unit Frobenius norm
  int kraus_rank = 0;

  // sum_i gamma_i conj(K_i) (x) K_i.
  CMat rebuild_liouville() const;
};

// Spectral factorization of the (Hermitian) Choi matrix; components with
// gamma_i <= kraus_truncation_rel * gamma_max are dropped. Throws
// ValidityError when the Choi matrix is not Hermitian within tolerance.
CanonicalKrausDecomposition choi_to_canonical_kraus(
    const CMat &choi, const Tolerances &tols = default_tolerances());

// CP / TP / HP diagnostics for a set of per-output Liouville blocks. Never
// throws on invalid channels; all violations are reported as residuals.
enum class ChannelReportMode { per_output, full_model };

struct ChannelReport {
  struct PerOutput {
    double cp_min_eig = 0.0; // min eigenvalue of the Hermitized Choi
    double hp_residual = 0.0;
    double tp_residual = 0.0; // only meaningful in per_output mode
    int kraus_rank = 0;
  };
  std::vector<PerOutput> outputs;
  double cp_min_eig = 0.0;  // min over outputs
  double hp_residual = 0.0; // max over outputs
  double tp_residual = 0.0; // full-model: ||vec(I)^T sum L_y - vec(I)^T||
  int kraus_rank = 0;       // max over outputs
  ChannelReportMode mode = ChannelReportMode::full_model;
};

ChannelReport validate_channel(std::span<const CMat> liouvilles,
                               ChannelReportMode mode =
                                   ChannelReportMode::full_model,
                               const Tolerances &tols = default_tolerances());

ChannelReport validate_channel(const LHqmm &m,
                               const Tolerances &tols = default_tolerances());
ChannelReport validate_channel(const KHqmm &m,
                               const Tolerances &tols = default_tolerances());

// Dispatcher over the conversion table above. Targets: "standard-oom",
// "general-oom", "khqmm", "lhqmm", "standard-form" (general OOM with
// all-ones functional). Multi-hop paths (e.g. hmm -> lhqmm) are composed
// automatically; unsupported pairs throw InputError.
ModelSpec convert_model(const ModelSpec &model, const std::string &target);

} // namespace hqmm

#endif
