/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef HQMM_SERIALIZATION_HPP
#define HQMM_SERIALIZATION_HPP

#include <filesystem>
#include <string>

#include "hqmm/evaluation.hpp"
#include "hqmm/learning.hpp"
#include "hqmm/models.hpp"

namespace hqmm {

// Models serialize to one JSON document: {"family", "n", "s", "w" (HQMM
// only), parameter tensors as nested arrays of [re, im]}. Doubles use the
// shortest round-trip representation, so load reproduces parameters
// bit-exactly.
std::string model_to_json(const ModelSpec &model);
ModelSpec model_from_json(const std::string &text);

void save_model(const ModelSpec &model, const std::filesystem::path &path);
ModelSpec load_model(const std::filesystem::path &path);

// A training run serializes to JSON (config, per-epoch trajectory, step
// residuals) with the best and final models written next to it as
// "<stem>.best.model.json" / "<stem>.final.model.json" and referenced by
// name.
void save_run(const TrainingRun &run, const std::filesystem::path &path);
TrainingRun load_run(const std::filesystem::path &path);

// Trajectory CSV with header "epoch,loss,validation_da,seconds".
void save_trajectory_csv(const TrainingRun &run,
                         const std::filesystem::path &path);

// Reads (seconds, da) pairs from a CSV; accepts either a bare
// "seconds,da" file or the run-trajectory header above (validation_da is
// then used as the DA column).
Trajectory load_trajectory_csv(const std::filesystem::path &path);

// Flat "key = value" text mirroring TrainingConfig field names, plus
// optional arch keys n, s, w.
struct ExperimentConfig {
  Arch arch;
  bool has_arch = false;
  TrainingConfig training;
};

ExperimentConfig load_config_kv(const std::filesystem::path &path);
void save_config_kv(const ExperimentConfig &config,
                    const std::filesystem::path &path);

} // namespace hqmm

#endif
