/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef HQMM_DATASET_HPP
#define HQMM_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hqmm/models.hpp"

namespace hqmm {

// Integer-symbol sequence collection with optional per-sequence labels and
// enough provenance (generator, seed, source file, filter log) to
// regenerate it exactly.
struct SequenceDataset {
  int alphabet = 0;
  SequenceList sequences;
  std::vector<int> labels; // empty, or one label per sequence
  std::vector<std::string> label_names;
  int burn_in = 0; // consumed by training / evaluation
  std::map<std::string, std::string> provenance;
  std::vector<std::string> filter_log;

  bool labeled() const { return !labels.empty(); }
  void validate() const; // throws ValidityError / DimensionError
};

//=========================================================================
// Generation
//=========================================================================

// Random HMM with Dirichlet(1) columns; the standard synthetic generator.
Hmm random_hmm(int n, int s, std::uint64_t seed);

SequenceDataset generate_dataset(const ModelSpec &generator,
                                 int num_sequences, int length,
                                 std::uint64_t seed);

// Accepts a generator spec of the form "random-hmm(n,s,seed)".
SequenceDataset generate_dataset(const std::string &generator_spec,
                                 int num_sequences, int length,
                                 std::uint64_t seed);

// The default protocol: 20 training and 10 validation sequences of length
// 3000.
struct GeneratedSplit {
  SequenceDataset train;
  SequenceDataset validation;
};
GeneratedSplit generate_default_protocol(const ModelSpec &generator,
                                         std::uint64_t seed);

//=========================================================================
// Reshaping
//=========================================================================

// Cuts every sequence into floor(L / sub_length) disjoint consecutive
// pieces of sub_length symbols (the remainder is dropped) and stores
// burn_in as dataset metadata. Labels follow their source sequence.
SequenceDataset reshape_sequences(const SequenceDataset &data, int sub_length,
                                  int burn_in);

//=========================================================================
// Splice ingestion
//=========================================================================

enum class AmbiguousPolicy { strip_chars, drop_seqs };

AmbiguousPolicy parse_ambiguous_policy(const std::string &name);

// Reads the UCI splice-junction format ("label, name, sequence" per line).
// Bases A, C, G, T map to 0..3; other characters are removed (or the whole
// sequence dropped, per policy) with a filter-log entry. Labels are
// EI / IE / N.
SequenceDataset load_splice(const std::filesystem::path &path,
                            AmbiguousPolicy policy =
                                AmbiguousPolicy::strip_chars);

//=========================================================================
// Text round trip
//=========================================================================

// Line-oriented text: space-separated integers with an optional leading
// "label:" token; metadata goes to a "<path>.meta.json" sidecar.
void save_dataset(const SequenceDataset &data,
                  const std::filesystem::path &path);
SequenceDataset load_dataset(const std::filesystem::path &path);

} // namespace hqmm

#endif
