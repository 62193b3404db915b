/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "hqmm/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hqmm/errors.hpp"
#include "hqmm/rng.hpp"

namespace hqmm {

using nlohmann::json;

void SequenceDataset::validate() const {
  if (alphabet < 1) {
    throw ValidityError("dataset alphabet must be positive");
  }
  if (!labels.empty() && labels.size() != sequences.size()) {
    throw DimensionError("labels must cover every sequence");
  }
  for (const auto &seq : sequences) {
    for (int y : seq) {
      if (y < 0 || y >= alphabet) {
        throw ValidityError("dataset symbol " + std::to_string(y) +
                            " outside alphabet of size " +
                            std::to_string(alphabet));
      }
    }
  }
}

//=========================================================================
// Generation
//=========================================================================

Hmm random_hmm(int n, int s, std::uint64_t seed) {
  if (n < 1 || s < 1) {
    throw InputError("random_hmm needs n, s >= 1");
  }
  Rng rng(seed);
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

SequenceDataset generate_dataset(const ModelSpec &generator,
                                 int num_sequences, int length,
                                 std::uint64_t seed) {
  if (num_sequences < 1 || length < 1) {
    throw InputError("generate_dataset needs positive counts");
  }
  validate_model(generator);
  SequenceDataset data;
  data.alphabet = model_alphabet(generator);
  data.sequences.reserve(static_cast<std::size_t>(num_sequences));
  for (int i = 0; i < num_sequences; ++i) {
    data.sequences.push_back(sample_sequence(
        generator, length, derive_seed(seed, static_cast<std::uint64_t>(i))));
  }
  data.provenance["kind"] = "generated";
  data.provenance["generator_family"] = family_name(generator);
  data.provenance["seed"] = std::to_string(seed);
  data.provenance["num_sequences"] = std::to_string(num_sequences);
  data.provenance["length"] = std::to_string(length);
  return data;
}

SequenceDataset generate_dataset(const std::string &generator_spec,
                                 int num_sequences, int length,
                                 std::uint64_t seed) {
  const std::string prefix = "random-hmm(";
  if (generator_spec.rfind(prefix, 0) != 0 || generator_spec.back() != ')') {
    throw InputError("unsupported generator spec '" + generator_spec +
                     "'; expected random-hmm(n,s,seed)");
  }
  const std::string inner = generator_spec.substr(
      prefix.size(), generator_spec.size() - prefix.size() - 1);
  std::istringstream is(inner);
  int n = 0;
  int s = 0;
  std::uint64_t gseed = 0;
  char c1 = 0;
  char c2 = 0;
  if (!(is >> n >> c1 >> s >> c2 >> gseed) || c1 != ',' || c2 != ',') {
    throw InputError("malformed generator spec '" + generator_spec + "'");
  }
  auto data = generate_dataset(ModelSpec(random_hmm(n, s, gseed)),
                               num_sequences, length, seed);
  data.provenance["generator"] = generator_spec;
  return data;
}

GeneratedSplit generate_default_protocol(const ModelSpec &generator,
                                         std::uint64_t seed) {
  GeneratedSplit split;
  split.train = generate_dataset(generator, 20, 3000, derive_seed(seed, 1));
  split.validation =
      generate_dataset(generator, 10, 3000, derive_seed(seed, 2));
  split.train.provenance["role"] = "train";
  split.validation.provenance["role"] = "validation";
  return split;
}

//=========================================================================
// Reshaping
//=========================================================================

SequenceDataset reshape_sequences(const SequenceDataset &data, int sub_length,
                                  int burn_in) {
  if (sub_length < 1) {
    throw InputError("sub_length must be positive");
  }
  if (burn_in < 0 || burn_in >= sub_length) {
    throw InputError("burn-in must be shorter than the subsequence length");
  }
  SequenceDataset out;
  out.alphabet = data.alphabet;
  out.label_names = data.label_names;
  out.burn_in = burn_in;
  out.provenance = data.provenance;
  out.provenance["reshaped_sub_length"] = std::to_string(sub_length);
  out.provenance["reshaped_burn_in"] = std::to_string(burn_in);
  for (std::size_t i = 0; i < data.sequences.size(); ++i) {
    const auto &seq = data.sequences[i];
    if (static_cast<int>(seq.size()) < sub_length) {
      throw InputError("sequence " + std::to_string(i) + " of length " +
                       std::to_string(seq.size()) +
                       " is shorter than sub_length " +
                       std::to_string(sub_length));
    }
    const std::size_t pieces = seq.size() / static_cast<std::size_t>(
                                   sub_length);
    for (std::size_t p = 0; p < pieces; ++p) {
      out.sequences.emplace_back(
          seq.begin() + static_cast<long>(p) * sub_length,
          seq.begin() + static_cast<long>(p + 1) * sub_length);
      if (data.labeled()) {
        out.labels.push_back(data.labels[i]);
      }
    }
  }
  return out;
}

//=========================================================================
// Splice ingestion
//=========================================================================

AmbiguousPolicy parse_ambiguous_policy(const std::string &name) {
  if (name == "strip-chars") {
    return AmbiguousPolicy::strip_chars;
  }
  if (name == "drop-seqs") {
    return AmbiguousPolicy::drop_seqs;
  }
  throw ConfigError("unknown ambiguity policy '" + name + "'");
}

namespace {

std::string trim(const std::string &s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

int base_to_symbol(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
  case 'A':
    return 0;
  case 'C':
    return 1;
  case 'G':
    return 2;
  case 'T':
    return 3;
  default:
    return -1;
  }
}

} // namespace

SequenceDataset load_splice(const std::filesystem::path &path,
                            AmbiguousPolicy policy) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open splice file '" + path.string() + "'");
  }
  SequenceDataset data;
  data.alphabet = 4;
  data.label_names = {"EI", "IE", "N"};
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto comma1 = line.find(',');
    const auto comma2 =
        comma1 == std::string::npos ? std::string::npos
                                    : line.find(',', comma1 + 1);
    if (comma1 == std::string::npos || comma2 == std::string::npos) {
      throw ParseError("expected 'label, name, sequence' at line " +
                           std::to_string(line_no),
                       line_no);
    }
    const std::string label_token = trim(line.substr(0, comma1));
    int label = -1;
    for (std::size_t i = 0; i < data.label_names.size(); ++i) {
      if (label_token == data.label_names[i]) {
        label = static_cast<int>(i);
        break;
      }
    }
    if (label < 0) {
      throw ParseError("unknown label token '" + label_token + "' at line " +
                           std::to_string(line_no),
                       line_no);
    }
    const std::string bases = trim(line.substr(comma2 + 1));
    Sequence seq;
    seq.reserve(bases.size());
    int removed = 0;
    for (char c : bases) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        continue;
      }
      const int y = base_to_symbol(c);
      if (y < 0) {
        ++removed;
      } else {
        seq.push_back(y);
      }
    }
    if (removed > 0) {
      if (policy == AmbiguousPolicy::drop_seqs) {
        data.filter_log.push_back("line " + std::to_string(line_no) +
                                  ": dropped sequence with " +
                                  std::to_string(removed) +
                                  " ambiguous character(s)");
        continue;
      }
      data.filter_log.push_back("line " + std::to_string(line_no) +
                                ": removed " + std::to_string(removed) +
                                " ambiguous character(s)");
    }
    data.sequences.push_back(std::move(seq));
    data.labels.push_back(label);
  }
  data.provenance["kind"] = "splice";
  data.provenance["source_file"] = path.string();
  data.provenance["ambiguous_policy"] =
      policy == AmbiguousPolicy::strip_chars ? "strip-chars" : "drop-seqs";
  Eigen::Vector3i counts = Eigen::Vector3i::Zero();
  for (int l : data.labels) {
    counts[l] += 1;
  }
  data.provenance["label_counts"] = std::to_string(counts[0]) + "/" +
                                    std::to_string(counts[1]) + "/" +
                                    std::to_string(counts[2]);
  return data;
}

//=========================================================================
// Text round trip
//=========================================================================

void save_dataset(const SequenceDataset &data,
                  const std::filesystem::path &path) {
  data.validate();
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write dataset to '" + path.string() + "'");
  }
  for (std::size_t i = 0; i < data.sequences.size(); ++i) {
    if (data.labeled()) {
      const int label = data.labels[i];
      if (!data.label_names.empty()) {
        out << data.label_names[static_cast<std::size_t>(label)] << ": ";
      } else {
        out << label << ": ";
      }
    }
    const auto &seq = data.sequences[i];
    for (std::size_t t = 0; t < seq.size(); ++t) {
      if (t > 0) {
        out << ' ';
      }
      out << seq[t];
    }
    out << '\n';
  }
  out.close();

  json meta;
  meta["alphabet"] = data.alphabet;
  meta["burn_in"] = data.burn_in;
  meta["label_names"] = data.label_names;
  meta["provenance"] = data.provenance;
  meta["filter_log"] = data.filter_log;
  std::ofstream mout(path.string() + ".meta.json");
  mout << meta.dump(2) << '\n';
}

SequenceDataset load_dataset(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open dataset '" + path.string() + "'");
  }
  SequenceDataset data;

  const std::filesystem::path meta_path(path.string() + ".meta.json");
  if (std::filesystem::exists(meta_path)) {
    std::ifstream min(meta_path);
    json meta = json::parse(min);
    data.alphabet = meta.value("alphabet", 0);
    data.burn_in = meta.value("burn_in", 0);
    data.label_names =
        meta.value("label_names", std::vector<std::string>{});
    data.provenance = meta.value(
        "provenance", std::map<std::string, std::string>{});
    data.filter_log = meta.value("filter_log", std::vector<std::string>{});
  }

  std::string line;
  long line_no = 0;
  int max_symbol = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string content = trim(line);
    if (content.empty()) {
      continue;
    }
    std::string rest = content;
    const auto colon = content.find(':');
    const auto space = content.find(' ');
    if (colon != std::string::npos &&
        (space == std::string::npos || colon < space)) {
      const std::string token = trim(content.substr(0, colon));
      rest = content.substr(colon + 1);
      int label = -1;
      for (std::size_t i = 0; i < data.label_names.size(); ++i) {
        if (token == data.label_names[i]) {
          label = static_cast<int>(i);
          break;
        }
      }
      if (label < 0) {
        try {
          label = std::stoi(token);
        } catch (const std::exception &) {
          throw ParseError("unknown label token '" + token + "' at line " +
                               std::to_string(line_no),
                           line_no);
        }
        if (data.label_names.empty() == false &&
            (label < 0 ||
             label >= static_cast<int>(data.label_names.size()))) {
          throw ParseError("label index out of range at line " +
                               std::to_string(line_no),
                           line_no);
        }
      }
      data.labels.push_back(label);
    }
    Sequence seq;
    std::istringstream is(rest);
    int y = 0;
    while (is >> y) {
      seq.push_back(y);
      max_symbol = std::max(max_symbol, y);
    }
    if (!is.eof()) {
      throw ParseError("non-integer symbol at line " + std::to_string(line_no),
                       line_no);
    }
    data.sequences.push_back(std::move(seq));
  }
  if (!data.labels.empty() && data.labels.size() != data.sequences.size()) {
    throw ParseError("labels must cover every sequence or none");
  }
  if (data.alphabet == 0) {
    data.alphabet = max_symbol + 1;
  }
  data.validate();
  return data;
}

} // namespace hqmm
