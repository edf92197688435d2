// Copyright 2026 The resel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Interchange data model. Every input is a line-delimited JSON file with one
// object per sample, keyed by the sample id:
//
//   corpus       {"id", "instruction", "output", "x_tokens", "y_tokens",
//                 optional "concepts": [phrase, ...]}
//   embeddings   {"id", "vector": [...]}
//   divergences  {"id", "x_tokens", "y_tokens", and exactly one of
//                 "per_token_jsd": [...],
//                 "token_pairs":  [[[p...], [q...]], ...],
//                 "token_logits": [[[a...], [b...]], ...]}
//
// Per-token JSD values are assumed to be already temperature-adjusted by the
// producer; temperature only applies to "token_logits".

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace resel {

// Probability vectors must sum to one within this tolerance; accepted
// vectors are renormalized exactly.
inline constexpr double kNormalizationTolerance = 1e-6;

struct InstructionSample {
  std::string id;
  std::string instruction;
  std::string output;
  std::int64_t x_tokens = 0;
  std::int64_t y_tokens = 0;
  // Concept set supplied by the producer. When absent, concepts are
  // extracted from the text.
  std::optional<std::vector<std::string>> concepts;

  bool operator==(const InstructionSample&) const = default;
};

// Validated, order-preserving collection of samples with unique ids.
class Corpus {
 public:
  Corpus() = default;
  // Throws Error(kInput) on duplicate ids or token-count violations.
  explicit Corpus(std::vector<InstructionSample> samples);

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const InstructionSample& operator[](std::size_t i) const {
    return samples_[i];
  }
  std::span<const InstructionSample> samples() const { return samples_; }
  std::optional<std::size_t> IndexOf(std::string_view id) const;

  bool operator==(const Corpus& other) const {
    return samples_ == other.samples_;
  }

 private:
  std::vector<InstructionSample> samples_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Row i is the embedding of corpus sample i.
struct EmbeddingSet {
  Eigen::MatrixXd vectors;

  std::size_t size() const { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
  bool operator==(const EmbeddingSet& other) const {
    return vectors.rows() == other.vectors.rows() &&
           vectors.cols() == other.vectors.cols() && vectors == other.vectors;
  }
};

enum class DivergenceForm {
  kProbabilities,  // raw distribution pairs
  kLogits,         // raw logit pairs, softmax applied at scoring time
  kPerTokenJsd,    // precomputed per-token JSD
};

struct TokenPair {
  std::vector<double> pruned;
  std::vector<double> original;

  bool operator==(const TokenPair&) const = default;
};

struct DivergenceRecord {
  std::string id;
  std::int64_t x_tokens = 0;
  std::int64_t y_tokens = 0;
  DivergenceForm form = DivergenceForm::kPerTokenJsd;
  std::vector<TokenPair> token_pairs;  // kProbabilities and kLogits
  std::vector<double> per_token_jsd;   // kPerTokenJsd

  bool operator==(const DivergenceRecord&) const = default;
};

// Checks the record invariants and renormalizes probability vectors that are
// within tolerance. Throws Error(kInput).
void ValidateDivergenceRecord(DivergenceRecord& record);

Corpus LoadCorpus(const std::filesystem::path& path);
void WriteCorpus(const Corpus& corpus, const std::filesystem::path& path);

// Result rows follow corpus order regardless of file order.
EmbeddingSet LoadEmbeddings(const std::filesystem::path& path,
                            const Corpus& corpus);
void WriteEmbeddings(const EmbeddingSet& embeddings, const Corpus& corpus,
                     const std::filesystem::path& path);

// Records are returned in corpus order; token counts must agree with the
// corpus.
std::vector<DivergenceRecord> LoadDivergenceLog(
    const std::filesystem::path& path, const Corpus& corpus);
void WriteDivergenceLog(std::span<const DivergenceRecord> records,
                        const std::filesystem::path& path);

}  // namespace resel
