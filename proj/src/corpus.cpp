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

#include "resel/corpus.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "resel/error.hpp"
#include "io_util.hpp"

namespace resel {

using nlohmann::json;

namespace {

std::string Where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

const json& RequireField(const json& record, const char* key,
                         const std::string& where) {
  auto it = record.find(key);
  if (it == record.end()) {
    ThrowInput(where + ": missing field '" + key + "'");
  }
  return *it;
}

std::int64_t RequireCount(const json& record, const char* key,
                          const std::string& where) {
  const json& value = RequireField(record, key, where);
  if (!value.is_number_integer()) {
    ThrowInput(where + ": field '" + key + "' must be an integer");
  }
  return value.get<std::int64_t>();
}

std::string RequireString(const json& record, const char* key,
                          const std::string& where) {
  const json& value = RequireField(record, key, where);
  if (!value.is_string()) {
    ThrowInput(where + ": field '" + key + "' must be a string");
  }
  return value.get<std::string>();
}

std::vector<double> RequireReals(const json& value, const std::string& where,
                                 const char* what) {
  if (!value.is_array()) ThrowInput(where + ": " + what + " must be an array");
  std::vector<double> out;
  out.reserve(value.size());
  for (const json& v : value) {
    if (!v.is_number()) {
      ThrowInput(where + ": " + what + " must contain only numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

// Calls fn(record, where) for every non-blank line of a JSONL file.
template <typename Fn>
void ForEachRecord(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) ThrowInput("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      ThrowInput(Where(path, line_no) + ": malformed record: " + e.what());
    }
    if (!record.is_object()) {
      ThrowInput(Where(path, line_no) + ": record must be an object");
    }
    fn(record, Where(path, line_no));
  }
}

void ValidateProbabilities(std::vector<double>& v, const std::string& where) {
  double sum = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      ThrowInput(where + ": probability entries must be finite and >= 0");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kNormalizationTolerance) {
    ThrowInput(where + ": probability vector sums to " + FormatReal(sum) +
               ", not 1 within 1e-6");
  }
  for (double& x : v) x /= sum;
}

}  // namespace

Corpus::Corpus(std::vector<InstructionSample> samples)
    : samples_(std::move(samples)) {
  index_.reserve(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const InstructionSample& s = samples_[i];
    const std::string where = "sample '" + s.id + "'";
    if (s.id.empty()) ThrowInput("sample " + std::to_string(i) + ": empty id");
    if (s.x_tokens < 0) ThrowInput(where + ": x_tokens < 0");
    if (s.y_tokens < 1) ThrowInput(where + ": y_tokens < 1");
    if (s.x_tokens + s.y_tokens < 2) {
      ThrowInput(where + ": x_tokens + y_tokens < 2");
    }
    if (!index_.emplace(s.id, i).second) {
      ThrowInput("duplicate id '" + s.id + "'");
    }
  }
}

std::optional<std::size_t> Corpus::IndexOf(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void ValidateDivergenceRecord(DivergenceRecord& record) {
  const std::string where = "divergence record '" + record.id + "'";
  if (record.y_tokens < 1) ThrowInput(where + ": y_tokens < 1");
  const auto expected = static_cast<std::size_t>(record.y_tokens);
  switch (record.form) {
    case DivergenceForm::kPerTokenJsd:
      if (record.per_token_jsd.size() != expected) {
        ThrowInput(where + ": per_token_jsd has " +
                   std::to_string(record.per_token_jsd.size()) +
                   " entries, expected y_tokens = " +
                   std::to_string(expected));
      }
      for (double v : record.per_token_jsd) {
        if (!(v >= 0.0 && v <= 1.0)) {
          ThrowInput(where + ": per-token JSD " + FormatReal(v) +
                     " outside [0, 1]");
        }
      }
      break;
    case DivergenceForm::kProbabilities:
    case DivergenceForm::kLogits:
      if (record.token_pairs.size() != expected) {
        ThrowInput(where + ": " + std::to_string(record.token_pairs.size()) +
                   " token pairs, expected y_tokens = " +
                   std::to_string(expected));
      }
      for (std::size_t m = 0; m < record.token_pairs.size(); ++m) {
        TokenPair& pair = record.token_pairs[m];
        const std::string at = where + " token " + std::to_string(m);
        if (pair.pruned.empty() || pair.pruned.size() != pair.original.size()) {
          ThrowInput(at + ": distributions must share a non-empty support");
        }
        if (record.form == DivergenceForm::kProbabilities) {
          ValidateProbabilities(pair.pruned, at);
          ValidateProbabilities(pair.original, at);
        } else {
          for (double v : pair.pruned) {
            if (!std::isfinite(v)) ThrowInput(at + ": non-finite logit");
          }
          for (double v : pair.original) {
            if (!std::isfinite(v)) ThrowInput(at + ": non-finite logit");
          }
        }
      }
      break;
  }
}

Corpus LoadCorpus(const std::filesystem::path& path) {
  std::vector<InstructionSample> samples;
  ForEachRecord(path, [&](const json& r, const std::string& where) {
    InstructionSample s;
    s.id = RequireString(r, "id", where);
    s.instruction = RequireString(r, "instruction", where);
    s.output = RequireString(r, "output", where);
    s.x_tokens = RequireCount(r, "x_tokens", where);
    s.y_tokens = RequireCount(r, "y_tokens", where);
    if (auto it = r.find("concepts"); it != r.end() && !it->is_null()) {
      if (!it->is_array()) ThrowInput(where + ": 'concepts' must be an array");
      std::vector<std::string> concepts;
      for (const json& c : *it) {
        if (!c.is_string()) ThrowInput(where + ": concepts must be strings");
        concepts.push_back(c.get<std::string>());
      }
      s.concepts = std::move(concepts);
    }
    samples.push_back(std::move(s));
  });
  if (samples.empty()) ThrowInput(path.string() + ": empty corpus");
  return Corpus(std::move(samples));
}

void WriteCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const InstructionSample& s : corpus.samples()) {
    nlohmann::ordered_json r;
    r["id"] = s.id;
    r["instruction"] = s.instruction;
    r["output"] = s.output;
    r["x_tokens"] = s.x_tokens;
    r["y_tokens"] = s.y_tokens;
    if (s.concepts) r["concepts"] = *s.concepts;
    out << r.dump() << '\n';
  }
  WriteTextFile(path, out.str());
}

EmbeddingSet LoadEmbeddings(const std::filesystem::path& path,
                            const Corpus& corpus) {
  std::vector<std::vector<double>> rows(corpus.size());
  std::vector<bool> seen(corpus.size(), false);
  std::optional<std::size_t> dim;
  ForEachRecord(path, [&](const json& r, const std::string& where) {
    const std::string id = RequireString(r, "id", where);
    const auto index = corpus.IndexOf(id);
    if (!index) ThrowInput(where + ": id '" + id + "' not in corpus");
    if (seen[*index]) ThrowInput(where + ": duplicate embedding for '" + id + "'");
    std::vector<double> v = RequireReals(RequireField(r, "vector", where),
                                         where, "vector");
    if (v.empty()) ThrowInput(where + ": empty vector");
    if (!dim) dim = v.size();
    if (v.size() != *dim) {
      ThrowInput(where + ": dimension " + std::to_string(v.size()) +
                 " differs from " + std::to_string(*dim));
    }
    for (double x : v) {
      if (!std::isfinite(x)) ThrowInput(where + ": non-finite component");
    }
    seen[*index] = true;
    rows[*index] = std::move(v);
  });
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!seen[i]) {
      ThrowInput(path.string() + ": missing embedding for id '" +
                 corpus[i].id + "'");
    }
  }
  EmbeddingSet out;
  out.vectors.resize(static_cast<Eigen::Index>(corpus.size()),
                     static_cast<Eigen::Index>(*dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < *dim; ++j) {
      out.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return out;
}

void WriteEmbeddings(const EmbeddingSet& embeddings, const Corpus& corpus,
                     const std::filesystem::path& path) {
  std::ostringstream out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    nlohmann::ordered_json r;
    r["id"] = corpus[i].id;
    std::vector<double> v(embeddings.dim());
    for (std::size_t j = 0; j < v.size(); ++j) {
      v[j] = embeddings.vectors(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(j));
    }
    r["vector"] = v;
    out << r.dump() << '\n';
  }
  WriteTextFile(path, out.str());
}

std::vector<DivergenceRecord> LoadDivergenceLog(
    const std::filesystem::path& path, const Corpus& corpus) {
  std::vector<std::optional<DivergenceRecord>> slots(corpus.size());
  ForEachRecord(path, [&](const json& r, const std::string& where) {
    DivergenceRecord rec;
    rec.id = RequireString(r, "id", where);
    const auto index = corpus.IndexOf(rec.id);
    if (!index) ThrowInput(where + ": id '" + rec.id + "' not in corpus");
    if (slots[*index]) ThrowInput(where + ": duplicate record for '" + rec.id + "'");
    rec.x_tokens = RequireCount(r, "x_tokens", where);
    rec.y_tokens = RequireCount(r, "y_tokens", where);
    const InstructionSample& sample = corpus[*index];
    if (rec.x_tokens != sample.x_tokens || rec.y_tokens != sample.y_tokens) {
      ThrowInput(where + ": token counts disagree with the corpus");
    }

    const bool has_jsd = r.contains("per_token_jsd");
    const bool has_probs = r.contains("token_pairs");
    const bool has_logits = r.contains("token_logits");
    if (int(has_jsd) + int(has_probs) + int(has_logits) != 1) {
      ThrowInput(where +
                 ": exactly one of per_token_jsd, token_pairs, token_logits "
                 "is required");
    }
    if (has_jsd) {
      rec.form = DivergenceForm::kPerTokenJsd;
      rec.per_token_jsd = RequireReals(r["per_token_jsd"], where, "per_token_jsd");
    } else {
      rec.form = has_probs ? DivergenceForm::kProbabilities
                           : DivergenceForm::kLogits;
      const json& pairs = has_probs ? r["token_pairs"] : r["token_logits"];
      if (!pairs.is_array()) ThrowInput(where + ": token list must be an array");
      for (const json& pair : pairs) {
        if (!pair.is_array() || pair.size() != 2) {
          ThrowInput(where + ": each token entry must be [pruned, original]");
        }
        rec.token_pairs.push_back({RequireReals(pair[0], where, "distribution"),
                                   RequireReals(pair[1], where, "distribution")});
      }
    }
    ValidateDivergenceRecord(rec);
    slots[*index] = std::move(rec);
  });
  std::vector<DivergenceRecord> out;
  out.reserve(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) {
      ThrowInput(path.string() + ": missing divergence record for id '" +
                 corpus[i].id + "'");
    }
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

void WriteDivergenceLog(std::span<const DivergenceRecord> records,
                        const std::filesystem::path& path) {
  std::ostringstream out;
  for (const DivergenceRecord& rec : records) {
    nlohmann::ordered_json r;
    r["id"] = rec.id;
    r["x_tokens"] = rec.x_tokens;
    r["y_tokens"] = rec.y_tokens;
    if (rec.form == DivergenceForm::kPerTokenJsd) {
      r["per_token_jsd"] = rec.per_token_jsd;
    } else {
      nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
      for (const TokenPair& p : rec.token_pairs) {
        pairs.push_back({p.pruned, p.original});
      }
      r[rec.form == DivergenceForm::kProbabilities ? "token_pairs"
                                                   : "token_logits"] =
          std::move(pairs);
    }
    out << r.dump() << '\n';
  }
  WriteTextFile(path, out.str());
}

}  // namespace resel
