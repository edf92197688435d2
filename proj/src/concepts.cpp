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

#include "resel/concepts.hpp"

#include <algorithm>
#include <cctype>

#include "resel/error.hpp"

namespace resel {

namespace {

bool IsSpace(unsigned char c) { return std::isspace(c) != 0; }

// Letters, digits, apostrophes, hyphens and any non-ASCII byte.
bool IsWordChar(unsigned char c) {
  return std::isalnum(c) != 0 || c == '\'' || c == '-' || c >= 0x80;
}

char Lower(unsigned char c) { return static_cast<char>(std::tolower(c)); }

std::map<std::string, int> TrigramProfile(const std::string& canonical) {
  std::map<std::string, int> out;
  if (canonical.size() < 3) {
    out[canonical] = 1;
    return out;
  }
  for (std::size_t i = 0; i + 3 <= canonical.size(); ++i) {
    ++out[canonical.substr(i, 3)];
  }
  return out;
}

double MultisetJaccard(const std::map<std::string, int>& a,
                       const std::map<std::string, int>& b) {
  long inter = 0;
  long uni = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      uni += ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      uni += ib->second;
      ++ib;
    } else {
      inter += std::min(ia->second, ib->second);
      uni += std::max(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::uint64_t EdgeKey(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

// Splits text into candidate phrases (lists of lowercased words). Stopwords
// and punctuation end a phrase.
void CollectCandidates(std::string_view text, const StopwordSet& stopwords,
                       std::vector<std::vector<std::string>>& out) {
  std::vector<std::string> phrase;
  const auto flush = [&] {
    if (!phrase.empty()) out.push_back(std::move(phrase));
    phrase.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (IsSpace(c)) {
      ++i;
      continue;
    }
    if (!IsWordChar(c)) {
      flush();
      ++i;
      continue;
    }
    std::string word;
    while (i < text.size() &&
           IsWordChar(static_cast<unsigned char>(text[i]))) {
      word.push_back(Lower(static_cast<unsigned char>(text[i])));
      ++i;
    }
    // Leading/trailing apostrophes and hyphens act as punctuation.
    const auto first = word.find_first_not_of("'-");
    if (first == std::string::npos) {
      flush();
      continue;
    }
    const auto last = word.find_last_not_of("'-");
    word = word.substr(first, last - first + 1);
    if (stopwords.contains(word)) {
      flush();
    } else {
      phrase.push_back(std::move(word));
    }
  }
  flush();
}

}  // namespace

std::string CanonicalPhrase(std::string_view phrase) {
  std::string out;
  bool pending_space = false;
  for (char ch : phrase) {
    const auto c = static_cast<unsigned char>(ch);
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(Lower(c));
  }
  return out;
}

std::vector<std::string> ExtractConcepts(std::string_view instruction,
                                         std::string_view output,
                                         const StopwordSet& stopwords,
                                         const ConceptLimits& limits) {
  if (limits.min_phrase_words < 1 ||
      limits.min_phrase_words > limits.max_phrase_words) {
    ThrowConfig("phrase word limits must satisfy 1 <= min <= max");
  }
  std::vector<std::vector<std::string>> candidates;
  CollectCandidates(instruction, stopwords, candidates);
  CollectCandidates(output, stopwords, candidates);
  std::erase_if(candidates, [&](const std::vector<std::string>& p) {
    return p.size() < limits.min_phrase_words ||
           p.size() > limits.max_phrase_words;
  });

  std::unordered_map<std::string, double> degree;
  std::unordered_map<std::string, double> frequency;
  for (const auto& phrase : candidates) {
    for (const std::string& w : phrase) {
      degree[w] += static_cast<double>(phrase.size());
      frequency[w] += 1.0;
    }
  }

  struct Scored {
    std::string text;
    double score;
    std::size_t first;
  };
  std::vector<Scored> unique;
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& phrase : candidates) {
    std::string text;
    double score = 0.0;
    for (const std::string& w : phrase) {
      if (!text.empty()) text.push_back(' ');
      text += w;
      score += degree[w] / frequency[w];
    }
    if (seen.emplace(text, unique.size()).second) {
      unique.push_back({std::move(text), score, unique.size()});
    }
  }
  std::stable_sort(unique.begin(), unique.end(),
                   [](const Scored& a, const Scored& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.first < b.first;
                   });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < unique.size() && i < limits.max_concepts; ++i) {
    out.push_back(std::move(unique[i].text));
  }
  return out;
}

double ConceptSimilarity(std::string_view a, std::string_view b) {
  const std::string ca = CanonicalPhrase(a);
  const std::string cb = CanonicalPhrase(b);
  if (ca.empty() || cb.empty()) ThrowInput("concept similarity of an empty phrase");
  if (ca == cb) return 1.0;
  return MultisetJaccard(TrigramProfile(ca), TrigramProfile(cb));
}

ConceptGraph::ConceptGraph(double theta) : theta_(theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    ThrowConfig("concept similarity threshold must lie in (0, 1]");
  }
}

std::optional<std::size_t> ConceptGraph::VertexId(std::string_view v) const {
  auto it = ids_.find(v);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> ConceptGraph::MatchVertex(
    std::string_view phrase) const {
  const std::string c = CanonicalPhrase(phrase);
  if (c.empty()) return std::nullopt;
  if (VertexId(c)) return c;

  const Profile profile = TrigramProfile(c);
  std::vector<std::size_t> candidates;
  for (const auto& [gram, count] : profile) {
    auto it = trigram_index_.find(gram);
    if (it == trigram_index_.end()) continue;
    candidates.insert(candidates.end(), it->second.begin(), it->second.end());
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  std::optional<std::size_t> best;
  double best_sim = 0.0;
  for (std::size_t id : candidates) {
    const double sim = MultisetJaccard(profile, profiles_[id]);
    if (sim < theta_) continue;
    if (!best || sim > best_sim ||
        (sim == best_sim && names_[id] < names_[*best])) {
      best = id;
      best_sim = sim;
    }
  }
  if (!best) return std::nullopt;
  return names_[*best];
}

std::vector<std::string> ConceptGraph::Canonicalize(
    std::span<const std::string> concepts) const {
  std::vector<std::string> out;
  out.reserve(concepts.size());
  for (const std::string& item : concepts) {
    std::string c = CanonicalPhrase(item);
    if (c.empty()) continue;
    if (auto match = MatchVertex(c)) c = std::move(*match);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ConsistencyVerdict ConceptGraph::IsConsistent(
    std::span<const std::string> concepts) const {
  const std::vector<std::string> canon = Canonicalize(concepts);
  std::vector<std::optional<std::size_t>> ids;
  ids.reserve(canon.size());
  for (const std::string& c : canon) ids.push_back(VertexId(c));
  for (std::size_t i = 0; i < canon.size(); ++i) {
    if (!ids[i]) continue;
    for (std::size_t j = i + 1; j < canon.size(); ++j) {
      if (!ids[j]) continue;
      if (!edges_.contains(EdgeKey(*ids[i], *ids[j]))) {
        return {false, std::make_pair(canon[i], canon[j])};
      }
    }
  }
  return {};
}

std::size_t ConceptGraph::AddVertex(const std::string& v) {
  if (auto id = VertexId(v)) return *id;
  const std::size_t id = names_.size();
  names_.push_back(v);
  profiles_.push_back(TrigramProfile(v));
  ids_.emplace(v, id);
  for (const auto& [gram, count] : profiles_.back()) {
    trigram_index_[gram].push_back(id);
  }
  return id;
}

void ConceptGraph::Insert(std::span<const std::string> concepts) {
  const std::vector<std::string> canon = Canonicalize(concepts);
  std::vector<std::size_t> ids;
  ids.reserve(canon.size());
  for (const std::string& c : canon) ids.push_back(AddVertex(c));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      edges_.insert(EdgeKey(ids[i], ids[j]));
    }
  }
  log_.push_back(canon);
}

bool ConceptGraph::HasVertex(std::string_view v) const {
  return VertexId(CanonicalPhrase(v)).has_value();
}

bool ConceptGraph::HasEdge(std::string_view a, std::string_view b) const {
  const auto ia = VertexId(CanonicalPhrase(a));
  const auto ib = VertexId(CanonicalPhrase(b));
  if (!ia || !ib || *ia == *ib) return false;
  return edges_.contains(EdgeKey(*ia, *ib));
}

std::vector<std::string> ConceptGraph::Vertices() const {
  std::vector<std::string> out;
  out.reserve(ids_.size());
  for (const auto& [name, id] : ids_) out.push_back(name);
  return out;
}

std::vector<std::pair<std::string, std::string>> ConceptGraph::Edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(edges_.size());
  for (std::uint64_t key : edges_) {
    std::string a = names_[static_cast<std::size_t>(key >> 32)];
    std::string b = names_[static_cast<std::size_t>(key & 0xffffffffULL)];
    if (b < a) std::swap(a, b);
    out.emplace_back(std::move(a), std::move(b));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace resel
