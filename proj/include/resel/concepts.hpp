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

// Concept extraction and the concept consistency graph.
//
// A sample is consistent with the graph when every pair of its (canonical)
// concepts is either joined by an edge or has an endpoint that is not yet a
// vertex. Accepted samples insert their concepts as a clique.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace resel {

using StopwordSet = std::unordered_set<std::string>;

// Version tag of the bundled English stopword list. Bump on any change.
inline constexpr std::string_view kStopwordListVersion = "en-179-v1";

const StopwordSet& DefaultStopwords();

struct ConceptLimits {
  std::size_t max_concepts = 10;
  std::size_t min_phrase_words = 2;
  std::size_t max_phrase_words = 4;
};

inline constexpr double kDefaultConceptThreshold = 0.75;

// Lowercased (ASCII), trimmed, internal whitespace collapsed to one space.
std::string CanonicalPhrase(std::string_view phrase);

// RAKE keyword extraction over instruction and output. Candidate phrases are
// maximal runs of non-stopword words between stopwords and punctuation;
// word score = degree / frequency over the kept candidates, phrase score =
// sum of word scores. Top phrases by score, ties by first occurrence.
std::vector<std::string> ExtractConcepts(std::string_view instruction,
                                         std::string_view output,
                                         const StopwordSet& stopwords,
                                         const ConceptLimits& limits = {});

// Jaccard similarity of the character-trigram multisets of the canonical
// phrases. Phrases shorter than three characters compare as whole strings.
double ConceptSimilarity(std::string_view a, std::string_view b);

struct ConsistencyVerdict {
  bool consistent = true;
  // First violating pair in lexicographic pair order.
  std::optional<std::pair<std::string, std::string>> witness;
};

class ConceptGraph {
 public:
  explicit ConceptGraph(double theta = kDefaultConceptThreshold);

  double theta() const { return theta_; }

  // Vertex with the highest similarity >= theta; ties go to the
  // lexicographically smaller vertex.
  std::optional<std::string> MatchVertex(std::string_view phrase) const;

  // Canonicalizes, replaces fuzzy matches by their vertex, then sorts and
  // deduplicates.
  std::vector<std::string> Canonicalize(
      std::span<const std::string> concepts) const;

  ConsistencyVerdict IsConsistent(std::span<const std::string> concepts) const;

  // Adds the canonicalized concepts and every edge among them.
  void Insert(std::span<const std::string> concepts);

  bool HasVertex(std::string_view v) const;
  bool HasEdge(std::string_view a, std::string_view b) const;
  std::size_t vertex_count() const { return names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  // Sorted vertex labels.
  std::vector<std::string> Vertices() const;
  // Sorted (a < b) edge list.
  std::vector<std::pair<std::string, std::string>> Edges() const;
  // Canonical concept sets in insertion order.
  const std::vector<std::vector<std::string>>& insertion_log() const {
    return log_;
  }

 private:
  using Profile = std::map<std::string, int>;

  std::optional<std::size_t> VertexId(std::string_view v) const;
  std::size_t AddVertex(const std::string& v);

  double theta_;
  std::vector<std::string> names_;
  std::vector<Profile> profiles_;
  std::map<std::string, std::size_t, std::less<>> ids_;
  std::unordered_map<std::string, std::vector<std::size_t>> trigram_index_;
  std::unordered_set<std::uint64_t> edges_;
  std::vector<std::vector<std::string>> log_;
};

}  // namespace resel
