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

#include "resel/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "resel/degradation.hpp"
#include "resel/error.hpp"
#include "resel/random.hpp"

namespace resel::testkit {

namespace {

constexpr const char* kWords[] = {
    "alpha", "bravo", "charlie", "delta", "echo",  "foxtrot", "golf",
    "hotel", "india", "juliet",  "kilo",  "lima",  "mike",    "november",
    "oscar", "papa",  "quebec",  "romeo", "sierra", "tango"};

std::string RandomText(std::mt19937_64& rng, std::int64_t words) {
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kWords) - 1);
  std::string out;
  for (std::int64_t i = 0; i < words; ++i) {
    if (i > 0) out.push_back(' ');
    out += kWords[pick(rng)];
  }
  return out;
}

// Closed form of JSD(P, (1 - a) P + a P') in bits for disjoint P, P'.
double MixtureJsd(double a) {
  if (a <= 0.0) return 0.0;
  if (a >= 1.0) return 1.0;
  const double half = 1.0 - 0.5 * a;
  return 0.5 * (-std::log2(half)) +
         0.5 * ((1.0 - a) * std::log2((1.0 - a) / half) + a);
}

double Choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

void ValidateSpec(const SyntheticSpec& spec) {
  if (spec.k_true < 1) ThrowConfig("k_true must be at least 1");
  if (spec.points_per_cluster < 1) {
    ThrowConfig("points_per_cluster must be at least 1");
  }
  if (spec.dim < 1) ThrowConfig("dim must be at least 1");
  if (!(spec.center_spread > 0.0) || !(spec.intra_spread > 0.0)) {
    ThrowConfig("spreads must be positive");
  }
  if (spec.vocab_size < 2 || spec.vocab_size % 2 != 0) {
    ThrowConfig("vocab_size must be even and at least 2");
  }
  if (spec.min_tokens < 1 || spec.max_tokens < spec.min_tokens) {
    ThrowConfig("token range must satisfy 1 <= min_tokens <= max_tokens");
  }
  for (double t : spec.target_divergence) {
    if (!(t >= 0.0 && t <= 1.0)) {
      ThrowConfig("target divergence must lie in [0, 1]");
    }
  }
}

Blobs GenBlobs(const SyntheticSpec& spec) {
  ValidateSpec(spec);
  std::mt19937_64 rng(DeriveSeed(spec.seed, {1}));
  std::normal_distribution<double> centers_dist(0.0, spec.center_spread);
  std::normal_distribution<double> noise(0.0, spec.intra_spread);

  Blobs out;
  const auto k = static_cast<Eigen::Index>(spec.k_true);
  const auto dim = static_cast<Eigen::Index>(spec.dim);
  out.centers.resize(k, dim);
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::Index j = 0; j < dim; ++j) out.centers(c, j) = centers_dist(rng);
  }
  const auto n = static_cast<Eigen::Index>(spec.k_true * spec.points_per_cluster);
  out.embeddings.vectors.resize(n, dim);
  out.labels.reserve(static_cast<std::size_t>(n));
  Eigen::Index row = 0;
  for (Eigen::Index c = 0; c < k; ++c) {
    for (std::size_t p = 0; p < spec.points_per_cluster; ++p, ++row) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        out.embeddings.vectors(row, j) = out.centers(c, j) + noise(rng);
      }
      out.labels.push_back(static_cast<int>(c));
    }
  }
  return out;
}

Corpus GenCorpus(const SyntheticSpec& spec, std::span<const int> labels) {
  ValidateSpec(spec);
  std::mt19937_64 rng(DeriveSeed(spec.seed, {2}));
  std::uniform_int_distribution<std::int64_t> length(spec.min_tokens,
                                                     spec.max_tokens);
  std::vector<InstructionSample> samples;
  samples.reserve(labels.size());
  const int width = labels.size() < 10000 ? 4 : 8;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    InstructionSample s;
    std::string num = std::to_string(i);
    if (static_cast<int>(num.size()) < width) {
      num.insert(0, static_cast<std::size_t>(width) - num.size(), '0');
    }
    s.id = "s" + num;
    s.x_tokens = length(rng);
    s.y_tokens = length(rng);
    s.instruction = RandomText(rng, s.x_tokens);
    s.output = RandomText(rng, s.y_tokens);
    s.concepts = std::vector<std::string>{};
    samples.push_back(std::move(s));
  }
  return Corpus(std::move(samples));
}

double MixingForTarget(double target) {
  if (!(target >= 0.0 && target <= 1.0)) {
    ThrowConfig("target divergence must lie in [0, 1]");
  }
  if (target == 0.0) return 0.0;
  if (target == 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (MixtureJsd(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SyntheticDivergences GenDivergences(const SyntheticSpec& spec,
                                    const Corpus& corpus,
                                    std::span<const int> labels) {
  ValidateSpec(spec);
  if (labels.size() != corpus.size()) {
    ThrowInput("label count does not match corpus size");
  }
  std::vector<double> mixing(spec.k_true, 0.0);
  for (std::size_t c = 0; c < spec.k_true; ++c) {
    const double target =
        c < spec.target_divergence.size() ? spec.target_divergence[c] : 0.0;
    mixing[c] = MixingForTarget(target);
  }

  SplitMix64 rng(DeriveSeed(spec.seed, {3}));
  const std::size_t half = spec.vocab_size / 2;
  SyntheticDivergences out;
  out.pairs.reserve(corpus.size());
  out.per_token.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const InstructionSample& s = corpus[i];
    const int label = labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= spec.k_true) {
      ThrowInput("label out of range for sample '" + s.id + "'");
    }
    const double a = mixing[static_cast<std::size_t>(label)];
    DivergenceRecord pairs{s.id, s.x_tokens, s.y_tokens,
                           DivergenceForm::kProbabilities, {}, {}};
    DivergenceRecord scalars{s.id, s.x_tokens, s.y_tokens,
                             DivergenceForm::kPerTokenJsd, {}, {}};
    for (std::int64_t m = 0; m < s.y_tokens; ++m) {
      std::vector<double> p(spec.vocab_size, 0.0);
      double total = 0.0;
      for (std::size_t v = 0; v < half; ++v) {
        p[v] = rng.UnitOpenClosed();
        total += p[v];
      }
      for (std::size_t v = 0; v < half; ++v) p[v] /= total;
      std::vector<double> q(spec.vocab_size, 0.0);
      for (std::size_t v = 0; v < half; ++v) {
        q[v] = (1.0 - a) * p[v];
        q[v + half] = a * p[v];
      }
      scalars.per_token_jsd.push_back(JensenShannon(q, p));
      pairs.token_pairs.push_back({std::move(q), std::move(p)});
    }
    out.pairs.push_back(std::move(pairs));
    out.per_token.push_back(std::move(scalars));
  }
  return out;
}

double AdjustedRandIndex(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) ThrowInput("label vectors differ in length");
  const double n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [cell, count] : table) index += Choose2(count);
  double sum_rows = 0.0;
  for (const auto& [label, count] : rows) sum_rows += Choose2(count);
  double sum_cols = 0.0;
  for (const auto& [label, count] : cols) sum_cols += Choose2(count);
  const double expected = sum_rows * sum_cols / Choose2(n);
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

SelectionProblem RandomSelectionInstance(std::uint64_t seed, std::size_t max_n) {
  if (max_n < 2) ThrowConfig("instances need at least two samples");
  static const std::vector<std::string> kPhrases = {
      "neural network",    "Neural  Networks", "deep learning",
      "deep learner",      "quantum computing", "quantum computer",
      "error correction",  "graph theory",     "linear algebra",
      "linear  algebras",  "ab",               "abab",
      "baba",              "speedup"};
  std::mt19937_64 rng(seed);
  const auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };

  SelectionProblem p;
  const std::size_t n = uniform(2, max_n);
  const std::size_t k = uniform(1, std::min<std::size_t>(4, n));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = i < k ? static_cast<int>(i) : static_cast<int>(uniform(0, k - 1));
  }
  std::shuffle(labels.begin(), labels.end(), rng);

  std::uint64_t total_cost = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Candidate c;
    c.id = "r" + std::to_string(i);
    c.cluster = labels[i];
    c.ies = static_cast<double>(uniform(0, 6)) / 8.0;
    const auto len = static_cast<std::uint64_t>(uniform(2, 12));
    c.cost = len * len;
    total_cost += c.cost;
    const std::size_t m = uniform(0, 4);
    for (std::size_t j = 0; j < m; ++j) {
      c.concepts.push_back(kPhrases[uniform(0, kPhrases.size() - 1)]);
    }
    p.candidates.push_back(std::move(c));
  }

  std::vector<std::size_t> sizes(k, 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  p.cds.resize(k);
  for (double& v : p.cds) v = static_cast<double>(uniform(0, 4)) / 10.0;
  p.budget = uniform(1, n - 1);
  p.allocation = AllocateBudget(p.cds, sizes, p.budget).per_cluster;
  if (uniform(0, 1) == 1) p.cost_budget = uniform(0, total_cost);
  const double thetas[] = {0.75, 0.5, 1.0};
  p.theta = thetas[uniform(0, 2)];
  p.seed = seed;
  p.config_fingerprint = "instance";
  return p;
}

namespace {

// Deliberately plain data structures, independent of ConceptGraph.
struct OracleGraph {
  std::set<std::string> vertices;
  std::set<std::pair<std::string, std::string>> edges;
};

std::string OracleCanonical(const std::string& phrase) {
  std::istringstream in(phrase);
  std::string word;
  std::string out;
  while (in >> word) {
    for (char& ch : word) {
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

double OracleSimilarity(const std::string& a, const std::string& b) {
  if (a == b) return 1.0;
  if (a.size() < 3 || b.size() < 3) return 0.0;
  std::vector<std::string> ta;
  std::vector<std::string> tb;
  for (std::size_t i = 0; i + 3 <= a.size(); ++i) ta.push_back(a.substr(i, 3));
  for (std::size_t i = 0; i + 3 <= b.size(); ++i) tb.push_back(b.substr(i, 3));
  std::sort(ta.begin(), ta.end());
  std::sort(tb.begin(), tb.end());
  long common = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ta.size() && j < tb.size()) {
    if (ta[i] == tb[j]) {
      ++common;
      ++i;
      ++j;
    } else if (ta[i] < tb[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  const long uni = static_cast<long>(ta.size() + tb.size()) - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

std::vector<std::string> OracleCanonicalize(const OracleGraph& g,
                                            const std::vector<std::string>& in,
                                            double theta) {
  std::vector<std::string> out;
  for (const std::string& raw : in) {
    std::string c = OracleCanonical(raw);
    if (c.empty()) continue;
    if (!g.vertices.count(c)) {
      const std::string* best = nullptr;
      double best_sim = 0.0;
      for (const std::string& v : g.vertices) {
        const double s = OracleSimilarity(c, v);
        if (s >= theta && (best == nullptr || s > best_sim)) {
          best = &v;
          best_sim = s;
        }
      }
      if (best != nullptr) c = *best;
    }
    out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

namespace {

void OracleInsert(OracleGraph& g, const std::vector<std::string>& canon) {
  for (const std::string& v : canon) g.vertices.insert(v);
  for (std::size_t a = 0; a < canon.size(); ++a) {
    for (std::size_t b = a + 1; b < canon.size(); ++b) {
      g.edges.insert({canon[a], canon[b]});
    }
  }
}

}  // namespace

SelectionManifest OracleSelect(const SelectionProblem& problem,
                               std::span<const std::vector<std::string>> prior) {
  const std::size_t n = problem.candidates.size();
  if (n > 30) ThrowConfig("oracle replay is limited to 30 samples");
  const std::size_t k = problem.cds.size();

  // Cluster order by insertion sort: CDS descending, index ascending.
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t pos = order.size();
    while (pos > 0 && problem.cds[order[pos - 1]] < problem.cds[c]) --pos;
    order.insert(order.begin() + static_cast<std::ptrdiff_t>(pos), c);
  }

  SelectionManifest m;
  m.config_fingerprint = problem.config_fingerprint;
  m.seed = problem.seed;
  m.budget = problem.budget;
  m.cost_budget = problem.cost_budget;
  OracleGraph g;
  for (const auto& set : prior) {
    OracleInsert(g, OracleCanonicalize(g, set, problem.theta));
  }

  for (std::size_t c : order) {
    std::vector<std::size_t> ranked;
    for (std::size_t i = 0; i < n; ++i) {
      if (problem.candidates[i].cluster != static_cast<int>(c)) continue;
      std::size_t pos = ranked.size();
      while (pos > 0 &&
             problem.candidates[ranked[pos - 1]].ies < problem.candidates[i].ies) {
        --pos;
      }
      ranked.insert(ranked.begin() + static_cast<std::ptrdiff_t>(pos), i);
    }
    std::size_t count = 0;
    for (std::size_t i : ranked) {
      const Candidate& cand = problem.candidates[i];
      SampleRecord rec;
      rec.id = cand.id;
      rec.cluster = static_cast<int>(c) + 1;
      rec.ies = cand.ies;
      rec.cost = cand.cost;
      rec.decision = Decision::kClusterBudget;
      if (count < problem.allocation[c]) {
        const auto canon = OracleCanonicalize(g, cand.concepts, problem.theta);
        bool consistent = true;
        for (std::size_t a = 0; a < canon.size() && consistent; ++a) {
          for (std::size_t b = a + 1; b < canon.size() && consistent; ++b) {
            if (g.vertices.count(canon[a]) && g.vertices.count(canon[b]) &&
                !g.edges.count({canon[a], canon[b]})) {
              consistent = false;
              rec.conflict = {canon[a], canon[b]};
            }
          }
        }
        const bool fits = !problem.cost_budget ||
                          m.cumulative_cost + cand.cost <= *problem.cost_budget;
        if (!consistent) {
          rec.decision = Decision::kInconsistent;
        } else if (!fits) {
          rec.decision = Decision::kCostBudget;
        } else {
          rec.decision = Decision::kAccepted;
          OracleInsert(g, canon);
          m.cumulative_cost += cand.cost;
          m.selected.push_back(cand.id);
          ++count;
        }
      }
      m.records.push_back(rec);
    }
    std::size_t size = 0;
    for (const Candidate& cand : problem.candidates) {
      if (cand.cluster == static_cast<int>(c)) ++size;
    }
    m.clusters.push_back({static_cast<int>(c) + 1, size, problem.cds[c],
                          problem.allocation[c], count});
  }
  return m;
}

}  // namespace resel::testkit
