#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "opmine/preprocess.hpp"

namespace opmine::cooccur {

// Ordered adjacent token pairs; counts never span document boundaries.
using BigramCounts = std::map<std::pair<std::string, std::string>, std::int64_t>;

struct BigramEdge {
  std::string first;
  std::string second;
  std::int64_t count = 0;

  bool operator==(const BigramEdge&) const = default;
};

// Document-level 2x2 presence table for a word pair.
struct ContingencyTable {
  std::int64_t n11 = 0;  // both present
  std::int64_t n10 = 0;  // x only
  std::int64_t n01 = 0;  // y only
  std::int64_t n00 = 0;  // neither

  std::int64_t row1() const { return n11 + n10; }
  std::int64_t row0() const { return n01 + n00; }
  std::int64_t col1() const { return n11 + n01; }
  std::int64_t col0() const { return n10 + n00; }

  bool operator==(const ContingencyTable&) const = default;
};

struct GraphEdge {
  std::string a;  // a < b lexicographically
  std::string b;
  double phi = 0.0;

  bool operator==(const GraphEdge&) const = default;
};

struct CorrelationGraph {
  std::vector<std::string> nodes;
  std::vector<GraphEdge> edges;  // sorted by (a, b), no self-loops
};

BigramCounts count_bigrams(const std::vector<preprocess::TokenizedDocument>& docs);

// Pairs with count >= min_count, descending by count then lexicographic.
std::vector<BigramEdge> filter_bigrams(const BigramCounts& counts,
                                       std::int64_t min_count);

// A document counts once per cell no matter how often a word repeats inside it.
// x == y is rejected.
ContingencyTable contingency(const std::vector<preprocess::TokenizedDocument>& docs,
                             const std::string& x, const std::string& y);

// (n11*n00 - n10*n01) / sqrt(n1. * n0. * n.1 * n.0).
// Any zero margin means the correlation is undefined and is rejected.
double phi(const ContingencyTable& table);

// All-pairs phi over words appearing in at least vocab_min_doc_freq documents.
// Pairs whose phi is undefined are skipped, not scored as zero.
CorrelationGraph correlation_graph(
    const std::vector<preprocess::TokenizedDocument>& docs,
    std::int64_t vocab_min_doc_freq = 5, double min_phi = 0.2);

// For each seed present in the corpus: top_n words by descending phi,
// ties broken lexicographically. Absent seeds map to empty lists.
std::map<std::string, std::vector<std::pair<std::string, double>>>
medication_neighbors(const std::vector<preprocess::TokenizedDocument>& docs,
                     const std::vector<std::string>& seeds, int top_n);

// format: "dot" or "edge_csv".
std::string export_graph(const CorrelationGraph& graph, std::string_view format);

}  // namespace opmine::cooccur
