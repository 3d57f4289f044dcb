#include "opmine/cooccur.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace opmine::cooccur {

namespace {

// word -> sorted indices of documents containing it.
using PresenceIndex = std::map<std::string, std::vector<std::int64_t>>;

PresenceIndex build_presence(const std::vector<preprocess::TokenizedDocument>& docs) {
  PresenceIndex presence;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::unordered_set<std::string_view> seen;
    for (const std::string& token : docs[d].tokens) {
      if (seen.insert(token).second) {
        presence[token].push_back(static_cast<std::int64_t>(d));
      }
    }
  }
  return presence;
}

std::int64_t intersection_size(const std::vector<std::int64_t>& a,
                               const std::vector<std::int64_t>& b) {
  std::int64_t n = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

ContingencyTable table_from_presence(std::int64_t total_docs, std::int64_t df_x,
                                     std::int64_t df_y, std::int64_t both) {
  ContingencyTable t;
  t.n11 = both;
  t.n10 = df_x - both;
  t.n01 = df_y - both;
  t.n00 = total_docs - df_x - df_y + both;
  return t;
}

bool phi_defined(const ContingencyTable& t) {
  return t.row1() > 0 && t.row0() > 0 && t.col1() > 0 && t.col0() > 0;
}

std::string format_phi(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

}  // namespace

BigramCounts count_bigrams(const std::vector<preprocess::TokenizedDocument>& docs) {
  BigramCounts counts;
  for (const auto& doc : docs) {
    for (std::size_t i = 0; i + 1 < doc.tokens.size(); ++i) {
      ++counts[{doc.tokens[i], doc.tokens[i + 1]}];
    }
  }
  return counts;
}

std::vector<BigramEdge> filter_bigrams(const BigramCounts& counts,
                                       std::int64_t min_count) {
  std::vector<BigramEdge> edges;
  for (const auto& [pair, count] : counts) {
    if (count >= min_count) {
      edges.push_back({pair.first, pair.second, count});
    }
  }
  std::sort(edges.begin(), edges.end(),
            [](const BigramEdge& lhs, const BigramEdge& rhs) {
              if (lhs.count != rhs.count) return lhs.count > rhs.count;
              if (lhs.first != rhs.first) return lhs.first < rhs.first;
              return lhs.second < rhs.second;
            });
  return edges;
}

ContingencyTable contingency(const std::vector<preprocess::TokenizedDocument>& docs,
                             const std::string& x, const std::string& y) {
  if (x == y) {
    throw std::invalid_argument("contingency requires two distinct words");
  }
  ContingencyTable t;
  for (const auto& doc : docs) {
    bool has_x = false;
    bool has_y = false;
    for (const std::string& token : doc.tokens) {
      if (token == x) has_x = true;
      else if (token == y) has_y = true;
      if (has_x && has_y) break;
    }
    if (has_x && has_y) ++t.n11;
    else if (has_x) ++t.n10;
    else if (has_y) ++t.n01;
    else ++t.n00;
  }
  return t;
}

double phi(const ContingencyTable& t) {
  if (!phi_defined(t)) {
    throw std::invalid_argument(
        "phi undefined: a word appears in all documents or none");
  }
  double numerator = static_cast<double>(t.n11 * t.n00 - t.n10 * t.n01);
  double denominator = std::sqrt(static_cast<double>(t.row1()) *
                                 static_cast<double>(t.row0()) *
                                 static_cast<double>(t.col1()) *
                                 static_cast<double>(t.col0()));
  return numerator / denominator;
}

CorrelationGraph correlation_graph(
    const std::vector<preprocess::TokenizedDocument>& docs,
    std::int64_t vocab_min_doc_freq, double min_phi) {
  if (!(min_phi > 0.0 && min_phi <= 1.0)) {
    throw std::invalid_argument("min_phi must be in (0, 1]");
  }
  auto presence = build_presence(docs);
  const auto total = static_cast<std::int64_t>(docs.size());

  std::vector<const PresenceIndex::value_type*> vocab;
  for (const auto& entry : presence) {
    if (static_cast<std::int64_t>(entry.second.size()) >= vocab_min_doc_freq) {
      vocab.push_back(&entry);
    }
  }

  CorrelationGraph graph;
  graph.nodes.reserve(vocab.size());
  for (const auto* entry : vocab) {
    graph.nodes.push_back(entry->first);
  }
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    for (std::size_t j = i + 1; j < vocab.size(); ++j) {
      const auto& [word_a, docs_a] = *vocab[i];
      const auto& [word_b, docs_b] = *vocab[j];
      auto t = table_from_presence(total, docs_a.size(), docs_b.size(),
                                   intersection_size(docs_a, docs_b));
      if (!phi_defined(t)) continue;
      double value = phi(t);
      if (value >= min_phi) {
        graph.edges.push_back({word_a, word_b, value});
      }
    }
  }
  return graph;
}

std::map<std::string, std::vector<std::pair<std::string, double>>>
medication_neighbors(const std::vector<preprocess::TokenizedDocument>& docs,
                     const std::vector<std::string>& seeds, int top_n) {
  if (top_n < 1) {
    throw std::invalid_argument("top_n must be at least 1");
  }
  auto presence = build_presence(docs);
  const auto total = static_cast<std::int64_t>(docs.size());

  std::map<std::string, std::vector<std::pair<std::string, double>>> result;
  for (const std::string& seed : seeds) {
    auto& neighbors = result[seed];
    auto it = presence.find(seed);
    if (it == presence.end()) continue;
    const auto& seed_docs = it->second;
    for (const auto& [word, word_docs] : presence) {
      if (word == seed) continue;
      auto t = table_from_presence(total, seed_docs.size(), word_docs.size(),
                                   intersection_size(seed_docs, word_docs));
      if (!phi_defined(t)) continue;
      neighbors.emplace_back(word, phi(t));
    }
    std::sort(neighbors.begin(), neighbors.end(),
              [](const auto& lhs, const auto& rhs) {
                if (lhs.second != rhs.second) return lhs.second > rhs.second;
                return lhs.first < rhs.first;
              });
    if (neighbors.size() > static_cast<std::size_t>(top_n)) {
      neighbors.resize(static_cast<std::size_t>(top_n));
    }
  }
  return result;
}

std::string export_graph(const CorrelationGraph& graph, std::string_view format) {
  std::vector<GraphEdge> edges = graph.edges;
  std::sort(edges.begin(), edges.end(),
            [](const GraphEdge& lhs, const GraphEdge& rhs) {
              if (lhs.a != rhs.a) return lhs.a < rhs.a;
              return lhs.b < rhs.b;
            });
  std::string out;
  if (format == "dot") {
    out += "graph G {\n";
    for (const GraphEdge& e : edges) {
      out += "  \"" + e.a + "\" -- \"" + e.b + "\" [weight=" + format_phi(e.phi) +
             "];\n";
    }
    out += "}\n";
  } else if (format == "edge_csv") {
    out += "source,target,phi\n";
    for (const GraphEdge& e : edges) {
      out += e.a + "," + e.b + "," + format_phi(e.phi) + "\n";
    }
  } else {
    throw std::invalid_argument("unknown graph format: " + std::string(format));
  }
  return out;
}

}  // namespace opmine::cooccur
