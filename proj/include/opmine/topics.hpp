#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "opmine/preprocess.hpp"

namespace opmine::topics {

struct Vocabulary {
  std::vector<std::string> words;  // sorted lexicographically
  std::unordered_map<std::string, int> index;
  std::vector<std::int64_t> doc_freq;  // by word id
  std::int64_t doc_count = 0;          // documents seen at build time

  int size() const { return static_cast<int>(words.size()); }
};

Vocabulary build_vocab(const std::vector<preprocess::TokenizedDocument>& docs,
                       std::int64_t min_doc_freq = 1);

struct LdaConfig {
  int k = 8;
  double alpha = 0.0;  // <= 0 selects 50/k
  double beta = 0.01;
  int iterations = 1000;
  int burn_in = 200;
  std::uint64_t seed = 1;
};

struct TopicModel {
  int k = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  Vocabulary vocab;
  std::vector<std::vector<double>> topic_word;      // k x V, rows sum to 1
  std::vector<std::vector<double>> doc_topic;       // D x k, rows sum to 1
  std::vector<std::vector<int>> assignments;        // per doc, per token
};

// Collapsed Gibbs chain over token-topic assignments. Exposed so the count
// bookkeeping can be checked sweep by sweep.
class GibbsSampler {
 public:
  // docs: in-vocabulary token ids per document.
  GibbsSampler(std::vector<std::vector<int>> docs, int k, int vocab_size,
               double alpha, double beta, std::uint64_t seed);

  void run_sweep();

  const std::vector<std::vector<int>>& assignments() const { return z_; }
  const std::vector<std::int64_t>& topic_totals() const { return topic_total_; }
  const std::vector<std::vector<std::int64_t>>& doc_topic_counts() const {
    return doc_topic_;
  }
  const std::vector<std::vector<std::int64_t>>& topic_word_counts() const {
    return topic_word_;
  }
  std::int64_t total_tokens() const { return total_tokens_; }

 private:
  double next_unit();
  int sample_topic(std::size_t d, int word, int current);

  std::vector<std::vector<int>> docs_;
  int k_;
  int vocab_size_;
  double alpha_;
  double beta_;
  std::mt19937_64 rng_;
  std::vector<std::vector<int>> z_;
  std::vector<std::vector<std::int64_t>> doc_topic_;   // D x k
  std::vector<std::vector<std::int64_t>> topic_word_;  // k x V
  std::vector<std::int64_t> topic_total_;              // k
  std::int64_t total_tokens_ = 0;
};

// Out-of-vocabulary tokens are skipped; a corpus with zero in-vocabulary
// tokens is rejected. Identical inputs and seed give a bit-identical model.
TopicModel fit_lda(const std::vector<preprocess::TokenizedDocument>& docs,
                   const Vocabulary& vocab, const LdaConfig& config);
TopicModel fit_lda(const std::vector<preprocess::TokenizedDocument>& docs,
                   const LdaConfig& config);

// Per topic: the n highest-probability words, descending then lexicographic.
std::vector<std::vector<std::string>> top_keywords(const TopicModel& model,
                                                   int n);

// Base-2 Jensen-Shannon divergence; symmetric, in [0, 1].
double jensen_shannon(const std::vector<double>& p, const std::vector<double>& q);

// Mean pairwise JSD between topic_word rows; needs k >= 2.
double deveaud_score(const TopicModel& model);

struct SelectionResult {
  int best_k = 0;
  std::vector<std::pair<int, double>> scores;  // (k, score) ascending in k
};

// Fits one model per k and keeps the score maximizer; ties go to the
// smallest k. base.k is ignored.
SelectionResult select_k(const std::vector<preprocess::TokenizedDocument>& docs,
                         const Vocabulary& vocab, const LdaConfig& base,
                         int k_min = 4, int k_max = 11);

struct DocInference {
  std::vector<double> proportions;
  bool out_of_vocab = false;  // no usable tokens; proportions are uniform
};

// Samples the single document's assignments with topic_word frozen.
DocInference infer_doc(const TopicModel& model,
                       const preprocess::TokenizedDocument& doc,
                       int iterations = 100, std::uint64_t seed = 17);

std::string save_model(const TopicModel& model);
TopicModel load_model(const std::string& json_text);
void save_model_file(const TopicModel& model, const std::string& path);
TopicModel load_model_file(const std::string& path);

}  // namespace opmine::topics
