#include "opmine/topics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "opmine/errors.hpp"

namespace opmine::topics {

namespace {

std::vector<std::vector<int>> docs_to_ids(
    const std::vector<preprocess::TokenizedDocument>& docs,
    const Vocabulary& vocab) {
  std::vector<std::vector<int>> ids(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    ids[d].reserve(docs[d].tokens.size());
    for (const std::string& token : docs[d].tokens) {
      auto it = vocab.index.find(token);
      if (it != vocab.index.end()) {
        ids[d].push_back(it->second);
      }
    }
  }
  return ids;
}

double effective_alpha(const LdaConfig& config) {
  if (config.alpha > 0.0) return config.alpha;
  return 50.0 / static_cast<double>(config.k);
}

void validate_config(const LdaConfig& config) {
  if (config.k < 1) {
    throw std::invalid_argument("topic count k must be at least 1");
  }
  if (config.beta <= 0.0) {
    throw std::invalid_argument("beta must be positive");
  }
  if (config.burn_in < 0 || config.iterations <= config.burn_in) {
    throw std::invalid_argument("need iterations > burn_in >= 0");
  }
}

}  // namespace

Vocabulary build_vocab(const std::vector<preprocess::TokenizedDocument>& docs,
                       std::int64_t min_doc_freq) {
  std::map<std::string, std::int64_t> df;
  for (const auto& doc : docs) {
    std::unordered_set<std::string_view> seen;
    for (const std::string& token : doc.tokens) {
      if (seen.insert(token).second) {
        ++df[token];
      }
    }
  }
  Vocabulary vocab;
  vocab.doc_count = static_cast<std::int64_t>(docs.size());
  for (const auto& [word, freq] : df) {
    if (freq >= min_doc_freq) {
      vocab.index[word] = static_cast<int>(vocab.words.size());
      vocab.words.push_back(word);
      vocab.doc_freq.push_back(freq);
    }
  }
  if (vocab.words.empty()) {
    throw std::invalid_argument(
        "vocabulary is empty after the document-frequency floor");
  }
  return vocab;
}

GibbsSampler::GibbsSampler(std::vector<std::vector<int>> docs, int k,
                           int vocab_size, double alpha, double beta,
                           std::uint64_t seed)
    : docs_(std::move(docs)),
      k_(k),
      vocab_size_(vocab_size),
      alpha_(alpha),
      beta_(beta),
      rng_(seed),
      doc_topic_(docs_.size(), std::vector<std::int64_t>(k, 0)),
      topic_word_(k, std::vector<std::int64_t>(vocab_size, 0)),
      topic_total_(k, 0) {
  z_.resize(docs_.size());
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    z_[d].resize(docs_[d].size());
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      int t = static_cast<int>(next_unit() * k_);
      if (t >= k_) t = k_ - 1;
      z_[d][i] = t;
      ++doc_topic_[d][t];
      ++topic_word_[t][docs_[d][i]];
      ++topic_total_[t];
      ++total_tokens_;
    }
  }
}

double GibbsSampler::next_unit() {
  // 53-bit mantissa draw in [0, 1); mt19937_64 output is identical on every
  // conforming platform.
  return static_cast<double>(rng_() >> 11) * (1.0 / 9007199254740992.0);
}

int GibbsSampler::sample_topic(std::size_t d, int word, int current) {
  --doc_topic_[d][current];
  --topic_word_[current][word];
  --topic_total_[current];

  double total = 0.0;
  std::vector<double> weights(k_);
  const double v_beta = static_cast<double>(vocab_size_) * beta_;
  for (int t = 0; t < k_; ++t) {
    double w = (static_cast<double>(doc_topic_[d][t]) + alpha_) *
               (static_cast<double>(topic_word_[t][word]) + beta_) /
               (static_cast<double>(topic_total_[t]) + v_beta);
    weights[t] = w;
    total += w;
  }
  double u = next_unit() * total;
  int chosen = k_ - 1;
  double cumulative = 0.0;
  for (int t = 0; t < k_; ++t) {
    cumulative += weights[t];
    if (u < cumulative) {
      chosen = t;
      break;
    }
  }

  ++doc_topic_[d][chosen];
  ++topic_word_[chosen][word];
  ++topic_total_[chosen];
  return chosen;
}

void GibbsSampler::run_sweep() {
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      z_[d][i] = sample_topic(d, docs_[d][i], z_[d][i]);
    }
  }
}

TopicModel fit_lda(const std::vector<preprocess::TokenizedDocument>& docs,
                   const Vocabulary& vocab, const LdaConfig& config) {
  validate_config(config);
  auto ids = docs_to_ids(docs, vocab);
  std::int64_t tokens = 0;
  for (const auto& doc : ids) {
    tokens += static_cast<std::int64_t>(doc.size());
  }
  if (tokens == 0) {
    throw std::invalid_argument("corpus has no in-vocabulary tokens");
  }

  const double alpha = effective_alpha(config);
  GibbsSampler sampler(ids, config.k, vocab.size(), alpha, config.beta,
                       config.seed);
  for (int iter = 0; iter < config.iterations; ++iter) {
    sampler.run_sweep();
  }

  TopicModel model;
  model.k = config.k;
  model.alpha = alpha;
  model.beta = config.beta;
  model.seed = config.seed;
  model.vocab = vocab;
  model.assignments = sampler.assignments();

  const auto v = static_cast<std::size_t>(vocab.size());
  const double v_beta = static_cast<double>(v) * config.beta;
  model.topic_word.assign(config.k, std::vector<double>(v, 0.0));
  for (int t = 0; t < config.k; ++t) {
    double denom =
        static_cast<double>(sampler.topic_totals()[t]) + v_beta;
    for (std::size_t w = 0; w < v; ++w) {
      model.topic_word[t][w] =
          (static_cast<double>(sampler.topic_word_counts()[t][w]) +
           config.beta) /
          denom;
    }
  }
  const double k_alpha = static_cast<double>(config.k) * alpha;
  model.doc_topic.assign(ids.size(), std::vector<double>(config.k, 0.0));
  for (std::size_t d = 0; d < ids.size(); ++d) {
    double denom = static_cast<double>(ids[d].size()) + k_alpha;
    for (int t = 0; t < config.k; ++t) {
      model.doc_topic[d][t] =
          (static_cast<double>(sampler.doc_topic_counts()[d][t]) + alpha) /
          denom;
    }
  }
  return model;
}

TopicModel fit_lda(const std::vector<preprocess::TokenizedDocument>& docs,
                   const LdaConfig& config) {
  return fit_lda(docs, build_vocab(docs, 1), config);
}

std::vector<std::vector<std::string>> top_keywords(const TopicModel& model,
                                                   int n) {
  if (n < 1 || n > model.vocab.size()) {
    throw std::invalid_argument("keyword count must be in [1, vocabulary size]");
  }
  std::vector<std::vector<std::string>> result(model.k);
  for (int t = 0; t < model.k; ++t) {
    std::vector<int> order(model.vocab.words.size());
    std::iota(order.begin(), order.end(), 0);
    const auto& row = model.topic_word[t];
    std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
      if (row[lhs] != row[rhs]) return row[lhs] > row[rhs];
      return model.vocab.words[lhs] < model.vocab.words[rhs];
    });
    result[t].reserve(n);
    for (int i = 0; i < n; ++i) {
      result[t].push_back(model.vocab.words[order[i]]);
    }
  }
  return result;
}

double jensen_shannon(const std::vector<double>& p,
                      const std::vector<double>& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("distributions differ in length");
  }
  double divergence = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) divergence += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) divergence += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return divergence;
}

double deveaud_score(const TopicModel& model) {
  if (model.k < 2) {
    throw std::invalid_argument("topic-pair score needs at least 2 topics");
  }
  double sum = 0.0;
  int pairs = 0;
  for (int i = 0; i < model.k; ++i) {
    for (int j = i + 1; j < model.k; ++j) {
      sum += jensen_shannon(model.topic_word[i], model.topic_word[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

SelectionResult select_k(const std::vector<preprocess::TokenizedDocument>& docs,
                         const Vocabulary& vocab, const LdaConfig& base,
                         int k_min, int k_max) {
  if (k_min < 2) {
    throw std::invalid_argument("k_min must be at least 2");
  }
  if (k_max < k_min) {
    throw std::invalid_argument("k_max must be >= k_min");
  }
  SelectionResult result;
  double best_score = -1.0;
  for (int k = k_min; k <= k_max; ++k) {
    LdaConfig config = base;
    config.k = k;
    TopicModel model = fit_lda(docs, vocab, config);
    double score = deveaud_score(model);
    result.scores.emplace_back(k, score);
    if (score > best_score) {
      best_score = score;
      result.best_k = k;
    }
  }
  return result;
}

DocInference infer_doc(const TopicModel& model,
                       const preprocess::TokenizedDocument& doc,
                       int iterations, std::uint64_t seed) {
  DocInference inference;
  std::vector<int> ids;
  for (const std::string& token : doc.tokens) {
    auto it = model.vocab.index.find(token);
    if (it != model.vocab.index.end()) {
      ids.push_back(it->second);
    }
  }
  if (ids.empty()) {
    inference.out_of_vocab = true;
    inference.proportions.assign(
        model.k, 1.0 / static_cast<double>(model.k));
    return inference;
  }

  std::mt19937_64 rng(seed);
  auto next_unit = [&rng]() {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
  };
  std::vector<std::int64_t> counts(model.k, 0);
  std::vector<int> z(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    int t = static_cast<int>(next_unit() * model.k);
    if (t >= model.k) t = model.k - 1;
    z[i] = t;
    ++counts[t];
  }
  std::vector<double> weights(model.k);
  for (int iter = 0; iter < iterations; ++iter) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      --counts[z[i]];
      double total = 0.0;
      for (int t = 0; t < model.k; ++t) {
        double w = (static_cast<double>(counts[t]) + model.alpha) *
                   model.topic_word[t][ids[i]];
        weights[t] = w;
        total += w;
      }
      double u = next_unit() * total;
      int chosen = model.k - 1;
      double cumulative = 0.0;
      for (int t = 0; t < model.k; ++t) {
        cumulative += weights[t];
        if (u < cumulative) {
          chosen = t;
          break;
        }
      }
      z[i] = chosen;
      ++counts[chosen];
    }
  }
  const double k_alpha = static_cast<double>(model.k) * model.alpha;
  double denom = static_cast<double>(ids.size()) + k_alpha;
  inference.proportions.resize(model.k);
  for (int t = 0; t < model.k; ++t) {
    inference.proportions[t] =
        (static_cast<double>(counts[t]) + model.alpha) / denom;
  }
  return inference;
}

std::string save_model(const TopicModel& model) {
  nlohmann::ordered_json j;
  j["format"] = "opmine-topic-model";
  j["version"] = 1;
  j["k"] = model.k;
  j["alpha"] = model.alpha;
  j["beta"] = model.beta;
  j["seed"] = model.seed;
  j["vocab"] = model.vocab.words;
  j["doc_freq"] = model.vocab.doc_freq;
  j["doc_count"] = model.vocab.doc_count;
  j["topic_word"] = model.topic_word;
  j["doc_topic"] = model.doc_topic;
  return j.dump();
}

TopicModel load_model(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("topic model is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "opmine-topic-model") {
    throw ParseError("not a topic model document");
  }
  if (j.value("version", 0) != 1) {
    throw ParseError("unsupported topic model version");
  }
  TopicModel model;
  model.k = j.at("k").get<int>();
  model.alpha = j.at("alpha").get<double>();
  model.beta = j.at("beta").get<double>();
  model.seed = j.at("seed").get<std::uint64_t>();
  model.vocab.words = j.at("vocab").get<std::vector<std::string>>();
  model.vocab.doc_freq = j.at("doc_freq").get<std::vector<std::int64_t>>();
  model.vocab.doc_count = j.at("doc_count").get<std::int64_t>();
  for (std::size_t i = 0; i < model.vocab.words.size(); ++i) {
    model.vocab.index[model.vocab.words[i]] = static_cast<int>(i);
  }
  model.topic_word = j.at("topic_word").get<std::vector<std::vector<double>>>();
  model.doc_topic = j.at("doc_topic").get<std::vector<std::vector<double>>>();
  return model;
}

void save_model_file(const TopicModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write model file: " + path);
  }
  out << save_model(model) << "\n";
}

TopicModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open model file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_model(buffer.str());
}

}  // namespace opmine::topics
