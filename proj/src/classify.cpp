#include "opmine/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "opmine/errors.hpp"

namespace opmine::classify {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

double dot_dense(const std::vector<double>& weights,
                 const FeatureVector& features) {
  double s = 0.0;
  for (const auto& [id, weight] : features.entries) {
    s += weights[static_cast<std::size_t>(id)] * weight;
  }
  return s;
}

void check_two_classes(const Dataset& data) {
  std::int64_t positives = 0;
  std::int64_t negatives = 0;
  for (const Example& example : data.examples) {
    if (example.label == 1) {
      ++positives;
    } else if (example.label == -1) {
      ++negatives;
    } else {
      throw std::invalid_argument("labels must be +1 or -1");
    }
  }
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument("training data needs both classes");
  }
}

std::string format4(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

nlohmann::ordered_json vocab_to_json(const topics::Vocabulary& vocab) {
  nlohmann::ordered_json j;
  j["words"] = vocab.words;
  j["doc_freq"] = vocab.doc_freq;
  j["doc_count"] = vocab.doc_count;
  return j;
}

topics::Vocabulary vocab_from_json(const nlohmann::json& j) {
  topics::Vocabulary vocab;
  vocab.words = j.at("words").get<std::vector<std::string>>();
  vocab.doc_freq = j.at("doc_freq").get<std::vector<std::int64_t>>();
  vocab.doc_count = j.at("doc_count").get<std::int64_t>();
  for (std::size_t i = 0; i < vocab.words.size(); ++i) {
    vocab.index[vocab.words[i]] = static_cast<int>(i);
  }
  return vocab;
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kBinary: return "binary";
    case Scheme::kTf: return "tf";
    case Scheme::kTfidf: return "tfidf";
  }
  return "binary";
}

std::optional<Scheme> parse_scheme(std::string_view token) {
  if (token == "binary") return Scheme::kBinary;
  if (token == "tf") return Scheme::kTf;
  if (token == "tfidf") return Scheme::kTfidf;
  return std::nullopt;
}

std::string to_string(ModelKind kind) {
  return kind == ModelKind::kLogreg ? "logreg" : "svm";
}

std::string to_string(Cohort cohort) {
  switch (cohort) {
    case Cohort::kNonOud: return "non_oud";
    case Cohort::kOudNonRecovering: return "oud_non_recovering";
    case Cohort::kOudRecovering: return "oud_recovering";
  }
  return "non_oud";
}

std::vector<AuthorDoc> concat_by_author(
    const std::vector<preprocess::TokenizedDocument>& docs) {
  std::map<std::string, std::vector<std::string>> by_author;
  for (const auto& doc : docs) {
    auto& tokens = by_author[doc.author];
    tokens.insert(tokens.end(), doc.tokens.begin(), doc.tokens.end());
  }
  std::vector<AuthorDoc> authors;
  authors.reserve(by_author.size());
  for (auto& [author, tokens] : by_author) {
    authors.push_back({author, std::move(tokens)});
  }
  return authors;
}

FeatureVector featurize(const std::vector<std::string>& tokens,
                        const topics::Vocabulary& vocab, Scheme scheme) {
  std::map<int, double> tf;
  for (const std::string& token : tokens) {
    auto it = vocab.index.find(token);
    if (it != vocab.index.end()) {
      tf[it->second] += 1.0;
    }
  }
  FeatureVector features;
  features.entries.reserve(tf.size());
  for (const auto& [id, count] : tf) {
    double weight = 0.0;
    switch (scheme) {
      case Scheme::kBinary:
        weight = 1.0;
        break;
      case Scheme::kTf:
        weight = count;
        break;
      case Scheme::kTfidf: {
        double df = static_cast<double>(vocab.doc_freq[static_cast<std::size_t>(id)]);
        double idf =
            std::log((1.0 + static_cast<double>(vocab.doc_count)) / (1.0 + df)) +
            1.0;
        weight = count * idf;
        break;
      }
    }
    features.entries.emplace_back(id, weight);
  }
  double norm_sq = 0.0;
  for (const auto& [id, weight] : features.entries) {
    norm_sq += weight * weight;
  }
  features.norm = std::sqrt(norm_sq);
  if (features.norm > 0.0) {
    for (auto& [id, weight] : features.entries) {
      weight /= features.norm;
    }
  }
  return features;
}

Dataset build_dataset(const std::vector<AuthorDoc>& authors,
                      const corpus::LabelMap& labels, corpus::Label positive,
                      corpus::Label negative, const topics::Vocabulary& vocab,
                      Scheme scheme) {
  Dataset data;
  for (const AuthorDoc& author : authors) {
    auto it = labels.find(author.author);
    if (it == labels.end()) continue;
    int label = 0;
    if (it->second == positive) {
      label = 1;
    } else if (it->second == negative) {
      label = -1;
    } else {
      continue;
    }
    data.examples.push_back(
        {author.author, featurize(author.tokens, vocab, scheme), label});
  }
  return data;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction,
                                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must be in (0, 1)");
  }
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
    int label = dataset.examples[i].label;
    if (label == 1) {
      positives.push_back(i);
    } else if (label == -1) {
      negatives.push_back(i);
    } else {
      throw std::invalid_argument("labels must be +1 or -1");
    }
  }
  std::mt19937_64 rng(seed);
  auto shuffle = [&rng](std::vector<std::size_t>& indices) {
    for (std::size_t i = indices.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(indices[i - 1], indices[j]);
    }
  };
  std::pair<Dataset, Dataset> result;
  for (auto* cls : {&positives, &negatives}) {
    if (cls->size() < 2) {
      throw std::invalid_argument(
          "each class needs at least 2 members to split");
    }
    shuffle(*cls);
    auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(cls->size())));
    for (std::size_t i = 0; i < cls->size(); ++i) {
      auto& target = i < n_train ? result.first : result.second;
      target.examples.push_back(dataset.examples[(*cls)[i]]);
    }
  }
  return result;
}

double score(const LinearModel& model, const FeatureVector& features) {
  return dot_dense(model.weights, features) + model.bias;
}

int predict(const LinearModel& model, const FeatureVector& features) {
  return score(model, features) > 0.0 ? 1 : -1;
}

int predict_tokens(const LinearModel& model,
                   const std::vector<std::string>& tokens) {
  return predict(model, featurize(tokens, model.vocab, model.scheme));
}

double logreg_loss(const std::vector<double>& weights, double bias,
                   const Dataset& data, double l2) {
  double loss = 0.0;
  for (const Example& example : data.examples) {
    double margin =
        static_cast<double>(example.label) * (dot_dense(weights, example.features) + bias);
    loss += softplus(-margin);
  }
  loss /= static_cast<double>(data.size());
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  return loss + 0.5 * l2 * reg;
}

std::pair<std::vector<double>, double> logreg_gradient(
    const std::vector<double>& weights, double bias, const Dataset& data,
    double l2) {
  std::vector<double> grad_w(weights.size(), 0.0);
  double grad_b = 0.0;
  for (const Example& example : data.examples) {
    double y = static_cast<double>(example.label);
    double margin = y * (dot_dense(weights, example.features) + bias);
    double g = -y * sigmoid(-margin);
    for (const auto& [id, weight] : example.features.entries) {
      grad_w[static_cast<std::size_t>(id)] += g * weight;
    }
    grad_b += g;
  }
  const auto n = static_cast<double>(data.size());
  for (std::size_t i = 0; i < grad_w.size(); ++i) {
    grad_w[i] = grad_w[i] / n + l2 * weights[i];
  }
  grad_b /= n;
  return {std::move(grad_w), grad_b};
}

LinearModel train_logreg(const Dataset& train, const topics::Vocabulary& vocab,
                         Scheme scheme, const LogregConfig& config) {
  check_two_classes(train);
  if (config.epochs < 1) {
    throw std::invalid_argument("epochs must be at least 1");
  }
  if (config.l2 < 0.0 || config.learning_rate <= 0.0) {
    throw std::invalid_argument("need l2 >= 0 and learning_rate > 0");
  }

  LinearModel model;
  model.kind = ModelKind::kLogreg;
  model.scheme = scheme;
  model.vocab = vocab;
  model.weights.assign(static_cast<std::size_t>(vocab.size()), 0.0);
  model.l2 = config.l2;
  model.epochs = config.epochs;
  model.learning_rate = config.learning_rate;
  model.seed = config.seed;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    auto [grad_w, grad_b] =
        logreg_gradient(model.weights, model.bias, train, config.l2);
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
      model.weights[i] -= config.learning_rate * grad_w[i];
    }
    model.bias -= config.learning_rate * grad_b;
    double loss = logreg_loss(model.weights, model.bias, train, config.l2);
    if (!std::isfinite(loss)) {
      throw TrainingError("logistic objective diverged", epoch);
    }
  }

  auto [grad_w, grad_b] =
      logreg_gradient(model.weights, model.bias, train, config.l2);
  double norm_sq = grad_b * grad_b;
  for (double g : grad_w) norm_sq += g * g;
  model.final_grad_norm = std::sqrt(norm_sq);
  return model;
}

double svm_objective(const std::vector<double>& weights, double bias,
                     const Dataset& data, double lambda) {
  double hinge = 0.0;
  for (const Example& example : data.examples) {
    double margin = static_cast<double>(example.label) *
                    (dot_dense(weights, example.features) + bias);
    hinge += std::max(0.0, 1.0 - margin);
  }
  hinge /= static_cast<double>(data.size());
  double reg = bias * bias;
  for (double w : weights) reg += w * w;
  return 0.5 * lambda * reg + hinge;
}

LinearModel train_svm(const Dataset& train, const topics::Vocabulary& vocab,
                      Scheme scheme, const SvmConfig& config) {
  check_two_classes(train);
  if (config.epochs < 1) {
    throw std::invalid_argument("epochs must be at least 1");
  }
  if (config.lambda <= 0.0) {
    throw std::invalid_argument("lambda must be positive");
  }

  LinearModel model;
  model.kind = ModelKind::kSvm;
  model.scheme = scheme;
  model.vocab = vocab;
  model.lambda = config.lambda;
  model.epochs = config.epochs;
  model.seed = config.seed;

  const auto v = static_cast<std::size_t>(vocab.size());
  const auto n = train.size();
  std::vector<double> w(v, 0.0);
  double b = 0.0;
  std::vector<double> avg_w(v, 0.0);
  double avg_b = 0.0;
  std::mt19937_64 rng(config.seed);
  std::int64_t t = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t step = 0; step < n; ++step) {
      ++t;
      const Example& example =
          train.examples[static_cast<std::size_t>(rng() % n)];
      double eta = 1.0 / (config.lambda * static_cast<double>(t));
      double y = static_cast<double>(example.label);
      double margin = y * (dot_dense(w, example.features) + b);
      double keep = 1.0 - eta * config.lambda;
      for (double& wi : w) wi *= keep;
      b *= keep;
      if (margin < 1.0) {
        for (const auto& [id, weight] : example.features.entries) {
          w[static_cast<std::size_t>(id)] += eta * y * weight;
        }
        b += eta * y;
      }
      double inv_t = 1.0 / static_cast<double>(t);
      for (std::size_t i = 0; i < v; ++i) {
        avg_w[i] += (w[i] - avg_w[i]) * inv_t;
      }
      avg_b += (b - avg_b) * inv_t;
    }
    double objective = svm_objective(avg_w, avg_b, train, config.lambda);
    if (!std::isfinite(objective)) {
      throw TrainingError("svm objective diverged", epoch);
    }
    model.objective_trace.push_back(objective);
  }

  model.weights = std::move(avg_w);
  model.bias = avg_b;
  return model;
}

double cosine_distance(const FeatureVector& a, const FeatureVector& b) {
  if (a.norm == 0.0 || b.norm == 0.0) {
    return 1.0;
  }
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    if (a.entries[i].first < b.entries[j].first) {
      ++i;
    } else if (b.entries[j].first < a.entries[i].first) {
      ++j;
    } else {
      dot += a.entries[i].second * b.entries[j].second;
      ++i;
      ++j;
    }
  }
  return 1.0 - dot;
}

int knn_predict(const Dataset& train, const FeatureVector& query, int k) {
  if (train.empty()) {
    throw std::invalid_argument("knn needs a non-empty training set");
  }
  if (k < 1 || static_cast<std::size_t>(k) > train.size()) {
    throw std::invalid_argument("k must be in [1, training size]");
  }
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    order.emplace_back(cosine_distance(train.examples[i].features, query), i);
  }
  std::sort(order.begin(), order.end());
  int votes = 0;
  for (int i = 0; i < k; ++i) {
    votes += train.examples[order[static_cast<std::size_t>(i)].second].label;
  }
  if (votes > 0) return 1;
  if (votes < 0) return -1;
  return train.examples[order[0].second].label;
}

Metrics metrics_from_confusion(const Confusion& confusion) {
  Metrics m;
  m.confusion = confusion;
  const auto total = static_cast<double>(confusion.total());
  if (total > 0.0) {
    m.accuracy = static_cast<double>(confusion.tp + confusion.tn) / total;
  }
  if (confusion.tp + confusion.fn > 0) {
    m.recall = static_cast<double>(confusion.tp) /
               static_cast<double>(confusion.tp + confusion.fn);
  }
  if (confusion.tp + confusion.fp > 0) {
    m.precision = static_cast<double>(confusion.tp) /
                  static_cast<double>(confusion.tp + confusion.fp);
  } else {
    m.precision_undefined = true;
  }
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

namespace {

Metrics metrics_from_predictions(const Dataset& test,
                                 const std::vector<int>& predictions) {
  Confusion c;
  for (std::size_t i = 0; i < test.size(); ++i) {
    bool actual = test.examples[i].label == 1;
    bool predicted = predictions[i] == 1;
    if (actual && predicted) ++c.tp;
    else if (!actual && predicted) ++c.fp;
    else if (actual && !predicted) ++c.fn;
    else ++c.tn;
  }
  return metrics_from_confusion(c);
}

}  // namespace

Metrics evaluate(const LinearModel& model, const Dataset& test) {
  if (test.empty()) {
    throw std::invalid_argument("test set is empty");
  }
  std::vector<int> predictions;
  predictions.reserve(test.size());
  for (const Example& example : test.examples) {
    predictions.push_back(predict(model, example.features));
  }
  return metrics_from_predictions(test, predictions);
}

Metrics evaluate_knn(const Dataset& train, const Dataset& test, int k) {
  if (test.empty()) {
    throw std::invalid_argument("test set is empty");
  }
  std::vector<int> predictions;
  predictions.reserve(test.size());
  for (const Example& example : test.examples) {
    predictions.push_back(knn_predict(train, example.features, k));
  }
  return metrics_from_predictions(test, predictions);
}

std::string metrics_report_csv(const Metrics& lg, const Metrics& knn,
                               const Metrics& svm) {
  std::string out = "model,accuracy,recall,precision,f1\n";
  const std::pair<const char*, const Metrics*> rows[] = {
      {"LG", &lg}, {"KNN", &knn}, {"SVM", &svm}};
  for (const auto& [name, m] : rows) {
    out += std::string(name) + "," + format4(m->accuracy) + "," +
           format4(m->recall) + "," + format4(m->precision) + "," +
           format4(m->f1) + "\n";
  }
  return out;
}

CohortAssignment cascade(const std::vector<AuthorDoc>& authors,
                         const corpus::LabelMap& stage1_labels,
                         const corpus::LabelMap& stage2_labels,
                         const CascadeConfig& config) {
  std::vector<preprocess::TokenizedDocument> train_docs;
  for (const AuthorDoc& author : authors) {
    if (stage1_labels.count(author.author) > 0) {
      train_docs.push_back({author.author, author.author, author.tokens});
    }
  }
  if (train_docs.empty()) {
    throw std::invalid_argument("no stage-1 labeled authors in the corpus");
  }
  auto vocab = topics::build_vocab(train_docs, config.vocab_min_doc_freq);

  auto train_linear = [&](const Dataset& data, ModelKind kind) {
    if (kind == ModelKind::kLogreg) {
      return train_logreg(data, vocab, config.scheme, config.logreg);
    }
    return train_svm(data, vocab, config.scheme, config.svm);
  };

  Dataset stage1_data =
      build_dataset(authors, stage1_labels, corpus::Label::kOud,
                    corpus::Label::kNonOud, vocab, config.scheme);
  LinearModel stage1 = train_linear(stage1_data, config.stage1);

  std::vector<const AuthorDoc*> predicted_oud;
  CohortAssignment assignment;
  for (const AuthorDoc& author : authors) {
    if (predict_tokens(stage1, author.tokens) == 1) {
      predicted_oud.push_back(&author);
    } else {
      assignment[author.author] = Cohort::kNonOud;
    }
  }

  Dataset stage2_data;
  for (const AuthorDoc* author : predicted_oud) {
    auto it = stage2_labels.find(author->author);
    if (it == stage2_labels.end()) continue;
    int label = 0;
    if (it->second == corpus::Label::kRecovering) {
      label = 1;
    } else if (it->second == corpus::Label::kNonRecovering) {
      label = -1;
    } else {
      continue;
    }
    stage2_data.examples.push_back(
        {author->author, featurize(author->tokens, vocab, config.scheme),
         label});
  }
  if (stage2_data.empty()) {
    throw std::invalid_argument(
        "no stage-2 labels among predicted OUD authors");
  }
  LinearModel stage2 = train_linear(stage2_data, config.stage2);

  for (const AuthorDoc* author : predicted_oud) {
    assignment[author->author] = predict_tokens(stage2, author->tokens) == 1
                                     ? Cohort::kOudRecovering
                                     : Cohort::kOudNonRecovering;
  }
  return assignment;
}

std::string save_linear_model(const LinearModel& model) {
  nlohmann::ordered_json j;
  j["format"] = "opmine-linear-model";
  j["version"] = 1;
  j["kind"] = to_string(model.kind);
  j["scheme"] = to_string(model.scheme);
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["vocab"] = vocab_to_json(model.vocab);
  return j.dump();
}

LinearModel load_linear_model(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("linear model is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "opmine-linear-model") {
    throw ParseError("not a linear model document");
  }
  if (j.value("version", 0) != 1) {
    throw ParseError("unsupported linear model version");
  }
  LinearModel model;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "logreg") {
    model.kind = ModelKind::kLogreg;
  } else if (kind == "svm") {
    model.kind = ModelKind::kSvm;
  } else {
    throw ParseError("unknown model kind: " + kind);
  }
  auto scheme = parse_scheme(j.at("scheme").get<std::string>());
  if (!scheme) {
    throw ParseError("unknown feature scheme");
  }
  model.scheme = *scheme;
  model.weights = j.at("weights").get<std::vector<double>>();
  model.bias = j.at("bias").get<double>();
  model.vocab = vocab_from_json(j.at("vocab"));
  if (model.weights.size() != model.vocab.words.size()) {
    throw ParseError("weight count does not match vocabulary size");
  }
  return model;
}

void save_linear_model_file(const LinearModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write model file: " + path);
  }
  out << save_linear_model(model) << "\n";
}

LinearModel load_linear_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open model file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_linear_model(buffer.str());
}

}  // namespace opmine::classify
