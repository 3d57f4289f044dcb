#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "opmine/classify.hpp"
#include "opmine/cooccur.hpp"
#include "opmine/corpus.hpp"
#include "opmine/emotion.hpp"
#include "opmine/errors.hpp"
#include "opmine/fetch.hpp"
#include "opmine/preprocess.hpp"
#include "opmine/relapse.hpp"
#include "opmine/topics.hpp"

namespace fs = std::filesystem;
using opmine::ParseError;

namespace {

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

// Artifacts are assembled in memory and only hit the disk once every
// computation has succeeded.
using Artifacts = std::map<std::string, std::string>;

void write_artifacts(const std::string& out_dir, const Artifacts& artifacts) {
  fs::create_directories(out_dir);
  for (const auto& [name, content] : artifacts) {
    fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
  }
}

// ---------------------------------------------------------------------------
// plain-text config: [section] headers over key = value lines

using IniConfig = std::map<std::string, std::map<std::string, std::string>>;

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

IniConfig parse_ini(std::istream& in) {
  IniConfig config;
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string text = trim(line);
    if (text.empty() || text[0] == '#' || text[0] == ';') continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) {
        throw ParseError("malformed section header", line_no);
      }
      section = trim(text.substr(1, text.size() - 2));
      config[section];
      continue;
    }
    auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected key = value", line_no);
    }
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (key.empty()) {
      throw ParseError("empty key", line_no);
    }
    config[section][key] = value;
  }
  return config;
}

class ConfigView {
 public:
  ConfigView(IniConfig config, fs::path base_dir)
      : config_(std::move(config)), base_dir_(std::move(base_dir)) {}

  std::optional<std::string> find(const std::string& section,
                                  const std::string& key) const {
    auto sec = config_.find(section);
    if (sec == config_.end()) return std::nullopt;
    auto item = sec->second.find(key);
    if (item == sec->second.end()) return std::nullopt;
    return item->second;
  }

  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const {
    auto value = find(section, key);
    return value ? *value : fallback;
  }

  // Relative paths resolve against the config file's directory.
  std::string path(const std::string& section, const std::string& key) const {
    auto value = find(section, key);
    if (!value || value->empty()) {
      throw std::invalid_argument("config is missing " + section + "." + key);
    }
    return resolve(*value);
  }

  std::optional<std::string> optional_path(const std::string& section,
                                           const std::string& key) const {
    auto value = find(section, key);
    if (!value || value->empty()) return std::nullopt;
    return resolve(*value);
  }

  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const {
    auto value = find(section, key);
    if (!value) return fallback;
    try {
      std::size_t consumed = 0;
      std::int64_t parsed = std::stoll(*value, &consumed);
      if (consumed != value->size()) throw std::invalid_argument("trailing");
      return parsed;
    } catch (const std::exception&) {
      throw std::invalid_argument("config value " + section + "." + key +
                                  " is not an integer: " + *value);
    }
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) const {
    auto value = find(section, key);
    if (!value) return fallback;
    try {
      std::size_t consumed = 0;
      double parsed = std::stod(*value, &consumed);
      if (consumed != value->size()) throw std::invalid_argument("trailing");
      return parsed;
    } catch (const std::exception&) {
      throw std::invalid_argument("config value " + section + "." + key +
                                  " is not a number: " + *value);
    }
  }

 private:
  std::string resolve(const std::string& value) const {
    fs::path p(value);
    if (p.is_absolute()) return p.string();
    return (base_dir_ / p).string();
  }

  IniConfig config_;
  fs::path base_dir_;
};

ConfigView load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  return ConfigView(parse_ini(in), fs::absolute(fs::path(path)).parent_path());
}

// ---------------------------------------------------------------------------
// shared plumbing

struct PreprocessFlags {
  std::string stopwords_path;
  bool keep_punctuation = false;
  bool no_lowercase = false;
  bool no_stem = false;
};

opmine::preprocess::PreprocessConfig make_preprocess_config(
    const PreprocessFlags& flags) {
  opmine::preprocess::PreprocessConfig config;
  config.lowercase = !flags.no_lowercase;
  config.strip_punctuation = !flags.keep_punctuation;
  config.stem = !flags.no_stem;
  if (!flags.stopwords_path.empty()) {
    config.stopwords = opmine::preprocess::load_stopwords_file(flags.stopwords_path);
  }
  return config;
}

std::vector<opmine::preprocess::TokenizedDocument> load_and_process(
    const std::string& corpus_path, const PreprocessFlags& flags) {
  auto corpus = opmine::corpus::load_corpus_file(corpus_path);
  return opmine::preprocess::process_corpus(corpus, make_preprocess_config(flags));
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

// Seed words go through the same pipeline as the corpus so "methadone"
// still matches its stemmed form in the documents.
std::vector<std::string> normalize_seeds(
    const std::vector<std::string>& seeds,
    const opmine::preprocess::PreprocessConfig& config) {
  return opmine::preprocess::normalize(seeds, config);
}

// Drops every post older than window_days before its author's latest post.
opmine::corpus::Corpus window_by_author(const opmine::corpus::Corpus& corpus,
                                        std::int64_t window_days) {
  std::map<std::string, std::int64_t> latest;
  for (const auto& post : corpus.posts()) {
    auto [it, inserted] = latest.try_emplace(post.author, post.created_utc);
    if (!inserted && post.created_utc > it->second) it->second = post.created_utc;
  }
  opmine::corpus::Corpus filtered;
  for (const auto& post : corpus.posts()) {
    if (post.created_utc >= latest[post.author] - window_days * 86400) {
      filtered.add(post);
    }
  }
  return filtered;
}

// ---------------------------------------------------------------------------
// artifact builders

std::string emotions_csv(
    const std::map<std::string, std::vector<opmine::preprocess::TokenizedDocument>>& users,
    const opmine::emotion::Lexicon& lexicon, const std::string& key_column) {
  std::string out = key_column + ",dominant";
  for (const std::string& name : lexicon.emotions) {
    out += "," + name;
  }
  out += "\n";
  for (const auto& [key, docs] : users) {
    auto profile = opmine::emotion::user_profile(docs, lexicon);
    out += key + "," + profile.dominant;
    for (const std::string& name : lexicon.emotions) {
      out += "," + format_fixed(profile.normalized.at(name), 4);
    }
    out += "\n";
  }
  return out;
}

std::string emotion_words_csv(
    const std::map<std::string, std::vector<std::pair<std::string, std::int64_t>>>&
        frequencies) {
  std::string out = "emotion,rank,word,count\n";
  for (const auto& [name, words] : frequencies) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      out += name + "," + std::to_string(i + 1) + "," + words[i].first + "," +
             std::to_string(words[i].second) + "\n";
    }
  }
  return out;
}

std::string bigrams_csv(const std::vector<opmine::cooccur::BigramEdge>& edges) {
  std::string out = "first,second,count\n";
  for (const auto& edge : edges) {
    out += edge.first + "," + edge.second + "," + std::to_string(edge.count) + "\n";
  }
  return out;
}

std::string neighbors_csv(
    const std::map<std::string, std::vector<std::pair<std::string, double>>>&
        neighbors) {
  std::string out = "seed,rank,word,phi\n";
  for (const auto& [seed, words] : neighbors) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      out += seed + "," + std::to_string(i + 1) + "," + words[i].first + "," +
             format_fixed(words[i].second, 4) + "\n";
    }
  }
  return out;
}

std::string topics_csv(const opmine::topics::TopicModel& model, int top_words) {
  auto keywords = opmine::topics::top_keywords(model, top_words);
  std::string out = "topic,rank,word,probability\n";
  for (int t = 0; t < model.k; ++t) {
    for (std::size_t r = 0; r < keywords[t].size(); ++r) {
      const std::string& word = keywords[t][r];
      double probability =
          model.topic_word[t][static_cast<std::size_t>(model.vocab.index.at(word))];
      out += std::to_string(t) + "," + std::to_string(r + 1) + "," + word + "," +
             format_fixed(probability, 6) + "\n";
    }
  }
  return out;
}

std::string kselect_csv(const opmine::topics::SelectionResult& result) {
  std::string out = "k,score\n";
  for (const auto& [k, score] : result.scores) {
    out += std::to_string(k) + "," + format_fixed(score, 6) + "\n";
  }
  return out;
}

std::string cohorts_csv(const opmine::classify::CohortAssignment& assignment) {
  std::string out = "author,cohort\n";
  for (const auto& [author, cohort] : assignment) {
    out += author + "," + opmine::classify::to_string(cohort) + "\n";
  }
  return out;
}

std::string tokens_jsonl(
    const std::vector<opmine::preprocess::TokenizedDocument>& docs) {
  std::string out;
  for (const auto& doc : docs) {
    nlohmann::ordered_json j;
    j["id"] = doc.doc_id;
    j["author"] = doc.author;
    j["tokens"] = doc.tokens;
    out += j.dump() + "\n";
  }
  return out;
}

std::string corpus_jsonl(const opmine::corpus::Corpus& corpus) {
  std::ostringstream out;
  opmine::corpus::serialize_corpus(corpus, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// classification plumbing: split authors first, then build the vocabulary on
// the training side only.

struct SplitFeatures {
  opmine::topics::Vocabulary vocab;
  opmine::classify::Dataset train;
  opmine::classify::Dataset test;
};

std::pair<opmine::corpus::Label, opmine::corpus::Label> task_labels(
    const std::string& task) {
  if (task == "oud") {
    return {opmine::corpus::Label::kOud, opmine::corpus::Label::kNonOud};
  }
  if (task == "recovering") {
    return {opmine::corpus::Label::kRecovering,
            opmine::corpus::Label::kNonRecovering};
  }
  throw std::invalid_argument("unknown task: " + task + " (want oud|recovering)");
}

SplitFeatures split_and_featurize(
    const std::vector<opmine::classify::AuthorDoc>& authors,
    const opmine::corpus::LabelMap& labels, const std::string& task,
    opmine::classify::Scheme scheme, double train_fraction, std::uint64_t seed,
    std::int64_t min_doc_freq) {
  auto [positive, negative] = task_labels(task);

  opmine::classify::Dataset skeleton;
  std::map<std::string, const opmine::classify::AuthorDoc*> by_name;
  for (const auto& author : authors) {
    by_name[author.author] = &author;
    auto it = labels.find(author.author);
    if (it == labels.end()) continue;
    if (it->second == positive) {
      skeleton.examples.push_back({author.author, {}, 1});
    } else if (it->second == negative) {
      skeleton.examples.push_back({author.author, {}, -1});
    }
  }
  auto [train_skel, test_skel] =
      opmine::classify::split(skeleton, train_fraction, seed);

  std::vector<opmine::preprocess::TokenizedDocument> train_docs;
  for (const auto& example : train_skel.examples) {
    const auto* author = by_name.at(example.id);
    train_docs.push_back({author->author, author->author, author->tokens});
  }

  SplitFeatures result;
  result.vocab = opmine::topics::build_vocab(train_docs, min_doc_freq);
  auto featurize_split = [&](const opmine::classify::Dataset& skel) {
    opmine::classify::Dataset out;
    for (const auto& example : skel.examples) {
      out.examples.push_back(
          {example.id,
           opmine::classify::featurize(by_name.at(example.id)->tokens,
                                       result.vocab, scheme),
           example.label});
    }
    return out;
  };
  result.train = featurize_split(train_skel);
  result.test = featurize_split(test_skel);
  return result;
}

// ---------------------------------------------------------------------------
// knn model file (the "model" is the memorized training split)

std::string save_knn_model(int k, opmine::classify::Scheme scheme,
                           const opmine::topics::Vocabulary& vocab,
                           const opmine::classify::Dataset& train) {
  nlohmann::ordered_json j;
  j["format"] = "opmine-knn-model";
  j["version"] = 1;
  j["k"] = k;
  j["scheme"] = opmine::classify::to_string(scheme);
  j["vocab"]["words"] = vocab.words;
  j["vocab"]["doc_freq"] = vocab.doc_freq;
  j["vocab"]["doc_count"] = vocab.doc_count;
  auto& examples = j["examples"];
  examples = nlohmann::ordered_json::array();
  for (const auto& example : train.examples) {
    nlohmann::ordered_json e;
    e["id"] = example.id;
    e["label"] = example.label;
    e["norm"] = example.features.norm;
    auto& entries = e["entries"];
    entries = nlohmann::ordered_json::array();
    for (const auto& [id, weight] : example.features.entries) {
      entries.push_back({id, weight});
    }
    examples.push_back(std::move(e));
  }
  return j.dump();
}

struct KnnModel {
  int k = 5;
  opmine::classify::Scheme scheme = opmine::classify::Scheme::kBinary;
  opmine::topics::Vocabulary vocab;
  opmine::classify::Dataset train;
};

KnnModel load_knn_model(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  if (j.value("format", "") != "opmine-knn-model" || j.value("version", 0) != 1) {
    throw ParseError("not a knn model document");
  }
  KnnModel model;
  model.k = j.at("k").get<int>();
  auto scheme = opmine::classify::parse_scheme(j.at("scheme").get<std::string>());
  if (!scheme) throw ParseError("unknown feature scheme");
  model.scheme = *scheme;
  model.vocab.words = j.at("vocab").at("words").get<std::vector<std::string>>();
  model.vocab.doc_freq =
      j.at("vocab").at("doc_freq").get<std::vector<std::int64_t>>();
  model.vocab.doc_count = j.at("vocab").at("doc_count").get<std::int64_t>();
  for (std::size_t i = 0; i < model.vocab.words.size(); ++i) {
    model.vocab.index[model.vocab.words[i]] = static_cast<int>(i);
  }
  for (const auto& e : j.at("examples")) {
    opmine::classify::Example example;
    example.id = e.at("id").get<std::string>();
    example.label = e.at("label").get<int>();
    example.features.norm = e.at("norm").get<double>();
    for (const auto& entry : e.at("entries")) {
      example.features.entries.emplace_back(entry.at(0).get<int>(),
                                            entry.at(1).get<double>());
    }
    model.train.examples.push_back(std::move(example));
  }
  return model;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// ---------------------------------------------------------------------------
// live transport

class HttplibTransport : public opmine::corpus::HttpTransport {
 public:
  opmine::corpus::HttpResponse get(
      const std::string& url,
      const std::map<std::string, std::string>& headers) override {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
      throw std::invalid_argument("url has no scheme: " + url);
    }
    if (url.substr(0, scheme_end) != "http") {
      throw std::invalid_argument(
          "only http urls are supported by this build: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    std::string base =
        path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string path =
        path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(base);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    httplib::Headers request_headers(headers.begin(), headers.end());
    auto result = client.Get(path, request_headers);
    if (!result) {
      throw opmine::FetchError("connection failed: " + httplib::to_string(result.error()),
                               0, true);
    }
    return {result->status, result->body};
  }
};

// ---------------------------------------------------------------------------
// report pipeline

void run_report(const std::string& config_path, std::string out_dir) {
  ConfigView config = load_config(config_path);
  if (out_dir.empty()) {
    out_dir = config.get("output", "dir", "");
    if (out_dir.empty()) {
      throw std::invalid_argument("no output directory: pass --out or set [output] dir");
    }
  }

  auto corpus = opmine::corpus::load_corpus_file(config.path("corpus", "input"));
  PreprocessFlags flags;
  if (auto stopwords = config.optional_path("corpus", "stopwords")) {
    flags.stopwords_path = *stopwords;
  }
  auto docs = opmine::preprocess::process_corpus(corpus, make_preprocess_config(flags));
  // Lexicon keys are plain lowercased words, so emotion scoring runs on an
  // unstemmed pass.
  PreprocessFlags emotion_flags = flags;
  emotion_flags.no_stem = true;
  auto emotion_docs =
      opmine::preprocess::process_corpus(corpus, make_preprocess_config(emotion_flags));
  auto lexicon = opmine::emotion::load_lexicon_file(config.path("corpus", "lexicon"));
  auto labels_oud =
      opmine::corpus::load_labels_file(config.path("corpus", "labels_oud"));
  auto labels_recovering = opmine::corpus::load_labels_file(
      config.path("corpus", "labels_recovering"));

  Artifacts artifacts;

  // co-occurrence graph
  auto graph = opmine::cooccur::correlation_graph(
      docs, config.get_int("cooccur", "min_doc_freq", 5),
      config.get_double("cooccur", "min_phi", 0.2));
  artifacts["phi_edges.csv"] = opmine::cooccur::export_graph(graph, "edge_csv");
  artifacts["graph.dot"] = opmine::cooccur::export_graph(graph, "dot");
  auto bigrams = opmine::cooccur::filter_bigrams(
      opmine::cooccur::count_bigrams(docs),
      config.get_int("cooccur", "min_count", 150));
  artifacts["bigrams.csv"] = bigrams_csv(bigrams);
  auto seeds = normalize_seeds(split_list(config.get("cooccur", "seeds", "")),
                               make_preprocess_config(flags));
  if (!seeds.empty()) {
    artifacts["neighbors.csv"] = neighbors_csv(opmine::cooccur::medication_neighbors(
        docs, seeds, static_cast<int>(config.get_int("cooccur", "top_n", 6))));
  }

  // per-user emotion profiles
  std::map<std::string, std::vector<opmine::preprocess::TokenizedDocument>> users;
  for (const auto& doc : emotion_docs) {
    users[doc.author].push_back(doc);
  }
  artifacts["emotions.csv"] = emotions_csv(users, lexicon, "author");

  // topic keywords
  opmine::topics::LdaConfig lda;
  lda.k = static_cast<int>(config.get_int("topics", "k", 8));
  lda.alpha = config.get_double("topics", "alpha", 0.0);
  lda.beta = config.get_double("topics", "beta", 0.01);
  lda.iterations = static_cast<int>(config.get_int("topics", "iterations", 1000));
  lda.burn_in = static_cast<int>(config.get_int("topics", "burn_in", 200));
  lda.seed = static_cast<std::uint64_t>(config.get_int("topics", "seed", 1));
  auto topic_vocab = opmine::topics::build_vocab(
      docs, config.get_int("topics", "min_doc_freq", 1));
  auto model = opmine::topics::fit_lda(docs, topic_vocab, lda);
  auto top_words = static_cast<int>(config.get_int("topics", "top_words", 8));
  top_words = std::min(top_words, topic_vocab.size());
  artifacts["topics.csv"] = topics_csv(model, top_words);

  // stage-1 classifier comparison
  auto scheme_token = config.get("classify", "scheme", "binary");
  auto scheme = opmine::classify::parse_scheme(scheme_token);
  if (!scheme) {
    throw std::invalid_argument("unknown feature scheme: " + scheme_token);
  }
  auto authors = opmine::classify::concat_by_author(docs);
  auto features = split_and_featurize(
      authors, labels_oud, "oud", *scheme,
      config.get_double("classify", "train_frac", 0.7),
      static_cast<std::uint64_t>(config.get_int("classify", "seed", 7)),
      config.get_int("classify", "min_doc_freq", 1));

  opmine::classify::LogregConfig logreg;
  logreg.l2 = config.get_double("classify", "logreg_l2", 1e-4);
  logreg.epochs = static_cast<int>(config.get_int("classify", "logreg_epochs", 500));
  logreg.learning_rate = config.get_double("classify", "logreg_lr", 1.0);
  opmine::classify::SvmConfig svm;
  svm.lambda = config.get_double("classify", "svm_lambda", 0.01);
  svm.epochs = static_cast<int>(config.get_int("classify", "svm_epochs", 50));
  svm.seed = static_cast<std::uint64_t>(config.get_int("classify", "seed", 7));
  auto knn_k = static_cast<int>(config.get_int("classify", "knn_k", 5));

  auto lg_model = opmine::classify::train_logreg(features.train, features.vocab,
                                                 *scheme, logreg);
  auto svm_model =
      opmine::classify::train_svm(features.train, features.vocab, *scheme, svm);
  auto lg_metrics = opmine::classify::evaluate(lg_model, features.test);
  auto svm_metrics = opmine::classify::evaluate(svm_model, features.test);
  auto knn_metrics =
      opmine::classify::evaluate_knn(features.train, features.test, knn_k);
  artifacts["metrics.csv"] =
      opmine::classify::metrics_report_csv(lg_metrics, knn_metrics, svm_metrics);

  // cascade over the full corpus
  opmine::classify::CascadeConfig cascade_config;
  cascade_config.scheme = *scheme;
  cascade_config.logreg = logreg;
  cascade_config.svm = svm;
  cascade_config.vocab_min_doc_freq = config.get_int("classify", "min_doc_freq", 1);
  auto assignment = opmine::classify::cascade(authors, labels_oud,
                                              labels_recovering, cascade_config);
  artifacts["cohorts.csv"] = cohorts_csv(assignment);

  // labeled cohort breakdown, with relapse labels derived from event timelines
  std::vector<opmine::corpus::LabelMap> label_maps = {labels_oud,
                                                      labels_recovering};
  if (auto events_path = config.optional_path("corpus", "events")) {
    auto events = opmine::relapse::load_events_file(*events_path);
    auto window = config.get_int("relapse", "window_days", 50);
    opmine::corpus::LabelMap relapse_labels;
    for (const auto& [author, timeline] : opmine::relapse::group_events(events)) {
      auto it = labels_recovering.find(author);
      if (it == labels_recovering.end() ||
          it->second != opmine::corpus::Label::kRecovering) {
        continue;
      }
      relapse_labels[author] = opmine::relapse::label_relapse(timeline, window);
    }
    label_maps.push_back(std::move(relapse_labels));
  }
  auto breakdown =
      opmine::relapse::cohort_breakdown(opmine::relapse::combine_labels(label_maps));
  artifacts["cohort.txt"] = opmine::relapse::render_breakdown(breakdown);

  write_artifacts(out_dir, artifacts);
  std::cout << "report written to " << out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opioid-community text mining toolkit"};
  app.require_subcommand(1);

  std::string input;
  std::string out_dir;
  PreprocessFlags pp;

  auto add_common = [&](CLI::App* cmd, bool with_preprocess) {
    cmd->add_option("--input", input, "corpus jsonl path")->required();
    cmd->add_option("--out", out_dir, "output directory")->required();
    if (with_preprocess) {
      cmd->add_option("--stopwords", pp.stopwords_path, "stopword list, one per line");
      cmd->add_flag("--keep-punctuation", pp.keep_punctuation,
                    "skip punctuation stripping");
      cmd->add_flag("--no-lowercase", pp.no_lowercase, "skip lowercasing");
      cmd->add_flag("--no-stem", pp.no_stem, "skip suffix stemming");
    }
  };

  // ingest
  std::vector<std::string> label_paths;
  auto* ingest = app.add_subcommand("ingest", "validate a corpus and label files");
  add_common(ingest, false);
  ingest->add_option("--labels", label_paths, "label csv to validate (repeatable)");
  ingest->callback([&]() {
    auto corpus = opmine::corpus::load_corpus_file(input);
    for (const auto& path : label_paths) {
      opmine::corpus::load_labels_file(path);
    }
    Artifacts artifacts;
    artifacts["corpus.jsonl"] = corpus_jsonl(corpus);
    write_artifacts(out_dir, artifacts);
    std::cout << "ingested " << corpus.size() << " posts\n";
  });

  // fetch
  opmine::corpus::FetchConfig fetch_config;
  auto* fetch_cmd = app.add_subcommand("fetch", "pull a subreddit listing over http");
  fetch_cmd->add_option("--base-url", fetch_config.base_url, "listing endpoint base url")
      ->required();
  fetch_cmd->add_option("--subreddit", fetch_config.subreddit, "subreddit name")
      ->required();
  fetch_cmd->add_option("--max-posts", fetch_config.max_posts,
                        "listing ceiling, at most 1000");
  fetch_cmd->add_option("--rpm", fetch_config.requests_per_minute,
                        "requests per minute");
  fetch_cmd->add_option("--user-agent", fetch_config.user_agent, "user agent header");
  fetch_cmd->add_option("--out", out_dir, "output directory")->required();
  fetch_cmd->callback([&]() {
    HttplibTransport transport;
    auto posts = opmine::corpus::fetch_subreddit(fetch_config, transport);
    opmine::corpus::Corpus corpus;
    for (auto& post : posts) corpus.add(std::move(post));
    Artifacts artifacts;
    artifacts["corpus.jsonl"] = corpus_jsonl(corpus);
    write_artifacts(out_dir, artifacts);
    std::cout << "fetched " << corpus.size() << " posts\n";
  });

  // preprocess
  auto* preprocess_cmd =
      app.add_subcommand("preprocess", "tokenize and normalize a corpus");
  add_common(preprocess_cmd, true);
  preprocess_cmd->callback([&]() {
    auto docs = load_and_process(input, pp);
    Artifacts artifacts;
    artifacts["tokens.jsonl"] = tokens_jsonl(docs);
    write_artifacts(out_dir, artifacts);
    std::cout << "processed " << docs.size() << " documents\n";
  });

  // cooccur
  std::int64_t min_count = 150;
  double min_phi = 0.2;
  std::int64_t cooccur_min_doc_freq = 5;
  std::string seeds_csv;
  int top_n = 6;
  std::string graph_format = "edge_csv";
  auto* cooccur_cmd =
      app.add_subcommand("cooccur", "bigram counts and phi correlation graph");
  add_common(cooccur_cmd, true);
  cooccur_cmd->add_option("--min-count", min_count, "bigram count floor");
  cooccur_cmd->add_option("--min-phi", min_phi, "phi threshold in (0, 1]");
  cooccur_cmd->add_option("--min-doc-freq", cooccur_min_doc_freq,
                          "word document-frequency floor");
  cooccur_cmd->add_option("--seeds", seeds_csv, "comma-separated seed words");
  cooccur_cmd->add_option("--top-n", top_n, "neighbors per seed");
  cooccur_cmd->add_option("--format", graph_format, "dot or edge_csv");
  cooccur_cmd->callback([&]() {
    auto docs = load_and_process(input, pp);
    auto graph =
        opmine::cooccur::correlation_graph(docs, cooccur_min_doc_freq, min_phi);
    Artifacts artifacts;
    if (graph_format == "dot") {
      artifacts["graph.dot"] = opmine::cooccur::export_graph(graph, "dot");
    } else if (graph_format == "edge_csv") {
      artifacts["phi_edges.csv"] = opmine::cooccur::export_graph(graph, "edge_csv");
    } else {
      throw std::invalid_argument("unknown graph format: " + graph_format);
    }
    auto bigrams = opmine::cooccur::filter_bigrams(
        opmine::cooccur::count_bigrams(docs), min_count);
    artifacts["bigrams.csv"] = bigrams_csv(bigrams);
    auto seeds = normalize_seeds(split_list(seeds_csv), make_preprocess_config(pp));
    if (!seeds.empty()) {
      artifacts["neighbors.csv"] =
          neighbors_csv(opmine::cooccur::medication_neighbors(docs, seeds, top_n));
    }
    write_artifacts(out_dir, artifacts);
    std::cout << graph.edges.size() << " edges, " << bigrams.size()
              << " bigrams kept\n";
  });

  // emotions
  std::string lexicon_path;
  bool per_user = false;
  int emotion_top_n = 0;
  std::int64_t window_days = -1;
  auto* emotions_cmd =
      app.add_subcommand("emotions", "lexicon emotion scores and dominants");
  add_common(emotions_cmd, true);
  emotions_cmd->add_option("--lexicon", lexicon_path, "word-emotion tsv")->required();
  emotions_cmd->add_flag("--per-user", per_user,
                         "aggregate per author instead of per post");
  emotions_cmd->add_option("--top-n", emotion_top_n,
                           "also rank member words per emotion");
  emotions_cmd->add_option("--window-days", window_days,
                           "keep only posts this close to each author's latest");
  emotions_cmd->callback([&]() {
    auto corpus = opmine::corpus::load_corpus_file(input);
    if (window_days >= 0) {
      corpus = window_by_author(corpus, window_days);
    }
    auto docs =
        opmine::preprocess::process_corpus(corpus, make_preprocess_config(pp));
    auto lexicon = opmine::emotion::load_lexicon_file(lexicon_path);
    Artifacts artifacts;
    std::map<std::string, std::vector<opmine::preprocess::TokenizedDocument>> groups;
    for (const auto& doc : docs) {
      groups[per_user ? doc.author : doc.doc_id].push_back(doc);
    }
    artifacts["emotions.csv"] =
        emotions_csv(groups, lexicon, per_user ? "author" : "id");
    if (emotion_top_n > 0) {
      artifacts["emotion_words.csv"] = emotion_words_csv(
          opmine::emotion::emotion_word_frequencies(docs, lexicon, emotion_top_n));
    }
    write_artifacts(out_dir, artifacts);
    std::cout << "scored " << groups.size() << " rows\n";
  });

  // topics fit / select
  opmine::topics::LdaConfig lda;
  std::int64_t topics_min_doc_freq = 1;
  int top_words = 8;
  int k_min = 4;
  int k_max = 11;
  auto* topics_cmd = app.add_subcommand("topics", "topic modeling");
  topics_cmd->require_subcommand(1);
  auto add_lda_options = [&](CLI::App* cmd) {
    add_common(cmd, true);
    cmd->add_option("--alpha", lda.alpha, "document-topic prior; <=0 means 50/k");
    cmd->add_option("--beta", lda.beta, "topic-word prior");
    cmd->add_option("--iters", lda.iterations, "gibbs sweeps");
    cmd->add_option("--burn-in", lda.burn_in, "sweeps before the kept sample");
    cmd->add_option("--seed", lda.seed, "rng seed");
    cmd->add_option("--min-doc-freq", topics_min_doc_freq,
                    "vocabulary document-frequency floor");
  };
  auto* topics_fit = topics_cmd->add_subcommand("fit", "fit one model");
  add_lda_options(topics_fit);
  topics_fit->add_option("--k", lda.k, "topic count");
  topics_fit->add_option("--top-words", top_words, "keywords per topic");
  topics_fit->callback([&]() {
    auto docs = load_and_process(input, pp);
    auto vocab = opmine::topics::build_vocab(docs, topics_min_doc_freq);
    auto model = opmine::topics::fit_lda(docs, vocab, lda);
    Artifacts artifacts;
    artifacts["model.json"] = opmine::topics::save_model(model) + "\n";
    artifacts["topics.csv"] = topics_csv(model, std::min(top_words, vocab.size()));
    write_artifacts(out_dir, artifacts);
    std::cout << "fit k=" << model.k << " on " << vocab.size() << " words\n";
  });
  auto* topics_select =
      topics_cmd->add_subcommand("select", "pick k by topic divergence");
  add_lda_options(topics_select);
  topics_select->add_option("--k-min", k_min, "smallest k");
  topics_select->add_option("--k-max", k_max, "largest k");
  topics_select->callback([&]() {
    auto docs = load_and_process(input, pp);
    auto vocab = opmine::topics::build_vocab(docs, topics_min_doc_freq);
    auto result = opmine::topics::select_k(docs, vocab, lda, k_min, k_max);
    Artifacts artifacts;
    artifacts["kselect.csv"] = kselect_csv(result);
    write_artifacts(out_dir, artifacts);
    std::cout << "best_k=" << result.best_k << "\n";
  });

  // train
  std::string labels_path;
  std::string task = "oud";
  std::string model_kind = "svm";
  std::string scheme_token = "binary";
  double train_frac = 0.7;
  std::uint64_t split_seed = 1;
  std::int64_t classify_min_doc_freq = 1;
  opmine::classify::LogregConfig logreg;
  opmine::classify::SvmConfig svm;
  int knn_k = 5;
  auto* train_cmd = app.add_subcommand("train", "train a redditor classifier");
  add_common(train_cmd, true);
  train_cmd->add_option("--labels", labels_path, "author,label csv")->required();
  train_cmd->add_option("--task", task, "oud or recovering");
  train_cmd->add_option("--model", model_kind, "logreg, svm, or knn");
  train_cmd->add_option("--scheme", scheme_token, "binary, tf, or tfidf");
  train_cmd->add_option("--train-frac", train_frac, "training fraction");
  train_cmd->add_option("--seed", split_seed, "split and sgd seed");
  train_cmd->add_option("--min-doc-freq", classify_min_doc_freq,
                        "vocabulary document-frequency floor");
  train_cmd->add_option("--l2", logreg.l2, "logreg penalty");
  train_cmd->add_option("--epochs", logreg.epochs, "logreg epochs");
  train_cmd->add_option("--learning-rate", logreg.learning_rate, "logreg step");
  train_cmd->add_option("--lambda", svm.lambda, "svm penalty");
  train_cmd->add_option("--svm-epochs", svm.epochs, "svm epochs");
  train_cmd->add_option("--k", knn_k, "knn neighbor count");
  train_cmd->callback([&]() {
    auto docs = load_and_process(input, pp);
    auto labels = opmine::corpus::load_labels_file(labels_path);
    auto scheme = opmine::classify::parse_scheme(scheme_token);
    if (!scheme) {
      throw std::invalid_argument("unknown feature scheme: " + scheme_token);
    }
    auto authors = opmine::classify::concat_by_author(docs);
    auto features = split_and_featurize(authors, labels, task, *scheme,
                                        train_frac, split_seed,
                                        classify_min_doc_freq);
    logreg.seed = split_seed;
    svm.seed = split_seed;
    Artifacts artifacts;
    if (model_kind == "logreg") {
      auto model = opmine::classify::train_logreg(features.train, features.vocab,
                                                  *scheme, logreg);
      artifacts["model.json"] = opmine::classify::save_linear_model(model) + "\n";
    } else if (model_kind == "svm") {
      auto model = opmine::classify::train_svm(features.train, features.vocab,
                                               *scheme, svm);
      artifacts["model.json"] = opmine::classify::save_linear_model(model) + "\n";
    } else if (model_kind == "knn") {
      artifacts["model.json"] =
          save_knn_model(knn_k, *scheme, features.vocab, features.train) + "\n";
    } else {
      throw std::invalid_argument("unknown model kind: " + model_kind);
    }
    write_artifacts(out_dir, artifacts);
    std::cout << "trained " << model_kind << " on " << features.train.size()
              << " authors (" << features.test.size() << " held out)\n";
  });

  // evaluate
  std::string model_path;
  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "score a trained model on the held-out split");
  add_common(evaluate_cmd, true);
  evaluate_cmd->add_option("--labels", labels_path, "author,label csv")->required();
  evaluate_cmd->add_option("--task", task, "oud or recovering");
  evaluate_cmd->add_option("--model-file", model_path, "model json from train")
      ->required();
  evaluate_cmd->add_option("--train-frac", train_frac, "training fraction used");
  evaluate_cmd->add_option("--seed", split_seed, "seed used at train time");
  evaluate_cmd->callback([&]() {
    auto docs = load_and_process(input, pp);
    auto labels = opmine::corpus::load_labels_file(labels_path);
    auto [positive, negative] = task_labels(task);
    auto authors = opmine::classify::concat_by_author(docs);

    std::string text = read_text_file(model_path);
    auto header = nlohmann::json::parse(text);
    std::string format = header.value("format", "");

    // Rebuild the held-out side of the train-time split, then featurize it
    // with the model's own vocabulary.
    opmine::classify::Dataset skeleton;
    std::map<std::string, const opmine::classify::AuthorDoc*> by_name;
    for (const auto& author : authors) {
      by_name[author.author] = &author;
      auto it = labels.find(author.author);
      if (it == labels.end()) continue;
      if (it->second == positive) {
        skeleton.examples.push_back({author.author, {}, 1});
      } else if (it->second == negative) {
        skeleton.examples.push_back({author.author, {}, -1});
      }
    }
    auto [train_skel, test_skel] =
        opmine::classify::split(skeleton, train_frac, split_seed);

    auto featurize_with = [&](const opmine::topics::Vocabulary& vocab,
                              opmine::classify::Scheme scheme,
                              const opmine::classify::Dataset& skel) {
      opmine::classify::Dataset out;
      for (const auto& example : skel.examples) {
        out.examples.push_back(
            {example.id,
             opmine::classify::featurize(by_name.at(example.id)->tokens, vocab,
                                         scheme),
             example.label});
      }
      return out;
    };

    opmine::classify::Metrics metrics;
    std::string row_name;
    if (format == "opmine-linear-model") {
      auto model = opmine::classify::load_linear_model(text);
      auto test = featurize_with(model.vocab, model.scheme, test_skel);
      metrics = opmine::classify::evaluate(model, test);
      row_name = model.kind == opmine::classify::ModelKind::kLogreg ? "LG" : "SVM";
    } else if (format == "opmine-knn-model") {
      auto model = load_knn_model(text);
      auto test = featurize_with(model.vocab, model.scheme, test_skel);
      metrics = opmine::classify::evaluate_knn(model.train, test, model.k);
      row_name = "KNN";
    } else {
      throw ParseError("unrecognized model file format");
    }

    Artifacts artifacts;
    std::string csv = "model,accuracy,recall,precision,f1\n";
    csv += row_name + "," + format_fixed(metrics.accuracy, 4) + "," +
           format_fixed(metrics.recall, 4) + "," +
           format_fixed(metrics.precision, 4) + "," +
           format_fixed(metrics.f1, 4) + "\n";
    artifacts["metrics.csv"] = csv;
    write_artifacts(out_dir, artifacts);
    std::cout << csv;
  });

  // cascade
  std::string stage1_labels_path;
  std::string stage2_labels_path;
  std::string stage1_kind = "svm";
  std::string stage2_kind = "svm";
  auto* cascade_cmd =
      app.add_subcommand("cascade", "two-stage oud/recovering partition");
  add_common(cascade_cmd, true);
  cascade_cmd->add_option("--stage1-labels", stage1_labels_path, "oud labels csv")
      ->required();
  cascade_cmd
      ->add_option("--stage2-labels", stage2_labels_path, "recovering labels csv")
      ->required();
  cascade_cmd->add_option("--stage1", stage1_kind, "logreg or svm");
  cascade_cmd->add_option("--stage2", stage2_kind, "logreg or svm");
  cascade_cmd->add_option("--scheme", scheme_token, "binary, tf, or tfidf");
  cascade_cmd->add_option("--seed", split_seed, "sgd seed");
  cascade_cmd->add_option("--min-doc-freq", classify_min_doc_freq,
                          "vocabulary document-frequency floor");
  cascade_cmd->add_option("--lambda", svm.lambda, "svm penalty");
  cascade_cmd->add_option("--svm-epochs", svm.epochs, "svm epochs");
  cascade_cmd->add_option("--l2", logreg.l2, "logreg penalty");
  cascade_cmd->add_option("--epochs", logreg.epochs, "logreg epochs");
  cascade_cmd->callback([&]() {
    auto docs = load_and_process(input, pp);
    auto scheme = opmine::classify::parse_scheme(scheme_token);
    if (!scheme) {
      throw std::invalid_argument("unknown feature scheme: " + scheme_token);
    }
    auto parse_kind = [](const std::string& token) {
      if (token == "logreg") return opmine::classify::ModelKind::kLogreg;
      if (token == "svm") return opmine::classify::ModelKind::kSvm;
      throw std::invalid_argument("unknown stage model: " + token);
    };
    opmine::classify::CascadeConfig config;
    config.scheme = *scheme;
    config.stage1 = parse_kind(stage1_kind);
    config.stage2 = parse_kind(stage2_kind);
    logreg.seed = split_seed;
    svm.seed = split_seed;
    config.logreg = logreg;
    config.svm = svm;
    config.vocab_min_doc_freq = classify_min_doc_freq;
    auto assignment = opmine::classify::cascade(
        opmine::classify::concat_by_author(docs),
        opmine::corpus::load_labels_file(stage1_labels_path),
        opmine::corpus::load_labels_file(stage2_labels_path), config);
    Artifacts artifacts;
    artifacts["cohorts.csv"] = cohorts_csv(assignment);
    write_artifacts(out_dir, artifacts);
    std::cout << "assigned " << assignment.size() << " authors\n";
  });

  // relapse
  std::string events_path;
  std::int64_t relapse_window = 50;
  auto* relapse_cmd =
      app.add_subcommand("relapse", "label recovering timelines by the day window");
  relapse_cmd->add_option("--events", events_path, "author,timestamp,kind csv")
      ->required();
  relapse_cmd->add_option("--window-days", relapse_window, "window before latest post");
  relapse_cmd->add_option("--out", out_dir, "output directory")->required();
  relapse_cmd->callback([&]() {
    auto events = opmine::relapse::load_events_file(events_path);
    std::string csv = "author,label\n";
    std::int64_t relapsed = 0;
    auto grouped = opmine::relapse::group_events(events);
    for (const auto& [author, timeline] : grouped) {
      auto label = opmine::relapse::label_relapse(timeline, relapse_window);
      if (label == opmine::corpus::Label::kRelapsed) ++relapsed;
      csv += author + "," + opmine::corpus::to_string(label) + "\n";
    }
    Artifacts artifacts;
    artifacts["relapse_labels.csv"] = csv;
    write_artifacts(out_dir, artifacts);
    std::cout << relapsed << " of " << grouped.size() << " authors relapsed\n";
  });

  // report
  std::string config_path;
  std::string report_out;
  auto* report_cmd =
      app.add_subcommand("report", "run the full pipeline from a config file");
  report_cmd->add_option("--config", config_path, "pipeline config")->required();
  report_cmd->add_option("--out", report_out, "output directory override");
  report_cmd->callback([&]() { run_report(config_path, report_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
