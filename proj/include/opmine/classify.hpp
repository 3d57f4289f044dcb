#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "opmine/corpus.hpp"
#include "opmine/preprocess.hpp"
#include "opmine/topics.hpp"

namespace opmine::classify {

enum class Scheme { kBinary, kTf, kTfidf };

std::string to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view token);

// Sparse term vector, L2-normalized. norm is the pre-normalization length;
// a document with no in-vocabulary tokens keeps norm 0 and no entries.
struct FeatureVector {
  std::vector<std::pair<int, double>> entries;  // sorted by term id
  double norm = 0.0;

  bool operator==(const FeatureVector&) const = default;
};

// label is +1 (the disorder/recovering class) or -1.
struct Example {
  std::string id;
  FeatureVector features;
  int label = 0;

  bool operator==(const Example&) const = default;
};

struct Dataset {
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
};

// One classification instance per author: their posts concatenated.
struct AuthorDoc {
  std::string author;
  std::vector<std::string> tokens;
};

// Authors sorted lexicographically; token order follows document order.
std::vector<AuthorDoc> concat_by_author(
    const std::vector<preprocess::TokenizedDocument>& docs);

// tfidf weight: tf * (log((1 + D)/(1 + df)) + 1) with D = vocab.doc_count.
FeatureVector featurize(const std::vector<std::string>& tokens,
                        const topics::Vocabulary& vocab, Scheme scheme);

// Authors without a positive/negative label are skipped.
Dataset build_dataset(const std::vector<AuthorDoc>& authors,
                      const corpus::LabelMap& labels, corpus::Label positive,
                      corpus::Label negative, const topics::Vocabulary& vocab,
                      Scheme scheme);

// Stratified by label: round(train_fraction * class size) per class goes to
// train. A class with fewer than 2 members is rejected.
std::pair<Dataset, Dataset> split(const Dataset& dataset,
                                  double train_fraction, std::uint64_t seed);

enum class ModelKind { kLogreg, kSvm };

std::string to_string(ModelKind kind);

struct LinearModel {
  ModelKind kind = ModelKind::kLogreg;
  Scheme scheme = Scheme::kBinary;
  std::vector<double> weights;  // one per vocabulary word
  double bias = 0.0;
  topics::Vocabulary vocab;

  // training echo
  double l2 = 0.0;        // logreg penalty
  double lambda = 0.0;    // svm penalty
  int epochs = 0;
  double learning_rate = 0.0;
  std::uint64_t seed = 0;
  double final_grad_norm = 0.0;          // logreg
  std::vector<double> objective_trace;   // svm: objective of the averaged
                                         // iterate after each epoch
};

double score(const LinearModel& model, const FeatureVector& features);
int predict(const LinearModel& model, const FeatureVector& features);
int predict_tokens(const LinearModel& model,
                   const std::vector<std::string>& tokens);

// Mean logistic loss over labels in {-1,+1} plus (l2/2)*||w||^2;
// the bias is not penalized.
double logreg_loss(const std::vector<double>& weights, double bias,
                   const Dataset& data, double l2);
// Returns (d/dw, d/db).
std::pair<std::vector<double>, double> logreg_gradient(
    const std::vector<double>& weights, double bias, const Dataset& data,
    double l2);

struct LogregConfig {
  double l2 = 1e-4;
  int epochs = 500;
  double learning_rate = 1.0;
  std::uint64_t seed = 1;
};

LinearModel train_logreg(const Dataset& train, const topics::Vocabulary& vocab,
                         Scheme scheme, const LogregConfig& config);

// (lambda/2)*(||w||^2 + b^2) + mean hinge loss. The bias rides inside the
// regularizer so the 1/(lambda*t) step size applies to it unchanged.
double svm_objective(const std::vector<double>& weights, double bias,
                     const Dataset& data, double lambda);

struct SvmConfig {
  double lambda = 1e-2;
  int epochs = 50;
  std::uint64_t seed = 1;
};

// Stochastic subgradient with step 1/(lambda*t); the returned weights are
// the running average over all steps.
LinearModel train_svm(const Dataset& train, const topics::Vocabulary& vocab,
                      Scheme scheme, const SvmConfig& config);

// 1 - cosine similarity; any zero-norm vector has similarity 0 to everything.
double cosine_distance(const FeatureVector& a, const FeatureVector& b);

// Majority label among the k nearest; a vote tie returns the label of the
// single nearest neighbor.
int knn_predict(const Dataset& train, const FeatureVector& query, int k);

struct Confusion {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  bool operator==(const Confusion&) const = default;
};

struct Metrics {
  double accuracy = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  Confusion confusion;
  bool precision_undefined = false;  // tp + fp == 0; precision reported as 0
};

Metrics metrics_from_confusion(const Confusion& confusion);

Metrics evaluate(const LinearModel& model, const Dataset& test);
Metrics evaluate_knn(const Dataset& train, const Dataset& test, int k);

// Columns accuracy/recall/precision/f1, rows LG/KNN/SVM, 4 decimals.
std::string metrics_report_csv(const Metrics& lg, const Metrics& knn,
                               const Metrics& svm);

enum class Cohort { kNonOud, kOudNonRecovering, kOudRecovering };

std::string to_string(Cohort cohort);

using CohortAssignment = std::map<std::string, Cohort>;

struct CascadeConfig {
  Scheme scheme = Scheme::kBinary;
  ModelKind stage1 = ModelKind::kSvm;
  ModelKind stage2 = ModelKind::kSvm;
  LogregConfig logreg;
  SvmConfig svm;
  std::int64_t vocab_min_doc_freq = 1;
};

// Stage 1 trains on oud/non_oud labels and screens every author; stage 2
// trains on the recovering/non_recovering labels available among predicted
// OUD authors and partitions them. Every input author receives a cohort.
CohortAssignment cascade(const std::vector<AuthorDoc>& authors,
                         const corpus::LabelMap& stage1_labels,
                         const corpus::LabelMap& stage2_labels,
                         const CascadeConfig& config);

std::string save_linear_model(const LinearModel& model);
LinearModel load_linear_model(const std::string& json_text);
void save_linear_model_file(const LinearModel& model, const std::string& path);
LinearModel load_linear_model_file(const std::string& path);

}  // namespace opmine::classify
