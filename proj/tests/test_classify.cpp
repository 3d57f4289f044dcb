#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "opmine/classify.hpp"
#include "opmine/errors.hpp"

using namespace opmine;
using classify::Dataset;
using classify::Example;
using classify::FeatureVector;
using classify::Scheme;
using corpus::Label;
using topics::Vocabulary;

namespace {

Vocabulary vocab_of(std::vector<std::string> words,
                    std::vector<std::int64_t> doc_freq,
                    std::int64_t doc_count) {
  Vocabulary vocab;
  vocab.words = std::move(words);
  for (std::size_t i = 0; i < vocab.words.size(); ++i) {
    vocab.index[vocab.words[i]] = static_cast<int>(i);
  }
  vocab.doc_freq = std::move(doc_freq);
  vocab.doc_count = doc_count;
  return vocab;
}

FeatureVector fv(std::vector<std::pair<int, double>> entries) {
  FeatureVector out;
  double sq = 0.0;
  for (auto& [id, w] : entries) sq += w * w;
  out.norm = std::sqrt(sq);
  if (out.norm > 0.0) {
    for (auto& [id, w] : entries) w /= out.norm;
  }
  out.entries = std::move(entries);
  return out;
}

Example ex(std::string id, FeatureVector features, int label) {
  return {std::move(id), std::move(features), label};
}

// Linearly separable 2d-ish dataset on a two-word vocabulary.
Dataset separable_dataset() {
  Dataset data;
  data.examples.push_back(ex("p1", fv({{0, 2.0}}), +1));
  data.examples.push_back(ex("p2", fv({{0, 1.5}, {1, 0.2}}), +1));
  data.examples.push_back(ex("p3", fv({{0, 1.0}, {1, 0.1}}), +1));
  data.examples.push_back(ex("n1", fv({{1, 2.0}}), -1));
  data.examples.push_back(ex("n2", fv({{1, 1.5}, {0, 0.2}}), -1));
  data.examples.push_back(ex("n3", fv({{1, 1.0}, {0, 0.1}}), -1));
  return data;
}

Dataset random_dataset(std::mt19937_64& rng, int n, int dims) {
  Dataset data;
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<int, double>> entries;
    for (int d = 0; d < dims; ++d) {
      if (rng() % 3 == 0) continue;  // keep it sparse
      entries.emplace_back(d, ((rng() >> 11) * 0x1p-53) * 2.0 - 1.0);
    }
    data.examples.push_back(
        ex("e" + std::to_string(i), fv(std::move(entries)),
           rng() % 2 == 0 ? +1 : -1));
  }
  return data;
}

}  // namespace

TEST_CASE("scheme names round trip") {
  for (Scheme s : {Scheme::kBinary, Scheme::kTf, Scheme::kTfidf}) {
    auto parsed = classify::parse_scheme(classify::to_string(s));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == s);
  }
  CHECK_FALSE(classify::parse_scheme("tf-idf").has_value());
}

TEST_CASE("author concatenation sorts and preserves post order") {
  std::vector<preprocess::TokenizedDocument> docs = {
      {"2", "zoe", {"later", "post"}},
      {"1", "abe", {"first"}},
      {"3", "zoe", {"tail"}},
  };
  auto authors = classify::concat_by_author(docs);
  REQUIRE(authors.size() == 2);
  CHECK(authors[0].author == "abe");
  CHECK(authors[1].author == "zoe");
  CHECK(authors[1].tokens ==
        std::vector<std::string>{"later", "post", "tail"});
}

TEST_CASE("featurize weight schemes") {
  Vocabulary vocab = vocab_of({"craving", "dose", "sleep"}, {2, 1, 4}, 10);
  const std::vector<std::string> tokens = {"craving", "craving", "dose",
                                           "unknown"};

  SUBCASE("binary") {
    FeatureVector features = classify::featurize(tokens, vocab, Scheme::kBinary);
    REQUIRE(features.entries.size() == 2);
    CHECK(features.entries[0].first == 0);
    CHECK(features.entries[1].first == 1);
    CHECK(features.norm == doctest::Approx(std::sqrt(2.0)));
    CHECK(features.entries[0].second == doctest::Approx(1.0 / std::sqrt(2.0)));
    // unit length after normalization
    double sq = 0.0;
    for (const auto& [id, w] : features.entries) sq += w * w;
    CHECK(sq == doctest::Approx(1.0));
  }
  SUBCASE("tf") {
    FeatureVector features = classify::featurize(tokens, vocab, Scheme::kTf);
    CHECK(features.norm == doctest::Approx(std::sqrt(5.0)));
    CHECK(features.entries[0].second / features.entries[1].second ==
          doctest::Approx(2.0));
  }
  SUBCASE("tfidf") {
    FeatureVector features = classify::featurize(tokens, vocab, Scheme::kTfidf);
    const double idf0 = std::log(11.0 / 3.0) + 1.0;
    const double idf1 = std::log(11.0 / 2.0) + 1.0;
    const double raw0 = 2.0 * idf0;
    const double raw1 = 1.0 * idf1;
    const double norm = std::sqrt(raw0 * raw0 + raw1 * raw1);
    CHECK(features.norm == doctest::Approx(norm).epsilon(1e-12));
    CHECK(features.entries[0].second == doctest::Approx(raw0 / norm));
    CHECK(features.entries[1].second == doctest::Approx(raw1 / norm));
  }
  SUBCASE("empty and out-of-vocabulary input") {
    FeatureVector features =
        classify::featurize({"unknown"}, vocab, Scheme::kTf);
    CHECK(features.entries.empty());
    CHECK(features.norm == 0.0);
  }
}

TEST_CASE("dataset building skips unlabeled authors") {
  Vocabulary vocab = vocab_of({"a", "b"}, {1, 1}, 2);
  std::vector<classify::AuthorDoc> authors = {
      {"u1", {"a"}}, {"u2", {"b"}}, {"u3", {"a", "b"}}};
  corpus::LabelMap labels{{"u1", Label::kOud}, {"u2", Label::kNonOud}};

  Dataset data = classify::build_dataset(authors, labels, Label::kOud,
                                         Label::kNonOud, vocab, Scheme::kTf);
  REQUIRE(data.size() == 2);
  CHECK(data.examples[0].id == "u1");
  CHECK(data.examples[0].label == +1);
  CHECK(data.examples[1].label == -1);
}

TEST_CASE("stratified split") {
  Dataset data;
  for (int i = 0; i < 10; ++i) {
    data.examples.push_back(
        ex("p" + std::to_string(i), fv({{0, 1.0}}), +1));
  }
  for (int i = 0; i < 20; ++i) {
    data.examples.push_back(
        ex("n" + std::to_string(i), fv({{1, 1.0}}), -1));
  }

  auto [train, test] = classify::split(data, 0.7, 42);
  CHECK(train.size() == 21);
  CHECK(test.size() == 9);

  auto count_pos = [](const Dataset& d) {
    return std::count_if(d.examples.begin(), d.examples.end(),
                         [](const Example& e) { return e.label == +1; });
  };
  CHECK(count_pos(train) == 7);  // round(0.7 * 10)
  CHECK(count_pos(test) == 3);

  // no example may be lost or duplicated
  std::vector<std::string> ids;
  for (const auto& e : train.examples) ids.push_back(e.id);
  for (const auto& e : test.examples) ids.push_back(e.id);
  std::sort(ids.begin(), ids.end());
  CHECK(std::unique(ids.begin(), ids.end()) == ids.end());
  CHECK(ids.size() == 30);

  // deterministic per seed, different across seeds
  auto [train2, test2] = classify::split(data, 0.7, 42);
  CHECK(train.examples == train2.examples);
  auto [train3, test3] = classify::split(data, 0.7, 43);
  CHECK(train.examples != train3.examples);
}

TEST_CASE("split validation") {
  Dataset data = separable_dataset();
  CHECK_THROWS_AS(classify::split(data, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(classify::split(data, 1.0, 1), std::invalid_argument);

  Dataset tiny;
  tiny.examples.push_back(ex("p", fv({{0, 1.0}}), +1));
  tiny.examples.push_back(ex("n1", fv({{1, 1.0}}), -1));
  tiny.examples.push_back(ex("n2", fv({{1, 0.5}}), -1));
  CHECK_THROWS_AS(classify::split(tiny, 0.7, 1), std::invalid_argument);

  Dataset bad;
  bad.examples.push_back(ex("x", fv({{0, 1.0}}), 0));
  bad.examples.push_back(ex("y", fv({{0, 1.0}}), 0));
  CHECK_THROWS_AS(classify::split(bad, 0.7, 1), std::invalid_argument);
}

TEST_CASE("logistic gradient matches finite differences") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 6; ++trial) {
    const int dims = 3 + static_cast<int>(rng() % 3);
    Dataset data = random_dataset(rng, 12, dims);
    std::vector<double> w(dims);
    for (double& v : w) v = ((rng() >> 11) * 0x1p-53) - 0.5;
    double b = ((rng() >> 11) * 0x1p-53) - 0.5;
    const double l2 = 0.1;

    auto [grad_w, grad_b] = classify::logreg_gradient(w, b, data, l2);
    const double h = 1e-6;
    for (int d = 0; d < dims; ++d) {
      std::vector<double> hi = w, lo = w;
      hi[d] += h;
      lo[d] -= h;
      const double numeric = (classify::logreg_loss(hi, b, data, l2) -
                              classify::logreg_loss(lo, b, data, l2)) /
                             (2 * h);
      CHECK(std::fabs(grad_w[d] - numeric) < 1e-6);
    }
    const double numeric_b = (classify::logreg_loss(w, b + h, data, l2) -
                              classify::logreg_loss(w, b - h, data, l2)) /
                             (2 * h);
    CHECK(std::fabs(grad_b - numeric_b) < 1e-6);
  }
}

TEST_CASE("logistic loss is stable at extreme scores") {
  Dataset data;
  data.examples.push_back(ex("p", fv({{0, 1.0}}), +1));
  const double loss = classify::logreg_loss({1000.0}, 0.0, data, 0.0);
  CHECK(std::isfinite(loss));
  CHECK(loss >= 0.0);
  const double wrong = classify::logreg_loss({-1000.0}, 0.0, data, 0.0);
  CHECK(std::isfinite(wrong));
  CHECK(wrong == doctest::Approx(1000.0));  // softplus(z) -> z for large z
}

TEST_CASE("logreg separates a separable set") {
  Dataset data = separable_dataset();
  Vocabulary vocab = vocab_of({"w0", "w1"}, {3, 3}, 6);
  classify::LogregConfig config;
  config.epochs = 300;

  classify::LinearModel model =
      classify::train_logreg(data, vocab, Scheme::kTf, config);
  CHECK(model.kind == classify::ModelKind::kLogreg);
  CHECK(model.final_grad_norm < 0.1);
  for (const auto& e : data.examples) {
    CHECK(classify::predict(model, e.features) == e.label);
  }

  // gradient descent on a convex loss: loss decreases from the origin
  const double trained_loss =
      classify::logreg_loss(model.weights, model.bias, data, config.l2);
  const double zero_loss = classify::logreg_loss({0.0, 0.0}, 0.0, data,
                                                 config.l2);
  CHECK(trained_loss < zero_loss);
}

TEST_CASE("training rejects single-class data") {
  Dataset data;
  data.examples.push_back(ex("p1", fv({{0, 1.0}}), +1));
  data.examples.push_back(ex("p2", fv({{0, 0.5}}), +1));
  Vocabulary vocab = vocab_of({"w0"}, {2}, 2);
  CHECK_THROWS_AS(
      classify::train_logreg(data, vocab, Scheme::kTf, classify::LogregConfig{}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      classify::train_svm(data, vocab, Scheme::kTf, classify::SvmConfig{}),
      std::invalid_argument);
}

TEST_CASE("svm objective and training") {
  Dataset data = separable_dataset();
  Vocabulary vocab = vocab_of({"w0", "w1"}, {3, 3}, 6);

  // hand value: w = 0 makes the objective the mean hinge loss, 1
  CHECK(classify::svm_objective({0.0, 0.0}, 0.0, data, 0.5) == 1.0);
  // bias inside the regularizer: (0.5/2)*4 + mean hinge at score b=2,
  // which is 0 on the three positives and 3 on the three negatives
  CHECK(classify::svm_objective({0.0, 0.0}, 2.0, data, 0.5) ==
        doctest::Approx(1.0 + 1.5).epsilon(1e-12));

  classify::SvmConfig config;
  config.lambda = 0.05;
  config.epochs = 400;
  classify::LinearModel model =
      classify::train_svm(data, vocab, Scheme::kTf, config);
  CHECK(model.kind == classify::ModelKind::kSvm);
  for (const auto& e : data.examples) {
    CHECK(classify::predict(model, e.features) == e.label);
  }

  // the objective trace of the averaged iterate settles downward
  REQUIRE(model.objective_trace.size() == 400);
  CHECK(model.objective_trace.back() <
        model.objective_trace.front());
  const double final_objective = classify::svm_objective(
      model.weights, model.bias, data, config.lambda);
  CHECK(final_objective == doctest::Approx(model.objective_trace.back()));
}

TEST_CASE("svm training is seed-deterministic") {
  Dataset data = separable_dataset();
  Vocabulary vocab = vocab_of({"w0", "w1"}, {3, 3}, 6);
  classify::SvmConfig config;
  config.epochs = 50;
  auto a = classify::train_svm(data, vocab, Scheme::kTf, config);
  auto b = classify::train_svm(data, vocab, Scheme::kTf, config);
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
  CHECK(a.objective_trace == b.objective_trace);
}

TEST_CASE("cosine distance") {
  FeatureVector a = fv({{0, 1.0}});
  FeatureVector b = fv({{0, 1.0}});
  FeatureVector c = fv({{1, 1.0}});
  FeatureVector mixed = fv({{0, 1.0}, {1, 1.0}});
  FeatureVector zero;

  CHECK(classify::cosine_distance(a, b) == doctest::Approx(0.0));
  CHECK(classify::cosine_distance(a, c) == doctest::Approx(1.0));
  CHECK(classify::cosine_distance(a, mixed) ==
        doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)));
  // zero-norm vectors are treated as orthogonal to everything
  CHECK(classify::cosine_distance(a, zero) == 1.0);
  CHECK(classify::cosine_distance(zero, zero) == 1.0);
}

TEST_CASE("knn prediction") {
  Dataset train;
  train.examples.push_back(ex("p1", fv({{0, 1.0}}), +1));
  train.examples.push_back(ex("p2", fv({{0, 1.0}, {1, 0.1}}), +1));
  train.examples.push_back(ex("n1", fv({{1, 1.0}}), -1));
  train.examples.push_back(ex("n2", fv({{1, 1.0}, {0, 0.1}}), -1));

  FeatureVector near_pos = fv({{0, 1.0}, {1, 0.05}});
  CHECK(classify::knn_predict(train, near_pos, 1) == +1);
  CHECK(classify::knn_predict(train, near_pos, 3) == +1);

  // an even vote falls back to the single nearest neighbor
  CHECK(classify::knn_predict(train, near_pos, 4) == +1);
  FeatureVector near_neg = fv({{1, 1.0}, {0, 0.05}});
  CHECK(classify::knn_predict(train, near_neg, 4) == -1);

  CHECK_THROWS_AS(classify::knn_predict(train, near_pos, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(classify::knn_predict(train, near_pos, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(classify::knn_predict({}, near_pos, 1),
                  std::invalid_argument);
}

TEST_CASE("knn matches a naive oracle") {
  std::mt19937_64 rng(31);
  Dataset train = random_dataset(rng, 40, 5);
  for (int q = 0; q < 30; ++q) {
    Dataset query = random_dataset(rng, 1, 5);
    const FeatureVector& probe = query.examples[0].features;
    const int k = 1 + static_cast<int>(rng() % 7);

    // naive: stable sort by (distance, position), majority vote
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < train.size(); ++i) {
      order.emplace_back(
          classify::cosine_distance(train.examples[i].features, probe), i);
    }
    std::sort(order.begin(), order.end());
    int vote = 0;
    for (int i = 0; i < k; ++i) vote += train.examples[order[i].second].label;
    const int expected =
        vote != 0 ? (vote > 0 ? +1 : -1)
                  : train.examples[order[0].second].label;

    CHECK(classify::knn_predict(train, probe, k) == expected);
  }
}

TEST_CASE("metrics from a hand confusion") {
  classify::Confusion confusion{3, 2, 1, 4};
  classify::Metrics metrics = classify::metrics_from_confusion(confusion);
  CHECK(metrics.accuracy == 0.7);
  CHECK(metrics.recall == 0.75);
  CHECK(metrics.precision == 0.6);
  CHECK(metrics.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK_FALSE(metrics.precision_undefined);

  classify::Metrics empty_pred =
      classify::metrics_from_confusion({0, 0, 2, 8});
  CHECK(empty_pred.precision == 0.0);
  CHECK(empty_pred.precision_undefined);
  CHECK(empty_pred.f1 == 0.0);
}

TEST_CASE("metrics csv matches the fixed layout") {
  classify::Metrics m = classify::metrics_from_confusion({3, 2, 1, 4});
  const std::string csv = classify::metrics_report_csv(m, m, m);
  CHECK(csv ==
        "model,accuracy,recall,precision,f1\n"
        "LG,0.7000,0.7500,0.6000,0.6667\n"
        "KNN,0.7000,0.7500,0.6000,0.6667\n"
        "SVM,0.7000,0.7500,0.6000,0.6667\n");
}

TEST_CASE("evaluation rejects an empty test set") {
  Dataset data = separable_dataset();
  Vocabulary vocab = vocab_of({"w0", "w1"}, {3, 3}, 6);
  auto model = classify::train_logreg(data, vocab, Scheme::kTf,
                                      classify::LogregConfig{});
  CHECK_THROWS_AS(classify::evaluate(model, {}), std::invalid_argument);
  CHECK_THROWS_AS(classify::evaluate_knn(data, {}, 3), std::invalid_argument);

  classify::Metrics metrics = classify::evaluate(model, data);
  CHECK(metrics.accuracy == 1.0);
  CHECK(metrics.confusion.total() == 6);
}

TEST_CASE("cascade partitions authors into three cohorts") {
  // stage-1 signal token: opi; stage-2 signal token: meeting
  std::vector<classify::AuthorDoc> authors;
  corpus::LabelMap stage1, stage2;
  for (int i = 0; i < 8; ++i) {
    const std::string name = "oud_rec_" + std::to_string(i);
    authors.push_back({name, {"opi", "meeting", "filler"}});
    stage1[name] = Label::kOud;
    stage2[name] = Label::kRecovering;
  }
  for (int i = 0; i < 8; ++i) {
    const std::string name = "oud_non_" + std::to_string(i);
    authors.push_back({name, {"opi", "filler", "offtopic"}});
    stage1[name] = Label::kOud;
    stage2[name] = Label::kNonRecovering;
  }
  for (int i = 0; i < 8; ++i) {
    const std::string name = "neg_" + std::to_string(i);
    authors.push_back({name, {"filler", "cat"}});
    stage1[name] = Label::kNonOud;
  }

  classify::CascadeConfig config;
  config.svm.epochs = 200;
  auto cohorts = classify::cascade(authors, stage1, stage2, config);
  REQUIRE(cohorts.size() == authors.size());
  for (int i = 0; i < 8; ++i) {
    CHECK(cohorts.at("oud_rec_" + std::to_string(i)) ==
          classify::Cohort::kOudRecovering);
    CHECK(cohorts.at("oud_non_" + std::to_string(i)) ==
          classify::Cohort::kOudNonRecovering);
    CHECK(cohorts.at("neg_" + std::to_string(i)) ==
          classify::Cohort::kNonOud);
  }
}

TEST_CASE("cascade validation") {
  std::vector<classify::AuthorDoc> authors = {{"u1", {"a"}}, {"u2", {"b"}}};
  classify::CascadeConfig config;
  SUBCASE("no stage-1 labels") {
    CHECK_THROWS_AS(classify::cascade(authors, {}, {}, config),
                    std::invalid_argument);
  }
  SUBCASE("no stage-2 labels among predicted positives") {
    corpus::LabelMap stage1{{"u1", Label::kOud}, {"u2", Label::kNonOud}};
    CHECK_THROWS_AS(classify::cascade(authors, stage1, {}, config),
                    std::invalid_argument);
  }
}

TEST_CASE("linear model json round trip") {
  Dataset data = separable_dataset();
  Vocabulary vocab = vocab_of({"w0", "w1"}, {3, 3}, 6);
  classify::LinearModel model = classify::train_svm(data, vocab, Scheme::kTfidf,
                                                    classify::SvmConfig{});

  classify::LinearModel back =
      classify::load_linear_model(classify::save_linear_model(model));
  CHECK(back.kind == model.kind);
  CHECK(back.scheme == model.scheme);
  CHECK(back.weights == model.weights);
  CHECK(back.bias == model.bias);
  CHECK(back.vocab.words == model.vocab.words);
  CHECK(back.vocab.doc_freq == model.vocab.doc_freq);
  CHECK(back.vocab.doc_count == model.vocab.doc_count);

  // predictions survive the round trip bit for bit
  for (const auto& e : data.examples) {
    CHECK(classify::score(back, e.features) ==
          classify::score(model, e.features));
  }

  CHECK_THROWS_AS(classify::load_linear_model("{}"), ParseError);
  CHECK_THROWS_AS(classify::load_linear_model("nope"), ParseError);
}

TEST_CASE("predict_tokens featurizes with the model's own scheme and vocab") {
  Dataset data = separable_dataset();
  Vocabulary vocab = vocab_of({"w0", "w1"}, {3, 3}, 6);
  auto model = classify::train_logreg(data, vocab, Scheme::kTf,
                                      classify::LogregConfig{});
  CHECK(classify::predict_tokens(model, {"w0", "w0"}) == +1);
  CHECK(classify::predict_tokens(model, {"w1", "w1"}) == -1);
}
