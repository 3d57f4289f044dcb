#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "opmine/corpus.hpp"
#include "opmine/porter.hpp"
#include "opmine/preprocess.hpp"

using namespace opmine;
using preprocess::PreprocessConfig;
using preprocess::normalize;
using preprocess::porter_stem;
using preprocess::tokenize;

TEST_CASE("tokenize splits on ascii whitespace runs") {
  CHECK(tokenize("a b  c\td\ne") ==
        std::vector<std::string>{"a", "b", "c", "d", "e"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("   \t\n ") == std::vector<std::string>{});
  CHECK(tokenize("single") == std::vector<std::string>{"single"});
}

TEST_CASE("tokenize treats unicode spaces as separators") {
  // NBSP, em space, ideographic space, line separator
  CHECK(tokenize("a\xC2\xA0" "b") == std::vector<std::string>{"a", "b"});
  CHECK(tokenize("a\xE2\x80\x83" "b") == std::vector<std::string>{"a", "b"});
  CHECK(tokenize("a\xE3\x80\x80" "b") == std::vector<std::string>{"a", "b"});
  CHECK(tokenize("a\xE2\x80\xA8" "b") == std::vector<std::string>{"a", "b"});
  // stray non-utf8 bytes are latin-1 folded and re-encoded, never dropped
  CHECK(tokenize("a\xFF b") ==
        std::vector<std::string>{"a\xC3\xBF", "b"});
}

TEST_CASE("normalize lowercases and strips punctuation") {
  PreprocessConfig config;
  config.stem = false;

  CHECK(normalize({"Hello,", "World!"}, config) ==
        std::vector<std::string>{"hello", "world"});
  // interior punctuation goes too
  CHECK(normalize({"don't", "well-known"}, config) ==
        std::vector<std::string>{"dont", "wellknown"});
  // curly quotes, em dash, ellipsis
  CHECK(normalize({"it\xE2\x80\x99s", "wait\xE2\x80\xA6",
                   "so\xE2\x80\x94so"},
                  config) ==
        std::vector<std::string>{"its", "wait", "soso"});
  // tokens emptied by stripping are dropped
  CHECK(normalize({"--", "...", "ok"}, config) ==
        std::vector<std::string>{"ok"});
}

TEST_CASE("normalize honors each config flag") {
  SUBCASE("no lowercase") {
    PreprocessConfig config;
    config.lowercase = false;
    config.stem = false;
    CHECK(normalize({"Mixed!"}, config) == std::vector<std::string>{"Mixed"});
  }
  SUBCASE("keep punctuation") {
    PreprocessConfig config;
    config.strip_punctuation = false;
    config.stem = false;
    CHECK(normalize({"don't"}, config) == std::vector<std::string>{"don't"});
  }
  SUBCASE("stopwords match after lowercasing") {
    PreprocessConfig config;
    config.stem = false;
    config.stopwords = {"the", "and"};
    CHECK(normalize({"The", "Fox", "AND", "hound"}, config) ==
          std::vector<std::string>{"fox", "hound"});
  }
  SUBCASE("stemming runs last") {
    PreprocessConfig config;
    config.stopwords = {"cravings"};  // only matches pre-stem forms
    CHECK(normalize({"Cravings,", "cravings"}, config) ==
          std::vector<std::string>{});
    config.stopwords = {"crave"};
    CHECK(normalize({"cravings"}, config) ==
          std::vector<std::string>{"crave"});
  }
}

TEST_CASE("porter stemmer matches the reference vocabulary") {
  const std::pair<const char*, const char*> cases[] = {
      {"caresses", "caress"}, {"ponies", "poni"},       {"ties", "ti"},
      {"caress", "caress"},   {"cats", "cat"},          {"feed", "feed"},
      {"agreed", "agre"},     {"plastered", "plaster"}, {"bled", "bled"},
      {"motoring", "motor"},  {"sing", "sing"},         {"conflated", "conflat"},
      {"troubled", "troubl"}, {"sized", "size"},        {"hopping", "hop"},
      {"tanned", "tan"},      {"falling", "fall"},      {"hissing", "hiss"},
      {"fizzed", "fizz"},     {"failing", "fail"},      {"filing", "file"},
      {"happy", "happi"},     {"sky", "sky"},           {"relational", "relat"},
      {"conditional", "condit"},  {"rational", "ration"},
      {"valenci", "valenc"},      {"hesitanci", "hesit"},
      {"digitizer", "digit"},     {"conformabli", "conform"},
      {"radicalli", "radic"},     {"differentli", "differ"},
      {"vileli", "vile"},         {"analogousli", "analog"},
      {"vietnamization", "vietnam"}, {"predication", "predic"},
      {"operator", "oper"},       {"feudalism", "feudal"},
      {"decisiveness", "decis"},  {"hopefulness", "hope"},
      {"callousness", "callous"}, {"formaliti", "formal"},
      {"sensitiviti", "sensit"},  {"sensibiliti", "sensibl"},
      {"triplicate", "triplic"},  {"formative", "form"},
      {"formalize", "formal"},    {"electriciti", "electr"},
      {"electrical", "electr"},   {"hopeful", "hope"},
      {"goodness", "good"},       {"revival", "reviv"},
      {"allowance", "allow"},     {"inference", "infer"},
      {"airliner", "airlin"},     {"gyroscopic", "gyroscop"},
      {"adjustable", "adjust"},   {"defensible", "defens"},
      {"irritant", "irrit"},      {"replacement", "replac"},
      {"adjustment", "adjust"},   {"dependent", "depend"},
      {"adoption", "adopt"},      {"communism", "commun"},
      {"activate", "activ"},      {"angulariti", "angular"},
      {"homologous", "homolog"},  {"effective", "effect"},
      {"bowdlerize", "bowdler"},  {"probate", "probat"},
      {"rate", "rate"},           {"cease", "ceas"},
      {"controll", "control"},    {"roll", "roll"},
  };
  for (const auto& [word, stem] : cases) {
    CAPTURE(word);
    CHECK(porter_stem(word) == stem);
  }
}

TEST_CASE("porter stemmer on domain vocabulary") {
  const std::pair<const char*, const char*> cases[] = {
      {"opioids", "opioid"},       {"cravings", "crave"},
      {"relapsed", "relaps"},      {"relapsing", "relaps"},
      {"recovering", "recov"},     {"recovery", "recoveri"},
      {"medications", "medic"},    {"feelings", "feel"},
      {"days", "dai"},             {"suboxone", "suboxon"},
      {"methadone", "methadon"},   {"dope", "dope"},
      {"detox", "detox"},          {"withdrawal", "withdraw"},
      {"symptoms", "symptom"},
  };
  for (const auto& [word, stem] : cases) {
    CAPTURE(word);
    CHECK(porter_stem(word) == stem);
  }
}

TEST_CASE("porter leaves short and non-lowercase words alone") {
  CHECK(porter_stem("at") == "at");
  CHECK(porter_stem("by") == "by");
  CHECK(porter_stem("a") == "a");
  CHECK(porter_stem("") == "");
  CHECK(porter_stem("Dope") == "Dope");
  CHECK(porter_stem("don2t") == "don2t");
}

TEST_CASE("process_post carries id and author") {
  corpus::Post post;
  post.id = "t3_x";
  post.author = "u9";
  post.subreddit = "opiates";
  post.created_utc = 1;
  post.title = "Tapering Update";
  post.body = "cravings are fading.";

  PreprocessConfig config;
  preprocess::TokenizedDocument doc = preprocess::process_post(post, config);
  CHECK(doc.doc_id == "t3_x");
  CHECK(doc.author == "u9");
  CHECK(doc.tokens ==
        std::vector<std::string>{"taper", "updat", "crave", "ar", "fade"});
}

TEST_CASE("process_corpus keeps document order") {
  corpus::Corpus c;
  corpus::Post a;
  a.id = "1";
  a.author = "u1";
  a.subreddit = "s";
  a.body = "one two";
  corpus::Post b;
  b.id = "2";
  b.author = "u2";
  b.subreddit = "s";
  b.body = "three";
  c.add(a);
  c.add(b);

  PreprocessConfig config;
  config.stem = false;
  auto docs = preprocess::process_corpus(c, config);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].doc_id == "1");
  CHECK(docs[1].tokens == std::vector<std::string>{"three"});
}

TEST_CASE("stopword file skips blanks and comments") {
  std::istringstream in("# common words\nthe\n\n  \nand\n");
  auto words = preprocess::load_stopwords(in);
  CHECK(words.size() == 2);
  CHECK(words.count("the") == 1);
  CHECK(words.count("and") == 1);
  CHECK(words.count("# common words") == 0);
}
