#include "opmine/emotion.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "opmine/errors.hpp"

namespace opmine::emotion {

const std::vector<std::string>& canonical_emotions() {
  static const std::vector<std::string> kEmotions = {
      "anger",    "anticipation", "disgust", "fear",     "joy",
      "sadness",  "surprise",     "trust",   "negative", "positive"};
  return kEmotions;
}

Lexicon canonical_lexicon() {
  Lexicon lex;
  for (const std::string& name : canonical_emotions()) {
    lex.emotions.push_back(name);
    lex.membership[name];
  }
  return lex;
}

Lexicon load_lexicon(std::istream& in) {
  Lexicon lex;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    auto tab1 = line.find('\t');
    auto tab2 = tab1 == std::string::npos ? std::string::npos
                                          : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos ||
        line.find('\t', tab2 + 1) != std::string::npos) {
      throw ParseError("lexicon row must be word<TAB>emotion<TAB>flag", row);
    }
    std::string word = line.substr(0, tab1);
    std::string name = line.substr(tab1 + 1, tab2 - tab1 - 1);
    std::string flag = line.substr(tab2 + 1);
    if (word.empty() || name.empty()) {
      throw ParseError("lexicon row has an empty field", row);
    }
    if (flag != "0" && flag != "1") {
      throw ParseError("lexicon flag must be 0 or 1, got \"" + flag + "\"", row);
    }
    if (lex.membership.count(name) == 0) {
      lex.emotions.push_back(name);
      lex.membership[name];
    }
    if (flag == "1") {
      lex.membership[name].insert(word);
    }
  }
  return lex;
}

Lexicon load_lexicon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open lexicon file: " + path);
  }
  return load_lexicon(in);
}

Counts emotion_counts(const preprocess::TokenizedDocument& doc,
                      const Lexicon& lex) {
  Counts counts;
  for (const std::string& name : lex.emotions) {
    counts[name] = 0;
  }
  for (const std::string& token : doc.tokens) {
    for (const auto& [name, words] : lex.membership) {
      if (words.count(token) > 0) {
        ++counts[name];
      }
    }
  }
  return counts;
}

std::map<std::string, double> normalize_profile(const Counts& counts) {
  std::int64_t max_count = 0;
  for (const auto& [name, count] : counts) {
    max_count = std::max(max_count, count);
  }
  std::map<std::string, double> normalized;
  for (const auto& [name, count] : counts) {
    normalized[name] = max_count == 0 ? 0.0
                                      : static_cast<double>(count) /
                                            static_cast<double>(max_count);
  }
  return normalized;
}

std::string dominant_emotion(const Counts& counts) {
  std::string best = "none";
  std::int64_t best_count = 0;
  // std::map iterates emotion names in lexicographic order, so the first
  // strict maximum is also the tie-break winner.
  for (const auto& [name, count] : counts) {
    if (count > best_count) {
      best = name;
      best_count = count;
    }
  }
  return best;
}

EmotionProfile user_profile(const std::vector<preprocess::TokenizedDocument>& docs,
                            const Lexicon& lex) {
  EmotionProfile profile;
  for (const std::string& name : lex.emotions) {
    profile.counts[name] = 0;
  }
  for (const auto& doc : docs) {
    for (const auto& [name, count] : emotion_counts(doc, lex)) {
      profile.counts[name] += count;
    }
  }
  profile.normalized = normalize_profile(profile.counts);
  profile.dominant = dominant_emotion(profile.counts);
  return profile;
}

std::map<std::string, double> cohort_dominant_stats(
    const std::map<std::string, std::vector<preprocess::TokenizedDocument>>& users,
    const Lexicon& lex) {
  if (users.empty()) {
    throw std::invalid_argument("cohort is empty");
  }
  std::map<std::string, std::int64_t> buckets;
  for (const auto& [author, docs] : users) {
    if (docs.empty()) {
      throw std::invalid_argument("user " + author + " has no documents");
    }
    ++buckets[user_profile(docs, lex).dominant];
  }
  std::map<std::string, double> fractions;
  const auto total = static_cast<double>(users.size());
  for (const auto& [name, count] : buckets) {
    fractions[name] = static_cast<double>(count) / total;
  }
  return fractions;
}

std::map<std::string, std::vector<std::pair<std::string, std::int64_t>>>
emotion_word_frequencies(const std::vector<preprocess::TokenizedDocument>& docs,
                         const Lexicon& lex, int top_n) {
  std::map<std::string, std::int64_t> token_counts;
  for (const auto& doc : docs) {
    for (const std::string& token : doc.tokens) {
      ++token_counts[token];
    }
  }
  std::map<std::string, std::vector<std::pair<std::string, std::int64_t>>> result;
  for (const std::string& name : lex.emotions) {
    auto& ranked = result[name];
    const auto& words = lex.membership.at(name);
    for (const auto& [token, count] : token_counts) {
      if (words.count(token) > 0) {
        ranked.emplace_back(token, count);
      }
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& lhs, const auto& rhs) {
                if (lhs.second != rhs.second) return lhs.second > rhs.second;
                return lhs.first < rhs.first;
              });
    if (top_n < 0) top_n = 0;
    if (ranked.size() > static_cast<std::size_t>(top_n)) {
      ranked.resize(static_cast<std::size_t>(top_n));
    }
  }
  return result;
}

}  // namespace opmine::emotion
