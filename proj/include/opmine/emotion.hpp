#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "opmine/preprocess.hpp"

namespace opmine::emotion {

struct Lexicon {
  // Emotion names in registration order; drives output column order.
  std::vector<std::string> emotions;
  std::map<std::string, std::unordered_set<std::string>> membership;

  bool has_emotion(const std::string& name) const {
    return membership.count(name) > 0;
  }
};

// The ten-category schema: eight basic emotions plus two sentiment polarities.
const std::vector<std::string>& canonical_emotions();
Lexicon canonical_lexicon();

// Rows are `word<TAB>emotion<TAB>0|1`; flag 1 adds the word to the emotion's
// set, flag 0 registers the emotion without the word.
Lexicon load_lexicon(std::istream& in);
Lexicon load_lexicon_file(const std::string& path);

using Counts = std::map<std::string, std::int64_t>;

struct EmotionProfile {
  Counts counts;
  std::map<std::string, double> normalized;
  std::string dominant;  // "none" when every count is zero
};

// Token-occurrence counts: a word repeated n times contributes n, and a word
// in several emotion sets increments each of them. Every lexicon emotion is
// present in the result, zeros included.
Counts emotion_counts(const preprocess::TokenizedDocument& doc,
                      const Lexicon& lex);

// Each count divided by the maximum count; all-zero input stays all zeros.
std::map<std::string, double> normalize_profile(const Counts& counts);

// Argmax over counts, ties broken by lexicographic emotion name;
// all-zero counts yield "none".
std::string dominant_emotion(const Counts& counts);

// Counts aggregated across all of a user's documents.
EmotionProfile user_profile(const std::vector<preprocess::TokenizedDocument>& docs,
                            const Lexicon& lex);

// Fraction of users per dominant emotion, including a "none" bucket.
// Only emotions that dominate at least one user appear; fractions sum to 1.
std::map<std::string, double> cohort_dominant_stats(
    const std::map<std::string, std::vector<preprocess::TokenizedDocument>>& users,
    const Lexicon& lex);

// Per emotion: the top_n most frequent member words in the corpus,
// descending by count then lexicographic.
std::map<std::string, std::vector<std::pair<std::string, std::int64_t>>>
emotion_word_frequencies(const std::vector<preprocess::TokenizedDocument>& docs,
                         const Lexicon& lex, int top_n);

}  // namespace opmine::emotion
