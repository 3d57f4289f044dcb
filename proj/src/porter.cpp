#include "opmine/porter.hpp"

#include <array>
#include <cstddef>

namespace opmine::preprocess {

namespace {

bool is_vowel_letter(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

// y counts as a consonant when it starts the word or follows a vowel.
bool is_consonant(const std::string& w, std::size_t i) {
  char c = w[i];
  if (is_vowel_letter(c)) {
    return false;
  }
  if (c == 'y') {
    return i == 0 ? true : !is_consonant(w, i - 1);
  }
  return true;
}

// m of the [C](VC)^m[V] decomposition.
int measure(const std::string& w) {
  int m = 0;
  std::size_t i = 0;
  const std::size_t n = w.size();
  while (i < n && is_consonant(w, i)) ++i;
  while (i < n) {
    while (i < n && !is_consonant(w, i)) ++i;
    if (i == n) break;
    ++m;
    while (i < n && is_consonant(w, i)) ++i;
  }
  return m;
}

bool contains_vowel(const std::string& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!is_consonant(w, i)) return true;
  }
  return false;
}

bool ends_double_consonant(const std::string& w) {
  const std::size_t n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

// *o: ends consonant-vowel-consonant and the final consonant is not w, x or y.
bool ends_cvc(const std::string& w) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  if (is_consonant(w, n - 3) && !is_consonant(w, n - 2) &&
      is_consonant(w, n - 1)) {
    char c = w[n - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }
  return false;
}

bool ends_with(const std::string& w, std::string_view suffix) {
  return w.size() >= suffix.size() &&
         w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct Rule {
  std::string_view from;
  std::string_view to;
};

// Longest matching suffix wins; its condition is then tested on the stem and
// no shorter rule is tried.
template <std::size_t N>
void apply_map(std::string& w, const std::array<Rule, N>& rules,
               int min_measure) {
  const Rule* best = nullptr;
  for (const Rule& rule : rules) {
    if (ends_with(w, rule.from) &&
        (best == nullptr || rule.from.size() > best->from.size())) {
      best = &rule;
    }
  }
  if (best == nullptr) return;
  std::string stem = w.substr(0, w.size() - best->from.size());
  if (measure(stem) > min_measure - 1) {
    w = stem + std::string(best->to);
  }
}

void step1a(std::string& w) {
  if (ends_with(w, "sses")) {
    w.erase(w.size() - 2);
  } else if (ends_with(w, "ies")) {
    w.erase(w.size() - 2);
  } else if (ends_with(w, "ss")) {
    // keep
  } else if (ends_with(w, "s")) {
    w.pop_back();
  }
}

void step1b(std::string& w) {
  if (ends_with(w, "eed")) {
    if (measure(w.substr(0, w.size() - 3)) > 0) {
      w.pop_back();
    }
    return;
  }
  bool stripped = false;
  if (ends_with(w, "ed")) {
    std::string stem = w.substr(0, w.size() - 2);
    if (contains_vowel(stem)) {
      w = std::move(stem);
      stripped = true;
    }
  } else if (ends_with(w, "ing")) {
    std::string stem = w.substr(0, w.size() - 3);
    if (contains_vowel(stem)) {
      w = std::move(stem);
      stripped = true;
    }
  }
  if (!stripped) return;
  if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
    w += 'e';
  } else if (ends_double_consonant(w)) {
    char c = w.back();
    if (c != 'l' && c != 's' && c != 'z') {
      w.pop_back();
    }
  } else if (measure(w) == 1 && ends_cvc(w)) {
    w += 'e';
  }
}

void step1c(std::string& w) {
  if (ends_with(w, "y") && contains_vowel(w.substr(0, w.size() - 1))) {
    w.back() = 'i';
  }
}

void step2(std::string& w) {
  static constexpr std::array<Rule, 20> rules{{
      {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
      {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
      {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
      {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
      {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
      {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
      {"iviti", "ive"},   {"biliti", "ble"},
  }};
  apply_map(w, rules, 1);
}

void step3(std::string& w) {
  static constexpr std::array<Rule, 7> rules{{
      {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
      {"ical", "ic"},  {"ful", ""},   {"ness", ""},
  }};
  apply_map(w, rules, 1);
}

void step4(std::string& w) {
  static constexpr std::array<std::string_view, 19> suffixes{
      "al",  "ance", "ence", "er",    "ic",   "able", "ible",
      "ant", "ement", "ment", "ent",  "ion",  "ou",   "ism",
      "ate", "iti",  "ous",  "ive",  "ize",
  };
  std::string_view best;
  for (std::string_view s : suffixes) {
    if (ends_with(w, s) && s.size() > best.size()) {
      best = s;
    }
  }
  if (best.empty()) return;
  std::string stem = w.substr(0, w.size() - best.size());
  if (measure(stem) <= 1) return;
  if (best == "ion" && !(ends_with(stem, "s") || ends_with(stem, "t"))) {
    return;
  }
  w = std::move(stem);
}

void step5a(std::string& w) {
  if (!ends_with(w, "e")) return;
  std::string stem = w.substr(0, w.size() - 1);
  int m = measure(stem);
  if (m > 1 || (m == 1 && !ends_cvc(stem))) {
    w = std::move(stem);
  }
}

void step5b(std::string& w) {
  if (measure(w) > 1 && ends_double_consonant(w) && w.back() == 'l') {
    w.pop_back();
  }
}

}  // namespace

std::string porter_stem(std::string_view word) {
  std::string w(word);
  if (w.size() <= 2) {
    return w;
  }
  for (char c : w) {
    if (c < 'a' || c > 'z') {
      return w;  // stemming is defined over lowercase a-z only
    }
  }
  step1a(w);
  step1b(w);
  step1c(w);
  step2(w);
  step3(w);
  step4(w);
  step5a(w);
  step5b(w);
  return w;
}

}  // namespace opmine::preprocess
