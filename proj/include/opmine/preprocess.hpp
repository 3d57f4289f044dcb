#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "opmine/corpus.hpp"

namespace opmine::preprocess {

struct PreprocessConfig {
  bool lowercase = true;
  bool strip_punctuation = true;
  // Matched after lowercasing (when enabled). Entries are expected lowercase.
  std::unordered_set<std::string> stopwords;
  bool stem = true;
};

// A post reduced to its normalized token sequence.
struct TokenizedDocument {
  std::string doc_id;
  std::string author;
  std::vector<std::string> tokens;

  bool operator==(const TokenizedDocument&) const = default;
};

// Splits on Unicode whitespace. Punctuation is left alone here; normalize()
// handles it.
std::vector<std::string> tokenize(std::string_view text);

// Lowercase -> strip punctuation -> drop emptied tokens -> drop stopwords ->
// stem, each stage under its config flag. Token order is preserved.
std::vector<std::string> normalize(const std::vector<std::string>& tokens,
                                   const PreprocessConfig& config);

TokenizedDocument process_post(const corpus::Post& post,
                               const PreprocessConfig& config);
std::vector<TokenizedDocument> process_corpus(const corpus::Corpus& corpus,
                                              const PreprocessConfig& config);

// One word per line; blank lines and lines starting with '#' are skipped.
std::unordered_set<std::string> load_stopwords(std::istream& in);
std::unordered_set<std::string> load_stopwords_file(const std::string& path);

}  // namespace opmine::preprocess
