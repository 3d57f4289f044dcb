#include "opmine/preprocess.hpp"

#include <cstdint>
#include <fstream>
#include <istream>

#include "opmine/porter.hpp"

namespace opmine::preprocess {

namespace {

// Decodes one UTF-8 code point starting at `i`; advances `i` past it.
// Malformed bytes decode as themselves (latin-1 style) so nothing is lost.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) {
    return static_cast<std::uint8_t>(s[k]);
  };
  std::uint8_t b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return b0;
  }
  if (i + len > s.size()) {
    ++i;
    return b0;
  }
  for (int k = 1; k < len; ++k) {
    std::uint8_t bk = byte(i + k);
    if ((bk & 0xC0) != 0x80) {
      ++i;
      return b0;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  i += len;
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Unicode White_Space property.
bool is_space(char32_t cp) {
  switch (cp) {
    case 0x0009:
    case 0x000A:
    case 0x000B:
    case 0x000C:
    case 0x000D:
    case 0x0020:
    case 0x0085:
    case 0x00A0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_ascii_punct(char32_t cp) {
  return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
         (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
}

// ASCII punctuation plus the curly quotes, dashes and ellipsis that dominate
// pasted social-media text.
bool is_punct(char32_t cp) {
  if (is_ascii_punct(cp)) return true;
  switch (cp) {
    case 0x2018:  // left single quote
    case 0x2019:  // right single quote
    case 0x201C:  // left double quote
    case 0x201D:  // right double quote
    case 0x2013:  // en dash
    case 0x2014:  // em dash
    case 0x2026:  // ellipsis
      return true;
    default:
      return false;
  }
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') {
    return cp + 32;
  }
  return cp;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = decode_utf8(text, i);
    if (is_space(cp)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else {
      encode_utf8(cp, current);
    }
  }
  if (!current.empty()) {
    tokens.push_back(std::move(current));
  }
  return tokens;
}

std::vector<std::string> normalize(const std::vector<std::string>& tokens,
                                   const PreprocessConfig& config) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& token : tokens) {
    std::string cleaned;
    cleaned.reserve(token.size());
    std::size_t i = 0;
    while (i < token.size()) {
      char32_t cp = decode_utf8(token, i);
      if (config.strip_punctuation && is_punct(cp)) {
        continue;
      }
      if (config.lowercase) {
        cp = to_lower(cp);
      }
      encode_utf8(cp, cleaned);
    }
    if (cleaned.empty()) {
      continue;
    }
    if (config.stopwords.count(cleaned) > 0) {
      continue;
    }
    if (config.stem) {
      cleaned = porter_stem(cleaned);
    }
    out.push_back(std::move(cleaned));
  }
  return out;
}

TokenizedDocument process_post(const corpus::Post& post,
                               const PreprocessConfig& config) {
  return TokenizedDocument{post.id, post.author,
                           normalize(tokenize(post.text()), config)};
}

std::vector<TokenizedDocument> process_corpus(const corpus::Corpus& corpus,
                                              const PreprocessConfig& config) {
  std::vector<TokenizedDocument> docs;
  docs.reserve(corpus.size());
  for (const corpus::Post& post : corpus.posts()) {
    docs.push_back(process_post(post, config));
  }
  return docs;
}

std::unordered_set<std::string> load_stopwords(std::istream& in) {
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      continue;
    }
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line[0] == '#') {
      continue;
    }
    words.insert(line);
  }
  return words;
}

std::unordered_set<std::string> load_stopwords_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open stopword file: " + path);
  }
  return load_stopwords(in);
}

}  // namespace opmine::preprocess
