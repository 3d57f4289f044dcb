#include "opmine/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "opmine/errors.hpp"

namespace opmine::corpus {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string Post::text() const {
  if (!title || title->empty()) {
    return body;
  }
  if (body.empty()) {
    return *title;
  }
  return *title + "\n" + body;
}

void Corpus::add(Post post) {
  if (!ids_.insert(post.id).second) {
    throw ParseError("duplicate post id '" + post.id + "'");
  }
  posts_.push_back(std::move(post));
}

std::vector<std::string> Corpus::source_tags() const {
  std::vector<std::string> tags;
  std::unordered_set<std::string> seen;
  for (const Post& post : posts_) {
    if (seen.insert(post.subreddit).second) {
      tags.push_back(post.subreddit);
    }
  }
  return tags;
}

const char* to_string(Label label) {
  switch (label) {
    case Label::kOud:
      return "oud";
    case Label::kNonOud:
      return "non_oud";
    case Label::kRecovering:
      return "recovering";
    case Label::kNonRecovering:
      return "non_recovering";
    case Label::kRelapsed:
      return "relapsed";
    case Label::kClean:
      return "clean";
  }
  return "?";
}

std::optional<Label> parse_label(std::string_view token) {
  if (token == "oud") return Label::kOud;
  if (token == "non_oud") return Label::kNonOud;
  if (token == "recovering") return Label::kRecovering;
  if (token == "non_recovering") return Label::kNonRecovering;
  if (token == "relapsed") return Label::kRelapsed;
  if (token == "clean") return Label::kClean;
  return std::nullopt;
}

namespace {

std::string require_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw ParseError(std::string("missing field `") + key + "`", line);
  }
  if (!it->is_string()) {
    throw ParseError(std::string("field `") + key + "` is not a string", line);
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key,
                                           std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    return std::nullopt;
  }
  if (!it->is_string()) {
    throw ParseError(std::string("field `") + key + "` is not a string", line);
  }
  return it->get<std::string>();
}

Post post_from_json(const json& obj, std::size_t line) {
  if (!obj.is_object()) {
    throw ParseError("record is not a JSON object", line);
  }
  Post post;
  post.id = require_string(obj, "id", line);
  if (post.id.empty()) {
    throw ParseError("field `id` is empty", line);
  }
  post.author = require_string(obj, "author", line);
  post.subreddit = require_string(obj, "subreddit", line);

  auto created = obj.find("created_utc");
  if (created == obj.end() || created->is_null()) {
    throw ParseError("missing field `created_utc`", line);
  }
  if (!created->is_number()) {
    throw ParseError("field `created_utc` is not a number", line);
  }
  post.created_utc = static_cast<std::int64_t>(created->get<double>());
  if (post.created_utc < 0) {
    throw ParseError("field `created_utc` is negative", line);
  }

  post.parent_id = optional_string(obj, "parent_id", line);
  post.title = optional_string(obj, "title", line);
  post.body = require_string(obj, "body", line);
  return post;
}

}  // namespace

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    corpus.add(post_from_json(obj, line_no));
  }
  return corpus;
}

void serialize_corpus(const Corpus& corpus, std::ostream& out) {
  for (const Post& post : corpus.posts()) {
    ordered_json obj;
    obj["id"] = post.id;
    obj["author"] = post.author;
    obj["subreddit"] = post.subreddit;
    obj["created_utc"] = post.created_utc;
    if (post.parent_id) {
      obj["parent_id"] = *post.parent_id;
    }
    if (post.title) {
      obj["title"] = *post.title;
    }
    obj["body"] = post.body;
    out << obj.dump() << "\n";
  }
}

Corpus load_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open corpus file: " + path);
  }
  return parse_corpus(in);
}

void save_corpus_file(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write corpus file: " + path);
  }
  serialize_corpus(corpus, out);
}

namespace {

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') {
    s.pop_back();
  }
  return s;
}

}  // namespace

LabelMap load_labels(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("empty label file (expected header `author,label`)", 1);
  }
  if (strip_cr(line) != "author,label") {
    throw ParseError("bad header (expected `author,label`)", 1);
  }
  LabelMap labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) {
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError("expected `author,label`", line_no);
    }
    std::string author = line.substr(0, comma);
    std::string token = line.substr(comma + 1);
    if (author.empty()) {
      throw ParseError("empty author", line_no);
    }
    auto label = parse_label(token);
    if (!label) {
      throw ParseError("unknown label `" + token + "`", line_no);
    }
    auto [it, inserted] = labels.emplace(author, *label);
    if (!inserted && it->second != *label) {
      throw ParseError("conflicting labels for author `" + author +
                           "`: labels are mutually exclusive",
                       line_no);
    }
  }
  return labels;
}

LabelMap load_labels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open label file: " + path);
  }
  return load_labels(in);
}

}  // namespace opmine::corpus
