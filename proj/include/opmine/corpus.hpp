#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace opmine::corpus {

// One Reddit-style record: a submission or a comment (comments carry a
// parent_id, submissions usually a title).
struct Post {
  std::string id;
  std::string author;
  std::string subreddit;
  std::int64_t created_utc = 0;
  std::optional<std::string> parent_id;
  std::optional<std::string> title;
  std::string body;

  // Title and body joined by a newline; what downstream analyses tokenize.
  std::string text() const;

  bool operator==(const Post&) const = default;
};

// Insertion-ordered collection of posts with unique ids.
class Corpus {
 public:
  Corpus() = default;

  // Throws ParseError on a duplicate id.
  void add(Post post);

  const std::vector<Post>& posts() const { return posts_; }
  std::size_t size() const { return posts_.size(); }
  bool contains_id(const std::string& id) const { return ids_.count(id) > 0; }

  // Distinct subreddit names in first-seen order.
  std::vector<std::string> source_tags() const;

  bool operator==(const Corpus& other) const { return posts_ == other.posts_; }

 private:
  std::vector<Post> posts_;
  std::unordered_set<std::string> ids_;
};

enum class Label {
  kOud,
  kNonOud,
  kRecovering,
  kNonRecovering,
  kRelapsed,
  kClean,
};

const char* to_string(Label label);
std::optional<Label> parse_label(std::string_view token);

// Newline-delimited JSON, one post per line. Field set:
// id, author, subreddit, created_utc, parent_id, title, body.
Corpus parse_corpus(std::istream& in);
void serialize_corpus(const Corpus& corpus, std::ostream& out);
Corpus load_corpus_file(const std::string& path);
void save_corpus_file(const Corpus& corpus, const std::string& path);

// CSV with header `author,label`, one label per author. Re-stating the same
// label is harmless; a conflicting one violates mutual exclusion and throws.
using LabelMap = std::map<std::string, Label>;
LabelMap load_labels(std::istream& in);
LabelMap load_labels_file(const std::string& path);

}  // namespace opmine::corpus
