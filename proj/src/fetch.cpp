#include "opmine/fetch.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "opmine/errors.hpp"

namespace opmine::corpus {

using nlohmann::json;

namespace {

constexpr int kPageSize = 100;  // listing page cap

void validate(const FetchConfig& config) {
  if (config.base_url.empty()) {
    throw std::invalid_argument("fetch: base_url must not be empty");
  }
  if (config.subreddit.empty()) {
    throw std::invalid_argument("fetch: subreddit must not be empty");
  }
  if (config.max_posts < 1 || config.max_posts > 1000) {
    throw std::invalid_argument("fetch: max_posts must be in [1, 1000]");
  }
  if (config.requests_per_minute < 1) {
    throw std::invalid_argument("fetch: requests_per_minute must be positive");
  }
}

std::string field_string(const json& data, const char* key) {
  auto it = data.find(key);
  if (it == data.end() || it->is_null()) {
    throw ParseError(std::string("listing record missing field `") + key + "`");
  }
  if (!it->is_string()) {
    throw ParseError(std::string("listing field `") + key + "` is not a string");
  }
  return it->get<std::string>();
}

Post post_from_listing(const json& data, const std::string& fallback_subreddit) {
  Post post;
  post.id = field_string(data, "id");
  post.author = field_string(data, "author");

  if (auto it = data.find("subreddit"); it != data.end() && it->is_string()) {
    post.subreddit = it->get<std::string>();
  } else {
    post.subreddit = fallback_subreddit;
  }

  auto created = data.find("created_utc");
  if (created == data.end() || !created->is_number()) {
    throw ParseError("listing field `created_utc` missing or not a number");
  }
  post.created_utc = static_cast<std::int64_t>(created->get<double>());

  if (auto it = data.find("title"); it != data.end() && it->is_string()) {
    post.title = it->get<std::string>();
  }
  if (auto it = data.find("parent_id"); it != data.end() && it->is_string()) {
    post.parent_id = it->get<std::string>();
  }
  // Submissions carry `selftext`, comments carry `body`.
  if (auto it = data.find("selftext"); it != data.end() && it->is_string()) {
    post.body = it->get<std::string>();
  } else if (auto it2 = data.find("body"); it2 != data.end() && it2->is_string()) {
    post.body = it2->get<std::string>();
  }
  return post;
}

}  // namespace

std::vector<Post> fetch_subreddit(const FetchConfig& config, HttpTransport& http,
                                  const Sleeper& sleep) {
  validate(config);

  Sleeper pause = sleep;
  if (!pause) {
    pause = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  const auto spacing =
      std::chrono::milliseconds(60'000 / config.requests_per_minute);

  std::map<std::string, std::string> headers{{"User-Agent", config.user_agent}};

  std::vector<Post> posts;
  std::string after;
  bool first_request = true;

  while (static_cast<int>(posts.size()) < config.max_posts) {
    if (!first_request) {
      pause(spacing);
    }
    first_request = false;

    const int remaining = config.max_posts - static_cast<int>(posts.size());
    std::string url = config.base_url + "/r/" + config.subreddit +
                      "/new.json?limit=" +
                      std::to_string(std::min(remaining, kPageSize)) +
                      "&raw_json=1";
    if (!after.empty()) {
      url += "&after=" + after;
    }

    HttpResponse response = http.get(url, headers);
    if (response.status < 200 || response.status >= 300) {
      throw FetchError("fetch: HTTP status " + std::to_string(response.status) +
                           " from " + url,
                       response.status, /*retryable=*/true);
    }

    json listing;
    try {
      listing = json::parse(response.body);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("listing is not valid JSON: ") + e.what());
    }
    auto data = listing.find("data");
    if (data == listing.end() || !data->is_object()) {
      throw ParseError("listing missing field `data`");
    }
    auto children = data->find("children");
    if (children == data->end() || !children->is_array()) {
      throw ParseError("listing missing field `data.children`");
    }

    for (const json& child : *children) {
      auto child_data = child.find("data");
      if (child_data == child.end() || !child_data->is_object()) {
        throw ParseError("listing child missing field `data`");
      }
      posts.push_back(post_from_listing(*child_data, config.subreddit));
      if (static_cast<int>(posts.size()) >= config.max_posts) {
        break;
      }
    }

    auto next = data->find("after");
    if (next == data->end() || !next->is_string() ||
        next->get<std::string>().empty()) {
      break;  // listing exhausted
    }
    after = next->get<std::string>();
    if (children->empty()) {
      break;  // an empty page that still carries a cursor would loop forever
    }
  }

  return posts;
}

}  // namespace opmine::corpus
