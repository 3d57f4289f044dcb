#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "opmine/corpus.hpp"

namespace opmine::corpus {

struct FetchConfig {
  std::string base_url;  // e.g. "http://localhost:8080"
  std::string subreddit;
  int max_posts = 1000;  // API ceiling; must stay in [1, 1000]
  int requests_per_minute = 30;
  std::string user_agent = "opmine/0.1";
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Minimal GET transport so fetch_subreddit can run against mocks in tests and
// against a real HTTP client in the CLI.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& url,
                           const std::map<std::string, std::string>& headers) = 0;
};

// Injectable pause between paged requests. The default really sleeps.
using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Pages through `<base_url>/r/<subreddit>/new.json` (public listing shape:
// data.children[].data, continuation via data.after) until max_posts records
// are collected or the listing ends. Requests are spaced client-side at
// 60/requests_per_minute seconds.
//
// Throws FetchError (retryable) on a non-success HTTP status and ParseError
// on a listing schema mismatch.
std::vector<Post> fetch_subreddit(const FetchConfig& config, HttpTransport& http,
                                  const Sleeper& sleep = {});

}  // namespace opmine::corpus
