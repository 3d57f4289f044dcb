#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "opmine/errors.hpp"
#include "opmine/fetch.hpp"

using namespace opmine;
using corpus::FetchConfig;
using corpus::HttpResponse;

namespace {

// Canned-response transport that records every request.
class MockTransport : public corpus::HttpTransport {
 public:
  struct Call {
    std::string url;
    std::map<std::string, std::string> headers;
  };

  std::vector<HttpResponse> responses;
  std::vector<Call> calls;

  HttpResponse get(const std::string& url,
                   const std::map<std::string, std::string>& headers) override {
    calls.push_back({url, headers});
    REQUIRE(calls.size() <= responses.size());
    return responses[calls.size() - 1];
  }
};

std::string child(int i) {
  return "{\"data\":{\"id\":\"p" + std::to_string(i) +
         "\",\"author\":\"a" + std::to_string(i % 5) +
         "\",\"subreddit\":\"opiates\",\"created_utc\":" +
         std::to_string(1600000000 + i) + ",\"selftext\":\"post " +
         std::to_string(i) + "\"}}";
}

std::string listing(int start, int count, const std::string& after) {
  std::string out = "{\"data\":{\"children\":[";
  for (int i = 0; i < count; ++i) {
    if (i) out += ",";
    out += child(start + i);
  }
  out += "],\"after\":";
  out += after.empty() ? "null" : "\"" + after + "\"";
  out += "}}";
  return out;
}

FetchConfig config_for(int max_posts, int rpm = 30) {
  FetchConfig config;
  config.base_url = "http://api.test";
  config.subreddit = "opiates";
  config.max_posts = max_posts;
  config.requests_per_minute = rpm;
  return config;
}

corpus::Sleeper no_sleep() {
  return [](std::chrono::milliseconds) {};
}

}  // namespace

TEST_CASE("single page fetch builds the listing url") {
  MockTransport http;
  http.responses = {{200, listing(0, 3, "")}};

  auto posts = corpus::fetch_subreddit(config_for(3), http, no_sleep());
  REQUIRE(posts.size() == 3);
  CHECK(posts[0].id == "p0");
  CHECK(posts[0].author == "a0");
  CHECK(posts[0].body == "post 0");
  CHECK(posts[0].created_utc == 1600000000);
  CHECK(posts[2].id == "p2");

  REQUIRE(http.calls.size() == 1);
  CHECK(http.calls[0].url ==
        "http://api.test/r/opiates/new.json?limit=3&raw_json=1");
  CHECK(http.calls[0].headers.at("User-Agent") == "opmine/0.1");
}

TEST_CASE("pagination follows the after cursor") {
  MockTransport http;
  http.responses = {
      {200, listing(0, 100, "cur1")},
      {200, listing(100, 100, "cur2")},
      {200, listing(200, 50, "cur3")},
  };

  auto posts = corpus::fetch_subreddit(config_for(250), http, no_sleep());
  CHECK(posts.size() == 250);
  CHECK(posts.back().id == "p249");

  REQUIRE(http.calls.size() == 3);
  CHECK(http.calls[0].url.find("limit=100") != std::string::npos);
  CHECK(http.calls[0].url.find("after=") == std::string::npos);
  CHECK(http.calls[1].url.find("after=cur1") != std::string::npos);
  CHECK(http.calls[2].url.find("limit=50") != std::string::npos);
  CHECK(http.calls[2].url.find("after=cur2") != std::string::npos);
}

TEST_CASE("fetch stops when the listing ends early") {
  MockTransport http;
  http.responses = {{200, listing(0, 40, "")}};
  auto posts = corpus::fetch_subreddit(config_for(500), http, no_sleep());
  CHECK(posts.size() == 40);
  CHECK(http.calls.size() == 1);
}

TEST_CASE("an empty page with a cursor does not loop") {
  MockTransport http;
  http.responses = {{200, listing(0, 0, "cursor-of-doom")}};
  auto posts = corpus::fetch_subreddit(config_for(500), http, no_sleep());
  CHECK(posts.empty());
  CHECK(http.calls.size() == 1);
}

TEST_CASE("requests are spaced by the rate limit") {
  MockTransport http;
  http.responses = {
      {200, listing(0, 100, "cur1")},
      {200, listing(100, 100, "cur2")},
      {200, listing(200, 20, "")},
  };
  std::vector<std::chrono::milliseconds> pauses;
  auto sleeper = [&pauses](std::chrono::milliseconds d) {
    pauses.push_back(d);
  };

  corpus::fetch_subreddit(config_for(1000, 30), http, sleeper);
  // first request goes out immediately; each follow-up waits 60s/30 = 2s
  REQUIRE(pauses.size() == 2);
  CHECK(pauses[0] == std::chrono::milliseconds(2000));
  CHECK(pauses[1] == std::chrono::milliseconds(2000));
}

TEST_CASE("http errors are retryable fetch errors") {
  MockTransport http;
  http.responses = {{503, "busy"}};
  try {
    corpus::fetch_subreddit(config_for(10), http, no_sleep());
    FAIL("expected FetchError");
  } catch (const FetchError& e) {
    CHECK(e.status() == 503);
    CHECK(e.retryable());
  }
}

TEST_CASE("schema violations are parse errors") {
  auto expect_parse_error = [](const std::string& body) {
    MockTransport http;
    http.responses = {{200, body}};
    auto config = config_for(10);
    CHECK_THROWS_AS(corpus::fetch_subreddit(config, http, no_sleep()),
                    ParseError);
  };
  expect_parse_error("not json at all");
  expect_parse_error("{}");
  expect_parse_error("{\"data\":{}}");
  expect_parse_error("{\"data\":{\"children\":[{\"nope\":1}],\"after\":null}}");
  // child record missing created_utc
  expect_parse_error(
      "{\"data\":{\"children\":[{\"data\":{\"id\":\"x\",\"author\":\"a\"}}],"
      "\"after\":null}}");
}

TEST_CASE("comment records use body and inherit the subreddit") {
  MockTransport http;
  http.responses = {
      {200,
       "{\"data\":{\"children\":[{\"data\":{\"id\":\"c1\",\"author\":\"a\","
       "\"created_utc\":1,\"parent_id\":\"t3_x\",\"body\":\"a comment\"}}],"
       "\"after\":null}}"}};
  auto posts = corpus::fetch_subreddit(config_for(10), http, no_sleep());
  REQUIRE(posts.size() == 1);
  CHECK(posts[0].body == "a comment");
  CHECK(posts[0].parent_id == std::optional<std::string>("t3_x"));
  CHECK(posts[0].subreddit == "opiates");  // fallback to the requested sub
  CHECK_FALSE(posts[0].title.has_value());
}

TEST_CASE("config validation") {
  MockTransport http;
  auto bad = config_for(10);
  bad.base_url = "";
  CHECK_THROWS_AS(corpus::fetch_subreddit(bad, http, no_sleep()),
                  std::invalid_argument);

  bad = config_for(0);
  CHECK_THROWS_AS(corpus::fetch_subreddit(bad, http, no_sleep()),
                  std::invalid_argument);
  bad = config_for(1001);
  CHECK_THROWS_AS(corpus::fetch_subreddit(bad, http, no_sleep()),
                  std::invalid_argument);

  bad = config_for(10, 0);
  CHECK_THROWS_AS(corpus::fetch_subreddit(bad, http, no_sleep()),
                  std::invalid_argument);

  bad = config_for(10);
  bad.subreddit = "";
  CHECK_THROWS_AS(corpus::fetch_subreddit(bad, http, no_sleep()),
                  std::invalid_argument);
  CHECK(http.calls.empty());  // validation happens before any request
}
