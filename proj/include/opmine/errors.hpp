#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace opmine {

// Malformed input data (corpus lines, label rows, lexicon rows, ...).
// `line` is 1-based when known, 0 otherwise.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg, std::size_t line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg
                                    : msg),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Remote fetch failure. Retryable errors (rate limits, server hiccups) may be
// reissued by the caller; schema errors may not.
class FetchError : public std::runtime_error {
 public:
  FetchError(const std::string& msg, int status, bool retryable)
      : std::runtime_error(msg), status_(status), retryable_(retryable) {}

  int status() const { return status_; }
  bool retryable() const { return retryable_; }

 private:
  int status_;
  bool retryable_;
};

// Optimization blew up (non-finite loss). Carries the epoch it happened in.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& msg, int epoch)
      : std::runtime_error(msg + " (epoch " + std::to_string(epoch) + ")"),
        epoch_(epoch) {}

  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

}  // namespace opmine
