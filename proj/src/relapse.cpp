#include "opmine/relapse.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "opmine/errors.hpp"

namespace opmine::relapse {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", fraction * 100.0);
  return buf;
}

bool has(const std::set<corpus::Label>& labels, corpus::Label label) {
  return labels.count(label) > 0;
}

}  // namespace

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kPost: return "post";
    case EventKind::kOpioidUseSignal: return "opioid_use_signal";
    case EventKind::kRecoverySignal: return "recovery_signal";
  }
  return "post";
}

std::optional<EventKind> parse_event_kind(std::string_view token) {
  if (token == "post") return EventKind::kPost;
  if (token == "opioid_use_signal") return EventKind::kOpioidUseSignal;
  if (token == "recovery_signal") return EventKind::kRecoverySignal;
  return std::nullopt;
}

std::vector<TimelineEvent> load_events(std::istream& in) {
  std::vector<TimelineEvent> events;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "author,timestamp,kind") {
        throw ParseError("expected header author,timestamp,kind", line_no);
      }
      saw_header = true;
      continue;
    }
    auto fields = split_csv_row(line);
    if (fields.size() != 3) {
      throw ParseError("expected 3 fields", line_no);
    }
    if (fields[0].empty()) {
      throw ParseError("author is empty", line_no);
    }
    std::int64_t timestamp = 0;
    try {
      std::size_t consumed = 0;
      timestamp = std::stoll(fields[1], &consumed);
      if (consumed != fields[1].size()) {
        throw std::invalid_argument("trailing characters");
      }
    } catch (const std::exception&) {
      throw ParseError("timestamp is not an integer: " + fields[1], line_no);
    }
    if (timestamp < 0) {
      throw ParseError("timestamp is negative", line_no);
    }
    auto kind = parse_event_kind(fields[2]);
    if (!kind) {
      throw ParseError("unknown event kind: " + fields[2], line_no);
    }
    events.push_back({fields[0], timestamp, *kind});
  }
  if (!saw_header) {
    throw ParseError("events file is empty", line_no == 0 ? 1 : line_no);
  }
  return events;
}

std::vector<TimelineEvent> load_events_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open events file: " + path);
  }
  return load_events(in);
}

std::map<std::string, std::vector<TimelineEvent>> group_events(
    const std::vector<TimelineEvent>& events) {
  std::map<std::string, std::vector<TimelineEvent>> grouped;
  for (const TimelineEvent& event : events) {
    grouped[event.author].push_back(event);
  }
  return grouped;
}

corpus::Label label_relapse(const std::vector<TimelineEvent>& events,
                            std::int64_t window_days) {
  if (window_days < 0) {
    throw std::invalid_argument("window_days must be non-negative");
  }
  std::int64_t latest_post = -1;
  for (const TimelineEvent& event : events) {
    if (event.kind == EventKind::kPost) {
      latest_post = std::max(latest_post, event.timestamp);
    }
  }
  if (latest_post < 0) {
    throw std::invalid_argument("author has no post events");
  }
  const std::int64_t window_start = latest_post - window_days * kSecondsPerDay;
  for (const TimelineEvent& event : events) {
    if (event.kind == EventKind::kOpioidUseSignal &&
        event.timestamp >= window_start && event.timestamp <= latest_post) {
      return corpus::Label::kRelapsed;
    }
  }
  return corpus::Label::kClean;
}

LabelSets combine_labels(const std::vector<corpus::LabelMap>& maps) {
  LabelSets combined;
  for (const corpus::LabelMap& map : maps) {
    for (const auto& [author, label] : map) {
      combined[author].insert(label);
    }
  }
  return combined;
}

CohortBreakdown cohort_breakdown(const LabelSets& labels) {
  if (labels.empty()) {
    throw std::invalid_argument("cohort breakdown needs at least one author");
  }
  CohortBreakdown b;
  using corpus::Label;
  for (const auto& [author, set] : labels) {
    bool oud = has(set, Label::kOud);
    bool non_oud = has(set, Label::kNonOud);
    bool recovering = has(set, Label::kRecovering);
    bool non_recovering = has(set, Label::kNonRecovering);
    bool relapsed = has(set, Label::kRelapsed);
    bool clean = has(set, Label::kClean);

    if (oud == non_oud) {
      throw std::invalid_argument("author " + author +
                                  " needs exactly one of oud/non_oud");
    }
    if (recovering && non_recovering) {
      throw std::invalid_argument(
          "author " + author + " is both recovering and non_recovering");
    }
    if ((recovering || non_recovering) && !oud) {
      throw std::invalid_argument("author " + author +
                                  " has a recovery label without oud");
    }
    if (relapsed && clean) {
      throw std::invalid_argument("author " + author +
                                  " is both relapsed and clean");
    }
    if ((relapsed || clean) && !recovering) {
      throw std::invalid_argument(
          "author " + author + " has a relapse label without recovering");
    }

    ++b.total;
    if (oud) ++b.oud; else ++b.non_oud;
    if (recovering) ++b.recovering;
    if (non_recovering) ++b.non_recovering;
    if (relapsed) ++b.relapsed;
    if (clean) ++b.clean;
  }

  if (b.total > 0) {
    b.oud_fraction = static_cast<double>(b.oud) / static_cast<double>(b.total);
    b.non_oud_fraction =
        static_cast<double>(b.non_oud) / static_cast<double>(b.total);
  }
  if (b.recovering + b.non_recovering > 0) {
    auto denom = static_cast<double>(b.recovering + b.non_recovering);
    b.recovering_fraction = static_cast<double>(b.recovering) / denom;
    b.non_recovering_fraction = static_cast<double>(b.non_recovering) / denom;
  }
  if (b.relapsed + b.clean > 0) {
    auto denom = static_cast<double>(b.relapsed + b.clean);
    b.relapsed_fraction = static_cast<double>(b.relapsed) / denom;
    b.clean_fraction = static_cast<double>(b.clean) / denom;
  }
  return b;
}

std::string render_breakdown(const CohortBreakdown& b) {
  std::string out;
  out += "authors: " + std::to_string(b.total) + "\n";
  out += "oud: " + std::to_string(b.oud) + " (" + percent(b.oud_fraction) +
         "), non_oud: " + std::to_string(b.non_oud) + " (" +
         percent(b.non_oud_fraction) + ")\n";
  if (b.recovering + b.non_recovering > 0) {
    out += "recovering: " + std::to_string(b.recovering) + " (" +
           percent(b.recovering_fraction) +
           "), non_recovering: " + std::to_string(b.non_recovering) + " (" +
           percent(b.non_recovering_fraction) + ")\n";
  }
  if (b.relapsed + b.clean > 0) {
    out += "relapsed: " + std::to_string(b.relapsed) + " (" +
           percent(b.relapsed_fraction) +
           "), clean: " + std::to_string(b.clean) + " (" +
           percent(b.clean_fraction) + ")\n";
  }
  return out;
}

}  // namespace opmine::relapse
