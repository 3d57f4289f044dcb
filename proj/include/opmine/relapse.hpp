#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "opmine/corpus.hpp"

namespace opmine::relapse {

enum class EventKind { kPost, kOpioidUseSignal, kRecoverySignal };

std::string to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view token);

struct TimelineEvent {
  std::string author;
  std::int64_t timestamp = 0;  // seconds
  EventKind kind = EventKind::kPost;

  bool operator==(const TimelineEvent&) const = default;
};

// CSV with header `author,timestamp,kind`.
std::vector<TimelineEvent> load_events(std::istream& in);
std::vector<TimelineEvent> load_events_file(const std::string& path);

std::map<std::string, std::vector<TimelineEvent>> group_events(
    const std::vector<TimelineEvent>& events);

// Relapsed iff an opioid_use_signal falls inside the inclusive window
// [latest_post - window_days * 86400, latest_post]. Needs >= 1 post event.
corpus::Label label_relapse(const std::vector<TimelineEvent>& events,
                            std::int64_t window_days = 50);

using LabelSets = std::map<std::string, std::set<corpus::Label>>;

LabelSets combine_labels(const std::vector<corpus::LabelMap>& maps);

struct CohortBreakdown {
  std::int64_t total = 0;
  std::int64_t oud = 0;
  std::int64_t non_oud = 0;
  std::int64_t recovering = 0;
  std::int64_t non_recovering = 0;
  std::int64_t relapsed = 0;
  std::int64_t clean = 0;
  double oud_fraction = 0.0;
  double non_oud_fraction = 0.0;
  double recovering_fraction = 0.0;      // of stage-2 labeled OUD authors
  double non_recovering_fraction = 0.0;
  double relapsed_fraction = 0.0;        // of relapse-labeled recovering authors
  double clean_fraction = 0.0;

  bool operator==(const CohortBreakdown&) const = default;
};

// Every author needs exactly one of oud/non_oud. Deeper labels are optional
// but must stay on the right branch: recovering/non_recovering only on oud
// authors, relapsed/clean only on recovering authors, and never both
// members of a pair.
CohortBreakdown cohort_breakdown(const LabelSets& labels);

// Percentages at one decimal place; a branch line appears only when some
// author carries that pair of labels.
std::string render_breakdown(const CohortBreakdown& breakdown);

}  // namespace opmine::relapse
