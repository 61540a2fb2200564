#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace agglo {

using Activity = std::string;
using Trace = std::vector<Activity>;

inline constexpr std::string_view kBegin = "^";
inline constexpr std::string_view kEnd = "$";

inline bool is_reserved(std::string_view activity) {
  return activity == kBegin || activity == kEnd;
}

// A bag of traces. Order of traces is the order they were read; duplicates
// are kept. The log itself does not enforce the absence of sentinels so that
// expand_sentinels() can return the same type; call validate() at the
// boundaries that need a user-level log.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(std::vector<Trace> traces) : traces_(std::move(traces)) {}

  const std::vector<Trace>& traces() const { return traces_; }
  std::size_t size() const { return traces_.size(); }
  bool empty() const { return traces_.empty(); }

  void add(Trace trace) { traces_.push_back(std::move(trace)); }

  std::set<Activity> alphabet() const;
  std::size_t max_trace_length() const;
  bool has_empty_trace() const;

  // Same multiset of traces, ignoring order.
  bool same_multiset(const EventLog& other) const;

 private:
  std::vector<Trace> traces_;
};

// Throws ValidationError if any trace contains an empty name or a reserved
// sentinel symbol.
void validate(const EventLog& log);

// <a1..ak> -> <^ a1..ak $>. Rejects logs that already contain sentinels.
EventLog expand_sentinels(const EventLog& log);

struct TextFormat {
  // Unset means "any run of whitespace".
  std::optional<char> delimiter;
};

// One trace per non-empty line.
EventLog parse_traces_text(std::string_view text, const TextFormat& format = {});
std::string write_traces_text(const EventLog& log, const TextFormat& format = {});

struct CsvConfig {
  std::string case_column = "case";
  std::string activity_column = "activity";
  std::optional<std::string> timestamp_column;
  // When set, unparsable timestamps are compared as plain strings (with a
  // warning on std::clog) instead of raising FormatError.
  bool lenient_timestamps = false;
};

EventLog parse_csv(std::string_view text, const CsvConfig& config = {});

// Reads a file and dispatches on `format` ("text" or "csv").
EventLog load_log(const std::string& path, const std::string& format,
                  const CsvConfig& csv = {}, const TextFormat& text = {});

}  // namespace agglo
