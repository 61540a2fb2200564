#include "agglo/event_log.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <variant>

#include "agglo/error.hpp"

namespace agglo {

std::set<Activity> EventLog::alphabet() const {
  std::set<Activity> out;
  for (const auto& trace : traces_) out.insert(trace.begin(), trace.end());
  return out;
}

std::size_t EventLog::max_trace_length() const {
  std::size_t n = 0;
  for (const auto& trace : traces_) n = std::max(n, trace.size());
  return n;
}

bool EventLog::has_empty_trace() const {
  return std::any_of(traces_.begin(), traces_.end(),
                     [](const Trace& t) { return t.empty(); });
}

bool EventLog::same_multiset(const EventLog& other) const {
  if (traces_.size() != other.traces_.size()) return false;
  auto a = traces_;
  auto b = other.traces_;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

void validate(const EventLog& log) {
  for (std::size_t i = 0; i < log.traces().size(); ++i) {
    for (const auto& activity : log.traces()[i]) {
      if (activity.empty()) {
        throw ValidationError("trace " + std::to_string(i + 1) + ": empty activity name");
      }
      if (is_reserved(activity)) {
        throw ValidationError("trace " + std::to_string(i + 1) + ": reserved symbol '" +
                              activity + "'");
      }
    }
  }
}

EventLog expand_sentinels(const EventLog& log) {
  validate(log);
  std::vector<Trace> out;
  out.reserve(log.size());
  for (const auto& trace : log.traces()) {
    Trace t;
    t.reserve(trace.size() + 2);
    t.emplace_back(kBegin);
    t.insert(t.end(), trace.begin(), trace.end());
    t.emplace_back(kEnd);
    out.push_back(std::move(t));
  }
  return EventLog(std::move(out));
}

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

EventLog parse_traces_text(std::string_view text, const TextFormat& format) {
  EventLog log;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty()) continue;
    Trace trace;
    if (format.delimiter) {
      std::size_t start = 0;
      while (true) {
        auto pos = line.find(*format.delimiter, start);
        auto field = trim(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start));
        if (field.empty()) {
          throw FormatError("line " + std::to_string(i + 1) + ": empty activity");
        }
        trace.emplace_back(field);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
      }
    } else {
      std::size_t pos = 0;
      while (pos < line.size()) {
        while (pos < line.size() && is_space(line[pos])) ++pos;
        auto start = pos;
        while (pos < line.size() && !is_space(line[pos])) ++pos;
        if (pos > start) trace.emplace_back(line.substr(start, pos - start));
      }
    }
    for (const auto& a : trace) {
      if (is_reserved(a)) {
        throw ValidationError("line " + std::to_string(i + 1) + ": reserved symbol '" + a + "'");
      }
    }
    log.add(std::move(trace));
  }
  return log;
}

std::string write_traces_text(const EventLog& log, const TextFormat& format) {
  std::string out;
  const std::string sep = format.delimiter ? std::string(1, *format.delimiter) : " ";
  for (const auto& trace : log.traces()) {
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (i) out += sep;
      out += trace[i];
    }
    out += '\n';
  }
  return out;
}

namespace {

// RFC 4180 style: quoted fields may contain commas, newlines and "" escapes.
struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

std::vector<CsvRow> read_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  row.line = line;
  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    bool blank = row.fields.size() == 1 && row.fields[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row = CsvRow{};
    row.line = line;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) throw FormatError("line " + std::to_string(line) + ": stray quote");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        row.line = line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw FormatError("line " + std::to_string(line) + ": unterminated quote");
  if (field_started || !field.empty() || !row.fields.empty()) end_row();
  // strip a UTF-8 BOM from the header
  if (!rows.empty() && !rows[0].fields.empty() && rows[0].fields[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    rows[0].fields[0].erase(0, 3);
  }
  return rows;
}

std::optional<int> read_int(std::string_view s, std::size_t& pos, std::size_t digits) {
  if (pos + digits > s.size()) return std::nullopt;
  int value = 0;
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + digits, value);
  if (ec != std::errc{} || p != s.data() + pos + digits) return std::nullopt;
  pos += digits;
  return value;
}

// RFC 3339 / ISO 8601: YYYY-MM-DD[(T| )hh:mm[:ss[.frac]]][Z|(+|-)hh:mm]
// Result is nanoseconds since the epoch in UTC.
std::optional<long long> parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  s = trim(s);
  std::size_t pos = 0;
  auto y = read_int(s, pos, 4);
  if (!y || pos >= s.size() || s[pos++] != '-') return std::nullopt;
  auto mo = read_int(s, pos, 2);
  if (!mo || pos >= s.size() || s[pos++] != '-') return std::nullopt;
  auto d = read_int(s, pos, 2);
  if (!d) return std::nullopt;
  year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  long long ns = duration_cast<nanoseconds>(sys_days{ymd}.time_since_epoch()).count();
  if (pos == s.size()) return ns;
  if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return std::nullopt;
  ++pos;
  auto hh = read_int(s, pos, 2);
  if (!hh || pos >= s.size() || s[pos++] != ':') return std::nullopt;
  auto mm = read_int(s, pos, 2);
  if (!mm || *hh > 23 || *mm > 59) return std::nullopt;
  int ss = 0;
  long long frac_ns = 0;
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    auto sec = read_int(s, pos, 2);
    if (!sec || *sec > 60) return std::nullopt;
    ss = *sec;
    if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
      ++pos;
      long long scale = 100000000;
      std::size_t start = pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        frac_ns += (s[pos] - '0') * scale;
        scale /= 10;
        ++pos;
      }
      if (pos == start) return std::nullopt;
    }
  }
  ns += ((static_cast<long long>(*hh) * 60 + *mm) * 60 + ss) * 1000000000LL + frac_ns;
  if (pos == s.size()) return ns;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    return pos + 1 == s.size() ? std::optional<long long>(ns) : std::nullopt;
  }
  if (s[pos] != '+' && s[pos] != '-') return std::nullopt;
  int sign = s[pos] == '+' ? 1 : -1;
  ++pos;
  auto oh = read_int(s, pos, 2);
  if (!oh || pos >= s.size() || s[pos++] != ':') return std::nullopt;
  auto om = read_int(s, pos, 2);
  if (!om || pos != s.size()) return std::nullopt;
  ns -= sign * ((static_cast<long long>(*oh) * 60 + *om) * 60) * 1000000000LL;
  return ns;
}

std::size_t column_index(const CsvRow& header, const std::string& name) {
  auto it = std::find(header.fields.begin(), header.fields.end(), name);
  if (it == header.fields.end()) throw FormatError("missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.fields.begin());
}

}  // namespace

EventLog parse_csv(std::string_view text, const CsvConfig& config) {
  auto rows = read_csv(text);
  if (rows.empty()) throw EmptyLogError("empty CSV file");
  const auto& header = rows.front();
  auto case_col = column_index(header, config.case_column);
  auto act_col = column_index(header, config.activity_column);
  std::optional<std::size_t> ts_col;
  if (config.timestamp_column) ts_col = column_index(header, *config.timestamp_column);

  // Timestamps order as instants when every one parses; lenient mode falls
  // back to the raw strings for the whole file.
  using Key = std::variant<long long, std::string>;
  struct Event {
    Key key;
    std::size_t row;
    std::string activity;
  };
  std::vector<std::string> case_order;
  std::unordered_map<std::string, std::vector<Event>> cases;
  bool lexicographic = false;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto need = std::max({case_col, act_col, ts_col.value_or(0)});
    if (row.fields.size() <= need) {
      throw FormatError("row " + std::to_string(r) + " (line " + std::to_string(row.line) +
                        "): expected at least " + std::to_string(need + 1) + " fields");
    }
    const auto& case_id = row.fields[case_col];
    const auto& activity = row.fields[act_col];
    if (activity.empty()) throw FormatError("row " + std::to_string(r) + ": empty activity");
    if (is_reserved(activity)) {
      throw ValidationError("row " + std::to_string(r) + ": reserved symbol '" + activity + "'");
    }
    Key key = 0LL;
    if (ts_col) {
      const auto& raw = row.fields[*ts_col];
      auto parsed = parse_timestamp(raw);
      if (parsed) {
        key = *parsed;
      } else if (config.lenient_timestamps) {
        if (!lexicographic) {
          std::clog << "warning: row " << r << ": timestamp '" << raw
                    << "' is not RFC 3339; ordering timestamps as strings\n";
        }
        lexicographic = true;
        key = raw;
      } else {
        throw FormatError("row " + std::to_string(r) + ": unparsable timestamp '" + raw + "'");
      }
    }
    auto [it, inserted] = cases.try_emplace(case_id);
    if (inserted) case_order.push_back(case_id);
    it->second.push_back(Event{std::move(key), r, activity});
  }
  if (case_order.empty()) throw EmptyLogError("CSV file has no events");

  EventLog log;
  for (const auto& id : case_order) {
    auto& events = cases[id];
    if (ts_col) {
      if (lexicographic) {
        const auto& raw_rows = rows;
        auto raw = [&](const Event& e) -> const std::string& { return raw_rows[e.row].fields[*ts_col]; };
        std::stable_sort(events.begin(), events.end(),
                         [&](const Event& a, const Event& b) { return raw(a) < raw(b); });
      } else {
        std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
          return std::get<long long>(a.key) < std::get<long long>(b.key);
        });
      }
    }
    Trace trace;
    trace.reserve(events.size());
    for (auto& e : events) trace.push_back(std::move(e.activity));
    log.add(std::move(trace));
  }
  return log;
}

EventLog load_log(const std::string& path, const std::string& format, const CsvConfig& csv,
                  const TextFormat& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open log file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (format == "csv") return parse_csv(buf.str(), csv);
  if (format == "text") return parse_traces_text(buf.str(), text);
  throw UsageError("unknown log format '" + format + "' (expected text or csv)");
}

}  // namespace agglo
