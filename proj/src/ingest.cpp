#include "courtphase/ingest.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "courtphase/error.hpp"
#include "text.hpp"

namespace courtphase {

namespace {

constexpr const char* kModule = "ingest";

constexpr std::array<std::pair<EventKind, std::string_view>, 7> kEventNames{{
    {EventKind::PreMatch, "PRE_MATCH"},
    {EventKind::QuarterBreak, "QUARTER_BREAK"},
    {EventKind::HalfBreak, "HALF_BREAK"},
    {EventKind::PostMatch, "POST_MATCH"},
    {EventKind::Timeout, "TIMEOUT"},
    {EventKind::FreeThrow, "FREE_THROW"},
    {EventKind::PeriodStart, "PERIOD_START"},
}};

bool is_exclusion(EventKind kind) { return kind != EventKind::PeriodStart; }

std::vector<TimeInterval> merge(std::vector<TimeInterval> intervals) {
  std::sort(intervals.begin(), intervals.end(), [](const auto& a, const auto& b) {
    return a.start_ms != b.start_ms ? a.start_ms < b.start_ms : a.end_ms < b.end_ms;
  });
  std::vector<TimeInterval> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && iv.start_ms <= merged.back().end_ms) {
      merged.back().end_ms = std::max(merged.back().end_ms, iv.end_ms);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kEventNames)
    if (k == kind) return name;
  return "UNKNOWN";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (const auto& [k, name] : kEventNames)
    if (name == text) return k;
  return std::nullopt;
}

GameTimeline::GameTimeline(std::span<const GameEvent> events) {
  std::vector<TimeInterval> excluded;
  for (const auto& e : events) {
    if (is_exclusion(e.kind)) {
      excluded.push_back({e.start_ms, e.end_ms});
    } else {
      period_starts_.emplace_back(e.start_ms, e.period_index.value_or(0));
    }
  }
  excluded_ = merge(std::move(excluded));
  std::sort(period_starts_.begin(), period_starts_.end());
}

bool GameTimeline::is_excluded(std::int64_t t) const {
  auto it = std::upper_bound(excluded_.begin(), excluded_.end(), t,
                             [](std::int64_t v, const TimeInterval& iv) { return v < iv.start_ms; });
  if (it == excluded_.begin()) return false;
  return std::prev(it)->contains(t);
}

int GameTimeline::period_at(std::int64_t t) const {
  auto it = std::upper_bound(period_starts_.begin(), period_starts_.end(), t,
                             [](std::int64_t v, const auto& p) { return v < p.first; });
  if (it == period_starts_.begin()) return 0;
  return std::prev(it)->second;
}

TrackingParse parse_tracking(std::istream& in, const TrackingSchema& schema) {
  std::string line;
  if (!text::next_line(in, line)) throw data_error(kModule, "tracking file is empty");
  const text::Header header(line);

  auto require = [&](const std::string& name) {
    auto idx = header.find(name);
    if (!idx) throw data_error(kModule, "tracking file is missing required column '" + name + "'");
    return *idx;
  };
  const auto ts_col = require(schema.timestamp_column);
  const auto id_col = require(schema.player_column);
  const auto x_col = require(schema.x_column);
  const auto y_col = require(schema.y_column);
  const auto z_col = header.find(schema.z_column);

  const int dx = schema.origin == CoordinateOrigin::Corner ? kCourtHalfLengthCm : 0;
  const int dy = schema.origin == CoordinateOrigin::Corner ? kCourtHalfWidthCm : 0;

  TrackingParse result;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    ++result.rows;
    const auto cols = text::split(line);
    if (cols.size() < header.width()) {
      ++result.malformed;
      continue;
    }
    const auto ts = text::parse_int<std::int64_t>(cols[ts_col]);
    const auto x = text::parse_int<int>(cols[x_col]);
    const auto y = text::parse_int<int>(cols[y_col]);
    std::optional<int> z;
    bool z_ok = true;
    if (z_col && !cols[*z_col].empty()) {
      z = text::parse_int<int>(cols[*z_col]);
      z_ok = z.has_value();
    }
    if (!ts || *ts < 0 || !x || !y || !z_ok || cols[id_col].empty()) {
      ++result.malformed;
      continue;
    }
    const int xn = *x - dx;
    const int yn = *y - dy;
    if (std::abs(xn) > kMaxAbsXCm || std::abs(yn) > kMaxAbsYCm) {
      ++result.malformed;
      continue;
    }
    result.samples.push_back({*ts, std::string(cols[id_col]), xn, yn, z});
  }

  if (result.rows > 0 &&
      static_cast<double>(result.malformed) >
          schema.malformed_tolerance * static_cast<double>(result.rows)) {
    throw data_error(kModule, std::to_string(result.malformed) + " of " +
                                  std::to_string(result.rows) +
                                  " tracking rows are malformed, above tolerance");
  }
  return result;
}

std::vector<GameEvent> parse_events(std::istream& in) {
  std::string line;
  if (!text::next_line(in, line)) throw data_error(kModule, "events file is empty");
  const text::Header header(line);
  auto require = [&](const std::string& name) {
    auto idx = header.find(name);
    if (!idx) throw data_error(kModule, "events file is missing required column '" + name + "'");
    return *idx;
  };
  const auto kind_col = require("kind");
  const auto start_col = require("start_ms");
  const auto end_col = require("end_ms");
  const auto period_col = header.find("period_index");

  std::vector<GameEvent> events;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (text::trim(line).empty()) continue;
    const auto cols = text::split(line);
    const auto where = " (events row " + std::to_string(row) + ")";
    if (cols.size() < header.width()) throw data_error(kModule, "short row" + where);
    const auto kind = parse_event_kind(cols[kind_col]);
    if (!kind) throw data_error(kModule, "unknown event kind '" + std::string(cols[kind_col]) + "'" + where);
    const auto start = text::parse_int<std::int64_t>(cols[start_col]);
    const auto end = text::parse_int<std::int64_t>(cols[end_col]);
    if (!start || !end) throw data_error(kModule, "non-integer interval" + where);
    GameEvent e{*kind, *start, *end, std::nullopt};
    if (period_col && !cols[*period_col].empty()) {
      e.period_index = text::parse_int<int>(cols[*period_col]);
      if (!e.period_index) throw data_error(kModule, "non-integer period_index" + where);
    }
    if (e.kind == EventKind::PeriodStart) {
      if (!e.period_index || *e.period_index < 1)
        throw data_error(kModule, "PERIOD_START needs a positive period_index" + where);
      if (e.end_ms < e.start_ms) throw data_error(kModule, "end_ms before start_ms" + where);
    } else if (e.start_ms >= e.end_ms) {
      throw data_error(kModule, "interval event needs start_ms < end_ms" + where);
    }
    events.push_back(e);
  }

  // Same-kind intervals must not overlap.
  for (const auto& [kind, name] : kEventNames) {
    if (kind == EventKind::PeriodStart) continue;
    std::vector<TimeInterval> same;
    for (const auto& e : events)
      if (e.kind == kind) same.push_back({e.start_ms, e.end_ms});
    std::sort(same.begin(), same.end(),
              [](const auto& a, const auto& b) { return a.start_ms < b.start_ms; });
    for (std::size_t i = 1; i < same.size(); ++i)
      if (same[i].start_ms < same[i - 1].end_ms)
        throw data_error(kModule, "overlapping " + std::string(name) + " intervals");
  }
  return events;
}

std::vector<RawSample> filter_active(std::span<const RawSample> samples,
                                     std::span<const GameEvent> events) {
  auto has = [&](EventKind kind) {
    return std::any_of(events.begin(), events.end(), [&](const auto& e) { return e.kind == kind; });
  };
  if (!has(EventKind::PeriodStart))
    throw data_error(kModule, "events contain no PERIOD_START; attack direction cannot be resolved");
  if (!has(EventKind::PreMatch) || !has(EventKind::PostMatch))
    throw data_error(kModule, "events must include PRE_MATCH and POST_MATCH boundaries");

  const GameTimeline timeline(events);
  std::vector<RawSample> kept;
  kept.reserve(samples.size());
  for (const auto& s : samples)
    if (!timeline.is_excluded(s.timestamp_ms)) kept.push_back(s);
  return kept;
}

FrameSeries resample_frames(std::span<const RawSample> samples, const ResampleOptions& options,
                            const GameTimeline& timeline) {
  if (options.grid_ms < 1) throw config_error(kModule, "grid_ms must be >= 1");
  if (options.staleness_ms < options.grid_ms)
    throw config_error(kModule, "staleness_ms must be >= grid_ms");

  FrameSeries series;
  series.grid_ms = options.grid_ms;
  if (samples.empty()) return series;

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return samples[a].timestamp_ms < samples[b].timestamp_ms;
  });

  const std::int64_t grid = options.grid_ms;
  const std::int64_t first_ts = samples[order.front()].timestamp_ms;
  const std::int64_t last_ts = samples[order.back()].timestamp_ms;
  const std::int64_t first_tick = -floor_div(-first_ts, grid) * grid;

  struct Observation {
    std::int64_t timestamp_ms;
    Position position;
  };
  std::map<std::string, Observation> latest;

  const auto& excluded = timeline.excluded();
  std::size_t next_sample = 0;
  std::size_t next_gap = 0;
  // Observations older than the end of the most recent excluded interval are
  // never carried across it.
  std::int64_t floor_ms = INT64_MIN;
  std::optional<std::int64_t> prev_tick;
  std::int64_t prev_floor = INT64_MIN;

  for (std::int64_t tick = first_tick; tick <= last_ts; tick += grid) {
    while (next_sample < order.size() && samples[order[next_sample]].timestamp_ms <= tick) {
      const auto& s = samples[order[next_sample]];
      latest[s.player_id] = {s.timestamp_ms, {static_cast<double>(s.x_cm), static_cast<double>(s.y_cm)}};
      ++next_sample;
    }
    while (next_gap < excluded.size() && excluded[next_gap].end_ms <= tick) {
      floor_ms = excluded[next_gap].end_ms;
      ++next_gap;
    }
    if (next_gap < excluded.size() && excluded[next_gap].contains(tick)) continue;

    Frame frame;
    frame.timestamp_ms = tick;
    frame.period = timeline.period_at(tick);
    for (const auto& [id, obs] : latest) {
      if (obs.timestamp_ms < floor_ms) continue;
      if (tick - obs.timestamp_ms > options.staleness_ms) continue;
      frame.players.emplace(id, obs.position);
    }
    if (frame.players.empty()) continue;

    frame.contiguous = prev_tick && *prev_tick == tick - grid && prev_floor == floor_ms;
    prev_tick = tick;
    prev_floor = floor_ms;
    series.frames.push_back(std::move(frame));
  }
  return series;
}

void write_frames_csv(std::ostream& out, const FrameSeries& series) {
  out << "frame_ms,period,contiguous,player_id,x_cm,y_cm\n";
  for (const auto& f : series.frames) {
    for (const auto& [id, p] : f.players) {
      out << f.timestamp_ms << ',' << f.period << ',' << (f.contiguous ? 1 : 0) << ',' << id << ','
          << text::format_double(p.x_cm) << ',' << text::format_double(p.y_cm) << '\n';
    }
  }
}

FrameSeries read_frames_csv(std::istream& in) {
  std::string line;
  if (!text::next_line(in, line)) throw data_error(kModule, "frames file is empty");
  const text::Header header(line);
  std::array<std::size_t, 6> cols{};
  const std::array<const char*, 6> names{"frame_ms", "period", "contiguous", "player_id", "x_cm", "y_cm"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto idx = header.find(names[i]);
    if (!idx) throw data_error(kModule, std::string("frames file is missing column '") + names[i] + "'");
    cols[i] = *idx;
  }

  FrameSeries series;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (text::trim(line).empty()) continue;
    const auto f = text::split(line);
    const auto where = " (frames row " + std::to_string(row) + ")";
    if (f.size() < header.width()) throw data_error(kModule, "short row" + where);
    const auto ts = text::parse_int<std::int64_t>(f[cols[0]]);
    const auto period = text::parse_int<int>(f[cols[1]]);
    const auto contiguous = text::parse_int<int>(f[cols[2]]);
    const auto x = text::parse_double(f[cols[4]]);
    const auto y = text::parse_double(f[cols[5]]);
    if (!ts || !period || !contiguous || !x || !y || f[cols[3]].empty())
      throw data_error(kModule, "malformed row" + where);
    if (series.frames.empty() || series.frames.back().timestamp_ms != *ts) {
      if (!series.frames.empty() && series.frames.back().timestamp_ms > *ts)
        throw data_error(kModule, "frame timestamps are not increasing" + where);
      Frame frame;
      frame.timestamp_ms = *ts;
      frame.period = *period;
      frame.contiguous = *contiguous != 0;
      series.frames.push_back(std::move(frame));
    }
    series.frames.back().players[std::string(f[cols[3]])] = {*x, *y};
  }

  // The grid is the gcd of the spacing between adjacent frames.
  std::int64_t grid = 0;
  for (std::size_t i = 1; i < series.frames.size(); ++i)
    grid = std::gcd(grid, series.frames[i].timestamp_ms - series.frames[i - 1].timestamp_ms);
  series.grid_ms = grid > 0 ? grid : 50;
  return series;
}

}  // namespace courtphase
