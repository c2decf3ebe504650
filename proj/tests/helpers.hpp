#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "courtphase/ingest.hpp"
#include "courtphase/segment.hpp"

namespace testing {

inline courtphase::Frame make_frame(std::int64_t t, const std::vector<std::pair<std::string, courtphase::Position>>& players,
                                    int period = 1, bool contiguous = true) {
  courtphase::Frame f;
  f.timestamp_ms = t;
  f.period = period;
  f.contiguous = contiguous;
  for (const auto& [id, pos] : players) f.players[id] = pos;
  return f;
}

inline courtphase::Lineup lineup_p(int a, int b, int c, int d, int e) {
  courtphase::Lineup l{"p" + std::to_string(a), "p" + std::to_string(b), "p" + std::to_string(c),
                       "p" + std::to_string(d), "p" + std::to_string(e)};
  std::sort(l.begin(), l.end());
  return l;
}

// Frames on a grid where the listed players stand still at fixed spots.
inline void append_frames(courtphase::FrameSeries& s, std::int64_t from_ms, std::int64_t count,
                          const std::vector<std::string>& ids) {
  for (std::int64_t i = 0; i < count; ++i) {
    courtphase::Frame f;
    f.timestamp_ms = from_ms + i * s.grid_ms;
    f.period = 1;
    f.contiguous = !s.frames.empty() && s.frames.back().timestamp_ms == f.timestamp_ms - s.grid_ms;
    double x = 0.0;
    for (const auto& id : ids) f.players[id] = {x += 100.0, 0.0};
    s.frames.push_back(std::move(f));
  }
}

inline std::vector<courtphase::GameEvent> basic_events(std::int64_t pre_end, std::int64_t post_start,
                                                       std::int64_t post_end) {
  using courtphase::EventKind;
  return {{EventKind::PreMatch, 0, pre_end, std::nullopt},
          {EventKind::PeriodStart, pre_end, post_start, 1},
          {EventKind::PostMatch, post_start, post_end, std::nullopt}};
}

}  // namespace testing
