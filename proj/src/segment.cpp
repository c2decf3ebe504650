#include "courtphase/segment.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "courtphase/error.hpp"
#include "text.hpp"

namespace courtphase {

namespace {
constexpr const char* kModule = "segment";

const Position& player_position(const Frame& frame, const std::string& id) {
  auto it = frame.players.find(id);
  if (it == frame.players.end())
    throw data_error(kModule, "frame " + std::to_string(frame.timestamp_ms) + " lacks lineup player " + id);
  return it->second;
}
}  // namespace

const std::array<std::pair<int, int>, kDyadCount>& dyad_pairs() {
  static const auto pairs = [] {
    std::array<std::pair<int, int>, kDyadCount> p{};
    std::size_t k = 0;
    for (int i = 0; i < static_cast<int>(kLineupSize); ++i)
      for (int j = i + 1; j < static_cast<int>(kLineupSize); ++j) p[k++] = {i, j};
    return p;
  }();
  return pairs;
}

std::string dyad_name(std::size_t k) {
  const auto [i, j] = dyad_pairs().at(k);
  return "d" + std::to_string(i) + std::to_string(j);
}

StintExtraction extract_stints(const FrameSeries& frames, const std::set<std::string>& roster,
                               std::int64_t min_duration_ms) {
  if (min_duration_ms <= 0) throw config_error(kModule, "min_duration_ms must be positive");

  StintExtraction result;
  result.total_frames = frames.frames.size();

  std::map<Lineup, std::vector<std::size_t>> by_lineup;
  for (std::size_t i = 0; i < frames.frames.size(); ++i) {
    Lineup lineup;
    std::size_t count = 0;
    for (const auto& [id, pos] : frames.frames[i].players) {
      if (!roster.contains(id)) continue;
      if (count < kLineupSize) lineup[count] = id;
      ++count;
    }
    if (count > kLineupSize) {
      ++result.overfull_frames;
    } else if (count < kLineupSize) {
      ++result.underfull_frames;
    } else {
      // std::map iteration already yields ids in sorted order.
      by_lineup[lineup].push_back(i);
    }
  }

  const std::int64_t grid = frames.grid_ms;
  for (auto& [lineup, indices] : by_lineup) {
    const auto duration = static_cast<std::int64_t>(indices.size()) * grid;
    if (duration < min_duration_ms) {
      result.short_lineup_frames += indices.size();
      continue;
    }
    Stint stint;
    stint.lineup = lineup;
    stint.total_duration_ms = duration;
    for (std::size_t n = 0; n < indices.size(); ++n) {
      const auto& f = frames.frames[indices[n]];
      const bool joins = n > 0 && indices[n] == indices[n - 1] + 1 && f.contiguous;
      if (joins) {
        stint.intervals.back().end_ms = f.timestamp_ms + grid;
      } else {
        stint.intervals.push_back({f.timestamp_ms, f.timestamp_ms + grid});
      }
    }
    stint.frame_indices = std::move(indices);
    result.stints.push_back(std::move(stint));
  }

  std::sort(result.stints.begin(), result.stints.end(),
            [](const Stint& a, const Stint& b) { return a.frame_indices.front() < b.frame_indices.front(); });
  for (std::size_t i = 0; i < result.stints.size(); ++i) result.stints[i].id = static_cast<int>(i);

  result.excluded_frames = result.overfull_frames + result.underfull_frames + result.short_lineup_frames;
  return result;
}

DyadDistances dyad_distances(const Lineup& lineup, const Frame& frame) {
  std::array<const Position*, kLineupSize> pos{};
  for (std::size_t i = 0; i < kLineupSize; ++i) pos[i] = &player_position(frame, lineup[i]);
  DyadDistances d{};
  const auto& pairs = dyad_pairs();
  for (std::size_t k = 0; k < kDyadCount; ++k) {
    const auto& a = *pos[pairs[k].first];
    const auto& b = *pos[pairs[k].second];
    d[k] = std::hypot(a.x_cm - b.x_cm, a.y_cm - b.y_cm);
  }
  return d;
}

std::vector<DyadVector> dyad_features(const Stint& stint, const FrameSeries& frames) {
  std::vector<DyadVector> out;
  out.reserve(stint.frame_indices.size());
  for (auto idx : stint.frame_indices) {
    if (idx >= frames.frames.size()) throw data_error(kModule, "stint references a frame outside the series");
    const auto& f = frames.frames[idx];
    out.push_back({f.timestamp_ms, dyad_distances(stint.lineup, f)});
  }
  return out;
}

double mean_x(const Frame& frame, const Lineup& lineup) {
  double sum = 0.0;
  for (const auto& id : lineup) sum += player_position(frame, id).x_cm;
  return sum / static_cast<double>(kLineupSize);
}

std::vector<std::uint8_t> stint_contiguity(const Stint& stint, const FrameSeries& frames) {
  std::vector<std::uint8_t> flags(stint.frame_indices.size(), 0);
  for (std::size_t n = 1; n < flags.size(); ++n) {
    const auto idx = stint.frame_indices[n];
    flags[n] = idx == stint.frame_indices[n - 1] + 1 && frames.frames[idx].contiguous ? 1 : 0;
  }
  return flags;
}

void write_features_csv(std::ostream& out, const std::vector<DyadVector>& features) {
  out << "frame_ms";
  for (std::size_t k = 0; k < kDyadCount; ++k) out << ',' << dyad_name(k);
  out << '\n';
  for (const auto& v : features) {
    out << v.frame_ms;
    for (double d : v.distances) out << ',' << text::format_double(d);
    out << '\n';
  }
}

std::vector<DyadVector> read_features_csv(std::istream& in) {
  std::string line;
  if (!text::next_line(in, line)) throw data_error(kModule, "features file is empty");
  const text::Header header(line);
  const auto ts_col = header.find("frame_ms");
  if (!ts_col) throw data_error(kModule, "features file is missing column 'frame_ms'");
  std::array<std::size_t, kDyadCount> cols{};
  for (std::size_t k = 0; k < kDyadCount; ++k) {
    auto idx = header.find(dyad_name(k));
    if (!idx) throw data_error(kModule, "features file is missing column '" + dyad_name(k) + "'");
    cols[k] = *idx;
  }
  std::vector<DyadVector> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (text::trim(line).empty()) continue;
    const auto f = text::split(line);
    const auto where = " (features row " + std::to_string(row) + ")";
    if (f.size() < header.width()) throw data_error(kModule, "short row" + where);
    DyadVector v;
    const auto ts = text::parse_int<std::int64_t>(f[*ts_col]);
    if (!ts) throw data_error(kModule, "malformed frame_ms" + where);
    v.frame_ms = *ts;
    for (std::size_t k = 0; k < kDyadCount; ++k) {
      const auto d = text::parse_double(f[cols[k]]);
      if (!d || *d < 0.0 || !std::isfinite(*d)) throw data_error(kModule, "malformed distance" + where);
      v.distances[k] = *d;
    }
    out.push_back(v);
  }
  return out;
}

std::set<std::string> read_roster(std::istream& in) {
  std::set<std::string> roster;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    auto s = text::trim(line);
    if (s.empty() || s.front() == '#') continue;
    if (first && s == "player_id") {
      first = false;
      continue;
    }
    first = false;
    roster.emplace(s);
  }
  if (roster.size() < kLineupSize) throw data_error(kModule, "roster lists fewer than five players");
  return roster;
}

}  // namespace courtphase
