#include "courtphase/shots.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "courtphase/error.hpp"
#include "text.hpp"

namespace courtphase {

namespace {
constexpr const char* kModule = "shots";

std::optional<double> percentage(std::size_t made, std::size_t attempts) {
  if (attempts == 0) return std::nullopt;
  return 100.0 * static_cast<double>(made) / static_cast<double>(attempts);
}
}  // namespace

std::vector<ShotEvent> parse_shots(std::istream& in) {
  std::string line;
  if (!text::next_line(in, line)) throw data_error(kModule, "shots file is empty");
  const text::Header header(line);
  const auto ts_col = header.find("timestamp_ms");
  const auto made_col = header.find("made");
  if (!ts_col || !made_col) throw data_error(kModule, "shots file needs timestamp_ms and made columns");
  const auto shooter_col = header.find("shooter_id");
  const auto kind_col = header.find("kind");

  std::vector<ShotEvent> shots;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (text::trim(line).empty()) continue;
    const auto f = text::split(line);
    const auto where = " (shots row " + std::to_string(row) + ")";
    const auto at = [&](std::size_t col) { return col < f.size() ? f[col] : std::string_view{}; };
    const auto ts = text::parse_int<std::int64_t>(at(*ts_col));
    const auto made = text::parse_int<int>(at(*made_col));
    if (!ts || *ts < 0 || !made || (*made != 0 && *made != 1))
      throw data_error(kModule, "malformed shot" + where);
    if (kind_col && at(*kind_col) != "FG")
      throw data_error(kModule, "only field-goal attempts (kind FG) are accepted" + where);
    ShotEvent shot{*ts, *made == 1, std::nullopt};
    if (shooter_col && !at(*shooter_col).empty()) shot.shooter = std::string(at(*shooter_col));
    shots.push_back(std::move(shot));
  }
  return shots;
}

void write_shots_csv(std::ostream& out, std::span<const ShotEvent> shots) {
  out << "timestamp_ms,made,shooter_id\n";
  for (const auto& s : shots) out << s.timestamp_ms << ',' << (s.made ? 1 : 0) << ',' << s.shooter.value_or("") << '\n';
}

std::vector<std::optional<int>> attach_shots(std::span<const ShotEvent> shots,
                                             std::span<const std::int64_t> frame_ms,
                                             std::span<const int> assignments,
                                             std::int64_t tolerance_ms) {
  if (tolerance_ms < 0) throw config_error(kModule, "tolerance_ms must be >= 0");
  if (frame_ms.size() != assignments.size())
    throw data_error(kModule, "frame times and assignments differ in length");
  std::vector<std::optional<int>> out;
  out.reserve(shots.size());
  for (const auto& shot : shots) {
    const auto it = std::lower_bound(frame_ms.begin(), frame_ms.end(), shot.timestamp_ms);
    std::optional<std::size_t> best;
    std::int64_t best_gap = 0;
    if (it != frame_ms.begin()) {
      best = static_cast<std::size_t>(std::prev(it) - frame_ms.begin());
      best_gap = shot.timestamp_ms - *std::prev(it);
    }
    if (it != frame_ms.end()) {
      const auto gap = *it - shot.timestamp_ms;
      if (!best || gap < best_gap) {
        best = static_cast<std::size_t>(it - frame_ms.begin());
        best_gap = gap;
      }
    }
    if (best && best_gap <= tolerance_ms) {
      out.emplace_back(assignments[*best]);
    } else {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

ShotReport shot_report(std::span<const std::optional<int>> clusters, std::span<const ShotEvent> shots,
                       int k) {
  if (clusters.size() != shots.size()) throw data_error(kModule, "shot clusters and shots differ in length");
  ShotReport report;
  report.clusters.resize(static_cast<std::size_t>(std::max(k, 0)));
  for (int c = 0; c < k; ++c) report.clusters[static_cast<std::size_t>(c)].cluster = c;
  for (std::size_t i = 0; i < shots.size(); ++i) {
    if (!clusters[i]) {
      ++report.unmatched;
      continue;
    }
    const int c = *clusters[i];
    if (c < 0 || c >= k) throw data_error(kModule, "shot cluster outside 0..k-1");
    auto& row = report.clusters[static_cast<std::size_t>(c)];
    ++row.attempts;
    ++report.attempts;
    if (shots[i].made) {
      ++row.made;
      ++report.made;
    }
  }
  for (auto& row : report.clusters) row.percent = percentage(row.made, row.attempts);
  report.percent = percentage(report.made, report.attempts);
  return report;
}

}  // namespace courtphase
