#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace courtphase {

struct ShotEvent {
  std::int64_t timestamp_ms = 0;
  bool made = false;
  std::optional<std::string> shooter;
};

// Header timestamp_ms,made,shooter_id with made in {0,1}. An optional `kind`
// column must read FG on every row: free throws are not accepted.
std::vector<ShotEvent> parse_shots(std::istream& in);
void write_shots_csv(std::ostream& out, std::span<const ShotEvent> shots);

// Cluster of the nearest frame within tolerance_ms (earlier frame on a tie),
// or nullopt when no frame is close enough. frame_ms must be ascending.
std::vector<std::optional<int>> attach_shots(std::span<const ShotEvent> shots,
                                             std::span<const std::int64_t> frame_ms,
                                             std::span<const int> assignments,
                                             std::int64_t tolerance_ms);

struct ClusterShots {
  int cluster = 0;
  std::size_t attempts = 0;
  std::size_t made = 0;
  std::optional<double> percent;
};

struct ShotReport {
  std::vector<ClusterShots> clusters;
  // Totals over matched shots.
  std::size_t attempts = 0;
  std::size_t made = 0;
  std::optional<double> percent;
  std::size_t unmatched = 0;
};

ShotReport shot_report(std::span<const std::optional<int>> clusters, std::span<const ShotEvent> shots,
                       int k);

}  // namespace courtphase
