#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "courtphase/ingest.hpp"

namespace courtphase {

inline constexpr std::size_t kLineupSize = 5;
inline constexpr std::size_t kDyadCount = kLineupSize * (kLineupSize - 1) / 2;

// Player ids sorted lexicographically: the canonical lineup order.
using Lineup = std::array<std::string, kLineupSize>;
using DyadDistances = std::array<double, kDyadCount>;

// (i, j) lineup indices of each dyad, i < j, row-major.
const std::array<std::pair<int, int>, kDyadCount>& dyad_pairs();
// Column name of dyad k, e.g. "d01" or "d34".
std::string dyad_name(std::size_t k);

struct Stint {
  int id = 0;
  Lineup lineup;
  // Frame-grid intervals, each [first frame, last frame + grid).
  std::vector<TimeInterval> intervals;
  std::int64_t total_duration_ms = 0;
  // Indices into the FrameSeries, ascending.
  std::vector<std::size_t> frame_indices;
};

struct StintExtraction {
  std::vector<Stint> stints;
  std::size_t total_frames = 0;
  // Frames in no stint: too few roster players, too many, or a lineup whose
  // accumulated time fell short of the minimum.
  std::size_t excluded_frames = 0;
  std::size_t overfull_frames = 0;
  std::size_t underfull_frames = 0;
  std::size_t short_lineup_frames = 0;
};

// A frame belongs to a lineup when exactly five roster players are present.
// Time is accumulated per lineup across re-entries; lineups below
// min_duration_ms are dropped.
StintExtraction extract_stints(const FrameSeries& frames, const std::set<std::string>& roster,
                               std::int64_t min_duration_ms);

struct DyadVector {
  std::int64_t frame_ms = 0;
  DyadDistances distances{};
};

DyadDistances dyad_distances(const Lineup& lineup, const Frame& frame);
std::vector<DyadVector> dyad_features(const Stint& stint, const FrameSeries& frames);

// Mean x of the lineup's five players.
double mean_x(const Frame& frame, const Lineup& lineup);

// Contiguity of each stint frame with the previous stint frame.
std::vector<std::uint8_t> stint_contiguity(const Stint& stint, const FrameSeries& frames);

void write_features_csv(std::ostream& out, const std::vector<DyadVector>& features);
std::vector<DyadVector> read_features_csv(std::istream& in);

// One player id per line; blank lines and '#' comments ignored. A first line
// reading "player_id" is treated as a header.
std::set<std::string> read_roster(std::istream& in);

}  // namespace courtphase
