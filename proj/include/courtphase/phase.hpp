#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "courtphase/segment.hpp"

namespace courtphase {

enum class PhaseLabel { Transition = 0, Defense = 1, Offense = 2 };

inline constexpr std::array<PhaseLabel, 3> kPhaseOrder{PhaseLabel::Transition, PhaseLabel::Defense,
                                                       PhaseLabel::Offense};

std::string_view to_string(PhaseLabel label);   // "TRANSITION", ...
std::string_view short_name(PhaseLabel label);  // "TR", "D", "O"
std::optional<PhaseLabel> parse_phase_label(std::string_view text);

// Sign of x attacked in periods 1-2; flipped for period 3 onward.
struct AttackDirection {
  int first_half_sign = +1;

  int sign_for_period(int period) const;
  AttackDirection flipped() const { return {-first_half_sign}; }
};

// |mean_x| <= band_cm is TRANSITION (closed band); otherwise OFFENSE when mean_x
// has the attacking sign, DEFENSE when not.
PhaseLabel label_frame(double mean_x_cm, double band_cm, int attack_sign);
PhaseLabel label_frame(const Frame& frame, const Lineup& lineup, double band_cm,
                       const AttackDirection& direction);

struct ClusterPhaseRow {
  int cluster = 0;
  std::size_t frames = 0;
  // Indexed by PhaseLabel: TR, D, O.
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> percent{};
  PhaseLabel majority = PhaseLabel::Transition;
};

struct ClusterPhaseTable {
  std::vector<ClusterPhaseRow> rows;
};

// Ties for the majority label resolve TR > D > O.
ClusterPhaseTable cluster_phase_table(std::span<const int> assignments,
                                      std::span<const PhaseLabel> labels, int k);

// Column-oriented switch frequencies: entry (to, from) is the share of
// switches leaving `from` that land in `to`.
struct TransitionMatrix {
  int k = 0;
  std::vector<std::uint64_t> counts;  // k*k, row = to, column = from
  std::vector<double> percent;        // same layout
  std::uint64_t switch_count = 0;

  std::uint64_t count(int to, int from) const { return counts[static_cast<std::size_t>(to * k + from)]; }
  double pct(int to, int from) const { return percent[static_cast<std::size_t>(to * k + from)]; }
};

// Consecutive frames count as a switch only when contiguous[i] is set for the
// later frame and the cluster differs.
TransitionMatrix transition_matrix(std::span<const int> assignments,
                                   std::span<const std::uint8_t> contiguous, int k);

struct SwitchRate {
  double per_second = 0.0;
  std::optional<double> seconds_per_switch;
};

SwitchRate switch_rate(std::uint64_t switch_count, std::int64_t duration_ms);

}  // namespace courtphase
