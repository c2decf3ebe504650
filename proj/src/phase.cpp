#include "courtphase/phase.hpp"

#include <cmath>

#include "courtphase/error.hpp"

namespace courtphase {

namespace {
constexpr const char* kModule = "phase";
}

std::string_view to_string(PhaseLabel label) {
  switch (label) {
    case PhaseLabel::Transition: return "TRANSITION";
    case PhaseLabel::Defense: return "DEFENSE";
    case PhaseLabel::Offense: return "OFFENSE";
  }
  return "UNKNOWN";
}

std::string_view short_name(PhaseLabel label) {
  switch (label) {
    case PhaseLabel::Transition: return "TR";
    case PhaseLabel::Defense: return "D";
    case PhaseLabel::Offense: return "O";
  }
  return "?";
}

std::optional<PhaseLabel> parse_phase_label(std::string_view text) {
  for (auto label : kPhaseOrder)
    if (text == to_string(label) || text == short_name(label)) return label;
  return std::nullopt;
}

int AttackDirection::sign_for_period(int period) const {
  if (period < 1) throw data_error(kModule, "no period is known for this frame");
  return period <= 2 ? first_half_sign : -first_half_sign;
}

PhaseLabel label_frame(double mean_x_cm, double band_cm, int attack_sign) {
  if (std::abs(mean_x_cm) <= band_cm) return PhaseLabel::Transition;
  const int side = mean_x_cm > 0.0 ? 1 : -1;
  return side == attack_sign ? PhaseLabel::Offense : PhaseLabel::Defense;
}

PhaseLabel label_frame(const Frame& frame, const Lineup& lineup, double band_cm,
                       const AttackDirection& direction) {
  return label_frame(mean_x(frame, lineup), band_cm, direction.sign_for_period(frame.period));
}

ClusterPhaseTable cluster_phase_table(std::span<const int> assignments,
                                      std::span<const PhaseLabel> labels, int k) {
  if (assignments.size() != labels.size())
    throw data_error(kModule, "assignments and labels cover different frames");
  ClusterPhaseTable table;
  table.rows.resize(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) table.rows[static_cast<std::size_t>(c)].cluster = c;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    const int c = assignments[i];
    if (c < 0 || c >= k) throw data_error(kModule, "assignment outside 0..k-1");
    auto& row = table.rows[static_cast<std::size_t>(c)];
    ++row.frames;
    ++row.counts[static_cast<std::size_t>(labels[i])];
  }
  for (auto& row : table.rows) {
    std::size_t best = 0;
    for (std::size_t l = 0; l < 3; ++l) {
      row.percent[l] = row.frames > 0 ? 100.0 * static_cast<double>(row.counts[l]) / static_cast<double>(row.frames) : 0.0;
      if (row.counts[l] > row.counts[best]) best = l;
    }
    row.majority = static_cast<PhaseLabel>(best);
  }
  return table;
}

TransitionMatrix transition_matrix(std::span<const int> assignments,
                                   std::span<const std::uint8_t> contiguous, int k) {
  if (k < 1) throw config_error(kModule, "k must be positive");
  if (assignments.size() != contiguous.size())
    throw data_error(kModule, "assignments and contiguity flags differ in length");
  TransitionMatrix m;
  m.k = k;
  const auto kk = static_cast<std::size_t>(k);
  m.counts.assign(kk * kk, 0);
  m.percent.assign(kk * kk, 0.0);
  for (std::size_t i = 1; i < assignments.size(); ++i) {
    if (!contiguous[i]) continue;
    const int from = assignments[i - 1];
    const int to = assignments[i];
    if (from < 0 || from >= k || to < 0 || to >= k) throw data_error(kModule, "assignment outside 0..k-1");
    if (from == to) continue;
    ++m.counts[static_cast<std::size_t>(to * k + from)];
    ++m.switch_count;
  }
  for (std::size_t from = 0; from < kk; ++from) {
    std::uint64_t out = 0;
    for (std::size_t to = 0; to < kk; ++to) out += m.counts[to * kk + from];
    if (out == 0) continue;
    for (std::size_t to = 0; to < kk; ++to)
      m.percent[to * kk + from] = 100.0 * static_cast<double>(m.counts[to * kk + from]) / static_cast<double>(out);
  }
  return m;
}

SwitchRate switch_rate(std::uint64_t switch_count, std::int64_t duration_ms) {
  if (duration_ms <= 0) throw data_error(kModule, "stint duration must be positive");
  SwitchRate r;
  const double seconds = static_cast<double>(duration_ms) / 1000.0;
  r.per_second = static_cast<double>(switch_count) / seconds;
  if (switch_count > 0) r.seconds_per_switch = seconds / static_cast<double>(switch_count);
  return r;
}

}  // namespace courtphase
