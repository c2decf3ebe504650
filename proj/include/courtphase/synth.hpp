#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "courtphase/ingest.hpp"
#include "courtphase/phase.hpp"
#include "courtphase/shots.hpp"

namespace courtphase {

// A formation: five anchor positions for the lineup in canonical order,
// expressed for a team attacking +x. The generator mirrors x when the team
// attacks -x.
struct FormationTemplate {
  std::string name;
  PhaseLabel phase = PhaseLabel::Offense;
  std::array<Position, 5> anchors{};
  double noise_sd_cm = 30.0;
  double dwell_mean_ms = 2000.0;
  double dwell_sd_ms = 800.0;
  double shot_prob_per_frame = 0.0;
  double make_prob = 0.0;
};

struct ScheduledStop {
  int period = 1;
  std::int64_t offset_ms = 0;  // into the period's playing time
  std::int64_t duration_ms = 0;
};

struct LineupSpell {
  std::vector<std::string> players;  // five ids
  double minutes = 0.0;              // of playing time; 0 means "the rest"
};

struct SynthConfig {
  std::vector<LineupSpell> lineups;
  std::vector<FormationTemplate> templates;
  int periods = 4;
  std::int64_t period_ms = 150'000;
  std::int64_t pre_match_ms = 30'000;
  std::int64_t quarter_break_ms = 20'000;
  std::int64_t half_break_ms = 60'000;
  std::int64_t post_match_ms = 30'000;
  std::vector<ScheduledStop> timeouts;
  std::vector<ScheduledStop> free_throws;
  std::int64_t sample_ms = 50;
  // Blend from the previous formation over the first blend_ms of a new one.
  std::int64_t blend_ms = 300;
  std::int64_t shot_cooldown_ms = 3000;
  int attack_sign = +1;
};

// Six formations (three offensive, two defensive, one transition) with dyad
// vectors roughly equidistant from one another; one lineup, a 10-minute game.
SynthConfig default_synth_config();

// JSON schema documented in README.md. Missing keys take the defaults above.
SynthConfig parse_synth_config(std::istream& in);
void write_synth_config(std::ostream& out, const SynthConfig& config);
// Throws a config error for off-court anchors, bad probabilities, or a
// defensive formation that is not tighter on average than a transition one.
void validate(const SynthConfig& config);

struct TruthFrame {
  std::int64_t frame_ms = 0;
  int template_id = 0;
  PhaseLabel phase = PhaseLabel::Offense;
  int lineup = 0;
};

struct GroundTruth {
  std::vector<TruthFrame> frames;  // active playing ticks, ascending
  std::vector<GameEvent> events;
  std::vector<ShotEvent> shots;
  std::vector<int> shot_templates;
};

struct SynthGame {
  std::string tracking_csv;
  std::string events_csv;
  std::string shots_csv;
  std::string roster_txt;
  std::string truth_csv;
  GroundTruth truth;
};

SynthGame generate_game(const SynthConfig& config, std::uint64_t seed);

std::vector<TruthFrame> read_truth_csv(std::istream& in);

struct RecoveryMetrics {
  std::size_t frames = 0;
  // Share of frames whose cluster's majority template is their own template.
  double purity = 0.0;
  double adjusted_rand = 0.0;
  // confusion[true phase][assigned label], both indexed TR, D, O.
  std::array<std::array<std::size_t, 3>, 3> phase_confusion{};
};

// Every model frame must exist in the ground truth.
RecoveryMetrics evaluate_recovery(std::span<const TruthFrame> truth, std::span<const std::int64_t> frame_ms,
                                  std::span<const int> assignments, std::span<const PhaseLabel> labels);

double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace courtphase
