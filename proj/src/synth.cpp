#include "courtphase/synth.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "courtphase/error.hpp"
#include "courtphase/rng.hpp"
#include "courtphase/segment.hpp"
#include "text.hpp"

namespace courtphase {

namespace {

constexpr const char* kModule = "synth";

using nlohmann::json;

FormationTemplate formation(std::string name, PhaseLabel phase, std::array<Position, 5> anchors,
                            double shot_prob = 0.0, double make_prob = 0.0) {
  FormationTemplate t;
  t.name = std::move(name);
  t.phase = phase;
  t.anchors = anchors;
  t.shot_prob_per_frame = shot_prob;
  t.make_prob = make_prob;
  return t;
}

double mean_anchor_distance(const FormationTemplate& t) {
  double s = 0.0;
  for (const auto& [i, j] : dyad_pairs())
    s += std::hypot(t.anchors[i].x_cm - t.anchors[j].x_cm, t.anchors[i].y_cm - t.anchors[j].y_cm);
  return s / static_cast<double>(kDyadCount);
}

// Capture-time layout of the game.
struct Segment {
  std::int64_t start_ms;
  std::int64_t end_ms;
  int period;  // 0 outside play
  bool active;
};

struct Layout {
  std::vector<Segment> segments;
  std::vector<GameEvent> events;
  std::int64_t end_ms = 0;
};

Layout build_layout(const SynthConfig& c) {
  Layout layout;
  std::int64_t t = 0;
  auto excluded = [&](EventKind kind, std::int64_t duration) {
    layout.events.push_back({kind, t, t + duration, std::nullopt});
    layout.segments.push_back({t, t + duration, 0, false});
    t += duration;
  };
  excluded(EventKind::PreMatch, c.pre_match_ms);
  for (int p = 1; p <= c.periods; ++p) {
    struct Stop {
      std::int64_t offset;
      std::int64_t duration;
      EventKind kind;
    };
    std::vector<Stop> stops;
    for (const auto& s : c.timeouts)
      if (s.period == p) stops.push_back({s.offset_ms, s.duration_ms, EventKind::Timeout});
    for (const auto& s : c.free_throws)
      if (s.period == p) stops.push_back({s.offset_ms, s.duration_ms, EventKind::FreeThrow});
    std::sort(stops.begin(), stops.end(), [](const Stop& a, const Stop& b) { return a.offset < b.offset; });

    const std::int64_t period_start = t;
    std::int64_t played = 0;
    const auto period_event = layout.events.size();
    layout.events.push_back({EventKind::PeriodStart, period_start, period_start, p});
    for (const auto& s : stops) {
      const auto offset = std::clamp<std::int64_t>(s.offset, played, c.period_ms);
      if (offset > played) {
        layout.segments.push_back({t, t + (offset - played), p, true});
        t += offset - played;
        played = offset;
      }
      layout.events.push_back({s.kind, t, t + s.duration, std::nullopt});
      layout.segments.push_back({t, t + s.duration, p, false});
      t += s.duration;
    }
    if (played < c.period_ms) {
      layout.segments.push_back({t, t + (c.period_ms - played), p, true});
      t += c.period_ms - played;
    }
    layout.events[period_event].end_ms = t;
    if (p < c.periods) excluded(p == 2 ? EventKind::HalfBreak : EventKind::QuarterBreak,
                                p == 2 ? c.half_break_ms : c.quarter_break_ms);
  }
  excluded(EventKind::PostMatch, c.post_match_ms);
  layout.end_ms = t;
  return layout;
}

Lineup sorted_lineup(const std::vector<std::string>& players) {
  Lineup l;
  std::copy(players.begin(), players.end(), l.begin());
  std::sort(l.begin(), l.end());
  return l;
}

int clamp_cm(double v, int limit) {
  return static_cast<int>(std::clamp(std::lround(v), static_cast<long>(-limit), static_cast<long>(limit)));
}

}  // namespace

SynthConfig default_synth_config() {
  using P = Position;
  SynthConfig c;
  c.lineups.push_back({{"p1", "p2", "p3", "p4", "p5"}, 0.0});
  c.templates = {
      formation("offense_five_out", PhaseLabel::Offense,
                {P{820, -10}, P{750, 310}, P{810, -400}, P{1250, 590}, P{1260, -430}}, 0.004, 0.45),
      formation("offense_overload", PhaseLabel::Offense,
                {P{620, -190}, P{820, -630}, P{1340, -690}, P{1080, 80}, P{940, 560}}, 0.004, 0.35),
      formation("offense_high_post", PhaseLabel::Offense,
                {P{750, -110}, P{1090, 430}, P{1260, -220}, P{900, -40}, P{1320, 650}}, 0.006, 0.6),
      formation("defense_packed", PhaseLabel::Defense,
                {P{-880, -200}, P{-1000, 510}, P{-1220, -140}, P{-1330, 140}, P{-1100, -100}}),
      formation("defense_press", PhaseLabel::Defense,
                {P{-520, 500}, P{-560, -520}, P{-920, -30}, P{-1280, 430}, P{-1330, -130}}),
      formation("transition_break", PhaseLabel::Transition,
                {P{-670, 20}, P{-120, 480}, P{310, -540}, P{650, 470}, P{110, 0}}, 0.001, 0.3),
  };
  c.timeouts = {{2, 60'000, 30'000}, {4, 90'000, 30'000}};
  c.free_throws = {{3, 45'000, 15'000}};
  return c;
}

void validate(const SynthConfig& c) {
  auto fail = [](const std::string& m) { throw config_error(kModule, m); };
  if (c.templates.empty()) fail("at least one formation template is required");
  if (c.lineups.empty()) fail("at least one lineup is required");
  for (const auto& l : c.lineups) {
    if (l.players.size() != kLineupSize) fail("every lineup needs exactly five players");
    std::vector<std::string> ids = l.players;
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) fail("lineup repeats a player");
    if (l.minutes < 0.0) fail("lineup minutes must be >= 0");
  }
  if (c.periods < 1) fail("periods must be >= 1");
  if (c.period_ms <= 0 || c.sample_ms <= 0) fail("period_ms and sample_ms must be positive");
  if (c.pre_match_ms <= 0 || c.post_match_ms <= 0 || c.quarter_break_ms <= 0 || c.half_break_ms <= 0)
    fail("pre/post match and break durations must be positive");
  if (c.attack_sign != 1 && c.attack_sign != -1) fail("attack_sign must be +1 or -1");
  if (c.blend_ms < 0 || c.shot_cooldown_ms < 0) fail("blend_ms and shot_cooldown_ms must be >= 0");
  for (const auto* stops : {&c.timeouts, &c.free_throws})
    for (const auto& s : *stops)
      if (s.period < 1 || s.period > c.periods || s.duration_ms <= 0 || s.offset_ms < 0)
        fail("stoppage outside the schedule");

  double max_defense = -1.0;
  double min_transition = -1.0;
  for (const auto& t : c.templates) {
    for (const auto& a : t.anchors)
      if (std::abs(a.x_cm) > kCourtHalfLengthCm || std::abs(a.y_cm) > kCourtHalfWidthCm)
        fail("template '" + t.name + "' has an off-court anchor");
    if (t.noise_sd_cm < 0.0) fail("template '" + t.name + "' has negative noise");
    if (t.dwell_mean_ms <= 0.0 || t.dwell_sd_ms < 0.0) fail("template '" + t.name + "' has a bad dwell time");
    for (double p : {t.shot_prob_per_frame, t.make_prob})
      if (p < 0.0 || p > 1.0) fail("template '" + t.name + "' has a probability outside [0,1]");
    const double d = mean_anchor_distance(t);
    if (t.phase == PhaseLabel::Defense) max_defense = std::max(max_defense, d);
    if (t.phase == PhaseLabel::Transition) min_transition = min_transition < 0 ? d : std::min(min_transition, d);
  }
  if (max_defense >= 0.0 && min_transition >= 0.0 && max_defense >= min_transition)
    fail("defensive templates must be tighter on average than transition templates");
}

SynthConfig parse_synth_config(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw config_error(kModule, std::string("synth config is not valid JSON: ") + e.what());
  }
  SynthConfig c = default_synth_config();
  try {
    auto stops = [](const json& arr) {
      std::vector<ScheduledStop> out;
      for (const auto& s : arr)
        out.push_back({s.at("period").get<int>(), s.at("offset_ms").get<std::int64_t>(),
                       s.at("duration_ms").get<std::int64_t>()});
      return out;
    };
    c.periods = j.value("periods", c.periods);
    c.period_ms = j.value("period_ms", c.period_ms);
    c.pre_match_ms = j.value("pre_match_ms", c.pre_match_ms);
    c.quarter_break_ms = j.value("quarter_break_ms", c.quarter_break_ms);
    c.half_break_ms = j.value("half_break_ms", c.half_break_ms);
    c.post_match_ms = j.value("post_match_ms", c.post_match_ms);
    c.sample_ms = j.value("sample_ms", c.sample_ms);
    c.blend_ms = j.value("blend_ms", c.blend_ms);
    c.shot_cooldown_ms = j.value("shot_cooldown_ms", c.shot_cooldown_ms);
    c.attack_sign = j.value("attack_sign", c.attack_sign);
    if (j.contains("timeouts")) c.timeouts = stops(j["timeouts"]);
    if (j.contains("free_throws")) c.free_throws = stops(j["free_throws"]);
    if (j.contains("lineups")) {
      c.lineups.clear();
      for (const auto& l : j["lineups"])
        c.lineups.push_back({l.at("players").get<std::vector<std::string>>(), l.value("minutes", 0.0)});
    }
    if (j.contains("templates")) {
      c.templates.clear();
      const double noise = j.value("noise_sd_cm", 30.0);
      for (const auto& t : j["templates"]) {
        FormationTemplate f;
        f.name = t.at("name").get<std::string>();
        const auto phase = parse_phase_label(t.at("phase").get<std::string>());
        if (!phase) throw config_error(kModule, "template '" + f.name + "' has an unknown phase");
        f.phase = *phase;
        const auto& anchors = t.at("anchors");
        if (!anchors.is_array() || anchors.size() != 5)
          throw config_error(kModule, "template '" + f.name + "' needs five anchors");
        for (std::size_t i = 0; i < 5; ++i)
          f.anchors[i] = {anchors[i].at(0).get<double>(), anchors[i].at(1).get<double>()};
        f.noise_sd_cm = t.value("noise_sd_cm", noise);
        f.dwell_mean_ms = t.value("dwell_mean_ms", f.dwell_mean_ms);
        f.dwell_sd_ms = t.value("dwell_sd_ms", f.dwell_sd_ms);
        f.shot_prob_per_frame = t.value("shot_prob_per_frame", 0.0);
        f.make_prob = t.value("make_prob", 0.0);
        c.templates.push_back(std::move(f));
      }
    } else if (j.contains("noise_sd_cm")) {
      for (auto& t : c.templates) t.noise_sd_cm = j["noise_sd_cm"].get<double>();
    }
  } catch (const json::exception& e) {
    throw config_error(kModule, std::string("synth config: ") + e.what());
  }
  validate(c);
  return c;
}

void write_synth_config(std::ostream& out, const SynthConfig& c) {
  json j;
  auto stops = [](const std::vector<ScheduledStop>& v) {
    json arr = json::array();
    for (const auto& s : v) arr.push_back({{"period", s.period}, {"offset_ms", s.offset_ms}, {"duration_ms", s.duration_ms}});
    return arr;
  };
  j["periods"] = c.periods;
  j["period_ms"] = c.period_ms;
  j["pre_match_ms"] = c.pre_match_ms;
  j["quarter_break_ms"] = c.quarter_break_ms;
  j["half_break_ms"] = c.half_break_ms;
  j["post_match_ms"] = c.post_match_ms;
  j["sample_ms"] = c.sample_ms;
  j["blend_ms"] = c.blend_ms;
  j["shot_cooldown_ms"] = c.shot_cooldown_ms;
  j["attack_sign"] = c.attack_sign;
  j["timeouts"] = stops(c.timeouts);
  j["free_throws"] = stops(c.free_throws);
  j["lineups"] = json::array();
  for (const auto& l : c.lineups) j["lineups"].push_back({{"players", l.players}, {"minutes", l.minutes}});
  j["templates"] = json::array();
  for (const auto& t : c.templates) {
    json anchors = json::array();
    for (const auto& a : t.anchors) anchors.push_back({a.x_cm, a.y_cm});
    j["templates"].push_back({{"name", t.name},
                              {"phase", std::string(to_string(t.phase))},
                              {"anchors", anchors},
                              {"noise_sd_cm", t.noise_sd_cm},
                              {"dwell_mean_ms", t.dwell_mean_ms},
                              {"dwell_sd_ms", t.dwell_sd_ms},
                              {"shot_prob_per_frame", t.shot_prob_per_frame},
                              {"make_prob", t.make_prob}});
  }
  out << j.dump(2) << '\n';
}

SynthGame generate_game(const SynthConfig& config, std::uint64_t seed) {
  validate(config);
  const auto layout = build_layout(config);
  const std::int64_t step = config.sample_ms;
  const AttackDirection direction{config.attack_sign};

  CounterRng schedule_rng(seed, 1);
  CounterRng noise_rng(seed, 2);
  CounterRng shot_rng(seed, 3);

  std::vector<Lineup> lineups;
  for (const auto& l : config.lineups) lineups.push_back(sorted_lineup(l.players));
  std::vector<std::string> roster;
  for (const auto& l : lineups) roster.insert(roster.end(), l.begin(), l.end());
  std::sort(roster.begin(), roster.end());
  roster.erase(std::unique(roster.begin(), roster.end()), roster.end());

  // Per-player capture offset inside a tick, so samples arrive off-grid.
  std::map<std::string, std::int64_t> offset;
  for (std::size_t i = 0; i < roster.size(); ++i)
    offset[roster[i]] = static_cast<std::int64_t>((i * 7) % static_cast<std::size_t>(std::max<std::int64_t>(step / 2, 1)));

  SynthGame game;
  std::ostringstream tracking;
  tracking << "timestamp_ms,player_id,x_cm,y_cm,z_cm\n";

  int current = static_cast<int>(schedule_rng.below(config.templates.size()));
  int previous = -1;
  std::int64_t dwell_left = 0;
  std::int64_t dwell_elapsed = 0;
  auto draw_dwell = [&](int t) {
    const auto& f = config.templates[static_cast<std::size_t>(t)];
    const double ms = f.dwell_sd_ms > 0.0 ? schedule_rng.lognormal_by_moments(f.dwell_mean_ms, f.dwell_sd_ms)
                                          : f.dwell_mean_ms;
    return std::max<std::int64_t>(step, static_cast<std::int64_t>(std::llround(ms / static_cast<double>(step))) * step);
  };
  dwell_left = draw_dwell(current);

  std::int64_t played_ms = 0;
  std::size_t lineup_index = 0;
  std::int64_t lineup_until = config.lineups[0].minutes > 0.0
                                  ? static_cast<std::int64_t>(config.lineups[0].minutes * 60'000.0)
                                  : INT64_MAX;
  std::int64_t last_shot = INT64_MIN / 2;

  for (const auto& seg : layout.segments) {
    const std::int64_t first = (seg.start_ms + step - 1) / step * step;
    for (std::int64_t t = first; t < seg.end_ms; t += step) {
      const auto& lineup = lineups[lineup_index];
      if (!seg.active) {
        // Players idle along the sideline; these rows are excised on ingest.
        for (std::size_t i = 0; i < kLineupSize; ++i) {
          const double x = -600.0 + 300.0 * static_cast<double>(i) + noise_rng.normal(0.0, 10.0);
          tracking << t << ',' << lineup[i] << ',' << clamp_cm(x, kMaxAbsXCm) << ",-800,180\n";
        }
        continue;
      }

      if (dwell_left <= 0 && config.templates.size() > 1) {
        previous = current;
        const auto others = config.templates.size() - 1;
        const auto pick = static_cast<int>(schedule_rng.below(others));
        current = pick >= current ? pick + 1 : pick;
        dwell_left = draw_dwell(current);
        dwell_elapsed = 0;
      }

      const auto& tpl = config.templates[static_cast<std::size_t>(current)];
      const double mirror = direction.sign_for_period(seg.period);
      double blend = 1.0;
      if (previous >= 0 && dwell_elapsed < config.blend_ms && config.blend_ms > 0)
        blend = static_cast<double>(dwell_elapsed) / static_cast<double>(config.blend_ms);

      for (std::size_t i = 0; i < kLineupSize; ++i) {
        Position target = tpl.anchors[i];
        if (blend < 1.0) {
          const auto& from = config.templates[static_cast<std::size_t>(previous)].anchors[i];
          target.x_cm = from.x_cm + blend * (target.x_cm - from.x_cm);
          target.y_cm = from.y_cm + blend * (target.y_cm - from.y_cm);
        }
        const double x = mirror * target.x_cm + noise_rng.normal(0.0, tpl.noise_sd_cm);
        const double y = target.y_cm + noise_rng.normal(0.0, tpl.noise_sd_cm);
        std::int64_t ts = t - offset[lineup[i]];
        if (ts < seg.start_ms) ts = t;
        tracking << ts << ',' << lineup[i] << ',' << clamp_cm(x, kMaxAbsXCm) << ',' << clamp_cm(y, kMaxAbsYCm)
                 << ",100\n";
      }

      game.truth.frames.push_back({t, current, tpl.phase, static_cast<int>(lineup_index)});

      if (tpl.shot_prob_per_frame > 0.0 && t - last_shot >= config.shot_cooldown_ms &&
          shot_rng.uniform() < tpl.shot_prob_per_frame) {
        const bool made = shot_rng.uniform() < tpl.make_prob;
        const auto shooter = lineup[shot_rng.below(kLineupSize)];
        game.truth.shots.push_back({t, made, shooter});
        game.truth.shot_templates.push_back(current);
        last_shot = t;
      }

      dwell_left -= step;
      dwell_elapsed += step;
      played_ms += step;
      if (played_ms >= lineup_until && lineup_index + 1 < lineups.size()) {
        ++lineup_index;
        const double minutes = config.lineups[lineup_index].minutes;
        lineup_until = minutes > 0.0 ? played_ms + static_cast<std::int64_t>(minutes * 60'000.0) : INT64_MAX;
      }
    }
  }

  // Rows are emitted per tick; stable order by timestamp keeps the file sorted.
  game.tracking_csv = tracking.str();
  {
    std::istringstream in(game.tracking_csv);
    std::string header;
    std::getline(in, header);
    std::vector<std::pair<std::int64_t, std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      rows.emplace_back(*text::parse_int<std::int64_t>(std::string_view(line).substr(0, comma)), line);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ostringstream sorted;
    sorted << header << '\n';
    for (const auto& r : rows) sorted << r.second << '\n';
    game.tracking_csv = sorted.str();
  }

  game.truth.events = layout.events;
  std::ostringstream events;
  events << "kind,start_ms,end_ms,period_index\n";
  for (const auto& e : layout.events) {
    events << to_string(e.kind) << ',' << e.start_ms << ',' << e.end_ms << ',';
    if (e.period_index) events << *e.period_index;
    events << '\n';
  }
  game.events_csv = events.str();

  std::ostringstream shots;
  write_shots_csv(shots, game.truth.shots);
  game.shots_csv = shots.str();

  std::ostringstream roster_out;
  for (const auto& id : roster) roster_out << id << '\n';
  game.roster_txt = roster_out.str();

  std::ostringstream truth;
  truth << "frame_ms,template,phase,lineup\n";
  for (const auto& f : game.truth.frames)
    truth << f.frame_ms << ',' << f.template_id << ',' << short_name(f.phase) << ',' << f.lineup << '\n';
  game.truth_csv = truth.str();
  return game;
}

std::vector<TruthFrame> read_truth_csv(std::istream& in) {
  std::string line;
  if (!text::next_line(in, line)) throw data_error(kModule, "truth file is empty");
  std::vector<TruthFrame> out;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    const auto f = text::split(line);
    if (f.size() < 4) throw data_error(kModule, "short truth row");
    const auto ts = text::parse_int<std::int64_t>(f[0]);
    const auto tpl = text::parse_int<int>(f[1]);
    const auto phase = parse_phase_label(f[2]);
    const auto lineup = text::parse_int<int>(f[3]);
    if (!ts || !tpl || !phase || !lineup) throw data_error(kModule, "malformed truth row");
    out.push_back({*ts, *tpl, *phase, *lineup});
  }
  return out;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw data_error(kModule, "partitions differ in length");
  const auto n = a.size();
  if (n < 2) return 1.0;
  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    cells[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, v] : cells) index += choose2(v);
  for (const auto& [key, v] : rows) sum_rows += choose2(v);
  for (const auto& [key, v] : cols) sum_cols += choose2(v);
  const double total = choose2(static_cast<double>(n));
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;  // both partitions trivial and identical in shape
  return (index - expected) / (max_index - expected);
}

RecoveryMetrics evaluate_recovery(std::span<const TruthFrame> truth, std::span<const std::int64_t> frame_ms,
                                  std::span<const int> assignments, std::span<const PhaseLabel> labels) {
  if (frame_ms.size() != assignments.size() || frame_ms.size() != labels.size())
    throw data_error(kModule, "model frames, assignments and labels differ in length");
  std::map<std::int64_t, const TruthFrame*> by_time;
  for (const auto& f : truth) by_time.emplace(f.frame_ms, &f);

  RecoveryMetrics m;
  m.frames = frame_ms.size();
  std::vector<int> true_ids;
  true_ids.reserve(frame_ms.size());
  std::map<int, std::map<int, std::size_t>> per_cluster;
  for (std::size_t i = 0; i < frame_ms.size(); ++i) {
    auto it = by_time.find(frame_ms[i]);
    if (it == by_time.end())
      throw data_error(kModule, "model frame " + std::to_string(frame_ms[i]) + " has no ground truth");
    const auto& t = *it->second;
    true_ids.push_back(t.template_id);
    ++per_cluster[assignments[i]][t.template_id];
    ++m.phase_confusion[static_cast<std::size_t>(t.phase)][static_cast<std::size_t>(labels[i])];
  }
  if (m.frames == 0) return m;

  std::size_t pure = 0;
  for (const auto& [cluster, counts] : per_cluster) {
    std::size_t best = 0;
    for (const auto& [tpl, n] : counts) best = std::max(best, n);
    pure += best;
  }
  m.purity = static_cast<double>(pure) / static_cast<double>(m.frames);
  m.adjusted_rand = adjusted_rand_index(true_ids, assignments);
  return m;
}

}  // namespace courtphase
