// Acceptance suite: one PASS/FAIL line per criterion.
// usage: acceptance [path to the courtphase CLI]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "courtphase/cluster.hpp"
#include "courtphase/ingest.hpp"
#include "courtphase/mds.hpp"
#include "courtphase/phase.hpp"
#include "courtphase/pipeline.hpp"
#include "courtphase/segment.hpp"
#include "courtphase/shots.hpp"
#include "courtphase/synth.hpp"
#include "oracles.hpp"

using namespace courtphase;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 3) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << v;
  return s.str();
}

std::string sci(double v) {
  std::ostringstream s;
  s.precision(2);
  s << std::scientific << v;
  return s.str();
}

// ---------------------------------------------------------------------------

Outcome kmeans_oracle() {
  constexpr int kInstances = 100;
  constexpr int kRestarts = 50;
  const auto t0 = Clock::now();
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  int agree = 0;
  double worst = 0.0;
  for (int i = 0; i < kInstances; ++i) {
    const std::size_t n = 2 + gen() % 9;
    oracle::Matrix rows(n, std::vector<double>(10));
    for (auto& r : rows)
      for (auto& v : r) v = u(gen);
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    const auto model = kmeans(PointSet(10, flat), {2, static_cast<std::uint64_t>(i), kRestarts, 300, 1e-6});
    const double diff = std::abs(model.wcss - oracle::best_two_partition_wcss(rows));
    worst = std::max(worst, diff);
    if (diff <= 1e-9) ++agree;
  }
  const double elapsed = seconds_since(t0);
  return {agree == kInstances && elapsed < 10.0,
          std::to_string(agree) + "/" + std::to_string(kInstances) + " within 1e-9 (worst " + sci(worst) +
              "), restarts " + std::to_string(kRestarts) + ", " + fmt(elapsed, 2) + " s"};
}

// One synthetic game analysed in memory the same way run-all does.
struct GameAnalysis {
  int k = 0;
  bool largest_is_transition = false;
  bool smallest_is_defense = false;
};

GameAnalysis analyse_game(const SynthConfig& config, std::uint64_t seed) {
  const auto game = generate_game(config, seed);
  std::istringstream tracking(game.tracking_csv), events_in(game.events_csv), roster_in(game.roster_txt);
  const auto parsed = parse_tracking(tracking);
  const auto events = parse_events(events_in);
  const GameTimeline timeline(events);
  const auto frames = resample_frames(filter_active(parsed.samples, events), {}, timeline);
  const auto roster = read_roster(roster_in);
  const auto stints = extract_stints(frames, roster, 5 * 60'000);
  if (stints.stints.empty()) throw std::runtime_error("no stint in synthetic game");
  const auto& stint = stints.stints.front();
  const auto features = dyad_features(stint, frames);

  Diagnostics diag;
  ClusterParams params;
  params.seed = seed;
  const auto stage = cluster_stage(features, params, diag);
  const int k = stage.selection.k;
  const auto mds = mds_stage(stage.model.assignments, features, k);
  std::vector<std::int64_t> frame_ms;
  for (const auto& f : features) frame_ms.push_back(f.frame_ms);
  const auto phase = phase_stage(frames, stint.lineup, frame_ms, stage.model.assignments, k, 400.0, {+1});

  std::size_t widest = 0, tightest = 0;
  for (std::size_t c = 1; c < mds.matrices.size(); ++c) {
    if (mds.matrices[c].mean_off_diagonal() > mds.matrices[widest].mean_off_diagonal()) widest = c;
    if (mds.matrices[c].mean_off_diagonal() < mds.matrices[tightest].mean_off_diagonal()) tightest = c;
  }
  return {k, phase.table.rows[widest].majority == PhaseLabel::Transition,
          phase.table.rows[tightest].majority == PhaseLabel::Defense};
}

std::vector<GameAnalysis> synthetic_games(double noise_sd_cm) {
  auto config = default_synth_config();
  for (auto& t : config.templates) t.noise_sd_cm = noise_sd_cm;
  std::vector<GameAnalysis> out;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) out.push_back(analyse_game(config, seed));
  return out;
}

Outcome k_selection(const std::vector<GameAnalysis>& games) {
  int hits = 0;
  std::string ks;
  for (const auto& g : games) {
    hits += g.k == 6;
    ks += (ks.empty() ? "" : ",") + std::to_string(g.k);
  }
  return {hits >= 18, std::to_string(hits) + "/20 seeds chose k=6 at noise sd 40 cm (k: " + ks + ")"};
}

Outcome qualitative(const std::vector<GameAnalysis>& games) {
  int hits = 0, wide = 0, tight = 0;
  for (const auto& g : games) {
    wide += g.largest_is_transition;
    tight += g.smallest_is_defense;
    hits += g.largest_is_transition && g.smallest_is_defense;
  }
  return {hits >= 18, std::to_string(hits) + "/20 seeds (widest cluster TR-majority " + std::to_string(wide) +
                          ", tightest D-majority " + std::to_string(tight) + ")"};
}

Outcome mds_reconstruction() {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(-1400.0, 1400.0);
  double worst_d = 0.0, worst_s = 0.0;
  for (int set = 0; set < 200; ++set) {
    oracle::Matrix pts(5, std::vector<double>(2));
    for (auto& p : pts) p = {u(gen), u(gen) * 750.0 / 1400.0};
    const auto d = oracle::pairwise_distances(pts);
    SquareMatrix m(5);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) m(i, j) = d[i][j];
    const auto e = classical_mds(m, 2);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        const double r = std::hypot(e.coords[i][0] - e.coords[j][0], e.coords[i][1] - e.coords[j][1]);
        worst_d = std::max(worst_d, std::abs(r - d[i][j]));
      }
    worst_s = std::max(worst_s, std::abs(e.strain_share - 1.0));
  }
  return {worst_d <= 1e-6 && worst_s <= 1e-9,
          "200 sets, worst distance error " + sci(worst_d) + " cm, worst |strain - 1| " + sci(worst_s)};
}

Outcome table_fixtures() {
  using P = PhaseLabel;
  bool ok = true;
  std::vector<std::string> notes;

  // Cluster/phase table from integer counts.
  std::vector<int> a;
  std::vector<PhaseLabel> l;
  const auto& counts = oracle::table1_counts();
  for (int c = 0; c < 6; ++c) {
    for (int i = 0; i < counts[c].tr; ++i) a.push_back(c), l.push_back(P::Transition);
    for (int i = 0; i < counts[c].d; ++i) a.push_back(c), l.push_back(P::Defense);
    for (int i = 0; i < counts[c].o; ++i) a.push_back(c), l.push_back(P::Offense);
  }
  const auto t = cluster_phase_table(a, l, 6);
  double worst_sum = 0.0, worst_print = 0.0;
  for (int c = 0; c < 6; ++c) {
    const auto& row = t.rows[c];
    worst_sum = std::max(worst_sum, std::abs(row.percent[0] + row.percent[1] + row.percent[2] - 100.0));
    for (int p = 0; p < 3; ++p)
      worst_print = std::max(worst_print, std::abs(row.percent[p] - oracle::table1_printed()[p][c]));
  }
  ok = ok && worst_sum <= 1e-9 && worst_print < 0.005 + 1e-12;
  notes.push_back("phase table column sums off by " + sci(worst_sum) + ", printed cells within " + fmt(worst_print, 4));

  // Transition matrix from a realised switch sequence.
  const auto& tc = oracle::table2_counts();
  const auto seq = oracle::sequence_from_switch_counts(tc, 5);
  const auto m = transition_matrix(seq, std::vector<std::uint8_t>(seq.size(), 1), 6);
  bool structure = true;
  double worst_col = 0.0, worst_cell = 0.0;
  for (int from = 0; from < 6; ++from) {
    double col = 0.0;
    for (int to = 0; to < 6; ++to) {
      col += m.pct(to, from);
      worst_cell = std::max(worst_cell, std::abs(m.pct(to, from) - oracle::table2_printed()[to][from]));
      structure = structure && m.count(to, from) == static_cast<std::uint64_t>(tc[to][from]);
    }
    structure = structure && m.pct(from, from) == 0.0;
    worst_col = std::max(worst_col, std::abs(col - 100.0));
  }
  ok = ok && structure && worst_col <= 1e-9 && worst_cell < 0.005 + 1e-12;
  notes.push_back("transition matrix zero diagonal " + std::string(structure ? "yes" : "no") + ", column sums off by " +
                  sci(worst_col));

  // Shot report.
  std::vector<ShotEvent> shots;
  std::vector<std::optional<int>> clusters;
  auto add = [&](int cluster, int attempts, int made) {
    for (int i = 0; i < attempts; ++i) {
      shots.push_back({static_cast<std::int64_t>(shots.size()) * 1000, i < made, {}});
      clusters.push_back(cluster);
    }
  };
  add(5, 8, 5);
  add(0, 4, 2);
  add(1, 2, 0);
  add(4, 1, 0);
  const auto r = shot_report(clusters, shots, 6);
  const bool shots_ok = r.attempts == 15 && r.made == 7 && r.percent && std::round(*r.percent * 100.0) == 4667.0 &&
                        r.clusters[5].attempts == 8 && r.clusters[5].made == 5 && r.clusters[5].percent &&
                        *r.clusters[5].percent == 62.5;
  ok = ok && shots_ok;
  notes.push_back("shots " + std::to_string(r.made) + "/" + std::to_string(r.attempts) + " = " +
                  (r.percent ? fmt(*r.percent, 2) : "n/a") + "%, C6 " + std::to_string(r.clusters[5].made) + "/" +
                  std::to_string(r.clusters[5].attempts));
  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  return {ok, detail};
}

Outcome switch_rate_fixture() {
  const auto r = switch_rate(309, 501'000);
  const double spp = r.seconds_per_switch.value_or(-1.0);
  return {std::abs(r.per_second - 0.6168) <= 1e-3 && std::abs(spp - 1.621) <= 1e-3,
          fmt(r.per_second, 4) + " switches/s, one every " + fmt(spp, 3) + " s"};
}

Outcome determinism(const std::string& cli) {
  const auto root = fs::temp_directory_path() / "courtphase_acceptance_determinism";
  fs::remove_all(root);
  const auto game = generate_game(default_synth_config(), 42);
  write_file(root / "in" / "tracking.csv", game.tracking_csv);
  write_file(root / "in" / "events.csv", game.events_csv);
  write_file(root / "in" / "shots.csv", game.shots_csv);
  write_file(root / "in" / "roster.txt", game.roster_txt);
  std::string how;
  std::vector<std::string> manifests;
  for (const char* name : {"a", "b"}) {
    const auto out = root / name;
    if (!cli.empty()) {
      how = "CLI";
      const auto in = root / "in";
      const std::string cmd = "\"" + cli + "\" run-all -q --seed 7 --tracking \"" + (in / "tracking.csv").string() +
                              "\" --events \"" + (in / "events.csv").string() + "\" --shots \"" +
                              (in / "shots.csv").string() + "\" --roster \"" + (in / "roster.txt").string() +
                              "\" --out-dir \"" + out.string() + "\"";
      if (std::system(cmd.c_str()) != 0) return {false, "run-all exited with an error"};
    } else {
      how = "library";
      RunConfig c;
      c.tracking = root / "in" / "tracking.csv";
      c.events = root / "in" / "events.csv";
      c.shots = root / "in" / "shots.csv";
      c.roster = root / "in" / "roster.txt";
      c.out_dir = out;
      c.cluster.seed = 7;
      run_all(c);
    }
    manifests.push_back(read_file(out / "manifest.json", "acceptance"));
  }
  fs::remove_all(root);
  const bool same = manifests[0] == manifests[1] && !manifests[0].empty();
  return {same, std::string(same ? "manifests identical" : "manifests differ") + " (" +
                    std::to_string(manifests[0].size()) + " bytes, via " + how + ", sha256 " +
                    sha256_hex(manifests[0]).substr(0, 12) + ")"};
}

Outcome label_flip() {
  const Lineup lineup{"a", "b", "c", "d", "e"};
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> ux(-1400.0, 1400.0), uy(-750.0, 750.0), ub(0.0, 800.0);
    const double band = ub(gen);
    const AttackDirection dir{gen() % 2 ? +1 : -1};
    std::array<std::size_t, 3> base{}, flip{};
    for (int i = 0; i < 1000; ++i) {
      Frame f;
      f.timestamp_ms = i * 50;
      f.period = 1 + static_cast<int>(gen() % 4);
      for (const auto& id : lineup) f.players[id] = {ux(gen), uy(gen)};
      // Some frames sit exactly on the band edge.
      if (i % 50 == 0)
        for (const auto& id : lineup) f.players[id].x_cm = (i % 100 == 0 ? band : -band);
      ++base[static_cast<std::size_t>(label_frame(f, lineup, band, dir))];
      ++flip[static_cast<std::size_t>(label_frame(f, lineup, band, dir.flipped()))];
    }
    good += base[0] == flip[0] && base[1] == flip[2] && base[2] == flip[1];
  }
  return {good == 20, std::to_string(good) + "/20 seeds: O and D swap, TR fixed (1000 frames each)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  int failures = 0;
  auto report = [&](const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  };

  report("kmeans-oracle", kmeans_oracle);
  std::vector<GameAnalysis> games;
  std::string games_error;
  try {
    games = synthetic_games(40.0);
  } catch (const std::exception& e) {
    games_error = e.what();
  }
  report("k-selection-recovery", [&] {
    if (!games_error.empty()) throw std::runtime_error(games_error);
    return k_selection(games);
  });
  report("mds-reconstruction", mds_reconstruction);
  report("qualitative-finding", [&] {
    if (!games_error.empty()) throw std::runtime_error(games_error);
    return qualitative(games);
  });
  report("table-fixtures", table_fixtures);
  report("switch-rate", switch_rate_fixture);
  report("determinism", [&] { return determinism(cli); });
  report("phase-label-flip", label_flip);

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
