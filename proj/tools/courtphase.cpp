// courtphase command line; a thin layer over the C API.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "courtphase/courtphase.h"

namespace {

struct SeedOption {
  std::optional<uint64_t> value;
};

void add_seed(CLI::App* cmd, SeedOption& seed) {
  cmd->add_option("--seed", seed.value, "RNG seed (falls back to $COURTPHASE_SEED)");
}

// Returns false and reports a config error when no seed is available.
bool resolve_seed(const SeedOption& seed, const char* module, uint64_t& out) {
  if (seed.value) {
    out = *seed.value;
    return true;
  }
  if (const char* env = std::getenv("COURTPHASE_SEED")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') {
      out = v;
      return true;
    }
    std::cerr << "{\"error\":{\"module\":\"" << module
              << "\",\"kind\":\"config\",\"code\":2,\"message\":\"COURTPHASE_SEED is not an unsigned integer\"}}\n";
    return false;
  }
  std::cerr << "{\"error\":{\"module\":\"" << module
            << "\",\"kind\":\"config\",\"code\":2,\"message\":\"no seed given; pass --seed or set COURTPHASE_SEED\"}}\n";
  return false;
}

int attack_sign(const std::string& dir) { return dir == "-x" ? -1 : 1; }

int finish(cp_context* ctx, cp_status status, bool quiet) {
  for (size_t i = 0; i < cp_warning_count(ctx); ++i) std::cerr << "warning: " << cp_warning(ctx, i) << "\n";
  if (status != CP_OK) {
    std::cerr << cp_last_error_json(ctx) << "\n";
    return static_cast<int>(status);
  }
  if (!quiet) std::cout << cp_output(ctx);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offense, defense and transition phases from player tracking data", "courtphase"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", cp_version());
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress the summary on stdout");
  const auto direction = CLI::IsMember({"+x", "-x"});

  cp_ingest_options ingest;
  cp_ingest_options_init(&ingest);
  std::string tracking, events, frames_out;
  auto* c_ingest = app.add_subcommand("ingest", "Parse tracking and events, resample to a frame grid");
  c_ingest->add_option("--tracking", tracking, "Tracking CSV")->required();
  c_ingest->add_option("--events", events, "Events CSV")->required();
  c_ingest->add_option("--grid-ms", ingest.grid_ms, "Frame grid in ms")->capture_default_str();
  c_ingest->add_option("--staleness-ms", ingest.staleness_ms, "Drop observations older than this")->capture_default_str();
  c_ingest->add_option("--malformed-tolerance", ingest.malformed_tolerance, "Allowed malformed row fraction")
      ->capture_default_str();
  c_ingest->add_flag("--corner-origin", ingest.corner_origin, "Coordinates are measured from a court corner");
  c_ingest->add_option("--out", frames_out, "Frames CSV to write")->required();

  cp_stints_options stints;
  cp_stints_options_init(&stints);
  std::string st_frames, st_roster, st_out, st_features;
  auto* c_stints = app.add_subcommand("stints", "Split frames into five-player stints");
  c_stints->add_option("--frames", st_frames, "Frames CSV from ingest")->required();
  c_stints->add_option("--roster", st_roster, "Team roster, one player id per line")->required();
  c_stints->add_option("--min-minutes", stints.min_minutes, "Minimum stint length")->capture_default_str();
  c_stints->add_option("--features-dir", st_features, "Also write stint<N>_features.csv here");
  c_stints->add_option("--out", st_out, "Stints JSON to write")->required();

  cp_cluster_options cluster;
  cp_cluster_options_init(&cluster);
  SeedOption cluster_seed;
  std::string cl_features, cl_out, cl_lineup;
  auto* c_cluster = app.add_subcommand("cluster", "k-means over dyad features with bd/td k selection");
  c_cluster->add_option("--features", cl_features, "Features CSV")->required();
  c_cluster->add_option("--k-min", cluster.k_min)->capture_default_str();
  c_cluster->add_option("--k-max", cluster.k_max)->capture_default_str();
  c_cluster->add_option("--threshold", cluster.threshold, "bd/td increment threshold")->capture_default_str();
  c_cluster->add_option("--restarts", cluster.restarts)->capture_default_str();
  c_cluster->add_option("--max-iter", cluster.max_iter)->capture_default_str();
  c_cluster->add_option("--lineup", cl_lineup, "Comma separated player ids of the stint");
  c_cluster->add_option("--grid-ms", cluster.grid_ms, "Frame grid; inferred when omitted");
  add_seed(c_cluster, cluster_seed);
  c_cluster->add_option("--out", cl_out, "Model JSON to write")->required();

  cp_mds_options mds;
  cp_mds_options_init(&mds);
  std::string md_model, md_features, md_out, md_lineup;
  auto* c_mds = app.add_subcommand("mds", "Per-cluster mean distance matrices and classical MDS");
  c_mds->add_option("--model", md_model, "Model JSON")->required();
  c_mds->add_option("--features", md_features, "Features CSV used for the model")->required();
  c_mds->add_option("--lineup", md_lineup, "Comma separated player ids");
  c_mds->add_option("--dims", mds.dims)->capture_default_str();
  c_mds->add_option("--out", md_out, "MDS JSON to write")->required();

  cp_phase_options phase;
  cp_phase_options_init(&phase);
  std::string ph_model, ph_frames, ph_out, ph_lineup, ph_dir = "+x";
  auto* c_phase = app.add_subcommand("phase", "Phase labels, cluster/phase table and transition matrix");
  c_phase->add_option("--model", ph_model, "Model JSON")->required();
  c_phase->add_option("--frames", ph_frames, "Frames CSV from ingest")->required();
  c_phase->add_option("--band-cm", phase.band_cm, "Half width of the transition band")->capture_default_str();
  c_phase->add_option("--attack-dir", ph_dir, "Direction attacked in periods 1-2")->check(direction)->capture_default_str();
  c_phase->add_option("--lineup", ph_lineup, "Comma separated player ids");
  c_phase->add_option("--out", ph_out, "Phase JSON to write")->required();

  cp_shots_options shots;
  cp_shots_options_init(&shots);
  std::string sh_shots, sh_phase, sh_out;
  auto* c_shots = app.add_subcommand("shots", "Field goal attempts per cluster");
  c_shots->add_option("--shots", sh_shots, "Shots CSV")->required();
  c_shots->add_option("--phase", sh_phase, "Phase JSON")->required();
  c_shots->add_option("--tolerance-ms", shots.tolerance_ms)->capture_default_str();
  c_shots->add_option("--out", sh_out, "Shots JSON to write")->required();

  cp_synth_options synth;
  cp_synth_options_init(&synth);
  SeedOption synth_seed;
  std::string sy_config, sy_out;
  bool print_default = false;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic game with known formations");
  c_synth->add_option("--config", sy_config, "Generator config JSON");
  add_seed(c_synth, synth_seed);
  c_synth->add_option("--out-dir", sy_out, "Directory for the generated files");
  c_synth->add_flag("--print-default-config", print_default, "Print the built-in config and exit");

  cp_run_options run;
  cp_run_options_init(&run);
  SeedOption run_seed;
  std::string r_tracking, r_events, r_shots, r_roster, r_out, r_dir = "+x";
  auto* c_run = app.add_subcommand("run-all", "Run the full pipeline for every stint");
  c_run->add_option("--tracking", r_tracking)->required();
  c_run->add_option("--events", r_events)->required();
  c_run->add_option("--shots", r_shots);
  c_run->add_option("--roster", r_roster)->required();
  c_run->add_option("--out-dir", r_out)->required();
  c_run->add_option("--grid-ms", run.grid_ms)->capture_default_str();
  c_run->add_option("--staleness-ms", run.staleness_ms)->capture_default_str();
  c_run->add_option("--malformed-tolerance", run.malformed_tolerance)->capture_default_str();
  c_run->add_flag("--corner-origin", run.corner_origin);
  c_run->add_option("--min-minutes", run.min_minutes)->capture_default_str();
  c_run->add_option("--k-min", run.k_min)->capture_default_str();
  c_run->add_option("--k-max", run.k_max)->capture_default_str();
  c_run->add_option("--threshold", run.threshold)->capture_default_str();
  c_run->add_option("--restarts", run.restarts)->capture_default_str();
  c_run->add_option("--band-cm", run.band_cm)->capture_default_str();
  c_run->add_option("--attack-dir", r_dir)->check(direction)->capture_default_str();
  c_run->add_option("--tolerance-ms", run.tolerance_ms)->capture_default_str();
  c_run->add_flag("--procrustes", run.procrustes, "Rotate MDS panels onto the first cluster");
  add_seed(c_run, run_seed);

  cp_plot_options plot;
  cp_plot_options_init(&plot);
  std::string pl_mds, pl_phase, pl_out;
  auto* c_plot = app.add_subcommand("plot", "Profile plot and MDS maps as SVG");
  c_plot->add_option("--mds", pl_mds, "MDS JSON")->required();
  c_plot->add_option("--phase", pl_phase, "Phase JSON, for panel titles");
  c_plot->add_option("--out-dir", pl_out)->required();
  c_plot->add_flag("--procrustes", plot.procrustes);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  cp_context* ctx = cp_context_new();
  if (!ctx) return 4;
  auto c = [](const std::string& s) { return s.empty() ? nullptr : s.c_str(); };
  int rc = 0;

  if (c_ingest->parsed()) {
    ingest.tracking = c(tracking);
    ingest.events = c(events);
    ingest.out = c(frames_out);
    rc = finish(ctx, cp_cmd_ingest(ctx, &ingest), quiet);
  } else if (c_stints->parsed()) {
    stints.frames = c(st_frames);
    stints.roster = c(st_roster);
    stints.out = c(st_out);
    stints.features_dir = c(st_features);
    rc = finish(ctx, cp_cmd_stints(ctx, &stints), quiet);
  } else if (c_cluster->parsed()) {
    cluster.features = c(cl_features);
    cluster.out = c(cl_out);
    cluster.lineup = c(cl_lineup);
    rc = resolve_seed(cluster_seed, "cluster", cluster.seed) ? finish(ctx, cp_cmd_cluster(ctx, &cluster), quiet) : 2;
  } else if (c_mds->parsed()) {
    mds.model = c(md_model);
    mds.features = c(md_features);
    mds.out = c(md_out);
    mds.lineup = c(md_lineup);
    rc = finish(ctx, cp_cmd_mds(ctx, &mds), quiet);
  } else if (c_phase->parsed()) {
    phase.model = c(ph_model);
    phase.frames = c(ph_frames);
    phase.out = c(ph_out);
    phase.lineup = c(ph_lineup);
    phase.attack_sign = attack_sign(ph_dir);
    rc = finish(ctx, cp_cmd_phase(ctx, &phase), quiet);
  } else if (c_shots->parsed()) {
    shots.shots = c(sh_shots);
    shots.phase = c(sh_phase);
    shots.out = c(sh_out);
    rc = finish(ctx, cp_cmd_shots(ctx, &shots), quiet);
  } else if (c_synth->parsed()) {
    if (print_default) {
      std::cout << cp_synth_default_config(ctx);
    } else {
      synth.config = c(sy_config);
      synth.out_dir = c(sy_out);
      rc = resolve_seed(synth_seed, "synth", synth.seed) ? finish(ctx, cp_cmd_synth(ctx, &synth), quiet) : 2;
    }
  } else if (c_run->parsed()) {
    run.tracking = c(r_tracking);
    run.events = c(r_events);
    run.shots = c(r_shots);
    run.roster = c(r_roster);
    run.out_dir = c(r_out);
    run.attack_sign = attack_sign(r_dir);
    rc = resolve_seed(run_seed, "cli_report", run.seed) ? finish(ctx, cp_cmd_run_all(ctx, &run), quiet) : 2;
  } else if (c_plot->parsed()) {
    plot.mds = c(pl_mds);
    plot.phase = c(pl_phase);
    plot.out_dir = c(pl_out);
    rc = finish(ctx, cp_cmd_plot(ctx, &plot), quiet);
  }
  cp_context_free(ctx);
  return rc;
}
