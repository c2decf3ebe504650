#include "courtphase/courtphase.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "courtphase/error.hpp"
#include "courtphase/pipeline.hpp"
#include "courtphase/report.hpp"
#include "courtphase/synth.hpp"
#include "text.hpp"

using namespace courtphase;
namespace fs = std::filesystem;
using nlohmann::json;

struct cp_context {
  std::string error;
  std::string module;
  std::string error_json;
  std::vector<std::string> warnings;
  std::string output;
  std::string scratch;

  void reset() {
    error.clear();
    module.clear();
    error_json.clear();
    warnings.clear();
    output.clear();
  }
};

struct cp_cluster_model {
  ClusterModel model;
  std::vector<double> centroids;
};

namespace {

cp_status fail(cp_context* ctx, const std::string& module, ErrorKind kind, const std::string& message) {
  ctx->module = module;
  ctx->error = message;
  ctx->error_json = error_json(module, static_cast<int>(kind), message);
  return static_cast<cp_status>(kind);
}

template <class F>
cp_status guarded(cp_context* ctx, const char* module, F&& body) {
  if (!ctx) return CP_ERR_CONFIG;
  ctx->reset();
  try {
    body();
    return CP_OK;
  } catch (const Error& e) {
    return fail(ctx, e.module(), e.kind(), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(ctx, module, ErrorKind::Config, e.what());
  } catch (const std::exception& e) {
    return fail(ctx, module, ErrorKind::Internal, e.what());
  }
}

std::string required(const char* value, const char* module, const char* what) {
  if (!value || !*value) throw config_error(module, std::string(what) + " is required");
  return value;
}

bool given(const char* value) { return value && *value; }

std::istringstream open_input(const char* path, const char* module, const char* what) {
  return std::istringstream(read_file(required(path, module, what), module));
}

json load_json(const char* path, const char* module, const char* what) {
  auto in = open_input(path, module, what);
  try {
    return json::parse(in.str());
  } catch (const json::exception& e) {
    throw data_error(module, std::string(what) + " is not valid JSON: " + e.what());
  }
}

void check_points(const double* points, size_t n, size_t dim, const char* module) {
  if (!points && n * dim > 0) throw config_error(module, "points pointer is null");
  if (dim == 0) throw config_error(module, "dimension must be positive");
  for (size_t i = 0; i < n * dim; ++i)
    if (!std::isfinite(points[i])) throw data_error(module, "points contain a non-finite value");
}

Lineup parse_lineup(const std::string& text, const char* module) {
  const auto parts = text::split(text, ',');
  std::set<std::string> ids;
  for (const auto& p : parts) {
    const auto id = std::string(text::trim(p));
    if (!id.empty()) ids.insert(id);
  }
  if (ids.size() != kLineupSize) throw config_error(module, "lineup must name five distinct players");
  Lineup l;
  std::copy(ids.begin(), ids.end(), l.begin());
  return l;
}

// Lineup from an explicit option, else from the artifact, else player indices.
Lineup resolve_lineup(const char* option, const std::optional<Lineup>& stored, const char* module, bool need_real) {
  if (given(option)) return parse_lineup(option, module);
  if (stored) return *stored;
  if (need_real) throw config_error(module, "lineup unknown; the model has none and no lineup was given");
  return Lineup{"0", "1", "2", "3", "4"};
}

std::optional<Lineup> stored_lineup(const json& j) {
  if (!j.contains("lineup") || j["lineup"].is_null()) return std::nullopt;
  Lineup l;
  for (std::size_t i = 0; i < kLineupSize && i < j["lineup"].size(); ++i) l[i] = j["lineup"][i].get<std::string>();
  return l;
}

std::int64_t infer_grid(std::span<const DyadVector> features) {
  std::int64_t g = 0;
  for (std::size_t i = 1; i < features.size(); ++i) g = std::gcd(g, features[i].frame_ms - features[i - 1].frame_ms);
  return g > 0 ? g : 50;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

TrackingSchema schema_for(double tolerance, int corner) {
  TrackingSchema s;
  s.malformed_tolerance = tolerance;
  s.origin = corner ? CoordinateOrigin::Corner : CoordinateOrigin::Center;
  return s;
}

AttackDirection direction_for(int sign, const char* module) {
  if (sign != 1 && sign != -1) throw config_error(module, "attack direction must be +x or -x");
  return {sign};
}

}  // namespace

extern "C" {

const char* cp_version(void) { return "1.0.0"; }

cp_context* cp_context_new(void) { return new (std::nothrow) cp_context(); }
void cp_context_free(cp_context* ctx) { delete ctx; }
const char* cp_last_error(const cp_context* ctx) { return ctx ? ctx->error.c_str() : "null context"; }
const char* cp_last_error_module(const cp_context* ctx) { return ctx ? ctx->module.c_str() : ""; }
const char* cp_last_error_json(const cp_context* ctx) { return ctx ? ctx->error_json.c_str() : ""; }
size_t cp_warning_count(const cp_context* ctx) { return ctx ? ctx->warnings.size() : 0; }
const char* cp_warning(const cp_context* ctx, size_t index) {
  return ctx && index < ctx->warnings.size() ? ctx->warnings[index].c_str() : nullptr;
}
const char* cp_output(const cp_context* ctx) { return ctx ? ctx->output.c_str() : ""; }

cp_status cp_kmeans(cp_context* ctx, const double* points, size_t n, size_t dim, int k, uint64_t seed, int restarts,
                    int max_iter, double tol, cp_cluster_model** out) {
  return guarded(ctx, "cluster", [&] {
    if (!out) throw config_error("cluster", "output handle pointer is null");
    *out = nullptr;
    check_points(points, n, dim, "cluster");
    const PointSet ps(dim, std::vector<double>(points, points + n * dim));
    auto handle = std::make_unique<cp_cluster_model>();
    handle->model = kmeans(ps, {k, seed, restarts, max_iter, tol});
    for (const auto& c : handle->model.centroids) handle->centroids.insert(handle->centroids.end(), c.begin(), c.end());
    *out = handle.release();
  });
}

void cp_cluster_model_free(cp_cluster_model* model) { delete model; }
int cp_cluster_model_k(const cp_cluster_model* m) { return m ? m->model.k : 0; }
size_t cp_cluster_model_size(const cp_cluster_model* m) { return m ? m->model.assignments.size() : 0; }
size_t cp_cluster_model_dim(const cp_cluster_model* m) { return m ? m->model.dim : 0; }
const int* cp_cluster_model_assignments(const cp_cluster_model* m) { return m ? m->model.assignments.data() : nullptr; }
const double* cp_cluster_model_centroids(const cp_cluster_model* m) { return m ? m->centroids.data() : nullptr; }
double cp_cluster_model_wcss(const cp_cluster_model* m) { return m ? m->model.wcss : 0.0; }
double cp_cluster_model_tss(const cp_cluster_model* m) { return m ? m->model.tss : 0.0; }
double cp_cluster_model_bd_td(const cp_cluster_model* m) { return m ? m->model.bd_td : 0.0; }

cp_status cp_bd_td_curve(cp_context* ctx, const double* points, size_t n, size_t dim, int k_min, int k_max,
                         uint64_t seed, int restarts, int max_iter, double tol, double* out_bd_td) {
  return guarded(ctx, "cluster", [&] {
    if (!out_bd_td) throw config_error("cluster", "output pointer is null");
    check_points(points, n, dim, "cluster");
    const PointSet ps(dim, std::vector<double>(points, points + n * dim));
    const auto curve = bd_td_curve(ps, k_min, k_max, seed, restarts, max_iter, tol);
    for (std::size_t i = 0; i < curve.entries.size(); ++i) out_bd_td[i] = curve.entries[i].bd_td;
  });
}

cp_status cp_select_k(cp_context* ctx, const int* ks, const double* bd_td, size_t count, double threshold, int* out_k,
                      int* out_saturated) {
  return guarded(ctx, "cluster", [&] {
    if (!ks || !bd_td || !out_k) throw config_error("cluster", "null argument");
    std::vector<CurveEntry> entries;
    for (size_t i = 0; i < count; ++i) entries.push_back({ks[i], bd_td[i]});
    const auto sel = select_k(entries, threshold);
    *out_k = sel.k;
    if (out_saturated) *out_saturated = sel.saturated ? 1 : 0;
    if (sel.non_monotone) ctx->warnings.push_back("cluster: bd/td curve is not monotone");
  });
}

cp_status cp_classical_mds(cp_context* ctx, const double* d, size_t n, size_t dims, double* coords,
                           double* eigenvalues, double* strain_share) {
  return guarded(ctx, "mds", [&] {
    if (!d || !coords) throw config_error("mds", "null argument");
    SquareMatrix m(n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) m(i, j) = d[i * n + j];
    const auto e = classical_mds(m, dims);
    for (size_t i = 0; i < n; ++i)
      for (size_t k = 0; k < dims; ++k) coords[i * dims + k] = e.coords[i][k];
    if (eigenvalues)
      for (size_t k = 0; k < dims; ++k) eigenvalues[k] = e.eigenvalues[k];
    if (strain_share) *strain_share = e.strain_share;
  });
}

cp_status cp_transition_matrix(cp_context* ctx, const int* assignments, const unsigned char* contiguous, size_t n,
                               int k, uint64_t* counts, double* percent, uint64_t* switches) {
  return guarded(ctx, "phase", [&] {
    if ((!assignments && n > 0) || !counts || !percent) throw config_error("phase", "null argument");
    std::vector<std::uint8_t> contig(n, 1);
    if (n > 0) contig[0] = 0;
    if (contiguous) contig.assign(contiguous, contiguous + n);
    const auto m = transition_matrix(std::span<const int>(assignments, n), contig, k);
    std::copy(m.counts.begin(), m.counts.end(), counts);
    std::copy(m.percent.begin(), m.percent.end(), percent);
    if (switches) *switches = m.switch_count;
  });
}

cp_phase cp_label_frame(double mean_x_cm, double band_cm, int attack_sign) {
  return static_cast<cp_phase>(label_frame(mean_x_cm, band_cm, attack_sign));
}

cp_status cp_switch_rate(cp_context* ctx, uint64_t switches, int64_t duration_ms, double* per_second,
                         double* seconds_per_switch) {
  return guarded(ctx, "phase", [&] {
    const auto r = switch_rate(switches, duration_ms);
    if (per_second) *per_second = r.per_second;
    if (seconds_per_switch)
      *seconds_per_switch = r.seconds_per_switch.value_or(std::numeric_limits<double>::quiet_NaN());
  });
}

void cp_ingest_options_init(cp_ingest_options* o) {
  *o = {};
  o->grid_ms = 50;
  o->staleness_ms = 500;
  o->malformed_tolerance = 0.01;
}

void cp_stints_options_init(cp_stints_options* o) {
  *o = {};
  o->min_minutes = 5.0;
}

void cp_cluster_options_init(cp_cluster_options* o) {
  *o = {};
  o->k_min = 2;
  o->k_max = 10;
  o->threshold = 0.10;
  o->restarts = 20;
  o->max_iter = 300;
  o->tol = 1e-6;
}

void cp_mds_options_init(cp_mds_options* o) {
  *o = {};
  o->dims = 2;
}

void cp_phase_options_init(cp_phase_options* o) {
  *o = {};
  o->band_cm = 400.0;
  o->attack_sign = 1;
}

void cp_shots_options_init(cp_shots_options* o) {
  *o = {};
  o->tolerance_ms = 1000;
}

void cp_synth_options_init(cp_synth_options* o) { *o = {}; }

void cp_run_options_init(cp_run_options* o) {
  *o = {};
  o->grid_ms = 50;
  o->staleness_ms = 500;
  o->malformed_tolerance = 0.01;
  o->min_minutes = 5.0;
  o->k_min = 2;
  o->k_max = 10;
  o->threshold = 0.10;
  o->restarts = 20;
  o->band_cm = 400.0;
  o->attack_sign = 1;
  o->tolerance_ms = 1000;
}

void cp_plot_options_init(cp_plot_options* o) { *o = {}; }

cp_status cp_cmd_ingest(cp_context* ctx, const cp_ingest_options* o) {
  return guarded(ctx, "ingest", [&] {
    const auto out = required(o->out, "ingest", "output path");
    if (o->grid_ms <= 0 || o->staleness_ms < 0) throw config_error("ingest", "grid must be positive, staleness >= 0");
    Diagnostics diag;
    const auto r = ingest_files(required(o->tracking, "ingest", "tracking file"),
                                required(o->events, "ingest", "events file"),
                                schema_for(o->malformed_tolerance, o->corner_origin),
                                {o->grid_ms, o->staleness_ms}, diag);
    std::ostringstream csv;
    write_frames_csv(csv, r.frames);
    write_file(out, csv.str());
    ctx->warnings = diag.warnings;
    ctx->output = "rows " + std::to_string(r.rows) + ", malformed " + std::to_string(r.malformed) + ", in play " +
                  std::to_string(r.retained) + ", frames " + std::to_string(r.frames.frames.size()) + "\n";
  });
}

cp_status cp_cmd_stints(cp_context* ctx, const cp_stints_options* o) {
  return guarded(ctx, "segment", [&] {
    const auto out = required(o->out, "segment", "output path");
    if (o->min_minutes <= 0.0) throw config_error("segment", "min minutes must be positive");
    auto frames_in = open_input(o->frames, "segment", "frames file");
    auto roster_in = open_input(o->roster, "segment", "roster file");
    const auto frames = read_frames_csv(frames_in);
    const auto roster = read_roster(roster_in);
    const auto min_ms = static_cast<std::int64_t>(o->min_minutes * 60'000.0);
    const auto stints = extract_stints(frames, roster, min_ms);
    write_file(out, dump(stints_to_json(stints, frames, min_ms)));
    std::ostringstream summary;
    for (const auto& s : stints.stints) {
      summary << "stint " << s.id << ": ";
      for (std::size_t i = 0; i < kLineupSize; ++i) summary << (i ? "," : "") << s.lineup[i];
      summary << "  " << text::fixed(static_cast<double>(s.total_duration_ms) / 60'000.0, 2) << " min\n";
      if (given(o->features_dir)) {
        std::ostringstream f;
        write_features_csv(f, dyad_features(s, frames));
        write_file(fs::path(o->features_dir) / ("stint" + std::to_string(s.id) + "_features.csv"), f.str());
      }
    }
    if (stints.stints.empty()) ctx->warnings.push_back("segment: no lineup reached the minimum stint duration");
    ctx->output = summary.str();
  });
}

cp_status cp_cmd_cluster(cp_context* ctx, const cp_cluster_options* o) {
  return guarded(ctx, "cluster", [&] {
    const auto out = required(o->out, "cluster", "output path");
    auto in = open_input(o->features, "cluster", "features file");
    const auto features = read_features_csv(in);
    Diagnostics diag;
    StintModel model;
    if (given(o->lineup)) model.lineup = parse_lineup(o->lineup, "cluster");
    model.grid_ms = o->grid_ms > 0 ? o->grid_ms : infer_grid(features);
    model.duration_ms = static_cast<std::int64_t>(features.size()) * model.grid_ms;
    for (const auto& f : features) model.frame_ms.push_back(f.frame_ms);
    model.stage = cluster_stage(features, {o->k_min, o->k_max, o->threshold, o->seed, o->restarts, o->max_iter, o->tol},
                                diag);
    auto j = model_to_json(model);
    if (!given(o->lineup)) j["lineup"] = nullptr;
    write_file(out, dump(j));
    ctx->warnings = diag.warnings;
    std::ostringstream summary;
    summary << "k  bd/td\n";
    for (const auto& e : model.stage.curve.entries)
      summary << e.k << (e.k < 10 ? "  " : " ") << text::fixed(e.bd_td, 4) << (e.k == model.stage.selection.k ? "  *" : "")
              << "\n";
    ctx->output = summary.str();
  });
}

cp_status cp_cmd_mds(cp_context* ctx, const cp_mds_options* o) {
  return guarded(ctx, "mds", [&] {
    const auto out = required(o->out, "mds", "output path");
    const auto mj = load_json(o->model, "mds", "model file");
    const auto model = model_from_json(mj);
    auto in = open_input(o->features, "mds", "features file");
    const auto features = read_features_csv(in);
    if (features.size() != model.frame_ms.size()) throw data_error("mds", "features and model cover different frames");
    for (std::size_t i = 0; i < features.size(); ++i)
      if (features[i].frame_ms != model.frame_ms[i]) throw data_error("mds", "features and model cover different frames");
    const auto lineup = resolve_lineup(o->lineup, stored_lineup(mj), "mds", false);
    const auto mds = mds_stage(model.stage.model.assignments, features, model.stage.model.k, o->dims);
    write_file(out, dump(mds_to_json(mds, lineup)));
    std::ostringstream summary;
    for (const auto& e : mds.embeddings)
      summary << cluster_name(e.cluster_id) << "  strain share " << text::fixed(e.strain_share, 4) << "\n";
    ctx->output = summary.str();
  });
}

cp_status cp_cmd_phase(cp_context* ctx, const cp_phase_options* o) {
  return guarded(ctx, "phase", [&] {
    const auto out = required(o->out, "phase", "output path");
    const auto mj = load_json(o->model, "phase", "model file");
    const auto model = model_from_json(mj);
    auto in = open_input(o->frames, "phase", "frames file");
    const auto frames = read_frames_csv(in);
    const auto lineup = resolve_lineup(o->lineup, stored_lineup(mj), "phase", true);
    if (o->band_cm < 0.0) throw config_error("phase", "band_cm must be >= 0");
    const auto dir = direction_for(o->attack_sign, "phase");
    const auto phase = phase_stage(frames, lineup, model.frame_ms, model.stage.model.assignments, model.stage.model.k,
                                   o->band_cm, dir);
    write_file(out, dump(phase_to_json(phase, o->band_cm, dir)));
    std::string seconds = phase.rate.seconds_per_switch ? text::fixed(*phase.rate.seconds_per_switch, 3) : "n/a";
    ctx->output = phase_table_text(phase.table) + "\n" + transition_matrix_text(phase.transitions) + "\nswitches " +
                  std::to_string(phase.transitions.switch_count) + ", " + text::fixed(phase.rate.per_second, 4) +
                  " per second, one every " + seconds + " s\n";
  });
}

cp_status cp_cmd_shots(cp_context* ctx, const cp_shots_options* o) {
  return guarded(ctx, "shots", [&] {
    const auto out = required(o->out, "shots", "output path");
    if (o->tolerance_ms < 0) throw config_error("shots", "tolerance must be >= 0");
    auto in = open_input(o->shots, "shots", "shots file");
    const auto shots = parse_shots(in);
    const auto phase = phase_from_json(load_json(o->phase, "shots", "phase file"));
    const auto clusters = attach_shots(shots, phase.frame_ms, phase.assignments, o->tolerance_ms);
    const auto report = shot_report(clusters, shots, phase.transitions.k);
    write_file(out, dump(shots_to_json(report, shots, clusters, o->tolerance_ms)));
    if (report.unmatched > 0)
      ctx->warnings.push_back("shots: " + std::to_string(report.unmatched) + " shots matched no frame");
    ctx->output = shot_report_text(report);
  });
}

cp_status cp_cmd_synth(cp_context* ctx, const cp_synth_options* o) {
  return guarded(ctx, "synth", [&] {
    const fs::path dir = required(o->out_dir, "synth", "output directory");
    SynthConfig config = default_synth_config();
    if (given(o->config)) {
      auto in = open_input(o->config, "synth", "config file");
      config = parse_synth_config(in);
    }
    const auto game = generate_game(config, o->seed);
    write_file(dir / "tracking.csv", game.tracking_csv);
    write_file(dir / "events.csv", game.events_csv);
    write_file(dir / "shots.csv", game.shots_csv);
    write_file(dir / "roster.txt", game.roster_txt);
    write_file(dir / "truth.csv", game.truth_csv);
    ctx->output = "frames " + std::to_string(game.truth.frames.size()) + ", shots " +
                  std::to_string(game.truth.shots.size()) + "\n";
  });
}

cp_status cp_cmd_run_all(cp_context* ctx, const cp_run_options* o) {
  return guarded(ctx, "cli_report", [&] {
    RunConfig c;
    c.tracking = required(o->tracking, "ingest", "tracking file");
    c.events = required(o->events, "ingest", "events file");
    if (given(o->shots)) c.shots = o->shots;
    c.roster = required(o->roster, "segment", "roster file");
    c.out_dir = required(o->out_dir, "cli_report", "output directory");
    c.schema = schema_for(o->malformed_tolerance, o->corner_origin);
    if (o->grid_ms <= 0 || o->staleness_ms < 0) throw config_error("ingest", "grid must be positive, staleness >= 0");
    c.resample = {o->grid_ms, o->staleness_ms};
    c.min_stint_minutes = o->min_minutes;
    c.cluster.k_min = o->k_min;
    c.cluster.k_max = o->k_max;
    c.cluster.threshold = o->threshold;
    c.cluster.seed = o->seed;
    c.cluster.restarts = o->restarts;
    c.band_cm = o->band_cm;
    c.attack = direction_for(o->attack_sign, "phase");
    if (o->tolerance_ms < 0) throw config_error("shots", "tolerance must be >= 0");
    c.tolerance_ms = o->tolerance_ms;
    c.procrustes = o->procrustes != 0;
    const auto result = run_all(c);
    ctx->warnings = result.warnings;
    std::ostringstream summary;
    for (const auto& a : result.artifacts) summary << a.sha256.substr(0, 12) << "  " << a.path << "\n";
    summary << result.artifacts.size() << " artifacts\n";
    ctx->output = summary.str();
  });
}

cp_status cp_cmd_plot(cp_context* ctx, const cp_plot_options* o) {
  return guarded(ctx, "cli_report", [&] {
    const fs::path dir = required(o->out_dir, "cli_report", "output directory");
    Lineup lineup;
    auto mds = mds_from_json(load_json(o->mds, "cli_report", "mds file"), &lineup);
    if (mds.embeddings.empty()) throw data_error("cli_report", "mds file has no clusters");
    std::vector<std::string> titles;
    if (given(o->phase)) {
      const auto phase = phase_from_json(load_json(o->phase, "cli_report", "phase file"));
      if (phase.table.rows.size() != mds.embeddings.size())
        throw data_error("cli_report", "phase and mds files disagree on the cluster count");
      titles = cluster_titles(phase);
    } else {
      for (const auto& e : mds.embeddings) titles.push_back(cluster_name(e.cluster_id));
    }
    write_file(dir / "profile.svg", profile_plot(mds.matrices, mds.game_average, lineup, titles));
    auto embeddings = mds.embeddings;
    if (o->procrustes)
      for (std::size_t c = 1; c < embeddings.size(); ++c) embeddings[c] = procrustes_align(embeddings[0], embeddings[c]);
    write_file(dir / "mds.svg", mds_plot(embeddings, lineup, titles));
    ctx->output = (dir / "profile.svg").string() + "\n" + (dir / "mds.svg").string() + "\n";
  });
}

const char* cp_synth_default_config(cp_context* ctx) {
  if (!ctx) return "";
  std::ostringstream out;
  write_synth_config(out, default_synth_config());
  ctx->scratch = out.str();
  return ctx->scratch.c_str();
}

}  // extern "C"
