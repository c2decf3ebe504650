#include "courtphase/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include "courtphase/error.hpp"
#include "courtphase/report.hpp"
#include "text.hpp"

namespace courtphase {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Data: return "data";
    case ErrorKind::Internal: return "internal";
  }
  return "internal";
}

Lineup lineup_from_json(const json& j, const char* module) {
  if (!j.is_array() || j.size() != kLineupSize) throw data_error(module, "lineup must list five players");
  Lineup l;
  for (std::size_t i = 0; i < kLineupSize; ++i) l[i] = j[i].get<std::string>();
  if (!std::is_sorted(l.begin(), l.end())) throw data_error(module, "lineup is not in canonical order");
  return l;
}

ordered_json matrix_json(const SquareMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

SquareMatrix matrix_from_json(const json& j) {
  SquareMatrix m(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != j.size()) throw data_error("mds", "matrix is not square");
    for (std::size_t k = 0; k < j.size(); ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw internal_error("cli_report", "SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

void write_file(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw internal_error("cli_report", "cannot write " + path.string());
}

std::string read_file(const fs::path& path, const std::string& module) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error(module, "cannot open input file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_json(const std::string& module, int code, const std::string& message) {
  ordered_json j;
  const auto kind = code == 2 ? ErrorKind::Config : code == 3 ? ErrorKind::Data : ErrorKind::Internal;
  j["error"] = {{"module", module}, {"kind", kind_name(kind)}, {"code", code}, {"message", message}};
  return j.dump();
}

IngestResult ingest_files(const fs::path& tracking, const fs::path& events, const TrackingSchema& schema,
                          const ResampleOptions& resample, Diagnostics& diag) {
  std::istringstream tracking_in(read_file(tracking, "ingest"));
  std::istringstream events_in(read_file(events, "ingest"));
  const auto parsed = parse_tracking(tracking_in, schema);
  const auto game_events = parse_events(events_in);
  const auto active = filter_active(parsed.samples, game_events);

  IngestResult result;
  result.rows = parsed.rows;
  result.malformed = parsed.malformed;
  result.retained = active.size();
  result.timeline = GameTimeline(game_events);
  result.frames = resample_frames(active, resample, result.timeline);
  if (parsed.malformed > 0)
    diag.warn("ingest", std::to_string(parsed.malformed) + " malformed tracking rows skipped");
  return result;
}

ClusterStage cluster_stage(const std::vector<DyadVector>& features, const ClusterParams& params, Diagnostics& diag) {
  if (params.k_min < 1 || params.k_max < params.k_min) throw config_error("cluster", "need 1 <= k_min <= k_max");
  const PointSet points(features);
  const auto distinct = points.distinct_count();
  if (distinct == 0) throw data_error("cluster", "no feature vectors to cluster");

  ClusterStage stage;
  stage.curve.threshold = params.threshold;
  const int hi = std::min<int>(params.k_max, static_cast<int>(distinct));
  const int lo = std::min(params.k_min, hi);
  if (hi < params.k_max)
    diag.warn("cluster", "k_max lowered to " + std::to_string(hi) + ", the number of distinct points");

  if (hi > lo) {
    stage.curve = bd_td_curve(points, lo, hi, params.seed, params.restarts, params.max_iter, params.tol);
    stage.curve.threshold = params.threshold;
    stage.selection = select_k(stage.curve.entries, params.threshold);
  } else {
    const auto m = kmeans(points, {lo, curve_seed(params.seed, lo), params.restarts, params.max_iter, params.tol});
    stage.curve.entries.push_back({lo, m.bd_td});
    stage.selection = {lo, true, false};
  }
  if (stage.selection.saturated)
    diag.warn("cluster", "bd/td increments never fell below the threshold; k saturated at " +
                             std::to_string(stage.selection.k));
  if (stage.selection.non_monotone)
    diag.warn("cluster", "bd/td curve is not monotone; restart count is likely too low");
  stage.curve.chosen_k = stage.selection.k;
  stage.model = kmeans(points, {stage.selection.k, curve_seed(params.seed, stage.selection.k), params.restarts,
                                params.max_iter, params.tol});
  stage.model.seed = params.seed;
  return stage;
}

MdsStage mds_stage(std::span<const int> assignments, std::span<const DyadVector> features, int k, std::size_t dims) {
  MdsStage stage;
  stage.game_average = game_average_matrix(features);
  for (int c = 0; c < k; ++c) {
    stage.matrices.push_back(mean_distance_matrix(assignments, features, c));
    stage.embeddings.push_back(classical_mds(stage.matrices.back().matrix, dims, c));
  }
  return stage;
}

PhaseStage phase_stage(const FrameSeries& series, const Lineup& lineup, std::span<const std::int64_t> frame_ms,
                       std::span<const int> assignments, int k, double band_cm, const AttackDirection& direction) {
  if (frame_ms.size() != assignments.size()) throw data_error("phase", "model frames and assignments differ");
  if (frame_ms.size() < 2) throw data_error("phase", "phase analysis needs at least two frames");
  PhaseStage stage;
  stage.frame_ms.assign(frame_ms.begin(), frame_ms.end());
  stage.assignments.assign(assignments.begin(), assignments.end());

  std::vector<std::uint8_t> contiguous(frame_ms.size(), 0);
  std::size_t prev_index = 0;
  for (std::size_t i = 0; i < frame_ms.size(); ++i) {
    auto it = std::lower_bound(series.frames.begin(), series.frames.end(), frame_ms[i],
                               [](const Frame& f, std::int64_t t) { return f.timestamp_ms < t; });
    if (it == series.frames.end() || it->timestamp_ms != frame_ms[i])
      throw data_error("phase", "frame " + std::to_string(frame_ms[i]) + " is missing from the frame series");
    const auto index = static_cast<std::size_t>(it - series.frames.begin());
    if (i > 0 && index == prev_index + 1 && it->contiguous) contiguous[i] = 1;
    prev_index = index;
    stage.labels.push_back(label_frame(*it, lineup, band_cm, direction));
  }
  stage.table = cluster_phase_table(assignments, stage.labels, k);
  stage.transitions = transition_matrix(assignments, contiguous, k);
  stage.duration_ms = static_cast<std::int64_t>(frame_ms.size()) * series.grid_ms;
  stage.rate = switch_rate(stage.transitions.switch_count, stage.duration_ms);
  return stage;
}

ordered_json stints_to_json(const StintExtraction& stints, const FrameSeries& series, std::int64_t min_duration_ms) {
  ordered_json j;
  j["grid_ms"] = series.grid_ms;
  j["min_duration_ms"] = min_duration_ms;
  j["total_frames"] = stints.total_frames;
  j["excluded_frames"] = stints.excluded_frames;
  j["overfull_frames"] = stints.overfull_frames;
  j["underfull_frames"] = stints.underfull_frames;
  j["short_lineup_frames"] = stints.short_lineup_frames;
  j["stints"] = ordered_json::array();
  for (const auto& s : stints.stints) {
    ordered_json intervals = ordered_json::array();
    for (const auto& iv : s.intervals) intervals.push_back({iv.start_ms, iv.end_ms});
    j["stints"].push_back({{"id", s.id},
                           {"lineup", s.lineup},
                           {"total_duration_ms", s.total_duration_ms},
                           {"frames", s.frame_indices.size()},
                           {"intervals", intervals}});
  }
  return j;
}

ordered_json model_to_json(const StintModel& m) {
  const auto& model = m.stage.model;
  ordered_json j;
  j["lineup"] = m.lineup;
  j["grid_ms"] = m.grid_ms;
  j["duration_ms"] = m.duration_ms;
  j["k"] = model.k;
  j["seed"] = model.seed;
  j["restarts"] = model.restarts;
  j["wcss"] = model.wcss;
  j["tss"] = model.tss;
  j["bd_td"] = model.bd_td;
  j["centroids"] = model.centroids;
  ordered_json entries = ordered_json::array();
  for (const auto& e : m.stage.curve.entries) entries.push_back({{"k", e.k}, {"bd_td", e.bd_td}});
  j["curve"] = {{"entries", entries},
                {"threshold", m.stage.curve.threshold},
                {"chosen_k", m.stage.curve.chosen_k},
                {"saturated", m.stage.selection.saturated},
                {"non_monotone", m.stage.selection.non_monotone}};
  ordered_json assignments = ordered_json::array();
  for (std::size_t i = 0; i < m.frame_ms.size(); ++i)
    assignments.push_back({{"frame_ms", m.frame_ms[i]}, {"cluster", model.assignments[i]}});
  j["assignments"] = assignments;
  return j;
}

StintModel model_from_json(const json& j) {
  try {
    StintModel m;
    if (j.contains("lineup") && !j["lineup"].is_null()) m.lineup = lineup_from_json(j["lineup"], "cluster");
    m.grid_ms = j.value("grid_ms", std::int64_t{0});
    m.duration_ms = j.value("duration_ms", std::int64_t{0});
    auto& model = m.stage.model;
    model.k = j.at("k").get<int>();
    model.seed = j.value("seed", std::uint64_t{0});
    model.restarts = j.value("restarts", 0);
    model.wcss = j.value("wcss", 0.0);
    model.tss = j.value("tss", 0.0);
    model.bd_td = j.value("bd_td", 0.0);
    model.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
    model.dim = model.centroids.empty() ? 0 : model.centroids.front().size();
    if (j.contains("curve")) {
      const auto& c = j["curve"];
      for (const auto& e : c.at("entries")) m.stage.curve.entries.push_back({e.at("k").get<int>(), e.at("bd_td").get<double>()});
      m.stage.curve.threshold = c.value("threshold", 0.0);
      m.stage.curve.chosen_k = c.value("chosen_k", model.k);
      m.stage.selection = {m.stage.curve.chosen_k, c.value("saturated", false), c.value("non_monotone", false)};
    }
    for (const auto& a : j.at("assignments")) {
      m.frame_ms.push_back(a.at("frame_ms").get<std::int64_t>());
      const int c = a.at("cluster").get<int>();
      if (c < 0 || c >= model.k) throw data_error("cluster", "model assignment outside 0..k-1");
      model.assignments.push_back(c);
    }
    return m;
  } catch (const json::exception& e) {
    throw data_error("cluster", std::string("malformed model JSON: ") + e.what());
  }
}

ordered_json mds_to_json(const MdsStage& mds, const Lineup& lineup) {
  ordered_json j;
  j["lineup"] = lineup;
  j["game_average"] = {{"frames", mds.game_average.frame_count}, {"matrix", matrix_json(mds.game_average.matrix)}};
  j["clusters"] = ordered_json::array();
  for (std::size_t c = 0; c < mds.matrices.size(); ++c) {
    const auto& e = mds.embeddings[c];
    j["clusters"].push_back({{"cluster", mds.matrices[c].cluster_id},
                             {"frames", mds.matrices[c].frame_count},
                             {"matrix", matrix_json(mds.matrices[c].matrix)},
                             {"coords", e.coords},
                             {"eigenvalues", e.eigenvalues},
                             {"strain_share", e.strain_share}});
  }
  return j;
}

MdsStage mds_from_json(const json& j, Lineup* lineup) {
  try {
    MdsStage s;
    if (lineup) *lineup = lineup_from_json(j.at("lineup"), "mds");
    s.game_average.cluster_id = -1;
    s.game_average.frame_count = j.at("game_average").at("frames").get<std::size_t>();
    s.game_average.matrix = matrix_from_json(j.at("game_average").at("matrix"));
    for (const auto& c : j.at("clusters")) {
      MeanDistanceMatrix m;
      m.cluster_id = c.at("cluster").get<int>();
      m.frame_count = c.at("frames").get<std::size_t>();
      m.matrix = matrix_from_json(c.at("matrix"));
      MdsEmbedding e;
      e.cluster_id = m.cluster_id;
      e.coords = c.at("coords").get<std::vector<std::vector<double>>>();
      e.dims = e.coords.empty() ? 2 : e.coords.front().size();
      e.eigenvalues = c.at("eigenvalues").get<std::vector<double>>();
      e.strain_share = c.at("strain_share").get<double>();
      s.matrices.push_back(std::move(m));
      s.embeddings.push_back(std::move(e));
    }
    return s;
  } catch (const json::exception& e) {
    throw data_error("mds", std::string("malformed mds JSON: ") + e.what());
  }
}

ordered_json phase_to_json(const PhaseStage& p, double band_cm, const AttackDirection& direction) {
  ordered_json j;
  j["band_cm"] = band_cm;
  j["attack_sign_first_half"] = direction.first_half_sign;
  j["k"] = p.transitions.k;
  ordered_json frames = ordered_json::array();
  for (std::size_t i = 0; i < p.frame_ms.size(); ++i)
    frames.push_back({{"frame_ms", p.frame_ms[i]}, {"cluster", p.assignments[i]}, {"label", short_name(p.labels[i])}});
  j["frames"] = frames;
  ordered_json table = ordered_json::array();
  for (const auto& r : p.table.rows)
    table.push_back({{"cluster", r.cluster},
                     {"frames", r.frames},
                     {"counts", {{"TR", r.counts[0]}, {"D", r.counts[1]}, {"O", r.counts[2]}}},
                     {"percent", {{"TR", r.percent[0]}, {"D", r.percent[1]}, {"O", r.percent[2]}}},
                     {"majority", short_name(r.majority)}});
  j["phase_table"] = table;
  const auto& m = p.transitions;
  ordered_json pct = ordered_json::array(), counts = ordered_json::array();
  for (int to = 0; to < m.k; ++to) {
    ordered_json prow = ordered_json::array(), crow = ordered_json::array();
    for (int from = 0; from < m.k; ++from) {
      prow.push_back(m.pct(to, from));
      crow.push_back(m.count(to, from));
    }
    pct.push_back(prow);
    counts.push_back(crow);
  }
  j["transition_matrix"] = {{"orientation", "rows are destination clusters, columns are source clusters"},
                            {"percent", pct},
                            {"counts", counts}};
  j["switches"] = {{"count", m.switch_count},
                   {"duration_ms", p.duration_ms},
                   {"per_second", p.rate.per_second},
                   {"seconds_per_switch", optional_number(p.rate.seconds_per_switch)}};
  return j;
}

PhaseStage phase_from_json(const json& j) {
  try {
    PhaseStage p;
    const int k = j.at("k").get<int>();
    for (const auto& f : j.at("frames")) {
      p.frame_ms.push_back(f.at("frame_ms").get<std::int64_t>());
      p.assignments.push_back(f.at("cluster").get<int>());
      const auto label = parse_phase_label(f.at("label").get<std::string>());
      if (!label) throw data_error("phase", "unknown phase label in phase JSON");
      p.labels.push_back(*label);
    }
    p.table = cluster_phase_table(p.assignments, p.labels, k);
    auto& m = p.transitions;
    m.k = k;
    const auto& counts = j.at("transition_matrix").at("counts");
    const auto& pct = j.at("transition_matrix").at("percent");
    if (counts.size() != static_cast<std::size_t>(k) || pct.size() != static_cast<std::size_t>(k))
      throw data_error("phase", "transition matrix does not match k");
    for (int to = 0; to < k; ++to) {
      for (int from = 0; from < k; ++from) {
        m.counts.push_back(counts.at(static_cast<std::size_t>(to)).at(static_cast<std::size_t>(from)).get<std::uint64_t>());
        m.percent.push_back(pct.at(static_cast<std::size_t>(to)).at(static_cast<std::size_t>(from)).get<double>());
      }
    }
    const auto& sw = j.at("switches");
    m.switch_count = sw.at("count").get<std::uint64_t>();
    p.duration_ms = sw.at("duration_ms").get<std::int64_t>();
    p.rate = switch_rate(m.switch_count, p.duration_ms);
    return p;
  } catch (const json::exception& e) {
    throw data_error("phase", std::string("malformed phase JSON: ") + e.what());
  }
}

ordered_json shots_to_json(const ShotReport& report, std::span<const ShotEvent> shots,
                           std::span<const std::optional<int>> clusters, std::int64_t tolerance_ms) {
  ordered_json j;
  j["tolerance_ms"] = tolerance_ms;
  ordered_json per = ordered_json::array();
  for (const auto& c : report.clusters)
    per.push_back({{"cluster", c.cluster}, {"attempts", c.attempts}, {"made", c.made}, {"percent", optional_number(c.percent)}});
  j["clusters"] = per;
  j["overall"] = {{"attempts", report.attempts}, {"made", report.made}, {"percent", optional_number(report.percent)}};
  j["unmatched"] = report.unmatched;
  ordered_json list = ordered_json::array();
  for (std::size_t i = 0; i < shots.size(); ++i)
    list.push_back({{"timestamp_ms", shots[i].timestamp_ms},
                    {"made", shots[i].made},
                    {"shooter", shots[i].shooter ? ordered_json(*shots[i].shooter) : ordered_json(nullptr)},
                    {"cluster", clusters[i] ? ordered_json(*clusters[i]) : ordered_json(nullptr)}});
  j["shots"] = list;
  return j;
}

namespace {

class ArtifactWriter {
public:
  explicit ArtifactWriter(fs::path root) : root_(std::move(root)) {}

  void add(const std::string& relative, const std::string& contents) {
    write_file(root_ / relative, contents);
    entries_.push_back({relative, contents.size(), sha256_hex(contents)});
  }

  std::vector<ManifestEntry> entries() const {
    auto sorted = entries_;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    return sorted;
  }

private:
  fs::path root_;
  std::vector<ManifestEntry> entries_;
};

// Removes artifacts listed by a previous manifest; anything else in the way is
// an error rather than silently mixed into the new run.
void prepare_output_dir(const fs::path& dir) {
  if (!fs::exists(dir)) {
    fs::create_directories(dir);
    return;
  }
  if (!fs::is_directory(dir)) throw config_error("cli_report", dir.string() + " is not a directory");
  const auto manifest = dir / "manifest.json";
  if (fs::exists(manifest)) {
    try {
      const auto j = json::parse(read_file(manifest, "cli_report"));
      for (const auto& a : j.at("artifacts")) fs::remove(dir / a.at("path").get<std::string>());
      fs::remove(manifest);
      for (auto it = fs::directory_iterator(dir); it != fs::directory_iterator(); ++it)
        if (it->is_directory() && fs::is_empty(it->path())) fs::remove(it->path());
    } catch (const json::exception&) {
      throw config_error("cli_report", "existing manifest.json in output directory is unreadable");
    }
  }
  if (!fs::is_empty(dir))
    throw config_error("cli_report", "output directory " + dir.string() + " contains files not from a previous run");
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }


}  // namespace

std::vector<std::string> cluster_titles(const PhaseStage& phase) {
  std::vector<std::string> titles;
  const auto total = static_cast<double>(phase.assignments.size());
  for (const auto& row : phase.table.rows)
    titles.push_back(cluster_name(row.cluster) + " (" + text::fixed(100.0 * static_cast<double>(row.frames) / total, 1) +
                     "%, " + std::string(short_name(row.majority)) + ")");
  return titles;
}

RunResult run_all(const RunConfig& config) {
  Diagnostics diag;

  for (const auto& [path, module, required] :
       {std::tuple{config.tracking, "ingest", true}, std::tuple{config.events, "ingest", true},
        std::tuple{config.roster, "segment", true}, std::tuple{config.shots, "shots", false}}) {
    if (path.empty() && !required) continue;
    if (path.empty() || !fs::exists(path))
      throw config_error(module, "input file " + (path.empty() ? std::string("(unset)") : path.string()) + " does not exist");
  }
  if (config.min_stint_minutes <= 0.0) throw config_error("segment", "min stint minutes must be positive");
  if (config.band_cm < 0.0) throw config_error("phase", "band_cm must be >= 0");
  if (config.attack.first_half_sign != 1 && config.attack.first_half_sign != -1)
    throw config_error("phase", "attack direction must be +x or -x");

  prepare_output_dir(config.out_dir);
  ArtifactWriter writer(config.out_dir);

  auto ingest = ingest_files(config.tracking, config.events, config.schema, config.resample, diag);
  {
    std::ostringstream frames_csv;
    write_frames_csv(frames_csv, ingest.frames);
    writer.add("frames.csv", frames_csv.str());
  }

  std::istringstream roster_in(read_file(config.roster, "segment"));
  const auto roster = read_roster(roster_in);
  const auto min_ms = static_cast<std::int64_t>(config.min_stint_minutes * 60'000.0);
  const auto stints = extract_stints(ingest.frames, roster, min_ms);
  if (stints.overfull_frames > 0)
    diag.warn("segment", std::to_string(stints.overfull_frames) + " frames had more than five roster players");
  if (stints.stints.empty()) diag.warn("segment", "no lineup reached the minimum stint duration");
  writer.add("stints.json", dump(stints_to_json(stints, ingest.frames, min_ms)));

  std::vector<ShotEvent> shots;
  if (!config.shots.empty()) {
    std::istringstream shots_in(read_file(config.shots, "shots"));
    shots = parse_shots(shots_in);
  }

  struct StintOutput {
    std::vector<std::pair<std::string, std::string>> files;
    ordered_json summary;
    Diagnostics diag;
  };
  const auto analyse = [&](const Stint& stint) {
    StintOutput out;
    const std::string dir = "stint" + std::to_string(stint.id) + "/";
    const auto add = [&](const std::string& name, std::string contents) {
      out.files.emplace_back(dir + name, std::move(contents));
    };
    const auto features = dyad_features(stint, ingest.frames);
    {
      std::ostringstream f;
      write_features_csv(f, features);
      add("features.csv", f.str());
    }

    StintModel model;
    model.lineup = stint.lineup;
    model.grid_ms = ingest.frames.grid_ms;
    model.duration_ms = stint.total_duration_ms;
    for (const auto& f : features) model.frame_ms.push_back(f.frame_ms);
    model.stage = cluster_stage(features, config.cluster, out.diag);
    add("model.json", dump(model_to_json(model)));

    const int k = model.stage.model.k;
    const auto& assignments = model.stage.model.assignments;
    auto mds = mds_stage(assignments, features, k);
    add("mds.json", dump(mds_to_json(mds, stint.lineup)));

    const auto phase = phase_stage(ingest.frames, stint.lineup, model.frame_ms, assignments, k, config.band_cm,
                                   config.attack);
    add("phase.json", dump(phase_to_json(phase, config.band_cm, config.attack)));
    add("table_phase.csv", phase_table_csv(phase.table));
    add("table_phase.txt", phase_table_text(phase.table));
    add("table_transitions.csv", transition_matrix_csv(phase.transitions));
    add("table_transitions.txt", transition_matrix_text(phase.transitions));

    const auto titles = cluster_titles(phase);
    add("profile.svg", profile_plot(mds.matrices, mds.game_average, stint.lineup, titles));
    auto embeddings = mds.embeddings;
    if (config.procrustes)
      for (std::size_t c = 1; c < embeddings.size(); ++c) embeddings[c] = procrustes_align(embeddings[0], embeddings[c]);
    add("mds.svg", mds_plot(embeddings, stint.lineup, titles));

    out.summary = {{"stint", stint.id},
                   {"lineup", stint.lineup},
                   {"duration_ms", stint.total_duration_ms},
                   {"k", k},
                   {"bd_td", model.stage.model.bd_td},
                   {"switches", phase.transitions.switch_count},
                   {"switches_per_second", phase.rate.per_second}};
    if (!config.shots.empty()) {
      const auto clusters = attach_shots(shots, model.frame_ms, assignments, config.tolerance_ms);
      const auto report = shot_report(clusters, shots, k);
      add("shots.json", dump(shots_to_json(report, shots, clusters, config.tolerance_ms)));
      add("table_shots.csv", shot_report_csv(report));
      add("table_shots.txt", shot_report_text(report));
      out.summary["shots"] = {{"attempts", report.attempts}, {"made", report.made}};
    }
    return out;
  };

  // Stints are analysed concurrently; files go through the single writer in
  // stint order so the output does not depend on scheduling.
  std::vector<std::future<StintOutput>> pending;
  for (const auto& stint : stints.stints) pending.push_back(std::async(std::launch::async, analyse, std::cref(stint)));
  ordered_json summary = ordered_json::array();
  for (auto& p : pending) {
    auto out = p.get();
    for (const auto& [path, contents] : out.files) writer.add(path, contents);
    for (auto& w : out.diag.warnings) diag.warnings.push_back(std::move(w));
    summary.push_back(std::move(out.summary));
  }

  ordered_json summary_doc;
  summary_doc["stints"] = summary;
  summary_doc["warnings"] = diag.warnings;
  writer.add("summary.json", dump(summary_doc));

  RunResult result;
  result.artifacts = writer.entries();
  result.warnings = diag.warnings;

  ordered_json manifest;
  manifest["inputs"] = ordered_json::object();
  for (const auto& [name, path] : {std::pair{"tracking", config.tracking}, std::pair{"events", config.events},
                                   std::pair{"roster", config.roster}, std::pair{"shots", config.shots}}) {
    if (path.empty()) continue;
    manifest["inputs"][name] = sha256_hex(read_file(path, "cli_report"));
  }
  manifest["parameters"] = {{"grid_ms", config.resample.grid_ms},
                            {"staleness_ms", config.resample.staleness_ms},
                            {"min_stint_minutes", config.min_stint_minutes},
                            {"k_min", config.cluster.k_min},
                            {"k_max", config.cluster.k_max},
                            {"threshold", config.cluster.threshold},
                            {"seed", config.cluster.seed},
                            {"restarts", config.cluster.restarts},
                            {"band_cm", config.band_cm},
                            {"attack_sign_first_half", config.attack.first_half_sign},
                            {"tolerance_ms", config.tolerance_ms},
                            {"procrustes", config.procrustes}};
  manifest["artifacts"] = ordered_json::array();
  for (const auto& a : result.artifacts)
    manifest["artifacts"].push_back({{"path", a.path}, {"bytes", a.bytes}, {"sha256", a.sha256}});
  result.manifest_json = dump(manifest);
  write_file(config.out_dir / "manifest.json", result.manifest_json);
  return result;
}

}  // namespace courtphase
