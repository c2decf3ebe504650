#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "courtphase/cluster.hpp"
#include "courtphase/ingest.hpp"
#include "courtphase/mds.hpp"
#include "courtphase/phase.hpp"
#include "courtphase/segment.hpp"
#include "courtphase/shots.hpp"

namespace courtphase {

struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(const std::string& module, const std::string& message) { warnings.push_back(module + ": " + message); }
};

struct IngestResult {
  FrameSeries frames;
  GameTimeline timeline;
  std::size_t rows = 0;
  std::size_t malformed = 0;
  std::size_t retained = 0;
};

IngestResult ingest_files(const std::filesystem::path& tracking, const std::filesystem::path& events,
                          const TrackingSchema& schema, const ResampleOptions& resample, Diagnostics& diag);

struct ClusterParams {
  int k_min = 2;
  int k_max = 10;
  double threshold = 0.10;
  std::uint64_t seed = 0;
  int restarts = 20;
  int max_iter = 300;
  double tol = 1e-6;
};

struct ClusterStage {
  KSelectionCurve curve;
  KSelection selection;
  ClusterModel model;
};

// Runs the bd/td curve over [k_min, min(k_max, distinct points)], selects k
// and refits at that k with the same per-k seed.
ClusterStage cluster_stage(const std::vector<DyadVector>& features, const ClusterParams& params, Diagnostics& diag);

struct MdsStage {
  MeanDistanceMatrix game_average;
  std::vector<MeanDistanceMatrix> matrices;
  std::vector<MdsEmbedding> embeddings;
};

MdsStage mds_stage(std::span<const int> assignments, std::span<const DyadVector> features, int k,
                   std::size_t dims = 2);

struct PhaseStage {
  std::vector<std::int64_t> frame_ms;
  std::vector<int> assignments;
  std::vector<PhaseLabel> labels;
  ClusterPhaseTable table;
  TransitionMatrix transitions;
  std::int64_t duration_ms = 0;
  SwitchRate rate;
};

// Frames are looked up in the series by timestamp; contiguity comes from
// adjacency in the series.
PhaseStage phase_stage(const FrameSeries& series, const Lineup& lineup, std::span<const std::int64_t> frame_ms,
                       std::span<const int> assignments, int k, double band_cm, const AttackDirection& direction);

// Panel titles such as "C3 (12.5%, TR)".
std::vector<std::string> cluster_titles(const PhaseStage& phase);

struct StintModel {
  Lineup lineup;
  std::int64_t grid_ms = 0;
  std::int64_t duration_ms = 0;
  std::vector<std::int64_t> frame_ms;
  ClusterStage stage;
};

nlohmann::ordered_json stints_to_json(const StintExtraction& stints, const FrameSeries& series,
                                      std::int64_t min_duration_ms);
nlohmann::ordered_json model_to_json(const StintModel& model);
StintModel model_from_json(const nlohmann::json& j);
nlohmann::ordered_json mds_to_json(const MdsStage& mds, const Lineup& lineup);
MdsStage mds_from_json(const nlohmann::json& j, Lineup* lineup = nullptr);
nlohmann::ordered_json phase_to_json(const PhaseStage& phase, double band_cm, const AttackDirection& direction);
PhaseStage phase_from_json(const nlohmann::json& j);
nlohmann::ordered_json shots_to_json(const ShotReport& report, std::span<const ShotEvent> shots,
                                     std::span<const std::optional<int>> clusters, std::int64_t tolerance_ms);

struct RunConfig {
  std::filesystem::path tracking;
  std::filesystem::path events;
  std::filesystem::path shots;  // optional
  std::filesystem::path roster;
  std::filesystem::path out_dir;
  TrackingSchema schema;
  ResampleOptions resample;
  double min_stint_minutes = 5.0;
  ClusterParams cluster;
  double band_cm = 400.0;
  AttackDirection attack;
  std::int64_t tolerance_ms = 1000;
  bool procrustes = false;
};

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::uint64_t bytes = 0;
  std::string sha256;
};

struct RunResult {
  std::vector<ManifestEntry> artifacts;
  std::vector<std::string> warnings;
  std::string manifest_json;
};

// ingest -> segment -> cluster -> mds -> phase -> shots for every stint,
// writing all artifacts and manifest.json into out_dir.
RunResult run_all(const RunConfig& config);

std::string sha256_hex(std::string_view data);

// Writes a whole file; throws an internal error on I/O failure.
void write_file(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path, const std::string& module);

// Error JSON: {"error":{"module":..,"kind":..,"code":..,"message":..}}
std::string error_json(const std::string& module, int code, const std::string& message);

}  // namespace courtphase
