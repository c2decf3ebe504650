#pragma once

#include <span>
#include <string>
#include <vector>

#include "courtphase/mds.hpp"
#include "courtphase/phase.hpp"
#include "courtphase/segment.hpp"
#include "courtphase/shots.hpp"

namespace courtphase {

// Display name of a cluster, 1-based: "C1", "C2", ...
std::string cluster_name(int cluster);

// One panel per cluster: mean distance of each canonical dyad, with a short
// horizontal reference line at the stint-wide mean of that dyad.
std::string profile_plot(std::span<const MeanDistanceMatrix> clusters, const MeanDistanceMatrix& game_average,
                         const Lineup& lineup, std::span<const std::string> panel_titles = {});

// One panel per embedding, five labelled points; all panels share one scale.
std::string mds_plot(std::span<const MdsEmbedding> embeddings, const Lineup& lineup,
                     std::span<const std::string> panel_titles = {});

std::string phase_table_csv(const ClusterPhaseTable& table);
std::string phase_table_text(const ClusterPhaseTable& table);
std::string transition_matrix_csv(const TransitionMatrix& m);
std::string transition_matrix_text(const TransitionMatrix& m);
std::string shot_report_csv(const ShotReport& report);
std::string shot_report_text(const ShotReport& report);

std::string xml_escape(std::string_view s);

}  // namespace courtphase
