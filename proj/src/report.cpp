#include "courtphase/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "text.hpp"

namespace courtphase {

namespace {

constexpr int kPanelW = 340;
constexpr int kPanelH = 260;
constexpr int kMarginL = 52;
constexpr int kMarginR = 14;
constexpr int kMarginT = 30;
constexpr int kMarginB = 46;
constexpr const char* kFont = "font-family=\"Helvetica,Arial,sans-serif\"";

std::string num(double v) { return text::fixed(v, 2); }

struct Grid {
  int cols;
  int rows;
  int width() const { return cols * kPanelW; }
  int height() const { return rows * kPanelH; }
};

Grid grid_for(std::size_t panels) {
  const int n = static_cast<int>(std::max<std::size_t>(panels, 1));
  const int cols = std::min(3, n);
  return {cols, (n + cols - 1) / cols};
}

void open_svg(std::ostringstream& out, const Grid& g) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << g.width() << "\" height=\"" << g.height()
      << "\" viewBox=\"0 0 " << g.width() << ' ' << g.height() << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << g.width() << "\" height=\"" << g.height() << "\" fill=\"#ffffff\"/>\n";
}

// Rounds up to 1, 2 or 5 times a power of ten.
double nice_ceiling(double v) {
  if (v <= 0.0) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * p >= v) return m * p;
  return 10.0 * p;
}

std::string panel_title(std::span<const std::string> titles, std::size_t i, int cluster_id) {
  if (i < titles.size()) return titles[i];
  return cluster_name(cluster_id);
}

std::string pad(const std::string& s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string cluster_name(int cluster) { return "C" + std::to_string(cluster + 1); }

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string profile_plot(std::span<const MeanDistanceMatrix> clusters, const MeanDistanceMatrix& game_average,
                         const Lineup& lineup, std::span<const std::string> panel_titles) {
  const auto grid = grid_for(clusters.size());
  const auto& pairs = dyad_pairs();

  double y_max = 0.0;
  auto dyad_value = [&](const MeanDistanceMatrix& m, std::size_t k) {
    return m.matrix(static_cast<std::size_t>(pairs[k].first), static_cast<std::size_t>(pairs[k].second));
  };
  for (const auto& m : clusters)
    for (std::size_t k = 0; k < kDyadCount; ++k) y_max = std::max(y_max, dyad_value(m, k));
  for (std::size_t k = 0; k < kDyadCount; ++k) y_max = std::max(y_max, dyad_value(game_average, k));
  y_max = nice_ceiling(y_max * 1.05);

  const double plot_w = kPanelW - kMarginL - kMarginR;
  const double plot_h = kPanelH - kMarginT - kMarginB;
  const double step = plot_w / static_cast<double>(kDyadCount);

  std::ostringstream out;
  open_svg(out, grid);
  for (std::size_t p = 0; p < clusters.size(); ++p) {
    const auto& m = clusters[p];
    const int ox = static_cast<int>(p) % grid.cols * kPanelW;
    const int oy = static_cast<int>(p) / grid.cols * kPanelH;
    const double left = ox + kMarginL;
    const double top = oy + kMarginT;
    const double bottom = top + plot_h;
    auto ypix = [&](double v) { return bottom - v / y_max * plot_h; };

    out << "<g class=\"panel\" data-cluster=\"" << m.cluster_id << "\">\n";
    out << "<text x=\"" << num(ox + kPanelW / 2.0) << "\" y=\"" << oy + 18 << "\" text-anchor=\"middle\" font-size=\"13\" "
        << kFont << ">" << xml_escape(panel_title(panel_titles, p, m.cluster_id)) << "</text>\n";
    out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w) << "\" height=\""
        << num(plot_h) << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double v = y_max * t / 4.0;
      out << "<text x=\"" << num(left - 4) << "\" y=\"" << num(ypix(v) + 3) << "\" text-anchor=\"end\" font-size=\"9\" "
          << kFont << ">" << text::fixed(v, 0) << "</text>\n";
    }

    std::string polyline;
    for (std::size_t k = 0; k < kDyadCount; ++k) {
      const double cx = left + step * (static_cast<double>(k) + 0.5);
      const double ref = ypix(dyad_value(game_average, k));
      out << "<line class=\"reference\" data-dyad=\"" << k << "\" x1=\"" << num(cx - step * 0.4) << "\" y1=\""
          << num(ref) << "\" x2=\"" << num(cx + step * 0.4) << "\" y2=\"" << num(ref)
          << "\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
      const double cy = ypix(dyad_value(m, k));
      polyline += num(cx) + "," + num(cy) + " ";
      const auto [i, j] = pairs[k];
      const auto label = lineup[static_cast<std::size_t>(i)] + "-" + lineup[static_cast<std::size_t>(j)];
      out << "<text x=\"" << num(cx) << "\" y=\"" << num(bottom + 12) << "\" font-size=\"8\" " << kFont
          << " text-anchor=\"end\" transform=\"rotate(-45 " << num(cx) << ' ' << num(bottom + 12) << ")\">"
          << xml_escape(label) << "</text>\n";
    }
    if (!polyline.empty()) polyline.pop_back();
    out << "<polyline points=\"" << polyline << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\"/>\n";
    for (std::size_t k = 0; k < kDyadCount; ++k) {
      const double cx = left + step * (static_cast<double>(k) + 0.5);
      out << "<circle class=\"marker\" data-dyad=\"" << k << "\" cx=\"" << num(cx) << "\" cy=\""
          << num(ypix(dyad_value(m, k))) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string mds_plot(std::span<const MdsEmbedding> embeddings, const Lineup& lineup,
                     std::span<const std::string> panel_titles) {
  const auto grid = grid_for(embeddings.size());

  double extent = 0.0;
  for (const auto& e : embeddings)
    for (const auto& p : e.coords)
      for (std::size_t d = 0; d < std::min<std::size_t>(2, p.size()); ++d) extent = std::max(extent, std::abs(p[d]));
  extent = nice_ceiling(std::max(extent * 1.15, 1.0));

  const double side = std::min(kPanelW - kMarginL - kMarginR, kPanelH - kMarginT - kMarginB);
  const double scale = side / (2.0 * extent);

  std::ostringstream out;
  open_svg(out, grid);
  for (std::size_t p = 0; p < embeddings.size(); ++p) {
    const auto& e = embeddings[p];
    const int ox = static_cast<int>(p) % grid.cols * kPanelW;
    const int oy = static_cast<int>(p) / grid.cols * kPanelH;
    const double cx = ox + kMarginL + (kPanelW - kMarginL - kMarginR) / 2.0;
    const double cy = oy + kMarginT + (kPanelH - kMarginT - kMarginB) / 2.0;

    out << "<g class=\"panel\" data-cluster=\"" << e.cluster_id << "\">\n";
    out << "<text x=\"" << num(ox + kPanelW / 2.0) << "\" y=\"" << oy + 18 << "\" text-anchor=\"middle\" font-size=\"13\" "
        << kFont << ">" << xml_escape(panel_title(panel_titles, p, e.cluster_id)) << "</text>\n";
    out << "<rect x=\"" << num(cx - side / 2) << "\" y=\"" << num(cy - side / 2) << "\" width=\"" << num(side)
        << "\" height=\"" << num(side) << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << num(cx - side / 2) << "\" y1=\"" << num(cy) << "\" x2=\"" << num(cx + side / 2) << "\" y2=\""
        << num(cy) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << num(cx) << "\" y1=\"" << num(cy - side / 2) << "\" x2=\"" << num(cx) << "\" y2=\""
        << num(cy + side / 2) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << num(cx + side / 2) << "\" y=\"" << num(cy + side / 2 + 14) << "\" text-anchor=\"end\" font-size=\"9\" "
        << kFont << ">&#177;" << text::fixed(extent, 0) << " cm</text>\n";
    for (std::size_t i = 0; i < e.coords.size(); ++i) {
      const double x = e.coords[i].empty() ? 0.0 : e.coords[i][0];
      const double y = e.coords[i].size() > 1 ? e.coords[i][1] : 0.0;
      const double px = cx + x * scale;
      const double py = cy - y * scale;
      const std::string label = i < lineup.size() ? lineup[i] : std::to_string(i + 1);
      out << "<circle class=\"player\" cx=\"" << num(px) << "\" cy=\"" << num(py)
          << "\" r=\"4\" fill=\"#2ca02c\"/>\n";
      out << "<text x=\"" << num(px + 6) << "\" y=\"" << num(py - 6) << "\" font-size=\"10\" " << kFont << ">"
          << xml_escape(label) << "</text>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string phase_table_csv(const ClusterPhaseTable& table) {
  std::ostringstream out;
  out << "cluster,frames,tr_pct,d_pct,o_pct,majority\n";
  for (const auto& r : table.rows) {
    out << cluster_name(r.cluster) << ',' << r.frames;
    for (double p : r.percent) out << ',' << text::fixed(p, 2);
    out << ',' << short_name(r.majority) << '\n';
  }
  return out.str();
}

std::string phase_table_text(const ClusterPhaseTable& table) {
  std::ostringstream out;
  out << pad("Cluster", 8, true);
  for (const auto& r : table.rows) out << pad(std::to_string(r.cluster + 1), 9);
  out << '\n';
  for (auto label : kPhaseOrder) {
    out << pad(std::string(short_name(label)), 8, true);
    for (const auto& r : table.rows) out << pad(text::fixed(r.percent[static_cast<std::size_t>(label)], 2), 9);
    out << '\n';
  }
  out << pad("Total", 8, true);
  for (const auto& r : table.rows) {
    double s = 0.0;
    for (double p : r.percent) s += p;
    out << pad(text::fixed(s, 2), 9);
  }
  out << '\n' << pad("Major", 8, true);
  for (const auto& r : table.rows) out << pad(std::string(short_name(r.majority)), 9);
  out << '\n';
  return out.str();
}

std::string transition_matrix_csv(const TransitionMatrix& m) {
  std::ostringstream out;
  out << "to\\from";
  for (int c = 0; c < m.k; ++c) out << ',' << cluster_name(c);
  out << '\n';
  for (int to = 0; to < m.k; ++to) {
    out << cluster_name(to);
    for (int from = 0; from < m.k; ++from) out << ',' << text::fixed(m.pct(to, from), 2);
    out << '\n';
  }
  return out.str();
}

std::string transition_matrix_text(const TransitionMatrix& m) {
  std::ostringstream out;
  out << pad("to\\from", 9, true);
  for (int c = 0; c < m.k; ++c) out << pad(cluster_name(c), 8);
  out << '\n';
  for (int to = 0; to < m.k; ++to) {
    out << pad(cluster_name(to), 9, true);
    for (int from = 0; from < m.k; ++from) out << pad(text::fixed(m.pct(to, from), 2), 8);
    out << '\n';
  }
  out << "switches: " << m.switch_count << '\n';
  return out.str();
}

std::string shot_report_csv(const ShotReport& report) {
  std::ostringstream out;
  out << "cluster,attempts,made,pct\n";
  auto pct = [](const std::optional<double>& p) { return p ? text::fixed(*p, 2) : std::string(); };
  for (const auto& c : report.clusters)
    out << cluster_name(c.cluster) << ',' << c.attempts << ',' << c.made << ',' << pct(c.percent) << '\n';
  out << "ALL," << report.attempts << ',' << report.made << ',' << pct(report.percent) << '\n';
  out << "UNMATCHED," << report.unmatched << ",,\n";
  return out.str();
}

std::string shot_report_text(const ShotReport& report) {
  std::ostringstream out;
  auto pct = [](const std::optional<double>& p) { return p ? text::fixed(*p, 2) + "%" : std::string("-"); };
  out << pad("Cluster", 10, true) << pad("Att", 6) << pad("Made", 6) << pad("Pct", 9) << '\n';
  for (const auto& c : report.clusters)
    out << pad(cluster_name(c.cluster), 10, true) << pad(std::to_string(c.attempts), 6)
        << pad(std::to_string(c.made), 6) << pad(pct(c.percent), 9) << '\n';
  out << pad("All", 10, true) << pad(std::to_string(report.attempts), 6) << pad(std::to_string(report.made), 6)
      << pad(pct(report.percent), 9) << '\n';
  out << "unmatched shots: " << report.unmatched << '\n';
  return out.str();
}

}  // namespace courtphase
