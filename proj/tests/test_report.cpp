#include <doctest.h>

#include <cmath>

#include "courtphase/report.hpp"
#include "xml_check.hpp"

using namespace courtphase;
using testing::xml_attr;
using testing::XmlElement;

namespace {

const Lineup kLineup{"a", "b", "c", "d", "e"};

MeanDistanceMatrix uniform(int id, double v) {
  MeanDistanceMatrix m;
  m.cluster_id = id;
  m.frame_count = 10;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) m.matrix(i, j) = i == j ? 0.0 : v;
  return m;
}

std::vector<XmlElement> parse(const std::string& svg) {
  std::vector<XmlElement> els;
  std::string why;
  INFO(why);
  REQUIRE(testing::xml_well_formed(svg, &els, &why));
  return els;
}

std::size_t count(const std::vector<XmlElement>& els, const std::string& name, const std::string& cls = {}) {
  std::size_t n = 0;
  for (const auto& e : els)
    if (e.name == name && (cls.empty() || xml_attr(e, "class") == cls)) ++n;
  return n;
}

}  // namespace

TEST_CASE("xml checker catches broken markup") {
  CHECK(testing::xml_well_formed("<svg><g/></svg>"));
  CHECK_FALSE(testing::xml_well_formed("<svg><g></svg>"));
  CHECK_FALSE(testing::xml_well_formed("<svg a=1></svg>"));
  CHECK_FALSE(testing::xml_well_formed("<svg/><svg/>"));
  CHECK_FALSE(testing::xml_well_formed("<svg>&amp</svg>"));
}

TEST_CASE("profile plot: one cluster equal to the average sits on the reference lines") {
  const std::vector<MeanDistanceMatrix> clusters{uniform(0, 400.0)};
  const auto els = parse(profile_plot(clusters, uniform(0, 400.0), kLineup));
  REQUIRE(els.front().name == "svg");
  CHECK_FALSE(xml_attr(els.front(), "width").empty());
  CHECK_FALSE(xml_attr(els.front(), "height").empty());
  CHECK_FALSE(xml_attr(els.front(), "viewBox").empty());
  CHECK(count(els, "g", "panel") == 1);
  CHECK(count(els, "circle", "marker") == 10);
  std::vector<double> marker_y, ref_y;
  for (const auto& e : els) {
    if (xml_attr(e, "class") == "marker") marker_y.push_back(std::stod(xml_attr(e, "cy")));
    if (xml_attr(e, "class") == "reference") ref_y.push_back(std::stod(xml_attr(e, "y1")));
  }
  REQUIRE(marker_y.size() == ref_y.size());
  for (std::size_t i = 0; i < ref_y.size(); ++i) CHECK(marker_y[i] == doctest::Approx(ref_y[i]).epsilon(1e-9));
}

TEST_CASE("profile plot: one panel per cluster, labels escaped") {
  std::vector<MeanDistanceMatrix> clusters;
  for (int c = 0; c < 7; ++c) clusters.push_back(uniform(c, 300.0 + 50.0 * c));
  const Lineup odd{"a&b", "<c>", "d\"", "e", "f"};
  const std::vector<std::string> titles{"C1 (10.00%, O)", "x<y"};
  const auto svg = profile_plot(clusters, uniform(0, 400.0), odd, titles);
  const auto els = parse(svg);
  CHECK(count(els, "g", "panel") == 7);
  CHECK(svg.find("C1 (10.00%, O)") != std::string::npos);
  CHECK(svg.find("x&lt;y") != std::string::npos);
  CHECK(svg.find("C7") != std::string::npos);
}

TEST_CASE("mds plot: degenerate embedding still shows five labelled points") {
  MdsEmbedding e;
  e.coords.assign(5, std::vector<double>{0.0, 0.0});
  const std::vector<MdsEmbedding> embeddings{e};
  const auto svg = mds_plot(embeddings, kLineup);
  const auto els = parse(svg);
  CHECK(count(els, "circle", "player") == 5);
  for (const auto& id : kLineup) CHECK(svg.find(">" + id + "</text>") != std::string::npos);
}

TEST_CASE("mds plot shares one scale across panels") {
  MdsEmbedding small, big;
  small.coords = {{10, 0}, {-10, 0}, {0, 0}, {0, 5}, {0, -5}};
  big.coords = {{400, 0}, {-400, 0}, {0, 0}, {0, 200}, {0, -200}};
  big.cluster_id = 1;
  const std::vector<MdsEmbedding> embeddings{small, big};
  const auto els = parse(mds_plot(embeddings, kLineup));
  std::vector<double> xs;
  for (const auto& e : els)
    if (xml_attr(e, "class") == "player") xs.push_back(std::stod(xml_attr(e, "cx")));
  REQUIRE(xs.size() == 10);
  const double small_span = xs[0] - xs[1];
  const double big_span = xs[5] - xs[6];
  CHECK(big_span / small_span == doctest::Approx(40.0).epsilon(0.01));
}

TEST_CASE("table renderers") {
  ClusterPhaseTable t;
  t.rows.push_back({0, 8, {2, 2, 4}, {25.0, 25.0, 50.0}, PhaseLabel::Offense});
  t.rows.push_back({1, 4, {2, 2, 0}, {50.0, 50.0, 0.0}, PhaseLabel::Transition});
  const auto csv = phase_table_csv(t);
  CHECK(csv == "cluster,frames,tr_pct,d_pct,o_pct,majority\nC1,8,25.00,25.00,50.00,O\nC2,4,50.00,50.00,0.00,TR\n");
  const auto text = phase_table_text(t);
  CHECK(text.find("100.00") != std::string::npos);
  CHECK(text.find("TR") != std::string::npos);

  TransitionMatrix m;
  m.k = 2;
  m.counts = {0, 3, 1, 0};
  m.percent = {0.0, 100.0, 100.0, 0.0};
  m.switch_count = 4;
  CHECK(transition_matrix_csv(m) == "to\\from,C1,C2\nC1,0.00,100.00\nC2,100.00,0.00\n");
  CHECK(transition_matrix_text(m).find("C2") != std::string::npos);

  ShotReport r;
  r.clusters.resize(2);
  r.clusters[0].cluster = 0;
  r.clusters[0].attempts = 15;
  r.clusters[0].made = 7;
  r.clusters[0].percent = 700.0 / 15.0;
  r.clusters[1].cluster = 1;
  r.attempts = 15;
  r.made = 7;
  r.percent = 700.0 / 15.0;
  const auto shots = shot_report_csv(r);
  CHECK(shots.find("C1,15,7,46.67") != std::string::npos);
  CHECK(shots.find("C2,0,0,") != std::string::npos);
  CHECK(shot_report_text(r).find("46.67") != std::string::npos);
}
