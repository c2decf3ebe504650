#include <doctest.h>

#include <cmath>
#include <random>

#include "courtphase/error.hpp"
#include "courtphase/phase.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace courtphase;

namespace {

constexpr auto TR = PhaseLabel::Transition;
constexpr auto D = PhaseLabel::Defense;
constexpr auto O = PhaseLabel::Offense;

Frame line_frame(const Lineup& l, double x, int period) {
  Frame f;
  f.period = period;
  for (const auto& id : l) f.players[id] = {x, 0.0};
  return f;
}

}  // namespace

TEST_CASE("label_frame: band and direction") {
  CHECK(label_frame(0.0, 400.0, +1) == TR);
  CHECK(label_frame(700.0, 400.0, +1) == O);
  CHECK(label_frame(700.0, 400.0, -1) == D);
  CHECK(label_frame(-700.0, 400.0, +1) == D);
  CHECK(label_frame(400.0, 400.0, +1) == TR);
  CHECK(label_frame(-400.0, 400.0, +1) == TR);
  CHECK(label_frame(400.5, 400.0, +1) == O);
}

TEST_CASE("label_frame: direction flips from the third period") {
  const auto l = testing::lineup_p(1, 2, 3, 4, 5);
  const AttackDirection dir{+1};
  CHECK(label_frame(line_frame(l, 900, 1), l, 400, dir) == O);
  CHECK(label_frame(line_frame(l, 900, 2), l, 400, dir) == O);
  CHECK(label_frame(line_frame(l, 900, 3), l, 400, dir) == D);
  CHECK(label_frame(line_frame(l, 900, 4), l, 400, dir) == D);
  CHECK(label_frame(line_frame(l, 900, 5), l, 400, dir) == D);
  CHECK_THROWS_AS(label_frame(line_frame(l, 900, 0), l, 400, dir), Error);
}

TEST_CASE("label names") {
  CHECK(to_string(TR) == "TRANSITION");
  CHECK(short_name(D) == "D");
  CHECK(parse_phase_label("O") == O);
  CHECK(parse_phase_label("DEFENSE") == D);
  CHECK_FALSE(parse_phase_label("X").has_value());
}

TEST_CASE("label flip swaps offense and defense") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1400, 1400);
  for (int i = 0; i < 5000; ++i) {
    const double x = u(gen);
    const auto a = label_frame(x, 400, +1);
    const auto b = label_frame(x, 400, -1);
    if (a == TR) CHECK(b == TR);
    if (a == O) CHECK(b == D);
    if (a == D) CHECK(b == O);
  }
}

TEST_CASE("cluster_phase_table: counting and majority") {
  const std::vector<int> a{0, 0, 0, 0};
  const std::vector<PhaseLabel> l{O, O, D, TR};
  const auto t = cluster_phase_table(a, l, 1);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].percent[2] == 50.0);
  CHECK(t.rows[0].percent[1] == 25.0);
  CHECK(t.rows[0].percent[0] == 25.0);
  CHECK(t.rows[0].majority == O);
}

TEST_CASE("cluster_phase_table: ties resolve transition, then defense") {
  const std::vector<int> a{0, 0, 1, 1, 2, 2, 2, 2};
  const std::vector<PhaseLabel> l{O, TR, D, O, O, D, TR, TR};
  const auto t = cluster_phase_table(a, l, 4);
  CHECK(t.rows[0].majority == TR);
  CHECK(t.rows[1].majority == D);
  CHECK(t.rows[2].majority == TR);
  CHECK(t.rows[3].frames == 0);
  CHECK_THROWS_AS(cluster_phase_table(a, std::vector<PhaseLabel>{O}, 4), Error);
}

TEST_CASE("cluster_phase_table: reference table from integer counts") {
  std::vector<int> a;
  std::vector<PhaseLabel> l;
  const auto& counts = oracle::table1_counts();
  for (int c = 0; c < 6; ++c) {
    for (int i = 0; i < counts[c].tr; ++i) a.push_back(c), l.push_back(TR);
    for (int i = 0; i < counts[c].d; ++i) a.push_back(c), l.push_back(D);
    for (int i = 0; i < counts[c].o; ++i) a.push_back(c), l.push_back(O);
  }
  const auto t = cluster_phase_table(a, l, 6);
  const std::array<PhaseLabel, 6> majority{O, O, TR, D, TR, O};
  for (int c = 0; c < 6; ++c) {
    const auto& row = t.rows[c];
    CHECK(std::abs(row.percent[0] + row.percent[1] + row.percent[2] - 100.0) < 1e-9);
    for (int p = 0; p < 3; ++p) CHECK(std::abs(row.percent[p] - oracle::table1_printed()[p][c]) < 0.005 + 1e-12);
    CHECK(row.majority == majority[c]);
  }
}

TEST_CASE("transition_matrix: constant sequence") {
  const std::vector<int> a(10, 2);
  const std::vector<std::uint8_t> c(10, 1);
  const auto m = transition_matrix(a, c, 3);
  CHECK(m.switch_count == 0);
  for (double v : m.percent) CHECK(v == 0.0);
}

TEST_CASE("transition_matrix: hand-counted sequence") {
  const std::vector<int> a{1, 1, 2, 1, 3};
  const std::vector<std::uint8_t> c{0, 1, 1, 1, 1};
  const auto m = transition_matrix(a, c, 4);
  CHECK(m.switch_count == 3);
  CHECK(m.pct(2, 1) == 50.0);
  CHECK(m.pct(3, 1) == 50.0);
  CHECK(m.pct(1, 2) == 100.0);
  CHECK(m.count(2, 1) == 1);
}

TEST_CASE("transition_matrix: pairs across a gap are ignored") {
  const std::vector<int> a{0, 0, 1, 1, 0, 0};
  const std::vector<std::uint8_t> c{0, 1, 1, 1, 0, 1};
  const auto m = transition_matrix(a, c, 2);
  CHECK(m.switch_count == 1);
  CHECK(m.count(1, 0) == 1);
  CHECK(m.count(0, 1) == 0);
}

TEST_CASE("transition_matrix: reference matrix from a realised sequence") {
  const auto& counts = oracle::table2_counts();
  const auto seq = oracle::sequence_from_switch_counts(counts, 5);
  int total = 0;
  for (const auto& row : counts)
    for (int v : row) total += v;
  REQUIRE(static_cast<int>(seq.size()) == total + 1);
  const std::vector<std::uint8_t> contiguous(seq.size(), 1);
  const auto m = transition_matrix(seq, contiguous, 6);
  CHECK(m.switch_count == static_cast<std::uint64_t>(total));
  for (int from = 0; from < 6; ++from) {
    double col = 0.0;
    for (int to = 0; to < 6; ++to) {
      CHECK(m.count(to, from) == static_cast<std::uint64_t>(counts[to][from]));
      CHECK(std::abs(m.pct(to, from) - oracle::table2_printed()[to][from]) < 0.005 + 1e-12);
      col += m.pct(to, from);
    }
    CHECK(m.pct(from, from) == 0.0);
    CHECK(std::abs(col - 100.0) < 1e-9);
  }
  CHECK(m.pct(5, 2) == 80.0);
  CHECK(std::abs(m.pct(3, 0) - 34.48) < 0.005);
}

TEST_CASE("transition_matrix: random sequences keep the invariants") {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(gen() % 6);
    std::vector<int> a(500);
    std::vector<std::uint8_t> c(500);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = gen() % 4 == 0 ? static_cast<int>(gen() % k) : (i ? a[i - 1] : 0);
      c[i] = i > 0 && gen() % 20 != 0;
    }
    const auto m = transition_matrix(a, c, k);
    std::uint64_t sum = 0;
    for (auto v : m.counts) sum += v;
    CHECK(sum == m.switch_count);
    for (int from = 0; from < k; ++from) {
      CHECK(m.count(from, from) == 0);
      double col = 0.0;
      std::uint64_t out = 0;
      for (int to = 0; to < k; ++to) col += m.pct(to, from), out += m.count(to, from);
      if (out > 0) CHECK(std::abs(col - 100.0) < 1e-9);
      else CHECK(col == 0.0);
    }
  }
}

TEST_CASE("switch_rate") {
  const auto r = switch_rate(309, 501'000);
  CHECK(std::abs(r.per_second - 0.6168) < 1e-3);
  REQUIRE(r.seconds_per_switch.has_value());
  CHECK(std::abs(*r.seconds_per_switch - 1.621) < 1e-3);
  const auto none = switch_rate(0, 20'000);
  CHECK(none.per_second == 0.0);
  CHECK_FALSE(none.seconds_per_switch.has_value());
  CHECK(switch_rate(10, 20'000).per_second == 0.5);
  CHECK_THROWS_AS(switch_rate(1, 0), Error);
}
