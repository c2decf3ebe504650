#include <doctest.h>

#include <random>
#include <sstream>

#include "courtphase/error.hpp"
#include "courtphase/shots.hpp"

using namespace courtphase;

namespace {

std::vector<ShotEvent> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_shots(in);
}

}  // namespace

TEST_CASE("parse_shots") {
  const auto s = parse("timestamp_ms,made,shooter_id\n100,1,p3\n200,0,\n");
  REQUIRE(s.size() == 2);
  CHECK(s[0].made);
  CHECK(s[0].shooter == "p3");
  CHECK_FALSE(s[1].made);
  CHECK_FALSE(s[1].shooter.has_value());
  CHECK(parse("timestamp_ms,made,shooter_id,kind\n5,1,p1,FG\n").size() == 1);
  CHECK_THROWS_AS(parse("timestamp_ms,made,shooter_id,kind\n5,1,p1,FT\n"), Error);
  CHECK_THROWS_AS(parse("timestamp_ms,made,shooter_id\n5,2,p1\n"), Error);
  CHECK_THROWS_AS(parse("timestamp_ms,shooter_id\n5,p1\n"), Error);
}

TEST_CASE("shots CSV round trip") {
  const std::vector<ShotEvent> s{{10, true, "p1"}, {20, false, std::nullopt}};
  std::stringstream ss;
  write_shots_csv(ss, s);
  const auto back = parse_shots(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].timestamp_ms == 10);
  CHECK(back[1].shooter == std::nullopt);
}

TEST_CASE("attach_shots: nearest frame within tolerance") {
  const std::vector<std::int64_t> t{1000, 1050, 1100, 5000, 5050};
  const std::vector<int> c{0, 1, 2, 3, 4};
  const std::vector<ShotEvent> shots{{1050, true, {}},   // exact
                                     {1030, false, {}},  // 30 ms after a frame, nearer the next one
                                     {1075, false, {}},  // halfway: earlier frame
                                     {3000, true, {}},   // in the gap
                                     {900, true, {}},    // before the first frame, in tolerance
                                     {7000, true, {}}};  // after the last, out of tolerance
  const auto a = attach_shots(shots, t, c, 1000);
  CHECK(a[0] == 1);
  CHECK(a[1] == 1);
  CHECK(a[2] == 1);
  CHECK_FALSE(a[3].has_value());
  CHECK(a[4] == 0);
  CHECK_FALSE(a[5].has_value());
  CHECK(attach_shots(std::vector<ShotEvent>{{1010, true, {}}}, t, c, 0)[0] == std::nullopt);
  CHECK_THROWS_AS(attach_shots(shots, t, c, -1), Error);
}

TEST_CASE("shot_report: reference per-cluster figures") {
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
  CHECK(r.attempts == 15);
  CHECK(r.made == 7);
  CHECK(std::abs(*r.percent - 46.67) < 0.005);
  CHECK(r.clusters[5].attempts == 8);
  CHECK(r.clusters[5].made == 5);
  CHECK(*r.clusters[5].percent == 62.5);
  CHECK(r.clusters[0].attempts == 4);
  CHECK(r.clusters[0].made == 2);
  CHECK(r.clusters[1].made == 0);
  CHECK(r.clusters[4].attempts == 1);
  CHECK_FALSE(r.clusters[2].percent.has_value());
  CHECK(r.unmatched == 0);
}

TEST_CASE("shot_report: empty and single-cluster cases") {
  const auto empty = shot_report({}, {}, 3);
  CHECK(empty.attempts == 0);
  CHECK_FALSE(empty.percent.has_value());
  const std::vector<ShotEvent> s{{1, true, {}}, {2, true, {}}, {3, true, {}}};
  const std::vector<std::optional<int>> c{2, 2, 2};
  const auto r = shot_report(c, s, 3);
  CHECK(r.clusters[2].attempts == 3);
  CHECK(r.clusters[2].made == 3);
  CHECK(*r.clusters[2].percent == 100.0);
}

TEST_CASE("shot_report: matched plus unmatched is the input count") {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::int64_t> t;
    std::vector<int> c;
    for (std::int64_t x = 0; x < 20000; x += 50)
      if (x < 8000 || x > 12000) t.push_back(x), c.push_back(static_cast<int>(gen() % 4));
    std::vector<ShotEvent> shots;
    for (int i = 0; i < 40; ++i) shots.push_back({static_cast<std::int64_t>(gen() % 25000), gen() % 2 == 0, {}});
    const auto a = attach_shots(shots, t, c, static_cast<std::int64_t>(gen() % 1500));
    const auto r = shot_report(a, shots, 4);
    std::size_t per = 0, made = 0;
    for (const auto& cs : r.clusters) {
      per += cs.attempts;
      made += cs.made;
      if (cs.attempts > 0) CHECK(*cs.percent == 100.0 * cs.made / cs.attempts);
    }
    CHECK(per + r.unmatched == shots.size());
    CHECK(per == r.attempts);
    CHECK(made == r.made);
  }
}
