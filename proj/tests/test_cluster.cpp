#include <doctest.h>

#include <cmath>
#include <random>

#include "courtphase/cluster.hpp"
#include "courtphase/error.hpp"
#include "oracles.hpp"

using namespace courtphase;

namespace {

PointSet from_rows(const oracle::Matrix& rows) {
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return PointSet(rows.front().size(), flat);
}

oracle::Matrix blobs(std::mt19937_64& gen, std::size_t per_blob, std::size_t blobs, std::size_t dim, double spread,
                     double sd) {
  std::uniform_real_distribution<double> centre(-spread, spread);
  std::normal_distribution<double> noise(0.0, sd);
  oracle::Matrix out;
  for (std::size_t b = 0; b < blobs; ++b) {
    std::vector<double> c(dim);
    for (auto& v : c) v = centre(gen);
    for (std::size_t i = 0; i < per_blob; ++i) {
      auto p = c;
      for (auto& v : p) v += noise(gen);
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("kmeans: k = 1 is the global mean") {
  const oracle::Matrix rows{{1, 2}, {3, 4}, {5, 9}, {-1, 0}};
  const auto m = kmeans(from_rows(rows), {1, 42, 5, 300, 1e-6});
  CHECK(m.k == 1);
  CHECK(m.centroids[0][0] == doctest::Approx(2.0));
  CHECK(m.centroids[0][1] == doctest::Approx(3.75));
  CHECK(m.bd_td == 0.0);
  CHECK(m.wcss == m.tss);
  CHECK(m.tss == doctest::Approx(total_sum_of_squares(from_rows(rows))));
}

TEST_CASE("kmeans: two tight blobs in ten dimensions") {
  std::mt19937_64 gen(8);
  const auto rows = blobs(gen, 4, 2, 10, 500, 5);
  const auto m = kmeans(from_rows(rows), {2, 1, 20, 300, 1e-6});
  for (int i = 1; i < 4; ++i) CHECK(m.assignments[i] == m.assignments[0]);
  for (int i = 5; i < 8; ++i) CHECK(m.assignments[i] == m.assignments[4]);
  CHECK(m.assignments[0] != m.assignments[4]);
  CHECK(std::abs(m.wcss - oracle::best_two_partition_wcss(rows)) < 1e-9);
}

TEST_CASE("kmeans: agrees with exhaustive search on small instances") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0, 1000);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 3 + gen() % 8;
    oracle::Matrix rows(n, std::vector<double>(10));
    for (auto& r : rows)
      for (auto& v : r) v = u(gen);
    const auto m = kmeans(from_rows(rows), {2, static_cast<std::uint64_t>(trial), 20, 300, 1e-6});
    CHECK(std::abs(m.wcss - oracle::best_two_partition_wcss(rows)) < 1e-9);
  }
}

TEST_CASE("kmeans: model invariants") {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rows = blobs(gen, 30, 4, 10, 300, 60);
    const int k = 2 + trial % 5;
    const auto ps = from_rows(rows);
    const auto m = kmeans(ps, {k, 7, 10, 300, 1e-9});
    CHECK(m.bd_td >= 0.0);
    CHECK(m.bd_td <= 1.0);
    CHECK(m.wcss <= m.tss);
    std::vector<std::vector<double>> sums(k, std::vector<double>(10, 0.0));
    std::vector<int> counts(k, 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int c = m.assignments[i];
      REQUIRE(c >= 0);
      REQUIRE(c < k);
      ++counts[c];
      for (std::size_t d = 0; d < 10; ++d) sums[c][d] += rows[i][d];
    }
    for (int c = 0; c < k; ++c) {
      REQUIRE(counts[c] > 0);
      for (std::size_t d = 0; d < 10; ++d) CHECK(m.centroids[c][d] == doctest::Approx(sums[c][d] / counts[c]));
    }
    CHECK(std::abs(m.wcss - within_sum_of_squares(ps, m.assignments, k)) < 1e-6);
    // bd/td from wcss agrees with the direct between-deviance sum.
    CHECK(std::abs(m.bd_td - between_deviance(ps, m.assignments, k) / m.tss) < 1e-9);
  }
}

TEST_CASE("kmeans: deterministic for equal inputs") {
  std::mt19937_64 gen(12);
  const auto ps = from_rows(blobs(gen, 50, 5, 10, 400, 80));
  const auto a = kmeans(ps, {5, 1234, 20, 300, 1e-6});
  const auto b = kmeans(ps, {5, 1234, 20, 300, 1e-6});
  CHECK(a.assignments == b.assignments);
  CHECK(a.wcss == b.wcss);
  CHECK(a.centroids == b.centroids);
}

TEST_CASE("kmeans: wcss does not increase with k") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 3; ++trial) {
    const auto ps = from_rows(blobs(gen, 60, 5, 10, 400, 100));
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 8; ++k) {
      const auto m = kmeans(ps, {k, curve_seed(5, k), 20, 300, 1e-6});
      CHECK(m.wcss <= prev + 1e-9);
      prev = m.wcss;
    }
  }
}

TEST_CASE("kmeans: k equal to the distinct count uses every point") {
  oracle::Matrix rows;
  for (int rep = 0; rep < 5; ++rep)
    for (int v = 0; v < 4; ++v) rows.push_back({double(v * v), double(v)});
  const auto ps = from_rows(rows);
  CHECK(ps.distinct_count() == 4);
  const auto m = kmeans(ps, {4, 3, 3, 300, 1e-6});
  CHECK(m.wcss == doctest::Approx(0.0));
  CHECK(m.bd_td == doctest::Approx(1.0));
}

TEST_CASE("kmeans: argument errors") {
  const auto ps = from_rows({{0.0}, {1.0}, {1.0}});
  CHECK_THROWS_AS(kmeans(ps, {0, 1, 1, 10, 1e-6}), Error);
  CHECK_THROWS_AS(kmeans(ps, {3, 1, 1, 10, 1e-6}), Error);
  CHECK_THROWS_AS(kmeans(ps, {2, 1, 0, 10, 1e-6}), Error);
  try {
    kmeans(ps, {3, 1, 1, 10, 1e-6});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Data);
    CHECK(e.module() == "cluster");
  }
}

TEST_CASE("bd_td_curve: three distinct values separate fully at k = 3") {
  oracle::Matrix rows;
  for (int i = 0; i < 30; ++i) rows.push_back({double(i % 3) * 100.0, 5.0});
  const auto curve = bd_td_curve(from_rows(rows), 1, 3, 9, 20);
  REQUIRE(curve.entries.size() == 3);
  CHECK(curve.entries[0].k == 1);
  CHECK(curve.entries[0].bd_td == 0.0);
  CHECK(curve.entries[2].bd_td == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bd_td_curve: entries sorted and reproducible") {
  std::mt19937_64 gen(6);
  const auto ps = from_rows(blobs(gen, 40, 4, 10, 300, 50));
  const auto a = bd_td_curve(ps, 2, 6, 77, 10);
  const auto b = bd_td_curve(ps, 2, 6, 77, 10);
  REQUIRE(a.entries.size() == 5);
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].k == static_cast<int>(i) + 2);
    CHECK(a.entries[i].bd_td == b.entries[i].bd_td);
    // Each entry is the model fitted with that k's derived seed.
    const auto m = kmeans(ps, {a.entries[i].k, curve_seed(77, a.entries[i].k), 10, 300, 1e-6});
    CHECK(a.entries[i].bd_td == m.bd_td);
  }
  CHECK_THROWS_AS(bd_td_curve(ps, 3, 3, 1, 1), Error);
  CHECK_THROWS_AS(bd_td_curve(ps, 0, 3, 1, 1), Error);
}

TEST_CASE("select_k: rule examples") {
  {
    const std::vector<CurveEntry> c{{2, 0.20}, {3, 0.35}, {4, 0.50}, {5, 0.62}, {6, 0.74}, {7, 0.805}, {8, 0.85}};
    const auto s = select_k(c, 0.10);
    CHECK(s.k == 6);
    CHECK_FALSE(s.saturated);
  }
  {
    const std::vector<CurveEntry> c{{2, 0.1}, {3, 0.3}, {4, 0.5}};
    const auto s = select_k(c, 0.10);
    CHECK(s.k == 4);
    CHECK(s.saturated);
  }
  {
    const std::vector<CurveEntry> c{{2, 0.50}, {3, 0.52}};
    CHECK(select_k(c, 0.10).k == 2);
  }
  {
    const std::vector<CurveEntry> c{{2, 0.5}, {3, 0.7}, {4, 0.65}, {5, 0.66}};
    const auto s = select_k(c, 0.10);
    CHECK(s.non_monotone);
    CHECK(s.k == 3);
  }
  const std::vector<CurveEntry> one{{2, 0.5}};
  CHECK_THROWS_AS(select_k(one, 0.1), Error);
}
