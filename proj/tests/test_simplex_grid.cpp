#include <gtest/gtest.h>

#include <random>

#include "nestedeq/simplex_grid.hpp"
#include "support/oracles.hpp"

using namespace nestedeq;

namespace {

std::vector<double> random_point(std::mt19937_64& rng, std::size_t dim, double zero_rate) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(dim);
  double total = 0.0;
  for (auto& x : p) {
    x = u(rng) < zero_rate ? 0.0 : -std::log(1.0 - u(rng));
    total += x;
  }
  if (total == 0.0) {
    p[rng() % dim] = 1.0;
    return p;
  }
  for (auto& x : p) x /= total;
  return p;
}

}  // namespace

TEST(GridResolution, Examples) {
  EXPECT_EQ(grid_resolution(1, 0.1), 1);
  EXPECT_EQ(grid_resolution(2, 0.5), 4);
  EXPECT_EQ(grid_resolution(3, 0.5), 8);
  EXPECT_EQ(grid_resolution(3, 0.3), 14);
  EXPECT_THROW(grid_resolution(3, 0.0), InvalidInput);
  EXPECT_THROW(grid_resolution(3, 1e-17), InvalidInput);
}

TEST(GridSize, MatchesEnumeration) {
  for (std::size_t dim = 1; dim <= 4; ++dim) {
    for (std::int64_t k = 1; k <= 6; ++k) {
      EXPECT_EQ(grid_size(dim, k), double(oracle::compositions(dim, k).size()));
    }
  }
}

TEST(Rounding, HandExamples) {
  const std::vector<double> p{0.3, 0.7};
  const auto g = round_to_resolution(p, 7);
  EXPECT_EQ(g.numerators, (std::vector<std::int64_t>{2, 5}));
  EXPECT_NEAR(l1_distance(p, g), 2.0 / 70.0, 1e-12);

  // Tie between (1,0,1) and (0,1,1): the lexicographically smaller wins.
  const std::vector<double> q{0.25, 0.25, 0.5};
  EXPECT_EQ(round_to_resolution(q, 2).numerators, (std::vector<std::int64_t>{0, 1, 1}));
  const std::vector<double> half{0.5, 0.5};
  EXPECT_EQ(round_to_resolution(half, 1).numerators, (std::vector<std::int64_t>{0, 1}));
}

TEST(Rounding, ExactPointsAreFixed) {
  for (std::int64_t k = 1; k <= 5; ++k) {
    for (const auto& c : oracle::compositions(3, k)) {
      std::vector<double> p(3);
      for (std::size_t j = 0; j < 3; ++j) p[j] = double(c[j]) / double(k);
      EXPECT_EQ(round_to_resolution(p, k).numerators, c);
    }
  }
}

TEST(Rounding, IsNearestGridPoint) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t dim = 2 + rng() % 3;
    const std::int64_t k = 1 + std::int64_t(rng() % 9);
    const auto p = random_point(rng, dim, 0.2);
    const auto g = round_to_resolution(p, k);
    std::int64_t sum = 0;
    for (auto x : g.numerators) {
      EXPECT_GE(x, 0);
      sum += x;
    }
    EXPECT_EQ(sum, k);
    EXPECT_LE(oracle::l1(p, g.numerators, k), oracle::nearest_grid_distance(p, k) + 1e-12);
  }
}

TEST(Rounding, TiesBreakLexicographically) {
  // Dyadic inputs keep every distance exact, so ties are real ties.
  std::mt19937_64 rng(5);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t dim = 2 + rng() % 3;
    std::vector<std::int64_t> parts(dim, 0);
    for (int u = 0; u < 16; ++u) ++parts[rng() % dim];
    std::vector<double> p(dim);
    for (std::size_t j = 0; j < dim; ++j) p[j] = double(parts[j]) / 16.0;
    const std::int64_t k = std::int64_t(1) << (rng() % 3);
    const double best = oracle::nearest_grid_distance(p, k);
    std::vector<std::int64_t> expected;
    for (const auto& c : oracle::compositions(dim, k)) {
      if (oracle::l1(p, c, k) == best) {
        expected = c;
        break;
      }
    }
    EXPECT_EQ(round_to_resolution(p, k).numerators, expected);
  }
}

TEST(Rounding, ErrorBelowDeltaAndSupportNeverGrows) {
  std::mt19937_64 rng(8);
  const double deltas[] = {0.5, 0.2, 0.05, 0.01, 0.001};
  for (int t = 0; t < 5000; ++t) {
    const std::size_t dim = 1 + rng() % 12;
    const double delta = deltas[rng() % 5];
    const auto p = random_point(rng, dim, 0.3);
    const auto g = round_to_net(p, delta);
    EXPECT_LT(l1_distance(p, g), delta);
    for (std::size_t j = 0; j < dim; ++j) {
      if (p[j] == 0.0) EXPECT_EQ(g.numerators[j], 0);
    }
  }
}

TEST(Rounding, OvershootIsAbsorbed) {
  const std::vector<double> p{0.5000000000000002, 0.5000000000000002};
  const auto g = round_to_resolution(p, 2);
  EXPECT_EQ(g.numerators[0] + g.numerators[1], 2);
}

TEST(GridPoint, DiracAndCoords) {
  const auto d = dirac_point(3, 1, 5);
  EXPECT_EQ(d.coords(), (std::vector<double>{0.0, 1.0, 0.0}));
  EXPECT_THROW(round_to_net(std::vector<double>{}, 0.1), InvalidInput);
}
