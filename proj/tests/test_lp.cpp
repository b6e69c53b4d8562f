#include <gtest/gtest.h>

#include <random>

#include "nestedeq/lp.hpp"

using namespace nestedeq::lp;

TEST(Simplex, TextbookOptimum) {
  const auto r = maximize({{1, 0}, {0, 2}, {3, 2}}, {4, 12, 18}, {3, 5});
  ASSERT_EQ(r.status, Status::optimal);
  EXPECT_NEAR(r.value, 36.0, 1e-9);
  EXPECT_NEAR(r.x[0], 2.0, 1e-9);
  EXPECT_NEAR(r.x[1], 6.0, 1e-9);
}

TEST(Simplex, NegativeRightHandSideNeedsPhaseOne) {
  // x >= 1, x <= 3, maximize -x.
  const auto r = maximize({{-1}, {1}}, {-1, 3}, {-1});
  ASSERT_EQ(r.status, Status::optimal);
  EXPECT_NEAR(r.value, -1.0, 1e-9);
  EXPECT_NEAR(r.x[0], 1.0, 1e-9);
}

TEST(Simplex, Infeasible) {
  EXPECT_EQ(maximize({{1}}, {-1}, {1}).status, Status::infeasible);
  EXPECT_EQ(maximize({{1, 1}, {-1, -1}}, {1, -2}, {1, 1}).status, Status::infeasible);
}

TEST(Simplex, Unbounded) { EXPECT_EQ(maximize({{-1, 1}}, {1}, {1, 0}).status, Status::unbounded); }

TEST(Simplex, DegenerateProblemTerminates) {
  // Repeated constraints make the optimal vertex degenerate.
  const auto r = maximize({{1, 1}, {1, 1}, {1, 0}, {0, 1}}, {1, 1, 1, 1}, {1, 1});
  ASSERT_EQ(r.status, Status::optimal);
  EXPECT_NEAR(r.value, 1.0, 1e-9);
}

// Value of the zero-sum matrix game max_p min_j p^T A e_j via an LP with a
// shifted value variable.
double game_value(const std::vector<std::vector<double>>& a) {
  const std::size_t m = a.size(), n = a[0].size();
  const double shift = 10.0;
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) row[i] = -(a[i][j] + shift);
    row[m] = 1.0;
    A.push_back(row);
    b.push_back(0.0);
  }
  std::vector<double> sum(m + 1, 1.0), neg(m + 1, -1.0);
  sum[m] = neg[m] = 0.0;
  A.push_back(sum);
  b.push_back(1.0);
  A.push_back(neg);
  b.push_back(-1.0);
  std::vector<double> c(m + 1, 0.0);
  c[m] = 1.0;
  const auto r = maximize(A, b, c);
  EXPECT_EQ(r.status, Status::optimal);
  return r.value - shift;
}

TEST(Simplex, MatrixGameValueMatchesGridSearch) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int steps = 120;
  for (int t = 0; t < 50; ++t) {
    std::vector<std::vector<double>> a(3, std::vector<double>(3));
    for (auto& row : a) {
      for (auto& x : row) x = u(rng);
    }
    double grid = -1e9;
    for (int p0 = 0; p0 <= steps; ++p0) {
      for (int p1 = 0; p0 + p1 <= steps; ++p1) {
        const double p[3] = {p0 / double(steps), p1 / double(steps), (steps - p0 - p1) / double(steps)};
        double worst = 1e9;
        for (int j = 0; j < 3; ++j) worst = std::min(worst, p[0] * a[0][j] + p[1] * a[1][j] + p[2] * a[2][j]);
        grid = std::max(grid, worst);
      }
    }
    const double v = game_value(a);
    EXPECT_GE(v, grid - 1e-9);
    // A grid point within L1 distance 2/steps of the optimum loses at most that much.
    EXPECT_LE(v, grid + 2.0 / steps + 1e-9);
  }
}
