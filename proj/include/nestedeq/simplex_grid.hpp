#pragma once

// Finite nets on the probability simplex.
//
// The net of resolution k is the set of points whose coordinates are integer
// multiples of 1/k. Rounding uses the largest-remainder method, which lands on
// an L1-nearest grid point and keeps the numerators summing to exactly k.
// With k = ceil(2(dim-1)/delta) the rounding error is strictly below delta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "nestedeq/game.hpp"
#include "nestedeq/numeric.hpp"

namespace nestedeq {

/// A point of the net: coords[j] = numerators[j] / resolution.
struct GridPoint {
  std::vector<std::int64_t> numerators;
  std::int64_t resolution = 1;

  std::size_t dim() const { return numerators.size(); }
  double coord(std::size_t j) const { return double(numerators[j]) / double(resolution); }
  std::vector<double> coords() const {
    std::vector<double> c(numerators.size());
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = coord(j);
    return c;
  }
  auto operator<=>(const GridPoint&) const = default;
};

/// Net resolution guaranteeing an L1 rounding error below `delta`.
inline std::int64_t grid_resolution(std::size_t dim, double delta) {
  if (!(delta > 0.0)) throw InvalidInput("grid resolution needs delta > 0");
  if (dim <= 1) return 1;
  const double k = std::ceil(2.0 * double(dim - 1) / delta);
  if (k > 1e15) throw InvalidInput("delta too small for a representable simplex grid");
  return std::max<std::int64_t>(1, std::int64_t(k));
}

/// Number of points in the net: C(k + dim - 1, dim - 1).
inline double grid_size(std::size_t dim, std::int64_t k) {
  double c = 1.0;
  for (std::size_t j = 1; j < dim; ++j) c = c * double(k + std::int64_t(j)) / double(j);
  return c;
}

inline GridPoint dirac_point(std::size_t dim, std::size_t at, std::int64_t k) {
  GridPoint g;
  g.numerators.assign(dim, 0);
  g.numerators[at] = k;
  g.resolution = k;
  return g;
}

/// Largest-remainder rounding of `p` onto the net of resolution k. Coordinates
/// with p_j == 0 are never raised, so the support never grows. Among equally
/// near grid points the lexicographically smallest numerator vector wins.
inline GridPoint round_to_resolution(std::span<const double> p, std::int64_t k) {
  const std::size_t dim = p.size();
  GridPoint g;
  g.resolution = k;
  g.numerators.assign(dim, 0);
  std::vector<double> frac(dim, 0.0);
  std::int64_t assigned = 0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double x = std::max(0.0, p[j]) * double(k);
    const double f = std::floor(x);
    g.numerators[j] = std::int64_t(f);
    frac[j] = x - f;
    assigned += g.numerators[j];
  }
  std::int64_t missing = k - assigned;

  if (missing > 0) {
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < dim; ++j) {
      if (p[j] > 0.0) order.push_back(j);
    }
    if (order.empty()) {
      for (std::size_t j = 0; j < dim; ++j) order.push_back(j);
    }
    // Larger remainder first; on ties raise the later coordinate so the
    // numerator vector stays lexicographically small.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (frac[a] != frac[b]) return frac[a] > frac[b];
      return a > b;
    });
    for (std::size_t t = 0; missing > 0; ++t, --missing) ++g.numerators[order[t % order.size()]];
  } else if (missing < 0) {
    // Only reachable through floating-point overshoot of sum(p) above 1.
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < dim; ++j) order.push_back(j);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (frac[a] != frac[b]) return frac[a] < frac[b];
      return a < b;
    });
    for (std::size_t t = 0; missing < 0; ++t) {
      auto& num = g.numerators[order[t % dim]];
      if (num > 0) {
        --num;
        ++missing;
      }
    }
  }
  return g;
}

inline GridPoint round_to_net(std::span<const double> p, double delta) {
  if (p.empty()) throw InvalidInput("round_to_net: empty point");
  return round_to_resolution(p, grid_resolution(p.size(), delta));
}

inline double l1_distance(std::span<const double> p, const GridPoint& q) {
  CompensatedSum s;
  for (std::size_t j = 0; j < p.size(); ++j) s += std::abs(p[j] - q.coord(j));
  return s.value();
}

}  // namespace nestedeq
