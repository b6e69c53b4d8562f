#pragma once

#include <string>
#include <vector>

#include "nestedeq/game.hpp"

namespace fixtures {

/// Builds a game from per-state bimatrices; payoff[w][a0][a1] = {u0, u1}.
inline nestedeq::NestedGame two_player(std::vector<std::string> ids, std::vector<double> prior,
                                       std::vector<std::string> atoms0, std::vector<std::string> atoms1,
                                       std::vector<std::string> actions0, std::vector<std::string> actions1,
                                       const std::vector<std::vector<std::vector<std::pair<double, double>>>>& payoff) {
  nestedeq::NestedGame g;
  g.space.ids = std::move(ids);
  g.space.prior = std::move(prior);
  g.partitions.push_back(nestedeq::Partition::from_keys(atoms0));
  g.partitions.push_back(nestedeq::Partition::from_keys(atoms1));
  g.payoffs = nestedeq::PayoffTensor({actions0, actions1}, g.space.prior.size());
  for (std::size_t w = 0; w < g.states(); ++w) {
    for (std::size_t a = 0; a < actions0.size(); ++a) {
      for (std::size_t b = 0; b < actions1.size(); ++b) {
        const std::size_t p = a * actions1.size() + b;
        g.payoffs.at(w, p, 0) = payoff[w][a][b].first;
        g.payoffs.at(w, p, 1) = payoff[w][a][b].second;
      }
    }
  }
  return g;
}

/// Zero-sum bimatrix from the row player's matrix.
inline std::vector<std::vector<std::pair<double, double>>> zero_sum(const std::vector<std::vector<double>>& m) {
  std::vector<std::vector<std::pair<double, double>>> out;
  for (const auto& row : m) {
    out.emplace_back();
    for (double x : row) out.back().emplace_back(x, -x);
  }
  return out;
}

inline nestedeq::NestedGame matching_pennies() {
  return two_player({"w"}, {1.0}, {"x"}, {"x"}, {"H", "T"}, {"H", "T"}, {zero_sum({{1, -1}, {-1, 1}})});
}

/// The row player knows the state, the column player does not. Row matrices
/// are [[1,-1],[-1,1]] in state a and [[2,0],[0,1]] in state b, each with
/// probability 1/2. Value for the row player: 1/2.
inline nestedeq::NestedGame informed_uninformed() {
  return two_player({"a", "b"}, {0.5, 0.5}, {"sees-a", "sees-b"}, {"blind", "blind"}, {"A", "B"}, {"L", "R"},
                    {zero_sum({{1, -1}, {-1, 1}}), zero_sum({{2, 0}, {0, 1}})});
}

inline nestedeq::StrategyProfile profile(const nestedeq::NestedGame& g,
                                         std::vector<std::vector<nestedeq::Distribution>> s) {
  nestedeq::StrategyProfile p;
  p.partitions = g.partitions;
  p.strategies = std::move(s);
  return p;
}

}  // namespace fixtures
