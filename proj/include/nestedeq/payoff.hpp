#pragma once

// Expectation kernels under the product measure P_s induced by a profile.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "nestedeq/game.hpp"

namespace nestedeq {

/// Shape and measurability check: one distribution per atom, each a
/// probability vector over the player's actions, and each player's partition
/// no finer than the player's information in `game`.
inline void check_profile(const NestedGame& game, const StrategyProfile& profile) {
  const std::size_t n = game.players();
  if (profile.partitions.size() != n || profile.strategies.size() != n) {
    throw InvalidInput("profile covers " + std::to_string(profile.strategies.size()) + " players, game has " +
                       std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& part = profile.partitions[i];
    if (part.state_count() != game.states()) {
      throw InvalidInput("profile partition of player " + std::to_string(i + 1) + " has wrong state count");
    }
    if (!refines(game.partitions[i], part)) {
      throw InvalidInput("strategy of player " + std::to_string(i + 1) + " is not measurable w.r.t. its information");
    }
    if (profile.strategies[i].size() != part.atom_count()) {
      throw InvalidInput("profile of player " + std::to_string(i + 1) + " does not cover every atom");
    }
    for (const auto& d : profile.strategies[i]) {
      if (d.size() != game.payoffs.action_count(i)) {
        throw InvalidInput("distribution of player " + std::to_string(i + 1) + " has wrong action count");
      }
      double total = 0.0;
      for (double x : d) {
        if (!(x >= 0.0)) throw InvalidInput("negative probability in profile of player " + std::to_string(i + 1));
        total += x;
      }
      if (std::abs(total - 1.0) > kInputTolerance) {
        throw InvalidInput("distribution of player " + std::to_string(i + 1) + " sums to " +
                           detail::fmt_double(total));
      }
    }
  }
}

namespace detail {

/// Walks joint profiles in index order, calling fn(profile, joint) with an
/// odometer-style joint action vector.
template <typename Fn>
void for_each_profile(const PayoffTensor& t, Fn&& fn) {
  const std::size_t n = t.players();
  std::vector<std::size_t> joint(n, 0);
  for (std::size_t p = 0; p < t.profile_count(); ++p) {
    fn(p, joint);
    for (std::size_t i = n; i-- > 0;) {
      if (++joint[i] < t.action_count(i)) break;
      joint[i] = 0;
    }
  }
}

}  // namespace detail

/// Opponent-weighted payoff of each own action at one state:
/// out[a_i] = sum_{a_-i} prod_{j != i} s_j(w)(a_j) R_i(w, a).
inline std::vector<double> state_action_values(const NestedGame& game, const StrategyProfile& profile,
                                               std::size_t player, std::size_t state) {
  const auto& t = game.payoffs;
  const std::size_t n = t.players();
  std::vector<const Distribution*> dist(n);
  for (std::size_t j = 0; j < n; ++j) dist[j] = &profile.at(j, state);
  std::vector<CompensatedSum> acc(t.action_count(player));
  detail::for_each_profile(t, [&](std::size_t p, const std::vector<std::size_t>& joint) {
    double w = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != player) w *= (*dist[j])[joint[j]];
    }
    if (w != 0.0) acc[joint[player]] += w * t.at(state, p, player);
  });
  std::vector<double> out(acc.size());
  for (std::size_t a = 0; a < acc.size(); ++a) out[a] = acc[a].value();
  return out;
}

/// E_s[R_i | w] for a single state.
inline double state_payoff(const NestedGame& game, const StrategyProfile& profile, std::size_t player,
                           std::size_t state) {
  const auto values = state_action_values(game, profile, player, state);
  const auto& own = profile.at(player, state);
  CompensatedSum s;
  for (std::size_t a = 0; a < values.size(); ++a) s += own[a] * values[a];
  return s.value();
}

/// U_i(s) for every player; each player integrates against her own prior.
inline std::vector<double> expected_payoff(const NestedGame& game, const StrategyProfile& profile) {
  check_profile(game, profile);
  std::vector<double> u(game.players());
  for (std::size_t i = 0; i < game.players(); ++i) {
    const auto& prior = game.space.prior_of(i);
    CompensatedSum s;
    for (std::size_t w = 0; w < game.states(); ++w) {
      if (prior[w] > 0.0) s += prior[w] * state_payoff(game, profile, i, w);
    }
    u[i] = s.value();
  }
  return u;
}

/// Atoms carrying positive mass under `prior`, with that mass.
inline std::map<std::size_t, double> atom_masses(const Partition& partition, const std::vector<double>& prior) {
  std::map<std::size_t, CompensatedSum> acc;
  for (std::size_t w = 0; w < partition.state_count(); ++w) {
    if (prior[w] > 0.0) acc[partition.atom_of(w)] += prior[w];
  }
  std::map<std::size_t, double> out;
  for (auto& [a, s] : acc) out[a] = s.value();
  return out;
}

/// U_i(s | partition) on every positive-mass atom; zero-mass atoms are omitted.
inline std::map<std::size_t, double> conditional_payoff(const NestedGame& game, const StrategyProfile& profile,
                                                        std::size_t player, const Partition& partition) {
  check_profile(game, profile);
  if (partition.state_count() != game.states()) {
    throw InvalidInput("conditional_payoff: partition has wrong state count");
  }
  const auto& prior = game.space.prior_of(player);
  std::map<std::size_t, CompensatedSum> num;
  for (std::size_t w = 0; w < game.states(); ++w) {
    if (prior[w] > 0.0) num[partition.atom_of(w)] += prior[w] * state_payoff(game, profile, player, w);
  }
  const auto mass = atom_masses(partition, prior);
  std::map<std::size_t, double> out;
  for (auto& [a, s] : num) out[a] = s.value() / mass.at(a);
  return out;
}

}  // namespace nestedeq
