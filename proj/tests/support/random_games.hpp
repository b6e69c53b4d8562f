#pragma once

// Random nested games for property tests.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nestedeq/game.hpp"

namespace testsupport {

struct CorpusOptions {
  std::size_t min_players = 2, max_players = 4;
  std::size_t max_states = 200;
  std::size_t min_actions = 2, max_actions = 3;
  std::size_t payoff_matrices = 5;
  double zero_mass_rate = 0.05;
  double player_prior_rate = 0.2;  // share of games with per-player priors
};

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double unit(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Player n-1 sees 1-3 atoms; every atom of player i+1 splits into 1-3 atoms
/// of player i. States are spread over the finest atoms. Payoffs come from a
/// pool of matrices with entries in {-1, -0.5, 0, 0.5, 1}.
inline nestedeq::NestedGame random_nested_game(std::mt19937_64& rng, const CorpusOptions& opt = {}) {
  const std::size_t n = uniform_index(rng, opt.min_players, opt.max_players);

  // atom_parent[i][a]: atom of player i+1 containing atom a of player i.
  std::vector<std::size_t> atoms(n);
  std::vector<std::vector<std::size_t>> parent(n);
  atoms[n - 1] = uniform_index(rng, 1, 3);
  for (std::size_t i = n - 1; i-- > 0;) {
    for (std::size_t a = 0; a < atoms[i + 1]; ++a) {
      const std::size_t split = uniform_index(rng, 1, 3);
      for (std::size_t s = 0; s < split; ++s) parent[i].push_back(a);
    }
    atoms[i] = parent[i].size();
  }
  const std::size_t states = uniform_index(rng, atoms[0], std::max(atoms[0], opt.max_states));
  std::vector<std::size_t> finest(states);
  for (std::size_t w = 0; w < states; ++w) finest[w] = w < atoms[0] ? w : uniform_index(rng, 0, atoms[0] - 1);
  std::shuffle(finest.begin(), finest.end(), rng);

  nestedeq::NestedGame g;
  for (std::size_t w = 0; w < states; ++w) g.space.ids.push_back("s" + std::to_string(w));
  std::vector<std::size_t> cur = finest;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> keys(states);
    for (std::size_t w = 0; w < states; ++w) keys[w] = "p" + std::to_string(i + 1) + "a" + std::to_string(cur[w]);
    g.partitions.push_back(nestedeq::Partition::from_keys(keys));
    if (i + 1 < n) {
      for (auto& a : cur) a = parent[i][a];
    }
  }

  auto draw_prior = [&](const std::vector<bool>& zero) {
    std::vector<double> p(states);
    double total = 0.0;
    for (std::size_t w = 0; w < states; ++w) {
      p[w] = zero[w] ? 0.0 : 0.05 + unit(rng);
      total += p[w];
    }
    for (auto& x : p) x /= total;
    return p;
  };
  std::vector<bool> zero(states, false);
  for (std::size_t w = 0; w < states; ++w) zero[w] = unit(rng) < opt.zero_mass_rate;
  zero[uniform_index(rng, 0, states - 1)] = false;
  if (std::all_of(zero.begin(), zero.end(), [](bool z) { return z; })) zero[0] = false;
  g.space.prior = draw_prior(zero);
  if (unit(rng) < opt.player_prior_rate) {
    for (std::size_t i = 0; i < n; ++i) g.space.player_priors.push_back(draw_prior(zero));
  }

  std::vector<std::vector<std::string>> actions(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = uniform_index(rng, opt.min_actions, opt.max_actions);
    for (std::size_t a = 0; a < k; ++a) actions[i].push_back(std::string(1, char('a' + a)));
  }
  g.payoffs = nestedeq::PayoffTensor(actions, states);
  const std::size_t width = g.payoffs.profile_count() * n;
  static constexpr double kLevels[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<std::vector<double>> pool(opt.payoff_matrices, std::vector<double>(width));
  for (auto& m : pool) {
    for (auto& x : m) x = kLevels[uniform_index(rng, 0, 4)];
  }
  for (std::size_t w = 0; w < states; ++w) {
    const auto& m = pool[uniform_index(rng, 0, pool.size() - 1)];
    for (std::size_t p = 0; p < g.payoffs.profile_count(); ++p) {
      for (std::size_t i = 0; i < n; ++i) g.payoffs.at(w, p, i) = m[p * n + i];
    }
  }
  return g;
}

inline std::vector<nestedeq::NestedGame> corpus(std::uint64_t seed, std::size_t count, const CorpusOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  std::vector<nestedeq::NestedGame> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_nested_game(rng, opt));
  return out;
}

}  // namespace testsupport
