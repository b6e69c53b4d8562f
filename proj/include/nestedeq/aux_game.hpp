#pragma once

// The auxiliary game over the coarse partitions and its agent form.

#include <string>
#include <vector>

#include "nestedeq/game.hpp"
#include "nestedeq/hierarchy.hpp"
#include "nestedeq/payoff.hpp"

namespace nestedeq {

/// Same states, priors, actions and payoffs as the base game; each player's
/// information is her coarse partition.
struct AuxGame {
  NestedGame game;
  Hierarchy hierarchy;
  std::vector<Partition> original;         // information partitions of the base game
  std::vector<std::vector<bool>> null_atom;  // [player][G atom]: zero mass under her prior
};

inline AuxGame build_auxiliary_game(const NestedGame& base, const Hierarchy& h) {
  if (h.levels.size() != base.players() || h.coarse.size() != base.players()) {
    throw InvalidInput("hierarchy has " + std::to_string(h.levels.size()) + " levels for " +
                       std::to_string(base.players()) + " players");
  }
  for (const auto& g : h.coarse) {
    if (g.state_count() != base.states()) throw InvalidInput("hierarchy covers a different state space");
  }
  const auto report = check_properties(base, h);
  if (!report.ok()) {
    const auto f = report.failures().front();
    throw InvalidInput("hierarchy fails " + f.name + " for player " + std::to_string(f.player + 1) + ": " + f.detail);
  }

  AuxGame aux;
  aux.game = base;
  aux.hierarchy = h;
  aux.original = base.partitions;
  for (std::size_t i = 0; i < base.players(); ++i) {
    Partition g = h.coarse[i];
    std::vector<std::string> labels(g.atom_count());
    for (std::size_t a = 0; a < labels.size(); ++a) labels[a] = "C" + std::to_string(i + 1) + ":" + std::to_string(a);
    g.set_labels(std::move(labels));
    aux.game.partitions[i] = g;
    const auto mass = atom_masses(g, base.space.prior_of(i));
    std::vector<bool> null(g.atom_count(), true);
    for (const auto& [a, m] : mass) null[a] = false;
    aux.null_atom.push_back(std::move(null));
  }
  return aux;
}

using AgentProfile = std::vector<Distribution>;  // one distribution per agent

struct Agent {
  std::size_t player = 0;
  std::size_t atom = 0;
  double mass = 0.0;  // under the player's own prior
  std::vector<std::size_t> states;  // positive-mass states of the atom
};

/// Each positive-mass coarse atom of each player acts as an independent agent.
/// Null atoms play a fixed pure action (index 0).
struct AgentFormGame {
  NestedGame game;  // the auxiliary game
  std::vector<Agent> agents;
  std::vector<std::vector<std::size_t>> agent_of;  // [player][atom] -> agent or npos
  std::vector<std::vector<std::size_t>> state_agents;  // [state][player] -> agent or npos

  std::size_t action_count(std::size_t agent) const { return game.payoffs.action_count(agents[agent].player); }

  AgentProfile uniform() const {
    AgentProfile x;
    for (std::size_t k = 0; k < agents.size(); ++k) {
      x.emplace_back(action_count(k), 1.0 / double(action_count(k)));
    }
    return x;
  }

  /// Prior-weighted value of each own action of agent k:
  /// sum_{w in atom} P_i(w) sum_{a_-i} prod_{j != i} x_j(a_j) R_i(w, a).
  std::vector<double> action_values(std::size_t k, const AgentProfile& x) const {
    const Agent& ag = agents[k];
    const std::size_t n = game.players();
    const auto& prior = game.space.prior_of(ag.player);
    std::vector<CompensatedSum> acc(action_count(k));
    std::vector<const Distribution*> d(n);
    std::vector<Distribution> fixed(n);
    for (std::size_t w : ag.states) {
      for (std::size_t j = 0; j < n; ++j) d[j] = strategy_at(j, w, x, fixed[j]);
      detail::for_each_profile(game.payoffs, [&](std::size_t p, const std::vector<std::size_t>& joint) {
        double wgt = prior[w];
        for (std::size_t j = 0; j < n; ++j) {
          if (j != ag.player) wgt *= (*d[j])[joint[j]];
        }
        if (wgt != 0.0) acc[joint[ag.player]] += wgt * game.payoffs.at(w, p, ag.player);
      });
    }
    std::vector<double> out(acc.size());
    for (std::size_t a = 0; a < acc.size(); ++a) out[a] = acc[a].value();
    return out;
  }

  /// Expected payoff of agent k: positive affine in her conditional payoff.
  double payoff(std::size_t k, const AgentProfile& x) const {
    const auto v = action_values(k, x);
    CompensatedSum s;
    for (std::size_t a = 0; a < v.size(); ++a) s += x[k][a] * v[a];
    return s.value();
  }

  /// Conditional regret of agent k (divided by the atom mass).
  double regret(std::size_t k, const AgentProfile& x) const {
    const auto v = action_values(k, x);
    double best = v[0];
    CompensatedSum s;
    for (std::size_t a = 0; a < v.size(); ++a) {
      best = std::max(best, v[a]);
      s += x[k][a] * v[a];
    }
    return (best - s.value()) / agents[k].mass;
  }

  double max_regret(const AgentProfile& x) const {
    double r = 0.0;
    for (std::size_t k = 0; k < agents.size(); ++k) r = std::max(r, regret(k, x));
    return r;
  }

  /// The profile on coarse atoms that the agent profile describes.
  StrategyProfile to_profile(const AgentProfile& x) const {
    StrategyProfile p;
    p.level = FieldLevel::coarse;
    p.partitions = game.partitions;
    for (std::size_t i = 0; i < game.players(); ++i) {
      std::vector<Distribution> per_atom;
      for (std::size_t a = 0; a < game.partitions[i].atom_count(); ++a) {
        const std::size_t k = agent_of[i][a];
        if (k == npos) {
          Distribution pure(game.payoffs.action_count(i), 0.0);
          pure[0] = 1.0;
          per_atom.push_back(std::move(pure));
        } else {
          per_atom.push_back(x[k]);
        }
      }
      p.strategies.push_back(std::move(per_atom));
    }
    return p;
  }

 private:
  const Distribution* strategy_at(std::size_t player, std::size_t state, const AgentProfile& x,
                                  Distribution& scratch) const {
    const std::size_t k = state_agents[state][player];
    if (k != npos) return &x[k];
    scratch.assign(game.payoffs.action_count(player), 0.0);
    scratch[0] = 1.0;
    return &scratch;
  }
};

inline AgentFormGame to_agent_form(const AuxGame& aux) {
  AgentFormGame ag;
  ag.game = aux.game;
  const std::size_t n = aux.game.players();
  ag.agent_of.resize(n);
  ag.state_agents.assign(aux.game.states(), std::vector<std::size_t>(n, npos));
  for (std::size_t i = 0; i < n; ++i) {
    const Partition& g = aux.game.partitions[i];
    const auto& prior = aux.game.space.prior_of(i);
    ag.agent_of[i].assign(g.atom_count(), npos);
    const auto members = g.members();
    for (std::size_t a = 0; a < g.atom_count(); ++a) {
      Agent agent{i, a, 0.0, {}};
      CompensatedSum mass;
      for (std::size_t w : members[a]) {
        if (prior[w] > 0.0) {
          agent.states.push_back(w);
          mass += prior[w];
        }
      }
      if (agent.states.empty()) continue;
      agent.mass = mass.value();
      ag.agent_of[i][a] = ag.agents.size();
      for (std::size_t w : members[a]) ag.state_agents[w][i] = ag.agents.size();
      ag.agents.push_back(std::move(agent));
    }
  }
  return ag;
}

/// Each information atom inherits the distribution of the coarse atom containing it.
inline StrategyProfile lift_strategy(const StrategyProfile& coarse, const NestedGame& game, const Hierarchy& h) {
  if (coarse.strategies.size() != game.players()) throw InvalidInput("lift_strategy: player count mismatch");
  StrategyProfile out;
  out.level = FieldLevel::original;
  out.partitions = game.partitions;
  for (std::size_t i = 0; i < game.players(); ++i) {
    const Partition& f = game.partitions[i];
    const Partition& g = h.coarse[i];
    if (coarse.partitions[i].atom_count() != g.atom_count() || !(coarse.partitions[i] == g)) {
      throw InvalidInput("lift_strategy: profile is not measured on the coarse partition of player " +
                         std::to_string(i + 1));
    }
    std::vector<std::size_t> image(f.atom_count(), npos);
    for (std::size_t w = 0; w < game.states(); ++w) {
      auto& slot = image[f.atom_of(w)];
      if (slot == npos) {
        slot = g.atom_of(w);
      } else if (slot != g.atom_of(w)) {
        throw InvalidInput("lift_strategy: atom '" + f.label(f.atom_of(w)) + "' of player " + std::to_string(i + 1) +
                           " is not covered by a single coarse atom");
      }
    }
    std::vector<Distribution> per_atom;
    for (std::size_t a = 0; a < f.atom_count(); ++a) per_atom.push_back(coarse.strategies[i][image[a]]);
    out.strategies.push_back(std::move(per_atom));
  }
  return out;
}

}  // namespace nestedeq
