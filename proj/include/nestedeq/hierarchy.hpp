#pragma once

// Finite approximation of the belief hierarchy of a nested game.
//
// Level i takes the signal (beliefs of levels 1..i-1, payoff class), conditions
// it on player i's information and rounds the conditional distribution onto a
// simplex net; the rounded point is player i's belief. Player i's coarse
// partition is the joint level-set partition of the beliefs of levels i..n.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nestedeq/game.hpp"
#include "nestedeq/numeric.hpp"
#include "nestedeq/payoff.hpp"
#include "nestedeq/simplex_grid.hpp"

namespace nestedeq {

using ValueTuple = std::vector<std::size_t>;

struct HierarchyLevel {
  std::size_t player = 0;
  /// Signal values realized with positive mass, sorted. Each tuple is
  /// (belief index at level 1, ..., belief index at level i-1, payoff class).
  std::vector<ValueTuple> signal_support;
  /// Support index of the signal at each state; npos where the value only occurs
  /// on zero-mass states.
  std::vector<std::size_t> signal_of;
  std::int64_t resolution = 1;
  std::vector<GridPoint> belief_support;  // assigned points only
  std::vector<std::size_t> belief_of;     // state -> index into belief_support
  /// L1 distance between exact conditional and belief per information atom; negative
  /// for zero-mass atoms, which carry no constraint.
  std::vector<double> atom_gap;

  double max_gap() const {
    double g = 0.0;
    for (double x : atom_gap) g = std::max(g, x);
    return g;
  }
  const GridPoint& belief_at(std::size_t state) const { return belief_support[belief_of[state]]; }
};

struct Hierarchy {
  double delta = 0.0;
  PayoffClasses payoff;
  std::vector<HierarchyLevel> levels;
  std::vector<Partition> coarse;  // per player
};

/// Exact conditional distribution of a finite-valued variable on each
/// positive-mass atom. Values must be dense ids in [0, value_count).
inline std::map<std::size_t, std::vector<double>> conditional_distribution(std::span<const std::size_t> value_of,
                                                                           std::size_t value_count,
                                                                           const Partition& partition,
                                                                           std::span<const double> prior) {
  if (value_of.size() != partition.state_count() || prior.size() != partition.state_count()) {
    throw InvalidInput("conditional_distribution: sizes disagree");
  }
  std::map<std::size_t, std::vector<CompensatedSum>> num;
  std::map<std::size_t, CompensatedSum> den;
  for (std::size_t w = 0; w < value_of.size(); ++w) {
    if (!(prior[w] > 0.0)) continue;
    if (value_of[w] >= value_count) throw InvalidInput("conditional_distribution: value id out of range");
    auto& row = num[partition.atom_of(w)];
    row.resize(value_count);
    row[value_of[w]] += prior[w];
    den[partition.atom_of(w)] += prior[w];
  }
  std::map<std::size_t, std::vector<double>> out;
  for (auto& [atom, row] : num) {
    const double mass = den[atom].value();
    std::vector<double> d(value_count);
    for (std::size_t v = 0; v < value_count; ++v) d[v] = row[v].value() / mass;
    out.emplace(atom, std::move(d));
  }
  return out;
}

inline std::map<std::size_t, std::vector<double>> conditional_distribution(std::span<const std::size_t> value_of,
                                                                           const Partition& partition,
                                                                           std::span<const double> prior) {
  std::size_t count = 0;
  for (std::size_t w = 0; w < value_of.size(); ++w) {
    if (prior[w] > 0.0) count = std::max(count, value_of[w] + 1);
  }
  return conditional_distribution(value_of, count, partition, prior);
}

inline Hierarchy build_hierarchy(const NestedGame& game, double delta) {
  require_valid(game);
  if (!(delta > 0.0)) throw InvalidInput("build_hierarchy: delta must be positive");

  const std::size_t n = game.players();
  const std::size_t states = game.states();
  Hierarchy h;
  h.delta = delta;
  h.payoff = payoff_classes(game);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& prior = game.space.prior_of(i);
    HierarchyLevel lvl;
    lvl.player = i;

    std::vector<ValueTuple> signal(states);
    std::map<ValueTuple, std::size_t> support;
    for (std::size_t w = 0; w < states; ++w) {
      for (std::size_t j = 0; j < i; ++j) signal[w].push_back(h.levels[j].belief_of[w]);
      signal[w].push_back(h.payoff.class_of[w]);
      if (prior[w] > 0.0) support.emplace(signal[w], 0);
    }
    std::size_t next = 0;
    for (auto& [tuple, idx] : support) {
      idx = next++;
      lvl.signal_support.push_back(tuple);
    }
    lvl.signal_of.resize(states, npos);
    for (std::size_t w = 0; w < states; ++w) {
      if (auto it = support.find(signal[w]); it != support.end()) lvl.signal_of[w] = it->second;
    }

    const std::size_t dim = lvl.signal_support.size();
    lvl.resolution = grid_resolution(dim, delta);
    const Partition& info = game.partitions[i];

    // signal_of may hold npos on zero-mass states; those never enter a conditional.
    std::vector<std::size_t> value_of(states, 0);
    for (std::size_t w = 0; w < states; ++w) value_of[w] = lvl.signal_of[w] == npos ? 0 : lvl.signal_of[w];
    const auto cond = conditional_distribution(value_of, dim, info, prior);

    std::vector<GridPoint> atom_belief(info.atom_count());
    lvl.atom_gap.assign(info.atom_count(), -1.0);
    for (std::size_t a = 0; a < info.atom_count(); ++a) {
      if (auto it = cond.find(a); it != cond.end()) {
        atom_belief[a] = round_to_resolution(it->second, lvl.resolution);
        lvl.atom_gap[a] = l1_distance(it->second, atom_belief[a]);
      } else {
        atom_belief[a] = dirac_point(dim, 0, lvl.resolution);
      }
    }

    std::map<GridPoint, std::size_t> points;
    std::vector<std::size_t> atom_point(info.atom_count());
    for (std::size_t a = 0; a < info.atom_count(); ++a) {
      auto [it, inserted] = points.emplace(atom_belief[a], lvl.belief_support.size());
      if (inserted) lvl.belief_support.push_back(atom_belief[a]);
      atom_point[a] = it->second;
    }
    lvl.belief_of.resize(states);
    for (std::size_t w = 0; w < states; ++w) lvl.belief_of[w] = atom_point[info.atom_of(w)];
    h.levels.push_back(std::move(lvl));
  }

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<ValueTuple> keys(states);
    for (std::size_t w = 0; w < states; ++w) {
      for (std::size_t j = i; j < n; ++j) keys[w].push_back(h.levels[j].belief_of[w]);
    }
    h.coarse.push_back(Partition::from_keys(keys));
  }
  return h;
}

/// Expectation of f under the belief held at a state: sum_z f(z) * belief(z).
inline double approx_expectation(const HierarchyLevel& level, std::span<const double> f, std::size_t state) {
  if (f.size() != level.signal_support.size()) throw InvalidInput("approx_expectation: f must cover the signal support");
  const GridPoint& belief = level.belief_at(state);
  CompensatedSum s;
  for (std::size_t z = 0; z < f.size(); ++z) {
    if (belief.numerators[z] != 0) s += f[z] * belief.coord(z);
  }
  return s.value();
}

/// Largest |E[f(signal) | information] - belief expectation of f| over positive-mass atoms.
inline double conditional_expectation_gap(const NestedGame& game, const Hierarchy& h, std::size_t player, std::span<const double> f,
                         double bound) {
  const auto& lvl = h.levels.at(player);
  if (f.size() != lvl.signal_support.size()) throw InvalidInput("conditional_expectation_gap: f must cover the signal support");
  for (double x : f) {
    if (!(std::abs(x) <= bound)) throw InvalidInput("conditional_expectation_gap: |f| exceeds the declared bound");
  }
  const auto& prior = game.space.prior_of(player);
  const Partition& info = game.partitions[player];
  std::vector<CompensatedSum> num(info.atom_count()), den(info.atom_count());
  std::vector<std::size_t> rep(info.atom_count(), npos);
  for (std::size_t w = 0; w < game.states(); ++w) {
    if (!(prior[w] > 0.0)) continue;
    const std::size_t a = info.atom_of(w);
    num[a] += prior[w] * f[lvl.signal_of[w]];
    den[a] += prior[w];
    if (rep[a] == npos) rep[a] = w;
  }
  double gap = 0.0;
  for (std::size_t a = 0; a < info.atom_count(); ++a) {
    if (rep[a] == npos) continue;
    const double exact = num[a].value() / den[a].value();
    gap = std::max(gap, std::abs(exact - approx_expectation(lvl, f, rep[a])));
  }
  return gap;
}

/// Recomputes, from the game, the L1 gap between the exact conditional of
/// the signal and the belief on every information atom (negative for zero-mass atoms).
inline std::vector<double> level_gaps(const NestedGame& game, const Hierarchy& h, std::size_t player) {
  const auto& lvl = h.levels.at(player);
  const auto& prior = game.space.prior_of(player);
  const Partition& info = game.partitions[player];
  const std::size_t dim = lvl.signal_support.size();
  std::vector<std::size_t> value_of(game.states(), 0);
  for (std::size_t w = 0; w < game.states(); ++w) {
    if (prior[w] > 0.0 && lvl.signal_of[w] == npos) throw InvalidInput("hierarchy: positive-mass state outside signal support");
    value_of[w] = lvl.signal_of[w] == npos ? 0 : lvl.signal_of[w];
  }
  const auto cond = conditional_distribution(value_of, dim, info, prior);
  std::vector<double> gaps(info.atom_count(), -1.0);
  std::vector<std::size_t> rep(info.atom_count(), npos);
  for (std::size_t w = 0; w < game.states(); ++w) {
    if (rep[info.atom_of(w)] == npos) rep[info.atom_of(w)] = w;
  }
  for (const auto& [atom, p] : cond) gaps[atom] = l1_distance(p, lvl.belief_at(rep[atom]));
  return gaps;
}

struct PropertyCheck {
  std::string name;
  std::size_t player = 0;
  bool pass = true;
  std::string detail;
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.pass; });
  }
  bool passes(const std::string& name) const {
    return std::all_of(checks.begin(), checks.end(),
                       [&](const PropertyCheck& c) { return c.name != name || c.pass; });
  }
  std::vector<PropertyCheck> failures() const {
    std::vector<PropertyCheck> f;
    for (const auto& c : checks) {
      if (!c.pass) f.push_back(c);
    }
    return f;
  }
};

/// Audits the structural properties of the coarse partitions plus the strict delta bound of every level.
inline PropertyReport check_properties(const NestedGame& game, const Hierarchy& h) {
  const std::size_t n = game.players();
  if (h.levels.size() != n || h.coarse.size() != n) throw InvalidInput("hierarchy does not match the game");
  PropertyReport r;

  for (std::size_t i = 0; i < n; ++i) {
    PropertyCheck c{"atom-cap", i};
    double cap = 1.0;
    for (std::size_t j = i; j < n; ++j) cap *= double(h.levels[j].belief_support.size());
    const double atoms = double(h.coarse[i].atom_count());
    c.pass = atoms <= cap;
    c.detail = std::to_string(h.coarse[i].atom_count()) + " atoms, cap " + detail::fmt_double(cap);
    r.checks.push_back(std::move(c));
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    PropertyCheck c{"coarse-nested", i + 1};
    c.witness = refinement_witness(h.coarse[i], h.coarse[i + 1]);
    c.pass = !c.witness;
    c.detail = c.pass ? "coarse " + std::to_string(i + 1) + " refines coarse " + std::to_string(i + 2)
                      : "coarse " + std::to_string(i + 1) + " does not refine coarse " + std::to_string(i + 2);
    r.checks.push_back(std::move(c));
  }

  for (std::size_t i = 0; i < n; ++i) {
    PropertyCheck c{"coarse-measurable", i};
    c.witness = refinement_witness(game.partitions[i], h.coarse[i]);
    c.pass = !c.witness;
    c.detail = c.pass ? "information refines coarse" : "information does not refine coarse";
    r.checks.push_back(std::move(c));
  }

  for (std::size_t i = 0; i < n; ++i) {
    PropertyCheck c{"belief-constant", i};
    std::vector<std::size_t> rep(h.coarse[i].atom_count(), npos);
    for (std::size_t w = 0; w < game.states() && c.pass; ++w) {
      auto& r0 = rep[h.coarse[i].atom_of(w)];
      if (r0 == npos) {
        r0 = w;
      } else if (h.levels[i].belief_of[r0] != h.levels[i].belief_of[w]) {
        c.pass = false;
        c.witness = std::pair{r0, w};
      }
    }
    c.detail = c.pass ? "belief constant on coarse atoms" : "belief varies inside a coarse atom";
    r.checks.push_back(std::move(c));
  }

  for (std::size_t i = 0; i < n; ++i) {
    PropertyCheck c{"delta-bound", i};
    double g = 0.0;
    for (double x : level_gaps(game, h, i)) g = std::max(g, x);
    c.pass = g < h.delta;
    c.detail = "max L1 gap " + detail::fmt_double(g) + " vs delta " + detail::fmt_double(h.delta);
    r.checks.push_back(std::move(c));
  }
  return r;
}

}  // namespace nestedeq
