#pragma once

// Domain model for finite Bayesian games with nested information.
//
// States, atoms, players and actions are all addressed by dense indices.
// Human-readable labels ride along for I/O but never affect computation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "nestedeq/numeric.hpp"

namespace nestedeq {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

/// Raised for malformed games, profiles and hierarchies handed in by callers.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Distribution = std::vector<double>;

struct StateSpace {
  std::vector<std::string> ids;
  std::vector<double> prior;
  /// Empty when all players share `prior`; otherwise one row per player.
  std::vector<std::vector<double>> player_priors;

  std::size_t size() const { return prior.size(); }
  bool has_player_priors() const { return !player_priors.empty(); }
  const std::vector<double>& prior_of(std::size_t player) const {
    return player_priors.empty() ? prior : player_priors.at(player);
  }
};

/// A finite information partition: every state maps to exactly one atom.
/// Atom indices are dense, in order of first appearance over the states.
class Partition {
 public:
  Partition() = default;

  /// Builds from arbitrary per-state keys; equal keys share an atom.
  template <typename Key>
  static Partition from_keys(const std::vector<Key>& keys) {
    Partition p;
    std::map<Key, std::size_t> seen;
    p.atom_of_.reserve(keys.size());
    for (const auto& k : keys) {
      auto [it, inserted] = seen.emplace(k, seen.size());
      p.atom_of_.push_back(it->second);
    }
    p.atom_count_ = seen.size();
    if constexpr (std::is_same_v<Key, std::string>) {
      p.labels_.resize(p.atom_count_);
      for (const auto& [k, a] : seen) p.labels_[a] = k;
    }
    return p;
  }

  static Partition finest(std::size_t states) {
    std::vector<std::size_t> keys(states);
    for (std::size_t s = 0; s < states; ++s) keys[s] = s;
    return from_keys(keys);
  }
  static Partition trivial(std::size_t states) {
    return from_keys(std::vector<std::size_t>(states, 0));
  }

  std::size_t state_count() const { return atom_of_.size(); }
  std::size_t atom_count() const { return atom_count_; }
  std::size_t atom_of(std::size_t state) const { return atom_of_[state]; }
  const std::vector<std::size_t>& atom_map() const { return atom_of_; }

  /// Label of an atom; falls back to its index when built from non-string keys.
  std::string label(std::size_t atom) const {
    return atom < labels_.size() ? labels_[atom] : std::to_string(atom);
  }
  void set_labels(std::vector<std::string> labels) { labels_ = std::move(labels); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::vector<std::vector<std::size_t>> members() const {
    std::vector<std::vector<std::size_t>> m(atom_count_);
    for (std::size_t s = 0; s < atom_of_.size(); ++s) m[atom_of_[s]].push_back(s);
    return m;
  }

  bool operator==(const Partition& o) const { return atom_of_ == o.atom_of_; }

 private:
  std::vector<std::size_t> atom_of_;
  std::size_t atom_count_ = 0;
  std::vector<std::string> labels_;
};

/// Payoffs for every (state, joint action profile, player). Joint profiles are
/// indexed mixed-radix with the last player varying fastest.
class PayoffTensor {
 public:
  PayoffTensor() = default;
  PayoffTensor(std::vector<std::vector<std::string>> actions, std::size_t states)
      : actions_(std::move(actions)), states_(states) {
    profiles_ = 1;
    for (const auto& a : actions_) profiles_ *= a.size();
    values_.assign(states_ * profiles_ * actions_.size(), 0.0);
  }

  std::size_t players() const { return actions_.size(); }
  std::size_t states() const { return states_; }
  std::size_t profile_count() const { return profiles_; }
  std::size_t action_count(std::size_t player) const { return actions_[player].size(); }
  const std::vector<std::vector<std::string>>& actions() const { return actions_; }

  double& at(std::size_t state, std::size_t profile, std::size_t player) {
    return values_[(state * profiles_ + profile) * actions_.size() + player];
  }
  double at(std::size_t state, std::size_t profile, std::size_t player) const {
    return values_[(state * profiles_ + profile) * actions_.size() + player];
  }
  /// All payoffs of one state, laid out [profile][player].
  std::span<const double> state_block(std::size_t state) const {
    const std::size_t w = profiles_ * actions_.size();
    return {values_.data() + state * w, w};
  }
  const std::vector<double>& raw() const { return values_; }

  std::size_t profile_index(std::span<const std::size_t> joint) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < actions_.size(); ++i) idx = idx * actions_[i].size() + joint[i];
    return idx;
  }
  std::vector<std::size_t> decode(std::size_t profile) const {
    std::vector<std::size_t> joint(actions_.size());
    for (std::size_t i = actions_.size(); i-- > 0;) {
      joint[i] = profile % actions_[i].size();
      profile /= actions_[i].size();
    }
    return joint;
  }

 private:
  std::vector<std::vector<std::string>> actions_;
  std::size_t states_ = 0;
  std::size_t profiles_ = 0;
  std::vector<double> values_;
};

struct NestedGame {
  StateSpace space;
  std::vector<Partition> partitions;  // player 0 is the most informed
  PayoffTensor payoffs;

  std::size_t players() const { return partitions.size(); }
  std::size_t states() const { return space.size(); }
};

enum class FieldLevel { original, coarse };

/// Per player, one action distribution per atom of the partition the profile
/// is measured against. Measurability is structural: states in one atom share
/// a distribution.
struct StrategyProfile {
  FieldLevel level = FieldLevel::original;
  std::vector<Partition> partitions;
  std::vector<std::vector<Distribution>> strategies;  // [player][atom][action]

  const Distribution& at(std::size_t player, std::size_t state) const {
    return strategies[player][partitions[player].atom_of(state)];
  }

  static StrategyProfile uniform(const NestedGame& game, std::vector<Partition> parts,
                                 FieldLevel level = FieldLevel::original) {
    StrategyProfile p;
    p.level = level;
    p.partitions = std::move(parts);
    for (std::size_t i = 0; i < p.partitions.size(); ++i) {
      const std::size_t k = game.payoffs.action_count(i);
      p.strategies.emplace_back(p.partitions[i].atom_count(), Distribution(k, 1.0 / double(k)));
    }
    return p;
  }
};

// ---------------------------------------------------------------------------
// Structural checks

/// True iff every atom of `fine` sits inside a single atom of `coarse`.
inline bool refines(const Partition& fine, const Partition& coarse) {
  if (fine.state_count() != coarse.state_count()) {
    throw InvalidInput("refines: partitions cover different state sets");
  }
  std::vector<std::size_t> image(fine.atom_count(), npos);
  for (std::size_t s = 0; s < fine.state_count(); ++s) {
    auto& slot = image[fine.atom_of(s)];
    if (slot == npos) {
      slot = coarse.atom_of(s);
    } else if (slot != coarse.atom_of(s)) {
      return false;
    }
  }
  return true;
}

/// First pair of states that share a `fine` atom but not a `coarse` atom.
inline std::optional<std::pair<std::size_t, std::size_t>> refinement_witness(const Partition& fine,
                                                                             const Partition& coarse) {
  std::vector<std::size_t> rep(fine.atom_count(), npos);
  for (std::size_t s = 0; s < fine.state_count(); ++s) {
    auto& r = rep[fine.atom_of(s)];
    if (r == npos) {
      r = s;
    } else if (coarse.atom_of(r) != coarse.atom_of(s)) {
      return std::pair{r, s};
    }
  }
  return std::nullopt;
}

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {
inline std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

inline void check_distribution(const std::vector<double>& mass, const std::string& what,
                               std::vector<std::string>& out) {
  CompensatedSum total;
  for (std::size_t s = 0; s < mass.size(); ++s) {
    if (!(mass[s] >= 0.0) || !std::isfinite(mass[s])) {
      out.push_back(what + " has invalid mass " + fmt_double(mass[s]) + " at state " + std::to_string(s));
    }
    total += mass[s];
  }
  if (std::abs(total.value() - 1.0) > kInputTolerance) {
    out.push_back(what + " sums to " + fmt_double(total.value()));
  }
}
}  // namespace detail

inline ValidationReport validate_game(const NestedGame& game) {
  ValidationReport r;
  auto& v = r.violations;
  const std::size_t states = game.space.size();
  const std::size_t n = game.players();

  if (n < 2) v.push_back("need at least 2 players, got " + std::to_string(n));
  if (states == 0) v.push_back("state space is empty");
  if (game.space.ids.size() != states) v.push_back("state id count does not match prior length");
  {
    std::map<std::string, std::size_t> seen;
    for (const auto& id : game.space.ids) {
      if (!seen.emplace(id, 0).second) v.push_back("duplicate state id '" + id + "'");
    }
  }
  detail::check_distribution(game.space.prior, "prior", v);
  if (game.space.has_player_priors()) {
    if (game.space.player_priors.size() != n) {
      v.push_back("player_priors has " + std::to_string(game.space.player_priors.size()) +
                  " rows for " + std::to_string(n) + " players");
    }
    for (std::size_t i = 0; i < game.space.player_priors.size(); ++i) {
      if (game.space.player_priors[i].size() != states) {
        v.push_back("prior of player " + std::to_string(i + 1) + " has wrong length");
        continue;
      }
      detail::check_distribution(game.space.player_priors[i], "prior of player " + std::to_string(i + 1), v);
    }
  }

  bool partitions_sized = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (game.partitions[i].state_count() != states) {
      v.push_back("partition of player " + std::to_string(i + 1) + " does not cover every state");
      partitions_sized = false;
    }
  }

  if (game.payoffs.players() != n) {
    v.push_back("payoff tensor has " + std::to_string(game.payoffs.players()) + " players, game has " +
                std::to_string(n));
  } else if (game.payoffs.states() != states) {
    v.push_back("payoff tensor covers " + std::to_string(game.payoffs.states()) + " states");
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (game.payoffs.action_count(i) == 0) v.push_back("player " + std::to_string(i + 1) + " has no actions");
    }
    for (std::size_t k = 0; k < game.payoffs.raw().size(); ++k) {
      if (!std::isfinite(game.payoffs.raw()[k])) {
        v.push_back("non-finite payoff entry at flat index " + std::to_string(k));
        break;
      }
    }
  }

  if (partitions_sized) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (auto w = refinement_witness(game.partitions[i], game.partitions[i + 1])) {
        const auto& ids = game.space.ids;
        auto name = [&](std::size_t s) { return s < ids.size() ? ids[s] : std::to_string(s); };
        v.push_back("information not nested: states '" + name(w->first) + "' and '" +
                    name(w->second) + "' share an atom of player " + std::to_string(i + 1) +
                    " but not of player " + std::to_string(i + 2));
      }
    }
  }
  return r;
}

inline void require_valid(const NestedGame& game) {
  auto r = validate_game(game);
  if (!r.ok()) {
    std::string msg = "invalid game:";
    for (const auto& s : r.violations) msg += "\n  " + s;
    throw InvalidInput(msg);
  }
}

/// max |payoff| over all entries, floored at 1.
inline double payoff_bound(const NestedGame& game) {
  double m = 1.0;
  for (double x : game.payoffs.raw()) m = std::max(m, std::abs(x));
  return m;
}

/// |A| = number of joint action profiles.
inline std::size_t joint_action_count(const NestedGame& game) { return game.payoffs.profile_count(); }

/// Enumerates the distinct per-state payoff matrices R(w). Returns the class of
/// each state and the number of classes r. Matrices compare bit-for-bit.
struct PayoffClasses {
  std::vector<std::size_t> class_of;
  std::size_t count = 0;
};

inline PayoffClasses payoff_classes(const NestedGame& game) {
  PayoffClasses pc;
  std::map<std::vector<double>, std::size_t> seen;
  pc.class_of.reserve(game.states());
  for (std::size_t s = 0; s < game.states(); ++s) {
    auto block = game.payoffs.state_block(s);
    auto [it, inserted] = seen.emplace(std::vector<double>(block.begin(), block.end()), seen.size());
    pc.class_of.push_back(it->second);
  }
  pc.count = seen.size();
  return pc;
}

}  // namespace nestedeq
