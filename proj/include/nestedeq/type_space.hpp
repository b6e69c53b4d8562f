#pragma once

// Harsanyi type-space games translated into the state-space form.

#include <map>
#include <string>
#include <vector>

#include "nestedeq/game.hpp"

namespace nestedeq {

struct TypeSpaceGame {
  std::vector<std::vector<std::string>> types;    // per player type labels
  std::vector<std::vector<std::string>> actions;  // per player action labels
  std::map<std::vector<std::size_t>, double> joint;
  /// Per type profile, payoffs laid out [joint action profile][player].
  std::map<std::vector<std::size_t>, std::vector<double>> payoffs;
};

/// States are the type profiles with positive mass, in lexicographic order.
/// Player i observes (T_i, ..., T_n), which makes the information nested.
inline NestedGame from_type_space(const TypeSpaceGame& ts) {
  const std::size_t n = ts.types.size();
  if (ts.actions.size() != n) throw InvalidInput("types and actions disagree on the player count");

  CompensatedSum total;
  for (const auto& [profile, mass] : ts.joint) {
    if (profile.size() != n) throw InvalidInput("type profile of wrong length in joint distribution");
    for (std::size_t i = 0; i < n; ++i) {
      if (profile[i] >= ts.types[i].size()) throw InvalidInput("type index out of range in joint distribution");
    }
    if (!(mass >= 0.0) || !std::isfinite(mass)) throw InvalidInput("joint distribution has a negative mass");
    total += mass;
  }
  if (std::abs(total.value() - 1.0) > kInputTolerance) {
    throw InvalidInput("joint distribution sums to " + detail::fmt_double(total.value()));
  }

  std::vector<std::vector<std::size_t>> states;
  NestedGame g;
  for (const auto& [profile, mass] : ts.joint) {
    if (mass <= 0.0) continue;
    states.push_back(profile);
    std::string id;
    for (std::size_t i = 0; i < n; ++i) id += (i ? "|" : "") + ts.types[i][profile[i]];
    g.space.ids.push_back(id);
    g.space.prior.push_back(mass);
  }

  g.payoffs = PayoffTensor(ts.actions, states.size());
  const std::size_t width = g.payoffs.profile_count() * n;
  for (std::size_t w = 0; w < states.size(); ++w) {
    auto it = ts.payoffs.find(states[w]);
    if (it == ts.payoffs.end()) throw InvalidInput("missing payoffs for type profile '" + g.space.ids[w] + "'");
    if (it->second.size() != width) throw InvalidInput("payoff row of wrong size for '" + g.space.ids[w] + "'");
    for (std::size_t p = 0; p < g.payoffs.profile_count(); ++p) {
      for (std::size_t i = 0; i < n; ++i) g.payoffs.at(w, p, i) = it->second[p * n + i];
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::vector<std::size_t>> keys;
    for (const auto& s : states) keys.emplace_back(s.begin() + std::ptrdiff_t(i), s.end());
    Partition part = Partition::from_keys(keys);
    std::vector<std::string> labels(part.atom_count());
    for (std::size_t w = 0; w < states.size(); ++w) {
      std::string label;
      for (std::size_t j = i; j < n; ++j) label += (j > i ? "|" : "") + ts.types[j][states[w][j]];
      labels[part.atom_of(w)] = label;
    }
    part.set_labels(std::move(labels));
    g.partitions.push_back(std::move(part));
  }
  return g;
}

}  // namespace nestedeq
