#pragma once

// Exact regret computation and certification.
//
// A player's payoff is linear in her own distribution on each atom and
// deviations on different atoms do not interact, so the pointwise best
// response on every atom is the optimal deviation. Bayesian regret is the
// per-atom gap; Harsanyi regret is its prior-weighted sum.

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nestedeq/game.hpp"
#include "nestedeq/hierarchy.hpp"
#include "nestedeq/numeric.hpp"
#include "nestedeq/payoff.hpp"

namespace nestedeq {

/// Slack used in every threshold comparison of a certificate.
inline constexpr double kCertificateSlack = 1e-9;

struct AtomBestResponse {
  double mass = 0.0;
  std::vector<double> action_values;  // conditional value of each own action
  double value = 0.0;                 // max over own actions
  std::vector<std::size_t> argmax;
};

namespace detail {

/// Prior-weighted action values summed over each positive-mass atom, plus
/// the atom mass. Summation runs over states in index order.
struct AtomAccumulator {
  CompensatedSum mass;
  std::vector<CompensatedSum> values;
  std::size_t representative = npos;
};

inline std::map<std::size_t, AtomAccumulator> accumulate_action_values(const NestedGame& game,
                                                                       const StrategyProfile& profile,
                                                                       std::size_t player,
                                                                       const Partition& partition) {
  const auto& prior = game.space.prior_of(player);
  std::map<std::size_t, AtomAccumulator> acc;
  for (std::size_t w = 0; w < game.states(); ++w) {
    if (!(prior[w] > 0.0)) continue;
    auto& a = acc[partition.atom_of(w)];
    if (a.representative == npos) a.representative = w;
    const auto v = state_action_values(game, profile, player, w);
    a.values.resize(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) a.values[k] += prior[w] * v[k];
    a.mass += prior[w];
  }
  return acc;
}

inline std::vector<std::size_t> argmax_set(const std::vector<double>& v, double best) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  const double tol = 1e-12 * std::max(scale, 1e-300);
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < v.size(); ++a) {
    if (v[a] >= best - tol) out.push_back(a);
  }
  return out;
}

}  // namespace detail

/// Per positive-mass atom of `partition`, the conditional value of
/// every own action against the others' strategies, and its maximum.
inline std::map<std::size_t, AtomBestResponse> best_response_values(const NestedGame& game,
                                                                    const StrategyProfile& profile,
                                                                    std::size_t player, const Partition& partition) {
  check_profile(game, profile);
  if (partition.state_count() != game.states()) throw InvalidInput("best_response_values: partition size");
  std::map<std::size_t, AtomBestResponse> out;
  for (auto& [atom, acc] : detail::accumulate_action_values(game, profile, player, partition)) {
    AtomBestResponse br;
    br.mass = acc.mass.value();
    for (auto& s : acc.values) br.action_values.push_back(s.value() / br.mass);
    br.value = *std::max_element(br.action_values.begin(), br.action_values.end());
    br.argmax = detail::argmax_set(br.action_values, br.value);
    out.emplace(atom, std::move(br));
  }
  return out;
}

struct AtomRegret {
  std::size_t player = 0;
  std::size_t atom = 0;
  double mass = 0.0;
  double value = 0.0;   // conditional payoff of the profile on the atom
  double best = 0.0;    // best-response value on the atom
  double regret = 0.0;  // best - value
  std::size_t best_action = 0;
};

struct RegretWitness {
  std::size_t player = 0;
  std::size_t atom = 0;
  std::size_t action = 0;
  double regret = 0.0;
};

struct RegretReport {
  double epsilon = 0.0;
  double slack = kCertificateSlack;
  std::vector<double> harsanyi;   // per player
  std::vector<AtomRegret> atoms;  // per (player, positive-mass atom), player-major
  RegretWitness witness;          // atom with the largest Bayesian regret
  bool bayesian_pass = false;
  bool harsanyi_pass = false;

  bool pass() const { return bayesian_pass && harsanyi_pass; }
  double max_bayesian() const { return witness.regret; }
  double max_harsanyi() const {
    double m = 0.0;
    for (double h : harsanyi) m = std::max(m, h);
    return m;
  }
};

/// Bayesian regret on every positive-mass atom of the game's own partitions
/// plus the Harsanyi regret per player, checked against `epsilon`.
inline RegretReport certify(const NestedGame& game, const StrategyProfile& profile, double epsilon) {
  check_profile(game, profile);
  RegretReport r;
  r.epsilon = epsilon;
  r.harsanyi.assign(game.players(), 0.0);
  bool have_witness = false;
  for (std::size_t i = 0; i < game.players(); ++i) {
    const Partition& info = game.partitions[i];
    CompensatedSum harsanyi;
    for (auto& [atom, acc] : detail::accumulate_action_values(game, profile, i, info)) {
      AtomRegret ar;
      ar.player = i;
      ar.atom = atom;
      ar.mass = acc.mass.value();
      const auto& own = profile.at(i, acc.representative);
      std::vector<double> m(acc.values.size());
      CompensatedSum played;
      for (std::size_t a = 0; a < m.size(); ++a) {
        m[a] = acc.values[a].value() / ar.mass;
        played += own[a] * m[a];
      }
      ar.value = played.value();
      ar.best_action = std::size_t(std::max_element(m.begin(), m.end()) - m.begin());
      ar.best = m[ar.best_action];
      ar.regret = ar.best - ar.value;
      if (ar.regret < -kDerivedTolerance) {
        throw std::logic_error("negative regret " + detail::fmt_double(ar.regret) + " for player " +
                               std::to_string(i + 1) + " on atom " + info.label(atom));
      }
      harsanyi += ar.mass * std::max(0.0, ar.regret);
      if (!have_witness || ar.regret > r.witness.regret) {
        r.witness = {i, atom, ar.best_action, ar.regret};
        have_witness = true;
      }
      r.atoms.push_back(ar);
    }
    r.harsanyi[i] = harsanyi.value();
  }
  r.bayesian_pass = r.max_bayesian() <= epsilon + r.slack;
  r.harsanyi_pass = r.max_harsanyi() <= epsilon + r.slack;
  return r;
}

inline std::vector<AtomRegret> bayesian_regret(const NestedGame& game, const StrategyProfile& profile) {
  return certify(game, profile, 0.0).atoms;
}

inline std::vector<double> harsanyi_regret(const NestedGame& game, const StrategyProfile& profile) {
  return certify(game, profile, 0.0).harsanyi;
}

// ---------------------------------------------------------------------------
// Transfer diagnostic between the original game and its coarse approximation.

struct TransferDiagnostic {
  double max_gap = 0.0;
  /// Per positive-mass information atom: the exact conditional action values and
  /// their approximation under the rounded belief (constant on coarse atoms).
  std::map<std::size_t, std::vector<double>> exact;
  std::map<std::size_t, std::vector<double>> approx;
};

/// Requires every other player's strategy to be constant on her coarse atoms.
inline TransferDiagnostic transfer_diagnostic(const NestedGame& game, const Hierarchy& h, const StrategyProfile& profile,
                                          std::size_t player) {
  check_profile(game, profile);
  for (std::size_t j = 0; j < game.players(); ++j) {
    if (j == player) continue;
    std::vector<std::size_t> rep(h.coarse[j].atom_count(), npos);
    for (std::size_t w = 0; w < game.states(); ++w) {
      auto& r0 = rep[h.coarse[j].atom_of(w)];
      if (r0 == npos) {
        r0 = w;
      } else if (profile.at(j, r0) != profile.at(j, w)) {
        throw InvalidInput("transfer_diagnostic: strategy of player " + std::to_string(j + 1) +
                           " varies inside a coarse atom");
      }
    }
  }

  const auto& lvl = h.levels.at(player);
  const auto& prior = game.space.prior_of(player);
  const Partition& info = game.partitions[player];
  const std::size_t dim = lvl.signal_support.size();
  const std::size_t actions = game.payoffs.action_count(player);

  struct AtomData {
    CompensatedSum mass;
    std::vector<CompensatedSum> signal_mass;
    std::vector<std::vector<double>> f;  // per signal value: opponent-weighted action values
    std::vector<bool> seen;
    std::size_t rep = npos;
  };
  std::map<std::size_t, AtomData> atoms;
  for (std::size_t w = 0; w < game.states(); ++w) {
    if (!(prior[w] > 0.0)) continue;
    auto& d = atoms[info.atom_of(w)];
    if (d.rep == npos) {
      d.rep = w;
      d.signal_mass.resize(dim);
      d.f.assign(dim, std::vector<double>(actions, 0.0));
      d.seen.assign(dim, false);
    }
    const std::size_t z = lvl.signal_of[w];
    d.mass += prior[w];
    d.signal_mass[z] += prior[w];
    if (!d.seen[z]) {
      d.f[z] = state_action_values(game, profile, player, w);
      d.seen[z] = true;
    }
  }

  TransferDiagnostic out;
  for (auto& [atom, d] : atoms) {
    const double mass = d.mass.value();
    const GridPoint& belief = lvl.belief_at(d.rep);
    std::vector<CompensatedSum> exact(actions), approx(actions);
    for (std::size_t z = 0; z < dim; ++z) {
      if (belief.numerators[z] != 0 && !d.seen[z]) {
        throw std::logic_error("transfer_diagnostic: belief charges a signal value absent from the atom");
      }
      if (!d.seen[z]) continue;
      const double p = d.signal_mass[z].value() / mass;
      const double q = belief.coord(z);
      for (std::size_t a = 0; a < actions; ++a) {
        exact[a] += p * d.f[z][a];
        approx[a] += q * d.f[z][a];
      }
    }
    std::vector<double> e(actions), m(actions);
    for (std::size_t a = 0; a < actions; ++a) {
      e[a] = exact[a].value();
      m[a] = approx[a].value();
      out.max_gap = std::max(out.max_gap, std::abs(e[a] - m[a]));
    }
    out.exact.emplace(atom, std::move(e));
    out.approx.emplace(atom, std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force oracle. Shares only expected_payoff with the code under test.

inline constexpr double kBruteForceGuard = 1e6;

struct BruteForceResult {
  /// Per player: positive-mass information atom -> regret from pure deviations.
  std::vector<std::map<std::size_t, double>> atom_regret;
  std::vector<double> harsanyi;  // max over all pure deviation strategies
  double max_atom_regret = 0.0;
  double max_grid_regret = 0.0;  // max over mixed deviations on the grid
};

namespace detail {

inline StrategyProfile on_information_partitions(const NestedGame& game, const StrategyProfile& profile) {
  StrategyProfile p;
  p.level = FieldLevel::original;
  p.partitions = game.partitions;
  p.strategies.resize(game.players());
  for (std::size_t i = 0; i < game.players(); ++i) {
    const auto members = game.partitions[i].members();
    for (const auto& m : members) p.strategies[i].push_back(profile.at(i, m.front()));
  }
  return p;
}

inline void simplex_grid_points(std::size_t dim, std::size_t k, std::vector<std::size_t>& cur,
                                std::vector<std::vector<double>>& out) {
  if (cur.size() + 1 == dim) {
    std::size_t used = 0;
    for (auto c : cur) used += c;
    std::vector<double> q;
    for (auto c : cur) q.push_back(double(c) / double(k));
    q.push_back(double(k - used) / double(k));
    out.push_back(std::move(q));
    return;
  }
  std::size_t used = 0;
  for (auto c : cur) used += c;
  for (std::size_t c = 0; c + used <= k; ++c) {
    cur.push_back(c);
    simplex_grid_points(dim, k, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

/// Recomputes regrets by evaluating ex-ante payoffs of explicit deviations.
/// `grid_resolution` in (0, 1] adds mixed deviations on the simplex grid with
/// that spacing; 0 checks pure deviations only.
inline BruteForceResult brute_force_check(const NestedGame& game, const StrategyProfile& profile,
                                          double grid_resolution) {
  check_profile(game, profile);
  const std::size_t n = game.players();
  const std::size_t k = grid_resolution > 0.0 ? std::size_t(std::llround(1.0 / grid_resolution)) : 0;

  double work = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = double(game.payoffs.action_count(i));
    const double atoms = double(game.partitions[i].atom_count());
    work += std::pow(a, atoms);
    if (k > 0) work += atoms * grid_size(std::size_t(a), std::int64_t(k));
  }
  if (work > kBruteForceGuard) throw InvalidInput("brute_force_check: deviation space exceeds the size guard");

  const StrategyProfile base = detail::on_information_partitions(game, profile);
  const auto u0 = expected_payoff(game, base);
  BruteForceResult r;
  r.atom_regret.resize(n);
  r.harsanyi.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t actions = game.payoffs.action_count(i);
    const auto mass = atom_masses(game.partitions[i], game.space.prior_of(i));
    std::vector<std::vector<double>> grid;
    if (k > 0) {
      std::vector<std::size_t> cur;
      detail::simplex_grid_points(actions, k, cur, grid);
    }
    for (const auto& [atom, m] : mass) {
      StrategyProfile dev = base;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < actions; ++a) {
        dev.strategies[i][atom].assign(actions, 0.0);
        dev.strategies[i][atom][a] = 1.0;
        best = std::max(best, expected_payoff(game, dev)[i]);
      }
      const double regret = (best - u0[i]) / m;
      r.atom_regret[i][atom] = regret;
      r.max_atom_regret = std::max(r.max_atom_regret, regret);
      for (const auto& q : grid) {
        dev.strategies[i][atom] = q;
        r.max_grid_regret = std::max(r.max_grid_regret, (expected_payoff(game, dev)[i] - u0[i]) / m);
      }
    }

    // Every pure strategy of player i, odometer over her atoms.
    const std::size_t atoms = game.partitions[i].atom_count();
    std::vector<std::size_t> choice(atoms, 0);
    StrategyProfile dev = base;
    double best = -std::numeric_limits<double>::infinity();
    while (true) {
      for (std::size_t g = 0; g < atoms; ++g) {
        dev.strategies[i][g].assign(actions, 0.0);
        dev.strategies[i][g][choice[g]] = 1.0;
      }
      best = std::max(best, expected_payoff(game, dev)[i]);
      std::size_t g = 0;
      for (; g < atoms; ++g) {
        if (++choice[g] < actions) break;
        choice[g] = 0;
      }
      if (g == atoms) break;
    }
    r.harsanyi[i] = std::max(0.0, best - u0[i]);
  }
  return r;
}

}  // namespace nestedeq
