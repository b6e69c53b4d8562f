#pragma once

// Finite approximation of games whose actions live in boxes [0,1]^d.
//
// Actions are replaced by uniform grids, payoffs by their floor to a multiple
// of epsilon, and the constants needed to bound the approximation error are
// recorded alongside the finite game.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nestedeq/game.hpp"
#include "nestedeq/numeric.hpp"
#include "nestedeq/payoff.hpp"

namespace nestedeq {

struct Monomial {
  double coef = 0.0;
  std::vector<unsigned> exponents;  // one per action coordinate, players concatenated
};

using Polynomial = std::vector<Monomial>;

struct CompactActionSpec {
  std::vector<std::size_t> dims;                  // box dimension per player
  std::vector<std::vector<Polynomial>> payoffs;   // [state][player]
  std::optional<double> lipschitz;                // declared, w.r.t. the max metric
  std::optional<double> payoff_cap;               // per-state sup bounds above this may be truncated

  std::size_t players() const { return dims.size(); }
  std::size_t coordinates() const { return std::accumulate(dims.begin(), dims.end(), std::size_t{0}); }
};

inline double evaluate(const Polynomial& poly, std::span<const double> point) {
  CompensatedSum s;
  for (const auto& m : poly) {
    double t = m.coef;
    for (std::size_t k = 0; k < m.exponents.size(); ++k) {
      for (unsigned e = 0; e < m.exponents[k]; ++e) t *= point[k];
    }
    s += t;
  }
  return s.value();
}

/// Sum of |coefficients|: bounds |poly| on the unit box.
inline double coefficient_bound(const Polynomial& poly) {
  CompensatedSum s;
  for (const auto& m : poly) s += std::abs(m.coef);
  return s.value();
}

/// Bounds sum_k |d poly / d x_k| on the unit box, hence the Lipschitz
/// constant with respect to the max metric. Constants get 0.
inline double lipschitz_bound(const Polynomial& poly) {
  CompensatedSum s;
  for (const auto& m : poly) {
    unsigned degree = 0;
    for (unsigned e : m.exponents) degree += e;
    s += std::abs(m.coef) * double(degree);
  }
  return s.value();
}

inline void validate_spec(const CompactActionSpec& spec, std::size_t states) {
  if (spec.players() < 2) throw InvalidInput("continuous game needs at least two players");
  for (std::size_t i = 0; i < spec.players(); ++i) {
    if (spec.dims[i] == 0) throw InvalidInput("player " + std::to_string(i + 1) + " has an empty action box");
  }
  if (!spec.lipschitz) throw InvalidInput("continuous game needs a declared Lipschitz constant");
  if (!(*spec.lipschitz > 0.0) || !std::isfinite(*spec.lipschitz)) {
    throw InvalidInput("Lipschitz constant must be positive and finite");
  }
  if (spec.payoff_cap && !(*spec.payoff_cap > 0.0)) throw InvalidInput("payoff cap must be positive");
  if (spec.payoffs.size() != states) {
    throw InvalidInput("payoff polynomials given for " + std::to_string(spec.payoffs.size()) + " states, expected " +
                       std::to_string(states));
  }
  const std::size_t coords = spec.coordinates();
  for (std::size_t w = 0; w < states; ++w) {
    if (spec.payoffs[w].size() != spec.players()) {
      throw InvalidInput("state " + std::to_string(w) + " lacks a payoff polynomial for some player");
    }
    for (const auto& poly : spec.payoffs[w]) {
      for (const auto& m : poly) {
        if (!std::isfinite(m.coef)) throw InvalidInput("non-finite coefficient");
        if (m.exponents.size() != coords) {
          throw InvalidInput("monomial has " + std::to_string(m.exponents.size()) + " exponents, expected " +
                             std::to_string(coords));
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Action nets

/// Points per axis of the uniform net with spacing at most eta0.
inline std::size_t net_points_per_axis(double eta0) {
  if (!(eta0 > 0.0)) throw InvalidInput("net radius must be positive");
  const double k = std::ceil(1.0 / eta0);
  if (k > 1e7) throw InvalidInput("net radius too small");
  return std::size_t(k) + 1;
}

/// Max-metric covering radius of the uniform net with `per_axis` points.
inline double grid_cover_radius(std::size_t per_axis) { return 0.5 / double(per_axis - 1); }

/// Cartesian grid with `per_axis` evenly spaced points on every axis, in
/// lexicographic order (last coordinate fastest).
inline std::vector<std::vector<double>> uniform_grid(std::size_t d, std::size_t per_axis) {
  std::vector<double> axis(per_axis);
  for (std::size_t t = 0; t < per_axis; ++t) axis[t] = double(t) / double(per_axis - 1);
  axis.back() = 1.0;
  std::size_t count = 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (double(count) * double(per_axis) > 1e7) throw InvalidInput("action net too large");
    count *= per_axis;
  }
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<double> p(d);
    for (std::size_t k = 0; k < d; ++k) p[k] = axis[idx[k]];
    pts.push_back(std::move(p));
    for (std::size_t k = d; k-- > 0;) {
      if (++idx[k] < per_axis) break;
      idx[k] = 0;
    }
  }
  return pts;
}

/// eta0-dense subset of [0,1]^d under the max metric; contains 0 and 1 on each axis.
inline std::vector<std::vector<double>> eta_net(std::size_t d, double eta0) {
  return uniform_grid(d, net_points_per_axis(eta0));
}

// ---------------------------------------------------------------------------
// Payoff rounding

struct Rounded {
  std::int64_t multiple = 0;
  double value = 0.0;  // multiple * epsilon
};

/// Largest multiple of epsilon not above z, after clamping z to [-M, M].
inline Rounded g_round_multiple(double z, double epsilon, double M) {
  if (!(epsilon > 0.0)) throw InvalidInput("rounding scale must be positive");
  if (std::isnan(z)) throw InvalidInput("cannot round NaN");
  z = std::clamp(z, -M, M);
  // Residuals are taken in floating point, as a caller would compute them.
  // When z sits within rounding error of a multiple, no k may satisfy both
  // ends; nonnegativity wins and the residual comes out as exactly epsilon.
  auto residual = [&](std::int64_t k) { return z - double(k) * epsilon; };
  std::int64_t k = std::int64_t(std::floor(z / epsilon));
  while (residual(k) < 0.0) --k;
  while (residual(k) >= epsilon && residual(k + 1) >= 0.0) ++k;
  return {k, double(k) * epsilon};
}

inline double g_round(double z, double epsilon, double M) { return g_round_multiple(z, epsilon, M).value; }

// ---------------------------------------------------------------------------
// State truncation

struct Truncation {
  std::vector<bool> kept;         // states not dropped by the cap
  std::vector<bool> discretized;  // states carrying rounded payoffs; currently equal to kept
  double M = 1.0;
  double tail_integral = 0.0;  // sum over dropped states of mass * sup bound
  double dropped_mass = 0.0;
};

/// Keeps every state unless a cap is given; states whose sup bound exceeds the
/// cap are dropped in order of increasing mass while the tail integral stays
/// below epsilon / 2. M is the largest sup bound over the kept states (at least 1).
inline Truncation truncate_states(const std::vector<double>& sup_bounds, const std::vector<double>& mass,
                                  double epsilon, std::optional<double> cap = std::nullopt) {
  if (sup_bounds.size() != mass.size()) throw InvalidInput("truncate_states: size mismatch");
  if (!(epsilon > 0.0)) throw InvalidInput("truncate_states: epsilon must be positive");
  const std::size_t states = mass.size();
  Truncation t;
  t.kept.assign(states, true);
  if (cap) {
    std::vector<std::size_t> over;
    for (std::size_t w = 0; w < states; ++w) {
      if (sup_bounds[w] > *cap) over.push_back(w);
    }
    std::stable_sort(over.begin(), over.end(), [&](std::size_t a, std::size_t b) { return mass[a] < mass[b]; });
    CompensatedSum tail, dropped;
    for (std::size_t w : over) {
      const double next = tail.value() + mass[w] * sup_bounds[w];
      if (!(next < epsilon / 2.0) || !(dropped.value() + mass[w] < epsilon / 2.0)) break;
      tail += mass[w] * sup_bounds[w];
      dropped += mass[w];
      t.kept[w] = false;
    }
    t.tail_integral = tail.value();
    t.dropped_mass = dropped.value();
  }
  t.discretized = t.kept;
  t.M = 1.0;
  for (std::size_t w = 0; w < states; ++w) {
    if (t.kept[w]) t.M = std::max(t.M, sup_bounds[w]);
  }
  return t;
}

// ---------------------------------------------------------------------------
// The finite game

struct DiscretizedGame {
  NestedGame hat_game;
  double epsilon = 0.0;
  double lipschitz = 0.0;
  double eta0 = 0.0;
  std::size_t per_axis = 0;
  double cover_radius = 0.0;
  double M = 1.0;
  std::vector<std::vector<std::vector<double>>> nets;  // [player][point][coordinate]
  Truncation truncation;
  std::vector<double> sup_bounds;                     // per state, over players
  std::vector<std::vector<double>> lipschitz_bounds;  // [state][player], coefficient based
  std::vector<std::int64_t> multiples;                // aligned with hat_game.payoffs.raw()
};

namespace detail {

inline std::string format_coordinate(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string point_label(const std::vector<double>& p) {
  if (p.size() == 1) return format_coordinate(p[0]);
  std::string s = "(";
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k) s += ",";
    s += format_coordinate(p[k]);
  }
  return s + ")";
}

// Concatenated coordinates of one action point per player.
inline std::vector<double> joint_point(const std::vector<const std::vector<double>*>& pts) {
  std::vector<double> out;
  for (const auto* p : pts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

inline double state_mass(const StateSpace& space, std::size_t w) {
  double m = space.prior[w];
  for (const auto& p : space.player_priors) m = std::max(m, p[w]);
  return m;
}

}  // namespace detail

/// `skeleton` supplies states, priors and partitions; its payoffs are ignored.
inline DiscretizedGame build_hat_game(const CompactActionSpec& spec, const NestedGame& skeleton, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  const std::size_t states = skeleton.states();
  const std::size_t n = spec.players();
  validate_spec(spec, states);
  if (skeleton.players() != n) throw InvalidInput("partitions and action boxes disagree on the player count");

  DiscretizedGame out;
  out.epsilon = epsilon;
  out.lipschitz = *spec.lipschitz;
  out.eta0 = epsilon / out.lipschitz;
  out.per_axis = net_points_per_axis(out.eta0);
  out.cover_radius = grid_cover_radius(out.per_axis);

  std::vector<std::vector<std::string>> labels(n);
  double profiles = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.nets.push_back(uniform_grid(spec.dims[i], out.per_axis));
    for (const auto& p : out.nets[i]) labels[i].push_back(detail::point_label(p));
    profiles *= double(out.nets[i].size());
  }
  if (profiles * double(states) * double(n) > 5e7) {
    throw InvalidInput("discretized game too large: " + detail::fmt_double(profiles) + " action profiles per state");
  }

  out.sup_bounds.assign(states, 0.0);
  out.lipschitz_bounds.assign(states, std::vector<double>(n, 0.0));
  std::vector<double> mass(states);
  for (std::size_t w = 0; w < states; ++w) {
    for (std::size_t i = 0; i < n; ++i) {
      out.sup_bounds[w] = std::max(out.sup_bounds[w], coefficient_bound(spec.payoffs[w][i]));
      out.lipschitz_bounds[w][i] = lipschitz_bound(spec.payoffs[w][i]);
    }
    mass[w] = detail::state_mass(skeleton.space, w);
  }
  out.truncation = truncate_states(out.sup_bounds, mass, epsilon, spec.payoff_cap);
  out.M = out.truncation.M;

  out.hat_game.space = skeleton.space;
  out.hat_game.partitions = skeleton.partitions;
  out.hat_game.payoffs = PayoffTensor(labels, states);
  PayoffTensor& t = out.hat_game.payoffs;
  out.multiples.assign(t.raw().size(), 0);
  const std::size_t width = t.profile_count() * n;
  std::vector<const std::vector<double>*> pts(n);
  for (std::size_t w = 0; w < states; ++w) {
    if (!out.truncation.discretized[w]) continue;
    detail::for_each_profile(t, [&](std::size_t p, const std::vector<std::size_t>& joint) {
      for (std::size_t j = 0; j < n; ++j) pts[j] = &out.nets[j][joint[j]];
      const auto point = detail::joint_point(pts);
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = g_round_multiple(evaluate(spec.payoffs[w][i], point), epsilon, out.M);
        t.at(w, p, i) = r.value;
        out.multiples[w * width + p * n + i] = r.multiple;
      }
    });
  }
  return out;
}

/// Checks the declared Lipschitz constant against the coefficient bound, and
/// where that bound is not conclusive, against the gradient norm sampled on a
/// grid. Returns a description of the first violation found.
inline std::optional<std::string> lipschitz_violation(const CompactActionSpec& spec, std::size_t per_axis = 21) {
  const double L = *spec.lipschitz;
  const std::size_t coords = spec.coordinates();
  if (double(coords) > std::log(1e6) / std::log(double(per_axis))) per_axis = 3;
  const auto probe = uniform_grid(coords, per_axis);
  for (std::size_t w = 0; w < spec.payoffs.size(); ++w) {
    for (std::size_t i = 0; i < spec.players(); ++i) {
      const Polynomial& poly = spec.payoffs[w][i];
      if (lipschitz_bound(poly) <= L) continue;
      for (const auto& x : probe) {
        CompensatedSum norm;
        for (std::size_t k = 0; k < coords; ++k) {
          Polynomial d;
          for (const auto& m : poly) {
            if (m.exponents[k] == 0) continue;
            Monomial dm = m;
            dm.coef *= double(m.exponents[k]);
            --dm.exponents[k];
            d.push_back(std::move(dm));
          }
          norm += std::abs(evaluate(d, x));
        }
        if (norm.value() > L * (1.0 + 1e-12)) {
          return "payoff of player " + std::to_string(i + 1) + " in state " + std::to_string(w) +
                 " has gradient norm " + detail::fmt_double(norm.value()) + " > declared Lipschitz constant " +
                 detail::fmt_double(L);
        }
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Certificate terms

struct SupGapTerms {
  double rounding = 0.0;      // E over kept states of max over the net of R - R_hat
  double net = 0.0;           // E over kept states of the modulus times the covering radius
  double tail_between = 0.0;  // states in the first cut but not the second (empty here)
  double tail_outside = 0.0;  // dropped states: E of sup |R|
  double total() const { return rounding + net + tail_between + tail_outside; }
};

/// Per-player upper bounds on E[sup_a |R_i(a) - R_hat_i(nearest net point of a)|].
inline std::vector<SupGapTerms> certify_sup_gap(const CompactActionSpec& spec, const DiscretizedGame& hat) {
  const NestedGame& g = hat.hat_game;
  const std::size_t n = g.players();
  const double eps = hat.epsilon;
  std::vector<SupGapTerms> out(n);
  std::vector<const std::vector<double>*> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& prior = g.space.prior_of(i);
    CompensatedSum rounding, net, between, outside;
    for (std::size_t w = 0; w < g.states(); ++w) {
      if (!(prior[w] > 0.0)) continue;
      if (!hat.truncation.kept[w]) {
        outside += prior[w] * coefficient_bound(spec.payoffs[w][i]);
        continue;
      }
      if (!hat.truncation.discretized[w]) {
        between += prior[w] * coefficient_bound(spec.payoffs[w][i]);
        continue;
      }
      double worst = 0.0;
      detail::for_each_profile(g.payoffs, [&](std::size_t p, const std::vector<std::size_t>& joint) {
        for (std::size_t j = 0; j < n; ++j) pts[j] = &hat.nets[j][joint[j]];
        const double exact = evaluate(spec.payoffs[w][i], detail::joint_point(pts));
        worst = std::max(worst, std::abs(exact - g.payoffs.at(w, p, i)));
      });
      rounding += prior[w] * worst;
      net += prior[w] * std::min(hat.lipschitz, hat.lipschitz_bounds[w][i]) * hat.cover_radius;
    }
    out[i] = {rounding.value(), net.value(), between.value(), outside.value()};
    const auto& t = out[i];
    if (!(t.rounding <= eps) || !(t.net <= eps) || !(t.tail_between <= eps / 2) || !(t.tail_outside <= eps / 2) ||
        !(t.total() <= 3.0 * eps)) {
      throw std::logic_error("sup-gap certificate out of range for player " + std::to_string(i + 1) +
                             ": total " + detail::fmt_double(t.total()));
    }
  }
  return out;
}

struct ProbeAudit {
  std::size_t per_axis = 0;   // probe points per axis
  double probe_radius = 0.0;  // max-metric covering radius of the probe grid
  std::vector<double> harsanyi;  // per player
  double max_regret = 0.0;
  double bound = 0.0;  // 5 epsilon + L eta0 / 2
  bool pass = false;
};

/// Harsanyi regret of a hat-game profile in the original game, against
/// deviations to points of a probe grid that contains the action net. Every
/// state contributes with its exact payoff, including truncated ones.
inline ProbeAudit probe_harsanyi_regret(const CompactActionSpec& spec, const DiscretizedGame& hat,
                                        const StrategyProfile& profile) {
  const NestedGame& g = hat.hat_game;
  check_profile(g, profile);
  const std::size_t n = g.players();
  ProbeAudit audit;
  audit.per_axis = 2 * (hat.per_axis - 1) + 1;
  audit.probe_radius = grid_cover_radius(audit.per_axis);
  audit.bound = 5.0 * hat.epsilon + hat.lipschitz * hat.eta0 / 2.0;
  audit.harsanyi.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const auto probe = uniform_grid(spec.dims[i], audit.per_axis);
    const auto& prior = g.space.prior_of(i);
    const Partition& info = g.partitions[i];
    std::vector<CompensatedSum> current(info.atom_count());
    std::vector<std::vector<CompensatedSum>> deviation(info.atom_count(), std::vector<CompensatedSum>(probe.size()));
    std::vector<bool> seen(info.atom_count(), false);
    std::vector<const std::vector<double>*> pts(n);
    for (std::size_t w = 0; w < g.states(); ++w) {
      if (!(prior[w] > 0.0)) continue;
      const std::size_t atom = info.atom_of(w);
      seen[atom] = true;
      detail::for_each_profile(g.payoffs, [&](std::size_t, const std::vector<std::size_t>& joint) {
        double others = prior[w];
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i) others *= profile.at(j, w)[joint[j]];
        }
        if (others == 0.0) return;
        for (std::size_t j = 0; j < n; ++j) pts[j] = &hat.nets[j][joint[j]];
        const double own = profile.at(i, w)[joint[i]];
        if (own != 0.0) current[atom] += own * others * evaluate(spec.payoffs[w][i], detail::joint_point(pts));
        // Deviations replace the own action; count each opponent profile once.
        if (joint[i] != 0) return;
        for (std::size_t b = 0; b < probe.size(); ++b) {
          pts[i] = &probe[b];
          deviation[atom][b] += others * evaluate(spec.payoffs[w][i], detail::joint_point(pts));
        }
      });
    }
    CompensatedSum total;
    for (std::size_t a = 0; a < info.atom_count(); ++a) {
      if (!seen[a]) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& d : deviation[a]) best = std::max(best, d.value());
      total += std::max(0.0, best - current[a].value());
    }
    audit.harsanyi[i] = total.value();
    audit.max_regret = std::max(audit.max_regret, audit.harsanyi[i]);
  }
  audit.pass = audit.max_regret <= audit.bound;
  return audit;
}

}  // namespace nestedeq
