#pragma once

// Approximate Nash equilibria of agent-form games.
//
// Three methods are tried in order: an exact linear program when the game is
// two-player constant-sum under a common prior, pure best-response dynamics,
// and logit continuation (quantal responses traced from high to low
// temperature with a Newton corrector), restarted with random base measures.
// Whatever comes out, the reported regret is the verifier's exact value.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nestedeq/aux_game.hpp"
#include "nestedeq/lp.hpp"
#include "nestedeq/verifier.hpp"

namespace nestedeq {

struct SolverConfig {
  double target_regret = 1e-6;
  std::size_t max_restarts = 8;
  std::size_t max_iterations = 400;  // continuation steps per restart
  std::uint64_t seed = 0;
};

enum class SolveMethod { trivial, linear_program, pure_best_response, logit_continuation };

inline std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::trivial: return "trivial";
    case SolveMethod::linear_program: return "linear-program";
    case SolveMethod::pure_best_response: return "pure-best-response";
    case SolveMethod::logit_continuation: return "logit-continuation";
  }
  return "unknown";
}

struct SolveResult {
  AgentProfile agents;
  StrategyProfile profile;  // on the coarse atoms
  double certified_regret = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  bool converged = false;
  SolveMethod method = SolveMethod::trivial;
};

/// Exact max per-atom Bayesian regret of the agent profile in the auxiliary game.
inline double certified_regret(const AgentFormGame& ag, const AgentProfile& x) {
  const auto report = certify(ag.game, ag.to_profile(x), 0.0);
  return std::max(0.0, report.max_bayesian());
}

namespace detail {

inline AgentProfile pure_profile(const AgentFormGame& ag, const std::vector<std::size_t>& choice) {
  AgentProfile x;
  for (std::size_t k = 0; k < ag.agents.size(); ++k) {
    Distribution d(ag.action_count(k), 0.0);
    d[choice[k]] = 1.0;
    x.push_back(std::move(d));
  }
  return x;
}

// Constant-sum under a common prior: R_1 + R_2 depends on the state only.
inline bool is_constant_sum(const NestedGame& g) {
  if (g.players() != 2) return false;
  if (g.space.has_player_priors() && g.space.player_priors[0] != g.space.player_priors[1]) return false;
  const double tol = 1e-12 * payoff_bound(g);
  for (std::size_t w = 0; w < g.states(); ++w) {
    const double c = g.payoffs.at(w, 0, 0) + g.payoffs.at(w, 0, 1);
    for (std::size_t p = 1; p < g.payoffs.profile_count(); ++p) {
      if (std::abs(g.payoffs.at(w, p, 0) + g.payoffs.at(w, p, 1) - c) > tol) return false;
    }
  }
  return true;
}

inline Distribution clean_distribution(std::span<const double> raw) {
  Distribution d(raw.size());
  double total = 0.0;
  for (std::size_t a = 0; a < raw.size(); ++a) {
    d[a] = std::max(0.0, raw[a]);
    total += d[a];
  }
  if (!(total > 0.0)) {
    std::fill(d.begin(), d.end(), 0.0);
    d[0] = 1.0;
    return d;
  }
  for (double& v : d) v /= total;
  return d;
}

// Both players' optimal strategies from the two primal LPs. The expected
// payoff of player 1 is sum over agent pairs (g, h) of x_g' B_gh y_h.
inline std::optional<AgentProfile> solve_constant_sum(const AgentFormGame& ag) {
  const NestedGame& g = ag.game;
  const auto& prior = g.space.prior_of(0);
  const std::size_t m1 = g.payoffs.action_count(0), m2 = g.payoffs.action_count(1);
  std::vector<std::size_t> rows, cols;  // agents of player 1 and player 2
  std::vector<std::size_t> local(ag.agents.size(), npos);
  for (std::size_t k = 0; k < ag.agents.size(); ++k) {
    auto& list = ag.agents[k].player == 0 ? rows : cols;
    local[k] = list.size();
    list.push_back(k);
  }
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> blocks;  // [a * m2 + c]
  for (std::size_t w = 0; w < g.states(); ++w) {
    if (!(prior[w] > 0.0)) continue;
    const std::size_t kr = ag.state_agents[w][0], kc = ag.state_agents[w][1];
    if (kr == npos || kc == npos) return std::nullopt;
    auto& b = blocks[{local[kr], local[kc]}];
    b.resize(m1 * m2, 0.0);
    for (std::size_t a = 0; a < m1; ++a) {
      for (std::size_t c = 0; c < m2; ++c) {
        const std::size_t joint[2] = {a, c};
        b[a * m2 + c] += prior[w] * g.payoffs.at(w, g.payoffs.profile_index(joint), 0);
      }
    }
  }
  const double bound = payoff_bound(g);

  // Column player: min sum_g t_g, t_g >= (sum_h B_gh y_h)_a, with t_g = tau_g - C_g.
  std::vector<double> y_flat;
  {
    const std::size_t nv = cols.size() * m2 + rows.size();
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double cap = ag.agents[rows[r]].mass * bound;
      for (std::size_t a = 0; a < m1; ++a) {
        std::vector<double> row(nv, 0.0);
        for (const auto& [key, blk] : blocks) {
          if (key.first != r) continue;
          for (std::size_t c = 0; c < m2; ++c) row[key.second * m2 + c] += blk[a * m2 + c];
        }
        row[cols.size() * m2 + r] = -1.0;
        A.push_back(std::move(row));
        b.push_back(-cap);
      }
    }
    for (std::size_t h = 0; h < cols.size(); ++h) {
      std::vector<double> row(nv, 0.0);
      for (std::size_t c = 0; c < m2; ++c) row[h * m2 + c] = 1.0;
      A.push_back(row);
      b.push_back(1.0);
      for (double& v : row) v = -v;
      A.push_back(std::move(row));
      b.push_back(-1.0);
    }
    std::vector<double> obj(nv, 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) obj[cols.size() * m2 + r] = -1.0;
    const auto res = lp::maximize(A, b, obj);
    if (res.status != lp::Status::optimal) return std::nullopt;
    y_flat = res.x;
  }

  // Row player: max sum_h s_h, s_h <= (sum_g x_g' B_gh)_c, with s_h = sigma_h - C_h.
  std::vector<double> x_flat;
  {
    const std::size_t nv = rows.size() * m1 + cols.size();
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for (std::size_t h = 0; h < cols.size(); ++h) {
      const double cap = ag.agents[cols[h]].mass * bound;
      for (std::size_t c = 0; c < m2; ++c) {
        std::vector<double> row(nv, 0.0);
        for (const auto& [key, blk] : blocks) {
          if (key.second != h) continue;
          for (std::size_t a = 0; a < m1; ++a) row[key.first * m1 + a] -= blk[a * m2 + c];
        }
        row[rows.size() * m1 + h] = 1.0;
        A.push_back(std::move(row));
        b.push_back(cap);
      }
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::vector<double> row(nv, 0.0);
      for (std::size_t a = 0; a < m1; ++a) row[r * m1 + a] = 1.0;
      A.push_back(row);
      b.push_back(1.0);
      for (double& v : row) v = -v;
      A.push_back(std::move(row));
      b.push_back(-1.0);
    }
    std::vector<double> obj(nv, 0.0);
    for (std::size_t h = 0; h < cols.size(); ++h) obj[rows.size() * m1 + h] = 1.0;
    const auto res = lp::maximize(A, b, obj);
    if (res.status != lp::Status::optimal) return std::nullopt;
    x_flat = res.x;
  }

  AgentProfile x(ag.agents.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    x[rows[r]] = clean_distribution(std::span<const double>(x_flat).subspan(r * m1, m1));
  }
  for (std::size_t h = 0; h < cols.size(); ++h) {
    x[cols[h]] = clean_distribution(std::span<const double>(y_flat).subspan(h * m2, m2));
  }
  return x;
}

// Sequential best-response sweeps over pure profiles; an agent only moves on
// a strict improvement, to the lowest-index best action.
inline AgentProfile pure_dynamics(const AgentFormGame& ag, std::vector<std::size_t> choice, std::size_t max_sweeps,
                                  std::size_t& sweeps) {
  const double scale = payoff_bound(ag.game);
  AgentProfile x = pure_profile(ag, choice);
  for (std::size_t s = 0; s < max_sweeps; ++s) {
    ++sweeps;
    bool moved = false;
    for (std::size_t k = 0; k < ag.agents.size(); ++k) {
      const auto v = ag.action_values(k, x);
      const std::size_t best = std::size_t(std::max_element(v.begin(), v.end()) - v.begin());
      if (v[best] > v[choice[k]] + 1e-12 * scale * ag.agents[k].mass) {
        x[k][choice[k]] = 0.0;
        x[k][best] = 1.0;
        choice[k] = best;
        moved = true;
      }
    }
    if (!moved) break;
  }
  return x;
}

// Logit path in log-odds coordinates. Agent k with actions 0..m-1 has
// unknowns y_{k,b} = log x_k(b) - log x_k(0) for b >= 1, and the quantal
// response condition with base measure pi at temperature tau reads
//   tau * (y_{k,b} - log(pi_b / pi_0)) = u_k(b) - u_k(0),
// where u_k are the conditional action values of the agent.
class LogitPath {
 public:
  LogitPath(const AgentFormGame& ag, std::vector<Distribution> base) : ag_(ag), base_(std::move(base)) {
    std::size_t ox = 0, oy = 0;
    for (std::size_t k = 0; k < ag.agents.size(); ++k) {
      xoff_.push_back(ox);
      yoff_.push_back(oy);
      ox += ag.action_count(k);
      oy += ag.action_count(k) - 1;
    }
    nx_ = ox;
    ny_ = oy;
    log_ratio_ = Eigen::VectorXd::Zero(Eigen::Index(ny_));
    for (std::size_t k = 0; k < ag.agents.size(); ++k) {
      for (std::size_t b = 1; b < ag.action_count(k); ++b) {
        log_ratio_[Eigen::Index(yoff_[k] + b - 1)] = std::log(base_[k][b]) - std::log(base_[k][0]);
      }
    }
  }

  std::size_t unknowns() const { return ny_; }
  const Eigen::VectorXd& log_ratio() const { return log_ratio_; }

  AgentProfile profile(const Eigen::VectorXd& y) const {
    AgentProfile x;
    for (std::size_t k = 0; k < ag_.agents.size(); ++k) {
      const std::size_t m = ag_.action_count(k);
      std::vector<double> z(m, 0.0);
      for (std::size_t b = 1; b < m; ++b) z[b] = y[Eigen::Index(yoff_[k] + b - 1)];
      const double top = *std::max_element(z.begin(), z.end());
      double total = 0.0;
      for (double& v : z) {
        v = std::exp(v - top);
        total += v;
      }
      for (double& v : z) v /= total;
      x.push_back(std::move(z));
    }
    return x;
  }

  // Conditional action values of every agent and their derivatives with
  // respect to the other agents' probabilities.
  void values(const AgentProfile& x, Eigen::VectorXd& u, Eigen::MatrixXd* du) const {
    const NestedGame& g = ag_.game;
    const std::size_t n = g.players();
    u = Eigen::VectorXd::Zero(Eigen::Index(nx_));
    if (du) *du = Eigen::MatrixXd::Zero(Eigen::Index(nx_), Eigen::Index(nx_));
    std::vector<std::size_t> owner(n);
    std::vector<const Distribution*> d(n);
    std::vector<Distribution> fixed(n);
    for (std::size_t j = 0; j < n; ++j) {
      fixed[j].assign(g.payoffs.action_count(j), 0.0);
      fixed[j][0] = 1.0;
    }
    for (std::size_t k = 0; k < ag_.agents.size(); ++k) {
      const Agent& agent = ag_.agents[k];
      const std::size_t i = agent.player;
      const auto& prior = g.space.prior_of(i);
      for (std::size_t w : agent.states) {
        const double weight = prior[w] / agent.mass;
        for (std::size_t j = 0; j < n; ++j) {
          owner[j] = ag_.state_agents[w][j];
          d[j] = owner[j] == npos ? &fixed[j] : &x[owner[j]];
        }
        for_each_profile(g.payoffs, [&](std::size_t p, const std::vector<std::size_t>& joint) {
          const double r = g.payoffs.at(w, p, i) * weight;
          if (r == 0.0) return;
          double prod = 1.0;
          for (std::size_t j = 0; j < n; ++j) {
            if (j != i) prod *= (*d[j])[joint[j]];
          }
          const Eigen::Index row = Eigen::Index(xoff_[k] + joint[i]);
          u[row] += r * prod;
          if (!du) return;
          for (std::size_t j = 0; j < n; ++j) {
            if (j == i || owner[j] == npos) continue;
            double rest = 1.0;
            for (std::size_t m = 0; m < n; ++m) {
              if (m != i && m != j) rest *= (*d[m])[joint[m]];
            }
            (*du)(row, Eigen::Index(xoff_[owner[j]] + joint[j])) += r * rest;
          }
        });
      }
    }
  }

  double max_regret(const AgentProfile& x, const Eigen::VectorXd& u) const {
    double worst = 0.0;
    for (std::size_t k = 0; k < ag_.agents.size(); ++k) {
      double best = -std::numeric_limits<double>::infinity(), played = 0.0;
      for (std::size_t a = 0; a < x[k].size(); ++a) {
        const double v = u[Eigen::Index(xoff_[k] + a)];
        best = std::max(best, v);
        played += x[k][a] * v;
      }
      worst = std::max(worst, best - played);
    }
    return worst;
  }

  // u_k(b) - u_k(0) stacked over the unknowns.
  Eigen::VectorXd advantages(const Eigen::VectorXd& u) const {
    Eigen::VectorXd adv = Eigen::VectorXd::Zero(Eigen::Index(ny_));
    for (std::size_t k = 0; k < ag_.agents.size(); ++k) {
      for (std::size_t b = 1; b < ag_.action_count(k); ++b) {
        adv[Eigen::Index(yoff_[k] + b - 1)] = u[Eigen::Index(xoff_[k] + b)] - u[Eigen::Index(xoff_[k])];
      }
    }
    return adv;
  }

  // Newton iterations on the quantal response equations at temperature tau.
  bool correct(Eigen::VectorXd& y, double tau, double tol, std::size_t& evaluations) const {
    Eigen::VectorXd u;
    Eigen::MatrixXd du;
    for (int it = 0; it < 40; ++it) {
      const AgentProfile x = profile(y);
      values(x, u, &du);
      ++evaluations;
      const Eigen::VectorXd h = tau * (y - log_ratio_) - advantages(u);
      if (!h.allFinite()) return false;
      if (h.lpNorm<Eigen::Infinity>() <= tol) return true;

      // d x_l(c) / d y_{l,e} = x_l(c) (1[c = e] - x_l(e))
      Eigen::MatrixXd dxdy = Eigen::MatrixXd::Zero(Eigen::Index(nx_), Eigen::Index(ny_));
      for (std::size_t l = 0; l < ag_.agents.size(); ++l) {
        const std::size_t m = ag_.action_count(l);
        for (std::size_t c = 0; c < m; ++c) {
          for (std::size_t e = 1; e < m; ++e) {
            dxdy(Eigen::Index(xoff_[l] + c), Eigen::Index(yoff_[l] + e - 1)) =
                x[l][c] * ((c == e ? 1.0 : 0.0) - x[l][e]);
          }
        }
      }
      const Eigen::MatrixXd dudy = du * dxdy;
      Eigen::MatrixXd jac = tau * Eigen::MatrixXd::Identity(Eigen::Index(ny_), Eigen::Index(ny_));
      for (std::size_t k = 0; k < ag_.agents.size(); ++k) {
        const Eigen::Index base = Eigen::Index(xoff_[k]);
        for (std::size_t b = 1; b < ag_.action_count(k); ++b) {
          jac.row(Eigen::Index(yoff_[k] + b - 1)) -= dudy.row(base + Eigen::Index(b)) - dudy.row(base);
        }
      }
      Eigen::VectorXd step = jac.partialPivLu().solve(-h);
      if (!step.allFinite()) return false;
      const double big = step.lpNorm<Eigen::Infinity>();
      if (big > 4.0) step *= 4.0 / big;
      if (big < 1e-13) return h.lpNorm<Eigen::Infinity>() <= 1e3 * tol;
      y += step;
    }
    return false;
  }

 private:
  const AgentFormGame& ag_;
  std::vector<Distribution> base_;
  std::vector<std::size_t> xoff_, yoff_;
  std::size_t nx_ = 0, ny_ = 0;
  Eigen::VectorXd log_ratio_;
};

struct Candidate {
  AgentProfile x;
  double regret = std::numeric_limits<double>::infinity();
};

// One continuation run. Returns the last accepted point whose estimated
// regret met the target, or the best point seen.
inline Candidate follow_logit(const AgentFormGame& ag, const std::vector<Distribution>& base, const SolverConfig& cfg,
                              std::size_t& steps) {
  LogitPath path(ag, base);
  const double scale = payoff_bound(ag.game);
  double log_inv_min = 0.0;
  for (const auto& d : base) {
    for (double p : d) log_inv_min = std::max(log_inv_min, -std::log(p));
  }
  const double tol = 1e-12 * scale;

  Candidate best;
  double tau = 100.0 * scale;
  Eigen::VectorXd y = path.log_ratio();
  std::size_t evaluations = 0;
  if (!path.correct(y, tau, tol, evaluations)) return best;
  Eigen::VectorXd z = tau * (y - path.log_ratio());
  Eigen::VectorXd z_prev = z;
  double tau_prev = tau;
  double ratio = 0.5;

  auto consider = [&](const Eigen::VectorXd& point) {
    const AgentProfile x = path.profile(point);
    Eigen::VectorXd u;
    path.values(x, u, nullptr);
    const double r = path.max_regret(x, u);
    if (r < best.regret) {
      best.regret = r;
      best.x = x;
    }
    return r;
  };
  consider(y);

  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    ++steps;
    const double next = tau * ratio;
    // Advantages vary smoothly along the path; extrapolate them linearly.
    Eigen::VectorXd z_pred = z;
    if (tau_prev != tau) z_pred += (z - z_prev) * ((next - tau) / (tau - tau_prev));
    Eigen::VectorXd trial = path.log_ratio() + z_pred / next;
    std::size_t before = evaluations;
    if (!path.correct(trial, next, tol, evaluations)) {
      ratio = std::sqrt(ratio);
      if (ratio > 0.995) break;
      continue;
    }
    z_prev = z;
    tau_prev = tau;
    tau = next;
    y = trial;
    z = tau * (y - path.log_ratio());
    const double r = consider(y);
    if (r <= 0.5 * cfg.target_regret) break;
    if (evaluations - before <= 4) ratio = std::max(0.2, ratio * ratio);
    // Once the entropy bound guarantees the target the path has done its job.
    if (tau * log_inv_min < 0.01 * cfg.target_regret) break;
  }
  return best;
}

}  // namespace detail

inline SolveResult solve_nash(const AgentFormGame& ag, const SolverConfig& cfg) {
  if (!(cfg.target_regret > 0.0)) throw InvalidInput("solver target regret must be positive");
  SolveResult out;
  auto finish = [&](const AgentProfile& x, double regret, SolveMethod method) {
    out.agents = x;
    out.profile = ag.to_profile(x);
    out.certified_regret = regret;
    out.method = method;
    out.converged = regret <= cfg.target_regret;
    return out;
  };

  if (ag.agents.empty()) return finish({}, certified_regret(ag, {}), SolveMethod::trivial);

  // Best certified candidate so far; ties keep the earlier one.
  AgentProfile best_x;
  double best_regret = std::numeric_limits<double>::infinity();
  SolveMethod best_method = SolveMethod::trivial;
  auto consider = [&](const AgentProfile& x, SolveMethod method) {
    const double r = certified_regret(ag, x);
    if (r < best_regret) {
      best_regret = r;
      best_x = x;
      best_method = method;
    }
    return r <= cfg.target_regret;
  };

  if (detail::is_constant_sum(ag.game)) {
    if (auto x = detail::solve_constant_sum(ag); x && consider(*x, SolveMethod::linear_program)) {
      return finish(best_x, best_regret, best_method);
    }
  }

  std::mt19937_64 rng(cfg.seed);
  std::size_t sweeps = 0;
  for (std::size_t start = 0; start <= cfg.max_restarts; ++start) {
    std::vector<std::size_t> choice(ag.agents.size(), 0);
    if (start > 0) {
      for (std::size_t k = 0; k < choice.size(); ++k) {
        choice[k] = std::uniform_int_distribution<std::size_t>(0, ag.action_count(k) - 1)(rng);
      }
    }
    const auto x = detail::pure_dynamics(ag, choice, 50, sweeps);
    if (consider(x, SolveMethod::pure_best_response)) {
      out.iterations = sweeps;
      return finish(best_x, best_regret, best_method);
    }
  }

  std::size_t steps = 0;
  for (std::size_t restart = 0; restart <= cfg.max_restarts; ++restart) {
    out.restarts = restart;
    std::vector<Distribution> base;
    for (std::size_t k = 0; k < ag.agents.size(); ++k) {
      const std::size_t m = ag.action_count(k);
      Distribution d(m, 1.0 / double(m));
      if (restart > 0) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> e(m);
        double total = 0.0;
        for (double& v : e) {
          v = -std::log(1.0 - unit(rng));
          total += v;
        }
        for (std::size_t a = 0; a < m; ++a) d[a] = 0.5 * d[a] + 0.5 * e[a] / total;
      }
      base.push_back(std::move(d));
    }
    const auto cand = detail::follow_logit(ag, base, cfg, steps);
    if (!cand.x.empty() && consider(cand.x, SolveMethod::logit_continuation)) break;
  }
  out.iterations = sweeps + steps;
  if (best_x.empty()) best_x = ag.uniform();
  if (!std::isfinite(best_regret)) best_regret = certified_regret(ag, best_x);
  return finish(best_x, best_regret, best_method);
}

}  // namespace nestedeq
