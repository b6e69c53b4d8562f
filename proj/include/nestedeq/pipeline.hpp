#pragma once

// End-to-end runs: hierarchy, auxiliary game, solve, lift, verify.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nestedeq/aux_game.hpp"
#include "nestedeq/discretize.hpp"
#include "nestedeq/game.hpp"
#include "nestedeq/hierarchy.hpp"
#include "nestedeq/nash.hpp"
#include "nestedeq/verifier.hpp"

namespace nestedeq {

struct RunConfig {
  double epsilon = 0.05;
  std::optional<double> delta;          // default epsilon / (2 M |A|)
  std::optional<double> solver_target;  // default epsilon / 2
  std::uint64_t seed = 0;
  std::size_t max_restarts = 8;
  std::size_t max_iterations = 400;
};

struct FiniteRun {
  double epsilon = 0.0;
  double delta = 0.0;
  double solver_target = 0.0;
  double M = 1.0;
  std::size_t action_profiles = 0;
  Hierarchy hierarchy;
  PropertyReport properties;
  AgentFormGame agent_game;
  SolveResult solve;
  StrategyProfile lifted;
  RegretReport report;
  double transfer_bound = 0.0;  // delta M |A| + certified regret in the auxiliary game
  bool transfer_holds = false;
  bool certified = false;
};

inline double default_delta(const NestedGame& game, double epsilon) {
  return epsilon / (2.0 * payoff_bound(game) * double(joint_action_count(game)));
}

inline FiniteRun run_finite(const NestedGame& game, const RunConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) throw InvalidInput("epsilon must be positive");
  require_valid(game);
  FiniteRun run;
  run.epsilon = cfg.epsilon;
  run.M = payoff_bound(game);
  run.action_profiles = joint_action_count(game);
  run.delta = cfg.delta.value_or(default_delta(game, cfg.epsilon));
  run.solver_target = cfg.solver_target.value_or(cfg.epsilon / 2.0);
  if (!(run.delta > 0.0) || !std::isfinite(run.delta)) throw InvalidInput("delta must be positive");
  if (!(run.solver_target > 0.0) || !std::isfinite(run.solver_target)) {
    throw InvalidInput("solver target regret must be positive");
  }

  run.hierarchy = build_hierarchy(game, run.delta);
  run.properties = check_properties(game, run.hierarchy);
  if (!run.properties.ok()) {
    const auto f = run.properties.failures().front();
    throw std::logic_error("hierarchy check " + f.name + " failed for player " + std::to_string(f.player + 1) + ": " +
                           f.detail);
  }
  const AuxGame aux = build_auxiliary_game(game, run.hierarchy);
  run.agent_game = to_agent_form(aux);
  SolverConfig sc;
  sc.target_regret = run.solver_target;
  sc.max_restarts = cfg.max_restarts;
  sc.max_iterations = cfg.max_iterations;
  sc.seed = cfg.seed;
  run.solve = solve_nash(run.agent_game, sc);
  run.lifted = lift_strategy(run.solve.profile, game, run.hierarchy);
  run.report = certify(game, run.lifted, cfg.epsilon);
  run.transfer_bound = run.delta * run.M * double(run.action_profiles) + run.solve.certified_regret;
  run.transfer_holds = run.report.max_bayesian() <= run.transfer_bound + kCertificateSlack;
  run.certified = run.report.pass();
  return run;
}

struct ContinuousRun {
  DiscretizedGame hat;
  std::vector<SupGapTerms> sup_gap;
  FiniteRun finite;
  ProbeAudit probe;
  bool certified = false;
};

inline ContinuousRun run_continuous(const CompactActionSpec& spec, const NestedGame& skeleton, const RunConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) throw InvalidInput("epsilon must be positive");
  validate_spec(spec, skeleton.states());
  if (auto v = lipschitz_violation(spec)) throw InvalidInput(*v);
  ContinuousRun run;
  run.hat = build_hat_game(spec, skeleton, cfg.epsilon);
  run.sup_gap = certify_sup_gap(spec, run.hat);
  run.finite = run_finite(run.hat.hat_game, cfg);
  run.probe = probe_harsanyi_regret(spec, run.hat, run.finite.lifted);
  run.certified = run.finite.report.bayesian_pass && run.probe.pass;
  return run;
}

}  // namespace nestedeq
