// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "nestedeq/pipeline.hpp"
#include "support/continuous.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_games.hpp"

using namespace nestedeq;

namespace {

constexpr std::uint64_t kCorpusSeed = 2024;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const Outcome& o, double seconds) {
  if (!o.pass) ++failures;
  std::printf("[%s] %-34s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), seconds);
  std::fflush(stdout);
}

template <typename Fn>
void criterion(const std::string& name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  report(name, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// L1 distance between the exact conditional law of the signal on each
// positive-mass atom and the rounded belief, computed from the raw game.
double worst_belief_gap(const NestedGame& g, const Hierarchy& h, std::size_t i) {
  const auto& lvl = h.levels[i];
  const auto& prior = g.space.prior_of(i);
  double worst = 0.0;
  for (const auto& members : g.partitions[i].members()) {
    std::vector<double> law(lvl.signal_support.size(), 0.0);
    double mass = 0.0;
    for (std::size_t w : members) {
      if (prior[w] <= 0.0) continue;
      law[lvl.signal_of[w]] += prior[w];
      mass += prior[w];
    }
    if (mass <= 0.0) continue;
    const auto& b = lvl.belief_at(members.front());
    double gap = 0.0;
    for (std::size_t z = 0; z < law.size(); ++z) gap += std::abs(law[z] / mass - double(b.numerators[z]) / double(b.resolution));
    worst = std::max(worst, gap);
  }
  return worst;
}

Outcome hierarchy_soundness(const std::vector<NestedGame>& games) {
  std::size_t checked = 0;
  for (double delta : {0.2, 0.05, 0.01}) {
    for (std::size_t k = 0; k < games.size(); ++k) {
      const auto h = build_hierarchy(games[k], delta);
      const auto props = check_properties(games[k], h);
      if (!props.ok()) {
        const auto f = props.failures().front();
        return {false, "game " + std::to_string(k) + " delta " + fmt(delta) + ": " + f.name + " " + f.detail};
      }
      for (std::size_t i = 0; i < games[k].players(); ++i) {
        const double gap = worst_belief_gap(games[k], h, i);
        if (!(gap < delta + 1e-12)) {
          return {false, "game " + std::to_string(k) + " player " + std::to_string(i + 1) + " gap " + fmt(gap)};
        }
        ++checked;
      }
    }
  }
  return {true, std::to_string(checked) + " levels across 3 deltas, all properties hold"};
}

Outcome expectation_audit(const std::vector<NestedGame>& games) {
  std::mt19937_64 rng(kCorpusSeed + 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::size_t cases = 0;
  double worst_ratio = 0.0;
  for (double delta : {0.2, 0.05, 0.01}) {
    for (std::size_t k = 0; k < games.size(); ++k) {
      const auto& g = games[k];
      const auto h = build_hierarchy(g, delta);
      for (int t = 0; t < 10; ++t) {
        const std::size_t i = std::size_t(rng() % g.players());
        const double bound = 0.1 + 10.0 * std::abs(u(rng));
        std::vector<double> f(h.levels[i].signal_support.size());
        for (auto& x : f) x = bound * u(rng);
        const double gap = conditional_expectation_gap(g, h, i, f, bound);
        worst_ratio = std::max(worst_ratio, gap / (bound * delta));
        if (!(gap < bound * delta)) {
          return {false, "game " + std::to_string(k) + " gap " + fmt(gap) + " >= " + fmt(bound * delta)};
        }
        ++cases;
      }
    }
  }
  return {true, std::to_string(cases) + " functionals, worst gap/(bound*delta) " + fmt(worst_ratio)};
}

Outcome end_to_end(const std::vector<NestedGame>& games) {
  std::size_t certified = 0, converged = 0, violations = 0;
  for (const auto& g : games) {
    RunConfig cfg;
    cfg.epsilon = 0.05;
    const auto run = run_finite(g, cfg);
    certified += run.certified;
    if (run.solve.converged) {
      ++converged;
      violations += !run.transfer_holds;
    }
  }
  return {certified >= 95 && violations == 0,
          std::to_string(certified) + "/100 certified at eps 0.05, " + std::to_string(converged) + " converged, " +
              std::to_string(violations) + " transfer violations"};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(kCorpusSeed + 2);
  testsupport::CorpusOptions opt;
  opt.min_players = opt.max_players = 2;
  opt.max_states = 8;
  opt.min_actions = 1;
  std::size_t profiles = 0;
  double worst = 0.0;
  while (profiles < 1000) {
    const auto g = testsupport::random_nested_game(rng, opt);
    if (g.partitions[0].atom_count() > 3 || g.partitions[1].atom_count() > 3) continue;
    const auto s = oracle::random_profile(g, rng);
    const auto atoms = bayesian_regret(g, s);
    const auto hars = harsanyi_regret(g, s);
    const auto brute = brute_force_check(g, s, 0.0);
    std::size_t expected_atoms = 0;
    for (const auto& m : brute.atom_regret) expected_atoms += m.size();
    if (atoms.size() != expected_atoms) return {false, "atom sets differ"};
    for (const auto& a : atoms) worst = std::max(worst, std::abs(a.regret - brute.atom_regret[a.player].at(a.atom)));
    for (std::size_t i = 0; i < 2; ++i) worst = std::max(worst, std::abs(hars[i] - brute.harsanyi[i]));
    ++profiles;
  }
  return {worst <= 1e-9, std::to_string(profiles) + " profiles, max deviation " + fmt(worst)};
}

Outcome anchors() {
  RunConfig cfg;
  cfg.epsilon = 0.05;
  const double target = cfg.epsilon / 2.0;

  const auto mp = run_finite(fixtures::matching_pennies(), cfg);
  const double value = expected_payoff(fixtures::matching_pennies(), mp.lifted)[0];
  double off = 0.0;
  for (const auto& per : mp.lifted.strategies) off = std::max(off, std::abs(per[0][0] - 0.5));
  const bool pennies = mp.certified && std::abs(value) <= target && off <= target;

  const auto g = fixtures::informed_uninformed();
  const auto iu = run_finite(g, cfg);
  const double v = expected_payoff(g, iu.lifted)[0];
  const bool informed = iu.certified && std::abs(v - 0.5) <= cfg.epsilon;

  return {pennies && informed, "pennies value " + fmt(value) + " max |p-1/2| " + fmt(off) +
                                   "; informed/uninformed value " + fmt(v) + " vs 0.5"};
}

Outcome continuous_chain() {
  std::mt19937_64 rng(kCorpusSeed + 3);
  const double eps = 0.1;
  std::size_t ok = 0;
  double worst_slack = -1e300;
  std::string first_failure;
  for (int t = 0; t < 20; ++t) {
    const auto cg = testsupport::random_polynomial_game(rng);
    RunConfig cfg;
    cfg.epsilon = eps;
    const auto run = run_continuous(cg.spec, cg.skeleton, cfg);
    bool terms = true;
    for (const auto& s : run.sup_gap) {
      terms = terms && s.rounding <= eps && s.net <= eps && s.tail_between <= eps / 2 && s.tail_outside <= eps / 2;
    }
    const double bound = 5.0 * eps + run.hat.lipschitz * run.hat.eta0 / 2.0;
    const bool probe = run.probe.max_regret <= bound;
    worst_slack = std::max(worst_slack, run.probe.max_regret - bound);
    if (terms && probe) {
      ++ok;
    } else if (first_failure.empty()) {
      first_failure = "; game " + std::to_string(t) + " probe regret " + fmt(run.probe.max_regret);
    }
  }
  return {ok == 20, std::to_string(ok) + "/20 games, max probe regret minus bound " + fmt(worst_slack) + first_failure};
}

Outcome g_round_property() {
  std::mt19937_64 rng(kCorpusSeed + 4);
  std::uniform_real_distribution<double> z(-1e3, 1e3), le(-8.0, 2.0);
  for (int t = 0; t < 100000; ++t) {
    const double eps = std::pow(10.0, le(rng));
    const double x = t % 10 == 0 ? std::round(z(rng) / eps) * eps : z(rng);
    const double r = x - g_round(x, eps, 1e4);
    if (!(r >= 0.0 && r < eps)) return {false, "z " + fmt(x) + " eps " + fmt(eps) + " residual " + fmt(r)};
  }
  return {true, "100000 pairs, residual in [0, eps)"};
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "nestedeq_acceptance";
  std::filesystem::create_directories(dir);
  std::size_t identical = 0;
  const std::string games[] = {"informed_uninformed.json", "coordination_types.json", "quadratic_location.json"};
  for (const auto& name : games) {
    std::string outputs[2];
    for (int r = 0; r < 2; ++r) {
      const auto out = (dir / ("run" + std::to_string(r) + ".json")).string();
      const std::string cmd = std::string(NESTEDEQ_CLI) + " solve --game " + NESTEDEQ_DATA + "/" + name +
                              " --epsilon 0.1 --seed 11 --out " + out + " 2>/dev/null";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, name + ": solve exited abnormally"};
      outputs[r] = slurp(out);
    }
    if (outputs[0].empty() || outputs[0] != outputs[1]) return {false, name + ": reports differ"};
    ++identical;
  }
  std::filesystem::remove_all(dir);
  return {true, std::to_string(identical) + " games, reports byte-identical"};
}

}  // namespace

int main() {
  const auto games = testsupport::corpus(kCorpusSeed, 100);
  criterion("hierarchy soundness", [&] { return hierarchy_soundness(games); });
  criterion("conditional expectation audit", [&] { return expectation_audit(games); });
  criterion("end-to-end certification", [&] { return end_to_end(games); });
  criterion("oracle equivalence", oracle_equivalence);
  criterion("known-equilibrium anchors", anchors);
  criterion("continuous discretization chain", continuous_chain);
  criterion("g_round totality and bound", g_round_property);
  criterion("determinism", determinism);
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
