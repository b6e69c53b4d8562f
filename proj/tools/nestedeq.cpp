// Command-line front end: solve, verify, hierarchy.
//
// Exit codes: 0 certified, 1 invalid input, 2 not certified (report still
// written), 3 I/O failure.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nestedeq/io.hpp"
#include "nestedeq/pipeline.hpp"

namespace {

using nestedeq::io::Json;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kNotCertified = 2;
constexpr int kIo = 3;

std::optional<double> parse_auto(const std::string& s, const std::string& flag) {
  if (s == "auto") return std::nullopt;
  const double x = nestedeq::io::detail::number(Json(s), flag);
  if (!(x > 0.0)) throw nestedeq::InvalidInput(flag + " must be positive or 'auto'");
  return x;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    nestedeq::io::write_text(out, text);
  }
}

struct SolveArgs {
  std::string game, out, delta = "auto", solver_regret = "auto", format = "json";
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

int run_solve(const SolveArgs& a) {
  const auto gf = nestedeq::io::load_game(a.game);
  nestedeq::RunConfig cfg;
  cfg.epsilon = a.epsilon;
  cfg.delta = parse_auto(a.delta, "--delta");
  cfg.solver_target = parse_auto(a.solver_regret, "--solver-regret");
  cfg.seed = a.seed;
  if (!(cfg.epsilon > 0.0)) throw nestedeq::InvalidInput("--epsilon must be positive");

  bool certified = false;
  std::string text;
  if (gf.spec) {
    const auto run = nestedeq::run_continuous(*gf.spec, gf.game, cfg);
    certified = run.certified;
    text = a.format == "csv" ? nestedeq::io::regret_csv(run.hat.hat_game, run.finite.report, gf.players)
                             : nestedeq::io::solve_report(gf, run, cfg).dump(2) + "\n";
  } else {
    const auto run = nestedeq::run_finite(gf.game, cfg);
    certified = run.certified;
    text = a.format == "csv" ? nestedeq::io::regret_csv(gf.game, run.report, gf.players)
                             : nestedeq::io::solve_report(gf, run, cfg).dump(2) + "\n";
  }
  emit(text, a.out);
  if (!certified) std::cerr << "not certified at epsilon " << a.epsilon << "\n";
  return certified ? kOk : kNotCertified;
}

struct VerifyArgs {
  std::string game, profile, out;
  double epsilon = 0.0;
};

int run_verify(const VerifyArgs& a) {
  const auto gf = nestedeq::io::load_game(a.game);
  if (gf.spec) throw nestedeq::InvalidInput("verify supports finite and types games only");
  if (!(a.epsilon > 0.0)) throw nestedeq::InvalidInput("--epsilon must be positive");
  const auto profile = nestedeq::io::parse_profile(nestedeq::io::read_json(a.profile), gf);
  const auto report = nestedeq::certify(gf.game, profile, a.epsilon);
  Json out = {{"command", "verify"},
              {"version", nestedeq::io::kFormatVersion},
              {"mode", gf.mode},
              {"regret", nestedeq::io::regret_json(gf.game, report, gf.players)},
              {"certified", report.pass()}};
  emit(out.dump(2) + "\n", a.out);
  if (!report.pass()) {
    const auto& w = report.witness;
    std::cerr << "player " << gf.players[w.player] << " gains " << w.regret << " on atom '"
              << gf.game.partitions[w.player].label(w.atom) << "' by playing '"
              << gf.game.payoffs.actions()[w.player][w.action] << "'\n";
  }
  return report.pass() ? kOk : kNotCertified;
}

struct HierarchyArgs {
  std::string game, out;
  double delta = 0.0;
};

int run_hierarchy(const HierarchyArgs& a) {
  const auto gf = nestedeq::io::load_game(a.game);
  if (gf.spec) throw nestedeq::InvalidInput("hierarchy needs a finite or types game");
  if (!(a.delta > 0.0)) throw nestedeq::InvalidInput("--delta must be positive");
  const auto h = nestedeq::build_hierarchy(gf.game, a.delta);
  const auto props = nestedeq::check_properties(gf.game, h);
  Json out = {{"command", "hierarchy"},
              {"version", nestedeq::io::kFormatVersion},
              {"mode", gf.mode},
              {"hierarchy", nestedeq::io::hierarchy_json(gf.game, h, props, gf.players)}};
  emit(out.dump(2) + "\n", a.out);
  return props.ok() ? kOk : kNotCertified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate equilibria of Bayesian games with nested information"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Compute and certify an approximate Bayesian equilibrium");
  s->add_option("--game", solve.game, "Game file (JSON)")->required();
  s->add_option("--epsilon", solve.epsilon, "Target regret")->required();
  s->add_option("--delta", solve.delta, "Belief rounding parameter, or 'auto'");
  s->add_option("--solver-regret", solve.solver_regret, "Regret target of the inner solver, or 'auto'");
  s->add_option("--seed", solve.seed, "Seed for solver restarts");
  s->add_option("--out", solve.out, "Report path (default: stdout)");
  s->add_option("--format", solve.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Certify a given profile");
  v->add_option("--game", verify.game, "Game file (JSON)")->required();
  v->add_option("--profile", verify.profile, "Profile file or solve report (JSON)")->required();
  v->add_option("--epsilon", verify.epsilon, "Target regret")->required();
  v->add_option("--out", verify.out, "Report path (default: stdout)");

  HierarchyArgs hier;
  auto* h = app.add_subcommand("hierarchy", "Build and audit the approximate belief hierarchy");
  h->add_option("--game", hier.game, "Game file (JSON)")->required();
  h->add_option("--delta", hier.delta, "Belief rounding parameter")->required();
  h->add_option("--out", hier.out, "Report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*s) return run_solve(solve);
    if (*v) return run_verify(verify);
    return run_hierarchy(hier);
  } catch (const nestedeq::io::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const nestedeq::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kNotCertified;
  }
}
