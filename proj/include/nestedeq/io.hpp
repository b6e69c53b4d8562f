#pragma once

// JSON game and profile files, and report emission.

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "nestedeq/discretize.hpp"
#include "nestedeq/game.hpp"
#include "nestedeq/hierarchy.hpp"
#include "nestedeq/pipeline.hpp"
#include "nestedeq/type_space.hpp"
#include "nestedeq/verifier.hpp"

namespace nestedeq::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Unreadable or unwritable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GameFile {
  std::string mode;  // finite | types | continuous
  std::vector<std::string> players;
  NestedGame game;  // continuous mode: states, priors and partitions only
  std::optional<CompactActionSpec> spec;
};

// ---------------------------------------------------------------------------
// Parsing helpers

namespace detail {

inline const Json& field(const Json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InvalidInput(where + ": missing field '" + key + "'");
  return *it;
}

inline void expect_object(const Json& v, const std::string& where) {
  if (!v.is_object()) throw InvalidInput(where + ": expected an object");
}

inline void expect_array(const Json& v, const std::string& where) {
  if (!v.is_array()) throw InvalidInput(where + ": expected an array");
}

inline void only_fields(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  expect_object(obj, where);
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw InvalidInput(where + ": unknown field '" + key + "'");
  }
}

/// A JSON number or a decimal string such as "0.1" or "1e-3".
inline double number(const Json& v, const std::string& where) {
  double x = 0.0;
  if (v.is_number()) {
    x = v.get<double>();
  } else if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    const char* end = s.data() + s.size();
    auto res = std::from_chars(s.data(), end, x);
    if (s.empty() || res.ec != std::errc() || res.ptr != end) {
      throw InvalidInput(where + ": '" + s + "' is not a decimal number");
    }
  } else {
    throw InvalidInput(where + ": expected a number");
  }
  if (!std::isfinite(x)) throw InvalidInput(where + ": number is not finite");
  return x;
}

inline std::string text(const Json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return v.dump();
  throw InvalidInput(where + ": expected a string");
}

inline std::size_t index_of(const std::vector<std::string>& labels, const std::string& key, const std::string& where) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == key) return i;
  }
  throw InvalidInput(where + ": unknown label '" + key + "'");
}

inline void check_version(const Json& doc, const std::string& where) {
  const Json& v = field(doc, "version", where);
  if (!v.is_number_integer() || v.get<long long>() != kFormatVersion) {
    throw InvalidInput(where + ": unsupported version " + v.dump());
  }
}

inline std::vector<std::string> player_keys(const Json& obj, const std::string& where) {
  expect_object(obj, where);
  std::vector<std::string> keys;
  for (const auto& [key, value] : obj.items()) keys.push_back(key);
  if (keys.size() < 2) throw InvalidInput(where + ": need at least two players");
  return keys;
}

inline void same_players(const Json& obj, const std::vector<std::string>& players, const std::string& where) {
  expect_object(obj, where);
  if (obj.size() != players.size()) throw InvalidInput(where + ": players differ from the action declaration");
  for (const auto& p : players) field(obj, p, where);
}

inline std::vector<std::string> labels(const Json& arr, const std::string& where) {
  expect_array(arr, where);
  if (arr.empty()) throw InvalidInput(where + ": empty label list");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& v : arr) {
    out.push_back(text(v, where));
    if (!seen.insert(out.back()).second) throw InvalidInput(where + ": duplicate label '" + out.back() + "'");
  }
  return out;
}

// States, priors and partitions shared by the finite and continuous modes.
inline void parse_skeleton(const Json& doc, const std::vector<std::string>& players, NestedGame& g) {
  const Json& states = field(doc, "states", "game");
  expect_array(states, "states");
  if (states.empty()) throw InvalidInput("states: empty state space");
  std::map<std::string, std::size_t> index;
  for (const auto& s : states) {
    only_fields(s, {"id", "prob"}, "states[]");
    const std::string id = text(field(s, "id", "states[]"), "states[].id");
    if (!index.emplace(id, g.space.ids.size()).second) throw InvalidInput("states: duplicate id '" + id + "'");
    g.space.ids.push_back(id);
    g.space.prior.push_back(number(field(s, "prob", "states[]"), "states[" + id + "].prob"));
  }
  auto state = [&](const std::string& id, const std::string& where) {
    auto it = index.find(id);
    if (it == index.end()) throw InvalidInput(where + ": unknown state '" + id + "'");
    return it->second;
  };

  const Json& parts = field(doc, "partitions", "game");
  same_players(parts, players, "partitions");
  for (const auto& p : players) {
    const Json& m = parts.at(p);
    const std::string where = "partitions." + p;
    expect_object(m, where);
    std::vector<std::string> keys(g.space.ids.size());
    std::vector<bool> covered(keys.size(), false);
    for (const auto& [sid, atom] : m.items()) {
      const std::size_t w = state(sid, where);
      keys[w] = text(atom, where + "." + sid);
      covered[w] = true;
    }
    for (std::size_t w = 0; w < keys.size(); ++w) {
      if (!covered[w]) throw InvalidInput(where + ": state '" + g.space.ids[w] + "' is not assigned an atom");
    }
    g.partitions.push_back(Partition::from_keys(keys));
  }

  if (auto it = doc.find("player_priors"); it != doc.end()) {
    same_players(*it, players, "player_priors");
    for (const auto& p : players) {
      const Json& m = it->at(p);
      const std::string where = "player_priors." + p;
      expect_object(m, where);
      std::vector<double> prior(g.space.ids.size(), 0.0);
      std::vector<bool> covered(prior.size(), false);
      for (const auto& [sid, v] : m.items()) {
        const std::size_t w = state(sid, where);
        prior[w] = number(v, where + "." + sid);
        covered[w] = true;
      }
      for (std::size_t w = 0; w < prior.size(); ++w) {
        if (!covered[w]) throw InvalidInput(where + ": state '" + g.space.ids[w] + "' has no probability");
      }
      g.space.player_priors.push_back(std::move(prior));
    }
  }
}

inline GameFile parse_finite(const Json& doc) {
  only_fields(doc, {"version", "mode", "states", "partitions", "player_priors", "actions", "payoffs"}, "game");
  GameFile gf;
  gf.mode = "finite";
  const Json& actions = field(doc, "actions", "game");
  gf.players = player_keys(actions, "actions");
  std::vector<std::vector<std::string>> acts;
  for (const auto& p : gf.players) acts.push_back(labels(actions.at(p), "actions." + p));
  parse_skeleton(doc, gf.players, gf.game);

  const std::size_t n = gf.players.size();
  NestedGame& g = gf.game;
  g.payoffs = PayoffTensor(acts, g.space.ids.size());
  std::vector<bool> filled(g.space.ids.size() * g.payoffs.profile_count(), false);
  const Json& rows = field(doc, "payoffs", "game");
  expect_array(rows, "payoffs");
  for (const auto& row : rows) {
    only_fields(row, {"state", "profile", "values"}, "payoffs[]");
    const std::string sid = text(field(row, "state", "payoffs[]"), "payoffs[].state");
    const std::size_t w = index_of(g.space.ids, sid, "payoffs[].state");
    const Json& prof = field(row, "profile", "payoffs[]");
    const Json& vals = field(row, "values", "payoffs[]");
    expect_array(prof, "payoffs[].profile");
    expect_array(vals, "payoffs[].values");
    if (prof.size() != n || vals.size() != n) {
      throw InvalidInput("payoffs[" + sid + "]: profile and values need one entry per player");
    }
    std::vector<std::size_t> joint(n);
    for (std::size_t i = 0; i < n; ++i) joint[i] = index_of(acts[i], text(prof[i], "payoffs[].profile"), "payoffs[].profile");
    const std::size_t p = g.payoffs.profile_index(joint);
    if (filled[w * g.payoffs.profile_count() + p]) {
      throw InvalidInput("payoffs: duplicate entry for state '" + sid + "', profile " + prof.dump());
    }
    filled[w * g.payoffs.profile_count() + p] = true;
    for (std::size_t i = 0; i < n; ++i) g.payoffs.at(w, p, i) = number(vals[i], "payoffs[].values");
  }
  for (std::size_t w = 0; w < g.space.ids.size(); ++w) {
    for (std::size_t p = 0; p < g.payoffs.profile_count(); ++p) {
      if (!filled[w * g.payoffs.profile_count() + p]) {
        throw InvalidInput("payoffs: missing entry for state '" + g.space.ids[w] + "'");
      }
    }
  }
  return gf;
}

inline GameFile parse_types(const Json& doc) {
  only_fields(doc, {"version", "mode", "types", "actions", "joint", "payoffs"}, "game");
  GameFile gf;
  gf.mode = "types";
  const Json& actions = field(doc, "actions", "game");
  gf.players = player_keys(actions, "actions");
  const std::size_t n = gf.players.size();
  TypeSpaceGame ts;
  const Json& types = field(doc, "types", "game");
  same_players(types, gf.players, "types");
  for (const auto& p : gf.players) {
    ts.actions.push_back(labels(actions.at(p), "actions." + p));
    ts.types.push_back(labels(types.at(p), "types." + p));
  }
  auto type_profile = [&](const Json& arr, const std::string& where) {
    expect_array(arr, where);
    if (arr.size() != n) throw InvalidInput(where + ": need one type per player");
    std::vector<std::size_t> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = index_of(ts.types[i], text(arr[i], where), where);
    return t;
  };

  const Json& joint = field(doc, "joint", "game");
  expect_array(joint, "joint");
  for (const auto& row : joint) {
    only_fields(row, {"types", "prob"}, "joint[]");
    auto t = type_profile(field(row, "types", "joint[]"), "joint[].types");
    if (ts.joint.count(t)) throw InvalidInput("joint: duplicate type profile " + row.at("types").dump());
    ts.joint[t] = number(field(row, "prob", "joint[]"), "joint[].prob");
  }

  const PayoffTensor shape(ts.actions, 0);
  std::map<std::vector<std::size_t>, std::vector<bool>> filled;
  const Json& rows = field(doc, "payoffs", "game");
  expect_array(rows, "payoffs");
  for (const auto& row : rows) {
    only_fields(row, {"types", "profile", "values"}, "payoffs[]");
    auto t = type_profile(field(row, "types", "payoffs[]"), "payoffs[].types");
    const Json& prof = field(row, "profile", "payoffs[]");
    const Json& vals = field(row, "values", "payoffs[]");
    expect_array(prof, "payoffs[].profile");
    expect_array(vals, "payoffs[].values");
    if (prof.size() != n || vals.size() != n) throw InvalidInput("payoffs[]: need one entry per player");
    std::vector<std::size_t> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = index_of(ts.actions[i], text(prof[i], "payoffs[].profile"), "payoffs[].profile");
    const std::size_t p = shape.profile_index(a);
    auto& row_values = ts.payoffs[t];
    auto& f = filled[t];
    row_values.resize(shape.profile_count() * n, 0.0);
    f.resize(shape.profile_count(), false);
    if (f[p]) throw InvalidInput("payoffs: duplicate entry for types " + row.at("types").dump());
    f[p] = true;
    for (std::size_t i = 0; i < n; ++i) row_values[p * n + i] = number(vals[i], "payoffs[].values");
  }
  for (const auto& [t, mass] : ts.joint) {
    if (!(mass > 0.0)) continue;
    auto it = filled.find(t);
    if (it == filled.end() || std::find(it->second.begin(), it->second.end(), false) != it->second.end()) {
      std::string id;
      for (std::size_t i = 0; i < n; ++i) id += (i ? "|" : "") + ts.types[i][t[i]];
      throw InvalidInput("payoffs: incomplete table for type profile '" + id + "'");
    }
  }
  gf.game = from_type_space(ts);
  return gf;
}

inline GameFile parse_continuous(const Json& doc) {
  only_fields(doc, {"version", "mode", "dims", "states", "partitions", "player_priors", "payoffs", "lipschitz",
                    "payoff_cap"},
              "game");
  GameFile gf;
  gf.mode = "continuous";
  const Json& dims = field(doc, "dims", "game");
  gf.players = player_keys(dims, "dims");
  const std::size_t n = gf.players.size();
  CompactActionSpec spec;
  for (const auto& p : gf.players) {
    const Json& d = dims.at(p);
    if (!d.is_number_integer() || d.get<long long>() < 1) throw InvalidInput("dims." + p + ": expected a positive integer");
    spec.dims.push_back(std::size_t(d.get<long long>()));
  }
  parse_skeleton(doc, gf.players, gf.game);
  const std::size_t states = gf.game.space.ids.size();
  std::vector<std::vector<std::string>> single(n, std::vector<std::string>{"*"});
  gf.game.payoffs = PayoffTensor(single, states);

  const std::size_t coords = spec.coordinates();
  spec.payoffs.assign(states, std::vector<Polynomial>(n));
  std::vector<std::vector<bool>> filled(states, std::vector<bool>(n, false));
  const Json& rows = field(doc, "payoffs", "game");
  expect_array(rows, "payoffs");
  for (const auto& row : rows) {
    only_fields(row, {"state", "player", "monomials"}, "payoffs[]");
    const std::string sid = text(field(row, "state", "payoffs[]"), "payoffs[].state");
    const std::size_t w = index_of(gf.game.space.ids, sid, "payoffs[].state");
    const std::size_t i = index_of(gf.players, text(field(row, "player", "payoffs[]"), "payoffs[].player"),
                                   "payoffs[].player");
    if (filled[w][i]) throw InvalidInput("payoffs: duplicate polynomial for state '" + sid + "'");
    filled[w][i] = true;
    const Json& monos = field(row, "monomials", "payoffs[]");
    expect_array(monos, "payoffs[].monomials");
    for (const auto& m : monos) {
      only_fields(m, {"coef", "exponents"}, "monomials[]");
      Monomial mono;
      mono.coef = number(field(m, "coef", "monomials[]"), "monomials[].coef");
      const Json& ex = field(m, "exponents", "monomials[]");
      expect_array(ex, "monomials[].exponents");
      if (ex.size() != coords) {
        throw InvalidInput("monomials[].exponents: expected " + std::to_string(coords) + " entries");
      }
      for (const auto& e : ex) {
        if (!e.is_number_integer() || e.get<long long>() < 0 || e.get<long long>() > 64) {
          throw InvalidInput("monomials[].exponents: expected small non-negative integers");
        }
        mono.exponents.push_back(unsigned(e.get<long long>()));
      }
      spec.payoffs[w][i].push_back(std::move(mono));
    }
  }
  for (std::size_t w = 0; w < states; ++w) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!filled[w][i]) {
        throw InvalidInput("payoffs: no polynomial for player " + gf.players[i] + " in state '" +
                           gf.game.space.ids[w] + "'");
      }
    }
  }
  spec.lipschitz = number(field(doc, "lipschitz", "game"), "lipschitz");
  if (auto it = doc.find("payoff_cap"); it != doc.end()) spec.payoff_cap = number(*it, "payoff_cap");
  validate_spec(spec, states);
  gf.spec = std::move(spec);
  return gf;
}

}  // namespace detail

inline GameFile parse_game(const Json& doc) {
  detail::expect_object(doc, "game");
  detail::check_version(doc, "game");
  const std::string mode = detail::text(detail::field(doc, "mode", "game"), "mode");
  GameFile gf;
  if (mode == "finite") {
    gf = detail::parse_finite(doc);
  } else if (mode == "types") {
    gf = detail::parse_types(doc);
  } else if (mode == "continuous") {
    gf = detail::parse_continuous(doc);
  } else {
    throw InvalidInput("mode: expected finite, types or continuous, got '" + mode + "'");
  }
  require_valid(gf.game);
  return gf;
}

inline Json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw InvalidInput(path + ": malformed JSON: " + e.what());
  }
}

inline GameFile load_game(const std::string& path) { return parse_game(read_json(path)); }

/// Accepts a profile file or a solve report (its "profile" member). The
/// profile is measured on the game's own information partitions.
inline StrategyProfile parse_profile(const Json& doc_in, const GameFile& gf) {
  const Json* doc = &doc_in;
  detail::expect_object(*doc, "profile");
  if (auto it = doc->find("command"); it != doc->end()) {
    if (*it != "solve") throw InvalidInput("profile: not a profile file or solve report");
    doc = &detail::field(*doc, "profile", "report");
  }
  detail::only_fields(*doc, {"version", "strategies"}, "profile");
  detail::check_version(*doc, "profile");
  const Json& strategies = detail::field(*doc, "strategies", "profile");
  detail::same_players(strategies, gf.players, "profile.strategies");

  const NestedGame& g = gf.game;
  StrategyProfile prof;
  prof.level = FieldLevel::original;
  prof.partitions = g.partitions;
  for (std::size_t i = 0; i < gf.players.size(); ++i) {
    const std::string where = "profile.strategies." + gf.players[i];
    const Json& per_atom = strategies.at(gf.players[i]);
    detail::expect_object(per_atom, where);
    const Partition& part = g.partitions[i];
    const auto& acts = g.payoffs.actions()[i];
    std::vector<Distribution> dists(part.atom_count());
    std::vector<bool> given(part.atom_count(), false);
    for (const auto& [label, dist] : per_atom.items()) {
      std::size_t atom = npos;
      for (std::size_t a = 0; a < part.atom_count(); ++a) {
        if (part.label(a) == label) atom = a;
      }
      if (atom == npos) throw InvalidInput(where + ": unknown atom '" + label + "'");
      detail::expect_object(dist, where + "." + label);
      Distribution d(acts.size(), 0.0);
      for (const auto& [act, p] : dist.items()) {
        d[detail::index_of(acts, act, where + "." + label)] = detail::number(p, where + "." + label + "." + act);
      }
      dists[atom] = std::move(d);
      given[atom] = true;
    }
    for (std::size_t a = 0; a < part.atom_count(); ++a) {
      if (!given[a]) throw InvalidInput(where + ": no distribution for atom '" + part.label(a) + "'");
    }
    prof.strategies.push_back(std::move(dists));
  }
  check_profile(g, prof);
  return prof;
}

// ---------------------------------------------------------------------------
// Emission

inline Json profile_json(const NestedGame& g, const StrategyProfile& prof, const std::vector<std::string>& players) {
  Json strategies = Json::object();
  for (std::size_t i = 0; i < players.size(); ++i) {
    Json per_atom = Json::object();
    for (std::size_t a = 0; a < prof.partitions[i].atom_count(); ++a) {
      Json d = Json::object();
      for (std::size_t k = 0; k < g.payoffs.action_count(i); ++k) d[g.payoffs.actions()[i][k]] = prof.strategies[i][a][k];
      per_atom[prof.partitions[i].label(a)] = std::move(d);
    }
    strategies[players[i]] = std::move(per_atom);
  }
  return Json{{"version", kFormatVersion}, {"strategies", std::move(strategies)}};
}

inline Json regret_json(const NestedGame& g, const RegretReport& r, const std::vector<std::string>& players) {
  Json harsanyi = Json::object();
  for (std::size_t i = 0; i < players.size(); ++i) harsanyi[players[i]] = r.harsanyi[i];
  Json atoms = Json::array();
  for (const auto& a : r.atoms) {
    atoms.push_back({{"player", players[a.player]},
                     {"atom", g.partitions[a.player].label(a.atom)},
                     {"mass", a.mass},
                     {"value", a.value},
                     {"best", a.best},
                     {"regret", a.regret},
                     {"best_action", g.payoffs.actions()[a.player][a.best_action]}});
  }
  Json witness = nullptr;
  if (!r.atoms.empty()) {
    witness = {{"player", players[r.witness.player]},
               {"atom", g.partitions[r.witness.player].label(r.witness.atom)},
               {"deviation", g.payoffs.actions()[r.witness.player][r.witness.action]},
               {"regret", r.witness.regret}};
  }
  return Json{{"epsilon", r.epsilon},
              {"slack", r.slack},
              {"max_bayesian", r.max_bayesian()},
              {"max_harsanyi", r.max_harsanyi()},
              {"bayesian_pass", r.bayesian_pass},
              {"harsanyi_pass", r.harsanyi_pass},
              {"pass", r.pass()},
              {"witness", witness},
              {"harsanyi", harsanyi},
              {"atoms", atoms}};
}

inline Json hierarchy_json(const NestedGame& g, const Hierarchy& h, const PropertyReport& props,
                           const std::vector<std::string>& players) {
  Json levels = Json::array();
  for (std::size_t i = 0; i < h.levels.size(); ++i) {
    const auto& lvl = h.levels[i];
    levels.push_back({{"player", players[i]},
                      {"signal_values", lvl.signal_support.size()},
                      {"resolution", lvl.resolution},
                      {"beliefs", lvl.belief_support.size()},
                      {"information_atoms", g.partitions[i].atom_count()},
                      {"coarse_atoms", h.coarse[i].atom_count()},
                      {"max_gap", lvl.max_gap()}});
  }
  Json checks = Json::array();
  for (const auto& c : props.checks) {
    Json witness = nullptr;
    if (c.witness) witness = Json::array({g.space.ids[c.witness->first], g.space.ids[c.witness->second]});
    checks.push_back({{"name", c.name}, {"player", players[c.player]}, {"pass", c.pass}, {"detail", c.detail},
                      {"witness", witness}});
  }
  return Json{{"delta", h.delta},
              {"payoff_classes", h.payoff.count},
              {"levels", levels},
              {"checks", checks},
              {"pass", props.ok()}};
}

inline Json states_json(const NestedGame& g, const std::vector<std::string>& players) {
  Json states = Json::array();
  for (std::size_t w = 0; w < g.states(); ++w) {
    Json s = {{"id", g.space.ids[w]}, {"prob", g.space.prior[w]}};
    if (g.space.has_player_priors()) {
      Json pp = Json::object();
      for (std::size_t i = 0; i < players.size(); ++i) pp[players[i]] = g.space.player_priors[i][w];
      s["player_priors"] = std::move(pp);
    }
    states.push_back(std::move(s));
  }
  return states;
}

inline Json finite_run_json(const GameFile& gf, const NestedGame& g, const FiniteRun& run, const RunConfig& cfg) {
  const auto& players = gf.players;
  return Json{
      {"config",
       {{"epsilon", run.epsilon},
        {"delta", run.delta},
        {"delta_source", cfg.delta ? "given" : "auto"},
        {"solver_target", run.solver_target},
        {"solver_target_source", cfg.solver_target ? "given" : "auto"},
        {"seed", cfg.seed},
        {"max_restarts", cfg.max_restarts},
        {"max_iterations", cfg.max_iterations}}},
      {"constants", {{"M", run.M}, {"action_profiles", run.action_profiles}, {"transfer_bound", run.transfer_bound}}},
      {"states", states_json(g, players)},
      {"hierarchy", hierarchy_json(g, run.hierarchy, run.properties, players)},
      {"solver",
       {{"method", to_string(run.solve.method)},
        {"agents", run.agent_game.agents.size()},
        {"iterations", run.solve.iterations},
        {"restarts", run.solve.restarts},
        {"converged", run.solve.converged},
        {"auxiliary_regret", run.solve.certified_regret}}},
      {"profile", profile_json(g, run.lifted, players)},
      {"regret", regret_json(g, run.report, players)},
      {"transfer", {{"bound", run.transfer_bound}, {"max_bayesian", run.report.max_bayesian()},
                    {"holds", run.transfer_holds}}},
  };
}

inline Json solve_report(const GameFile& gf, const FiniteRun& run, const RunConfig& cfg) {
  Json out = {{"command", "solve"}, {"version", kFormatVersion}, {"mode", gf.mode}};
  const Json body = finite_run_json(gf, gf.game, run, cfg);
  for (const auto& [k, v] : body.items()) out[k] = v;
  out["certified"] = run.certified;
  return out;
}

inline Json solve_report(const GameFile& gf, const ContinuousRun& run, const RunConfig& cfg) {
  Json out = {{"command", "solve"}, {"version", kFormatVersion}, {"mode", gf.mode}};
  const DiscretizedGame& hat = run.hat;
  const NestedGame& g = hat.hat_game;
  const std::size_t n = gf.players.size();

  Json nets = Json::object();
  for (std::size_t i = 0; i < n; ++i) nets[gf.players[i]] = hat.nets[i];
  Json kept = Json::array(), dropped = Json::array();
  for (std::size_t w = 0; w < g.states(); ++w) (hat.truncation.kept[w] ? kept : dropped).push_back(g.space.ids[w]);
  Json gaps = Json::object();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = run.sup_gap[i];
    gaps[gf.players[i]] = {{"rounding", t.rounding}, {"net", t.net}, {"tail_between", t.tail_between},
                           {"tail_outside", t.tail_outside}, {"total", t.total()}};
  }
  Json multiples = Json::array();
  const std::size_t width = g.payoffs.profile_count() * n;
  for (std::size_t w = 0; w < g.states(); ++w) {
    for (std::size_t p = 0; p < g.payoffs.profile_count(); ++p) {
      const auto joint = g.payoffs.decode(p);
      Json prof = Json::array();
      for (std::size_t i = 0; i < n; ++i) prof.push_back(g.payoffs.actions()[i][joint[i]]);
      Json vals = Json::array();
      for (std::size_t i = 0; i < n; ++i) vals.push_back(hat.multiples[w * width + p * n + i]);
      multiples.push_back({{"state", g.space.ids[w]}, {"profile", prof}, {"multiples", vals}});
    }
  }
  Json probe_h = Json::object();
  for (std::size_t i = 0; i < n; ++i) probe_h[gf.players[i]] = run.probe.harsanyi[i];

  out["discretization"] = {{"epsilon", hat.epsilon},
                           {"lipschitz", hat.lipschitz},
                           {"eta0", hat.eta0},
                           {"points_per_axis", hat.per_axis},
                           {"cover_radius", hat.cover_radius},
                           {"M", hat.M},
                           {"kept_states", kept},
                           {"dropped_states", dropped},
                           {"tail_integral", hat.truncation.tail_integral},
                           {"sup_gap", gaps},
                           {"nets", nets},
                           {"rounded_payoffs", multiples}};
  const Json body = finite_run_json(gf, g, run.finite, cfg);
  for (const auto& [k, v] : body.items()) out[k] = v;
  out["probe"] = {{"points_per_axis", run.probe.per_axis},
                  {"radius", run.probe.probe_radius},
                  {"harsanyi", probe_h},
                  {"max_regret", run.probe.max_regret},
                  {"bound", run.probe.bound},
                  {"pass", run.probe.pass}};
  out["certified"] = run.certified;
  return out;
}

inline std::string regret_csv(const NestedGame& g, const RegretReport& r, const std::vector<std::string>& players) {
  std::string out = "player,atom,mass,regret,best_action\n";
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  for (const auto& a : r.atoms) {
    out += quote(players[a.player]) + "," + quote(g.partitions[a.player].label(a.atom)) + "," + Json(a.mass).dump() +
           "," + Json(a.regret).dump() + "," + quote(g.payoffs.actions()[a.player][a.best_action]) + "\n";
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("cannot write '" + path + "'");
}

}  // namespace nestedeq::io
