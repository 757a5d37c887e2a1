#pragma once

// JSON and CSV plumbing for the command-line tool. Requires nlohmann/json.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "goodplay/approachability.hpp"
#include "goodplay/dynamics.hpp"
#include "goodplay/harness.hpp"
#include "goodplay/lyapunov.hpp"
#include "goodplay/stage_game.hpp"
#include "goodplay/strategies.hpp"

namespace goodplay::io {

using nlohmann::json;

/// Malformed or out-of-range configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline double number(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing key ") + key);
  if (!j.at(key).is_number()) throw ConfigError(std::string("key ") + key + " must be a number");
  return j.at(key).get<double>();
}

template <class T>
T value_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for ") + key + ": " + e.what());
  }
}

inline GameParams parse_game(const json& j) {
  if (!j.is_object()) throw ConfigError("game must be a JSON object");
  return GameParams{number(j, "r0"), number(j, "r1"), number(j, "r2"),
                    number(j, "p1"), number(j, "p2"), number(j, "p3")};
}

inline json game_json(const GameParams& g) {
  return {{"r0", g.r0}, {"r1", g.r1}, {"r2", g.r2}, {"p1", g.p1}, {"p2", g.p2}, {"p3", g.p3}};
}

/// The game entry of a config: an inline object or a path to a game file.
/// Missing entries fall back to the worked example.
inline GameParams game_from_config(const json& cfg) {
  if (!cfg.contains("game")) return kExampleGame;
  const json& g = cfg.at("game");
  if (g.is_string()) return parse_game(read_json_file(g.get<std::string>()));
  return parse_game(g);
}

inline Vec3 parse_vec3(const json& j) {
  if (!j.is_array() || (j.size() != 3 && j.size() != 2)) throw ConfigError("expected a point with 2 or 3 numbers");
  Vec3 v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("point coordinates must be numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

inline json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

inline HullWeights parse_weights(const json& j) {
  if (!j.is_array() || j.size() != 8) throw ConfigError("hull weights need 8 numbers");
  HullWeights w{};
  for (std::size_t i = 0; i < 8; ++i) w[i] = j[i].get<double>();
  return w;
}

inline Action parse_action(const std::string& s) {
  if (s == "I") return Action::I;
  if (s == "NI") return Action::NI;
  throw ConfigError("action must be I or NI");
}

/// {"kind":"good","eps"}, {"kind":"constant","action"}, {"kind":"random","p","seed"},
/// {"kind":"example2_defector","eps"}. Random strategies need an explicit seed.
inline Strategy parse_strategy(const json& j, std::size_t player, const GameParams& g) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ConfigError("strategy descriptor needs a string \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  try {
    if (kind == "good") return good_strategy(player, number(j, "eps"), g);
    if (kind == "constant") return constant_strategy(parse_action(value_or<std::string>(j, "action", "")));
    if (kind == "random") {
      if (!j.contains("seed") || !j.at("seed").is_number_unsigned()) throw ConfigError("random strategy needs \"seed\"");
      return random_strategy(number(j, "p"), j.at("seed").get<std::uint64_t>());
    }
    if (kind == "example2_defector") return example2_defector(g, number(j, "eps"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid strategy: ") + e.what());
  }
  throw ConfigError("unknown strategy kind " + kind);
}

inline json strategy_json(const Strategy& s) {
  if (const auto* r = s.as<RandomStrategy>()) return {{"name", s.name()}, {"seed", r->seed}};
  return {{"name", s.name()}};
}

/// Full-precision CSV: n, mean, stage payoff (row 1's stage payoff is the start).
inline void write_trajectory_csv(std::ostream& out, const Trajectory& t) {
  out << "n,x1,x2,x3,step1,step2,step3\n";
  char buf[256];
  for (std::size_t k = 0; k < t.horizon(); ++k) {
    const auto& m = t.means[k];
    const auto& s = t.steps[k];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", k + 1, m[0], m[1], m[2], s[0], s[1],
                  s[2]);
    out << buf;
  }
}

inline const char* sense_name(Sense s) {
  switch (s) {
    case Sense::kAtMost: return "at_most";
    case Sense::kAtLeast: return "at_least";
    case Sense::kAbove: return "strictly_above";
  }
  return "?";
}

inline json cell_json(const Cell& c) {
  json j{{"theorem", c.theorem}, {"check", c.check},         {"start", vec_json(c.start)},
         {"deviants", c.deviants}, {"N", c.N},               {"measured", c.measured},
         {"bound", c.bound},     {"tolerance", c.tolerance}, {"sense", sense_name(c.sense)},
         {"margin", c.margin},   {"pass", c.pass}};
  if (c.first_entry) j["first_entry"] = *c.first_entry;
  return j;
}

inline json cells_json(const HarnessReport& r) {
  json a = json::array();
  for (const auto& c : r.cells) a.push_back(cell_json(c));
  return a;
}

inline json witness_json(const BlackwellWitness& w) {
  return {{"x", vec_json(w.x)}, {"phi_x", vec_json(w.phi_x)}, {"y", vec_json(w.y)}, {"inner", w.inner}};
}

inline json blackwell_json(const BlackwellReport& r) {
  json j{{"holds", r.holds}, {"grid_pitch", r.grid_pitch}, {"samples", r.samples}};
  if (r.witness) j["witness"] = witness_json(*r.witness);
  return j;
}

inline json constants_json(const LyapunovConstants& k) {
  return {{"M", k.M}, {"delta", k.delta}, {"r", k.r}, {"gamma", k.gamma}, {"alpha0", k.alpha0}};
}

/// Writes `text` to `path` in one go.
inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace goodplay::io
