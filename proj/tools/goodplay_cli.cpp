// goodplay: validate games, simulate mean-payoff dynamics, reproduce the
// theorem checks and certify Blackwell / Lyapunov conditions.
//
// Exit codes: 0 pass, 1 verified false, 2 usage or configuration error.
// Outputs land in $GOODPLAY_OUT_DIR (default: the working directory).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "goodplay/io.hpp"

namespace fs = std::filesystem;
using namespace goodplay;
using io::ConfigError;
using io::json;

namespace {

constexpr int kPass = 0;
constexpr int kFalse = 1;
constexpr int kUsage = 2;

fs::path output_path(const std::string& name) {
  fs::path p(name);
  if (p.is_absolute()) return p;
  const char* dir = std::getenv("GOODPLAY_OUT_DIR");
  fs::path base = dir && *dir ? fs::path(dir) : fs::current_path();
  fs::create_directories(base);
  return base / p;
}

void write_json(const fs::path& p, const json& j) { io::write_file(p.string(), j.dump(2) + "\n"); }

fs::path meta_path(const fs::path& p) { return fs::path(p.string() + ".meta.json"); }

json load_config(const std::string& path) { return path.empty() ? json::object() : io::read_json_file(path); }

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& game_file, const std::string& out_name) {
  const GameParams g = io::parse_game(io::read_json_file(game_file));
  const auto rep = validate_params(g);
  json labels = json::array();
  for (auto c : rep.violated) {
    std::cout << label(c) << "\n";
    labels.push_back(label(c));
  }
  write_json(output_path(out_name), {{"game", io::game_json(g)}, {"valid", rep.ok()}, {"violations", labels}});
  if (rep.ok()) std::cout << "valid\n";
  return rep.ok() ? kPass : kFalse;
}

// ---------------------------------------------------------------------------

Vec3 start_from(const json& cfg, const GameParams& g, const Vec3& fallback) {
  if (cfg.contains("start")) return io::parse_vec3(cfg.at("start"));
  if (cfg.contains("weights")) {
    try {
      return hull_point(vertices(g), io::parse_weights(cfg.at("weights")));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return fallback;
}

int cmd_simulate(const json& cfg, long N_override, const std::string& out_name) {
  const GameParams g = io::game_from_config(cfg);
  require_admissible(g);
  if (!cfg.contains("strategies") || !cfg.at("strategies").is_array() || cfg.at("strategies").size() != 3)
    throw ConfigError("simulate needs \"strategies\": three descriptors");
  std::vector<Strategy> s;
  for (std::size_t i = 0; i < 3; ++i) s.push_back(io::parse_strategy(cfg.at("strategies")[i], i, g));
  const long N = N_override > 0 ? N_override : io::value_or<long>(cfg, "N", 1000);
  if (N < 1) throw ConfigError("N must be at least 1");
  const auto mode_name = io::value_or<std::string>(cfg, "summation", "incremental");
  if (mode_name != "incremental" && mode_name != "compensated") throw ConfigError("unknown summation " + mode_name);
  const auto mode = mode_name == "compensated" ? Summation::kCompensated : Summation::kIncremental;
  const Vec3 x1 = start_from(cfg, g, vertices(g).A);
  if (!PayoffHull(g).contains(x1)) throw ConfigError("start lies outside S");

  InducedMap phi({s[0], s[1], s[2]}, g);
  const Trajectory t = iterate(phi, x1, static_cast<std::size_t>(N), mode);
  std::ostringstream csv;
  io::write_trajectory_csv(csv, t);
  const auto path = output_path(out_name.empty() ? io::value_or<std::string>(cfg, "output", "trajectory.csv") : out_name);
  io::write_file(path.string(), csv.str());
  json strategies = json::array();
  for (const auto& x : s) strategies.push_back(io::strategy_json(x));
  write_json(meta_path(path), {{"game", io::game_json(g)},
                               {"strategies", strategies},
                               {"start", io::vec_json(x1)},
                               {"N", N},
                               {"summation", mode_name}});
  std::cout << path.string() << "\n";
  return kPass;
}

// ---------------------------------------------------------------------------

HarnessConfig harness_config(const json& cfg, double eps_override, long N_override, double slack_override) {
  HarnessConfig h;
  h.params = io::game_from_config(cfg);
  h.eps = eps_override > 0 ? eps_override : io::value_or<double>(cfg, "eps", h.eps);
  h.N = static_cast<std::size_t>(N_override > 0 ? N_override : io::value_or<long>(cfg, "N", static_cast<long>(h.N)));
  h.w = io::value_or<double>(cfg, "w", h.w);
  h.slack = slack_override >= 0 ? slack_override : io::value_or<double>(cfg, "slack", h.slack);
  h.dist_slack = io::value_or<double>(cfg, "dist_slack", h.dist_slack);
  h.grid_pitch = io::value_or<double>(cfg, "grid_pitch", h.grid_pitch);
  if (cfg.contains("starts")) {
    h.starts.clear();
    for (const auto& w : cfg.at("starts")) h.starts.push_back(io::parse_weights(w));
  }
  try {
    h.validate();
    for (const auto& w : h.starts) hull_point(vertices(h.params), w);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return h;
}

std::vector<Strategy> deviants_from(const json& cfg, const HarnessConfig& h, std::size_t player) {
  if (!cfg.contains("deviants"))
    return standard_battery(h.params, h.eps, io::value_or<std::uint64_t>(cfg, "base_seed", 2024));
  std::vector<Strategy> out;
  for (const auto& d : cfg.at("deviants")) out.push_back(io::parse_strategy(d, player, h.params));
  if (out.empty()) throw ConfigError("empty deviant list");
  return out;
}

std::vector<Vec3> points_from(const json& arr) {
  std::vector<Vec3> out;
  for (const auto& p : arr) out.push_back(io::parse_vec3(p));
  return out;
}

int cmd_verify(const std::string& theorem, const json& cfg, double eps_o, long N_o, double slack_o,
               const std::string& out_name) {
  const auto path = output_path(out_name.empty() ? "verify_" + theorem + ".json" : out_name);
  json meta{{"theorem", theorem}};
  HarnessReport rep;
  auto seeds_of = [](const std::vector<Strategy>& v) {
    json a = json::array();
    for (const auto& s : v) a.push_back(io::strategy_json(s));
    return a;
  };

  if (theorem == "t3" || theorem == "t4" || theorem == "t2") {
    const HarnessConfig h = harness_config(cfg, eps_o, N_o, slack_o);
    meta["game"] = io::game_json(h.params);
    meta["eps"] = h.eps;
    meta["N"] = h.N;
    meta["tail_window"] = h.w;
    if (theorem == "t3") {
      rep = verify_t3(h);
    } else if (theorem == "t4") {
      const auto player = io::value_or<std::size_t>(cfg, "player", 2);
      if (player > 2) throw ConfigError("player must be 0..2");
      const auto devs = deviants_from(cfg, h, player);
      meta["deviants"] = seeds_of(devs);
      meta["bound"] = h.params.p3 + 2 * h.eps / 3;
      meta["weaker_bound_p3_plus_eps"] = h.params.p3 + h.eps;
      rep = verify_t4(h, devs, player);
    } else {
      const auto player = io::value_or<std::size_t>(cfg, "player", 0);
      if (player > 2) throw ConfigError("player must be 0..2");
      const auto devs = deviants_from(cfg, h, player);
      meta["deviants"] = seeds_of(devs);
      rep = verify_t2(h, all_pairs(devs), player);
    }
  } else if (theorem == "example1") {
    const Vec3 a = cfg.contains("a") ? io::parse_vec3(cfg.at("a")) : Vec3{0, -1, 0};
    const Vec3 b = cfg.contains("b") ? io::parse_vec3(cfg.at("b")) : Vec3{2, 1, 0};
    std::vector<Vec3> starts;
    if (cfg.contains("starts")) {
      starts = points_from(cfg.at("starts"));
    } else {
      const auto seed = io::value_or<std::uint64_t>(cfg, "seed", 7);
      const auto count = io::value_or<std::size_t>(cfg, "random_starts", 20);
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(-5.0, 5.0);
      for (std::size_t k = 0; k < count; ++k) {
        const double x = u(rng);
        starts.push_back({x, u(rng), 0});
      }
      meta["seed"] = seed;
    }
    const long N = N_o > 0 ? N_o : io::value_or<long>(cfg, "N", 100000);
    if (N < 1) throw ConfigError("N must be at least 1");
    const double tol = io::value_or<double>(cfg, "tol", 0.05);
    Example1Report r;
    try {
      r = run_example1(a, b, starts, static_cast<std::size_t>(N), tol, io::value_or<double>(cfg, "grid_pitch", 0.1));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    rep = r.harness;
    meta["d"] = io::vec_json(r.d);
    meta["blackwell"] = {{"line", io::blackwell_json(r.line)},
                         {"segment", io::blackwell_json(r.segment)},
                         {"point", io::blackwell_json(r.point)}};
  } else if (theorem == "example2") {
    const double eps = eps_o > 0 ? eps_o : io::value_or<double>(cfg, "eps", 0.4);
    if (!(eps > 0 && eps < 0.5)) throw ConfigError("eps must lie in (0, 1/2)");
    const auto starts = cfg.contains("starts") ? points_from(cfg.at("starts")) : example2_default_starts(eps);
    const long N = N_o > 0 ? N_o : io::value_or<long>(cfg, "N", 100000);
    if (N < 1) throw ConfigError("N must be at least 1");
    std::vector<std::pair<double, double>> schedule{{0.5, 0.2}, {0.2, 0.1}};
    if (cfg.contains("schedule")) schedule = cfg.at("schedule").get<std::vector<std::pair<double, double>>>();
    Example2Report r;
    try {
      r = run_example2(eps, starts, static_cast<std::size_t>(N), io::value_or<double>(cfg, "tol", 0.1),
                       io::value_or<double>(cfg, "grid_pitch", 0.05), schedule);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    rep = r.harness;
    meta["D"] = io::vec_json(r.D);
    meta["blackwell"] = {{"triangle", io::blackwell_json(r.triangle)}, {"segments", io::blackwell_json(r.segments)}};
    json steps = json::array();
    for (const auto& s : r.refinement.steps)
      steps.push_back({{"eps", s.eps},
                       {"delta", s.delta},
                       {"domain_samples", s.domain_samples},
                       {"blackwell", io::blackwell_json(s.blackwell)},
                       {"max_final_distance", s.max_final_distance},
                       {"pass", s.pass}});
    meta["refinement"] = steps;
  } else {
    throw ConfigError("unknown theorem " + theorem + " (expected t3, t4, t2, example1 or example2)");
  }

  meta["pass"] = rep.pass();
  write_json(path, io::cells_json(rep));
  write_json(meta_path(path), meta);
  std::size_t failed = 0;
  for (const auto& c : rep.cells) failed += c.pass ? 0 : 1;
  std::cout << theorem << ": " << rep.cells.size() - failed << "/" << rep.cells.size() << " cells pass\n";
  return rep.pass() ? kPass : kFalse;
}

// ---------------------------------------------------------------------------

struct LyapunovSetup {
  std::string map;
  double eps;
  std::vector<int> dirs;
  SupportSpec spec;
  MultiMap mmap;
};

LyapunovSetup lyapunov_setup(const json& cfg, const PayoffHull& S) {
  const auto map = io::value_or<std::string>(cfg, "map", "all_good");
  const double eps = io::value_or<double>(cfg, "eps", 0.4);
  if (!(eps > 0)) throw ConfigError("eps must be positive");
  std::vector<int> dirs;
  double c = 0, delta = 0;
  MultiMap mm;
  if (map == "all_good") {
    dirs = {1, 2, 3, 4, 5, 6};
    c = eps / kSqrt2;
    delta = c / 2;
    mm = projected_all_good_map(S, eps);
  } else if (map == "two_good") {
    const double eta = io::value_or<double>(cfg, "eta", 0.1);
    dirs = {1, 2, 3, 6};
    c = (eps + eta) / kSqrt2;
    delta = eta / (2 * kSqrt2);
    mm = projected_two_good_map(S, eps);
  } else {
    throw ConfigError("unknown map " + map + " (expected all_good or two_good)");
  }
  dirs = io::value_or<std::vector<int>>(cfg, "dirs", dirs);
  c = io::value_or<double>(cfg, "c", c);
  delta = io::value_or<double>(cfg, "delta", delta);
  std::vector<Vec3> vs;
  try {
    for (int k : dirs) vs.push_back(direction(k));
    return {map, eps, dirs, SupportSpec(vs, c, delta), mm};
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

json spec_json(const LyapunovSetup& s) {
  return {{"map", s.map}, {"eps", s.eps}, {"dirs", s.dirs}, {"c", s.spec.c}, {"delta", s.spec.delta}};
}

int cmd_certify(const std::string& kind, const json& cfg, double pitch_o, const std::string& out_name) {
  const auto path = output_path(out_name.empty() ? "certify_" + kind + ".json" : out_name);
  json out;
  bool holds = false;

  if (kind == "blackwell") {
    const double h = pitch_o > 0 ? pitch_o : io::value_or<double>(cfg, "grid_pitch", 0.25);
    const auto map = io::value_or<std::string>(cfg, "map", "example1");
    const auto region = io::value_or<std::string>(cfg, "region", map == "example1" ? "segment" : "triangle");
    const long N = io::value_or<long>(cfg, "N", 10000);
    const auto n0 = io::value_or<std::size_t>(cfg, "n0", 1);
    if (N < 1 || n0 < 1 || n0 > static_cast<std::size_t>(N)) throw ConfigError("need 1 <= n0 <= N");
    std::vector<Vec3> domain, starts;
    std::optional<ProximalOracle> oracle;
    std::function<Vec3(const Vec3&)> phi;
    if (map == "example1") {
      const Vec3 a = cfg.contains("a") ? io::parse_vec3(cfg.at("a")) : Vec3{0, -1, 0};
      const Vec3 b = cfg.contains("b") ? io::parse_vec3(cfg.at("b")) : Vec3{2, 1, 0};
      if (!(a[1] < 0 && b[1] > 0) || a[0] == b[0]) throw ConfigError("need a2 < 0 < b2 and a1 != b1");
      const Vec3 d = a + (-a[1] / (b[1] - a[1])) * (b - a);
      if (region == "line") oracle = ProximalOracle::line(d, {1, 0, 0});
      else if (region == "segment") oracle = ProximalOracle::segment(a, b);
      else if (region == "point") oracle = ProximalOracle::point(d);
      else throw ConfigError("example1 regions: line, segment, point");
      phi = Example1Map{a, b};
      Vec3 lo{std::floor(std::min(a[0], b[0])) - 1, std::floor(a[1]) - 1, 0};
      Vec3 hi{std::ceil(std::max(a[0], b[0])) + 1, std::ceil(b[1]) + 1, 0};
      domain = box_grid(lo, hi, h);
      starts = cfg.contains("starts") ? points_from(cfg.at("starts")) : std::vector<Vec3>{lo, hi, {lo[0], hi[1], 0}};
      out["d"] = io::vec_json(d);
    } else if (map == "example2") {
      const double eps = io::value_or<double>(cfg, "eps", 0.4);
      if (!(eps > 0 && eps < 0.5)) throw ConfigError("eps must lie in (0, 1/2)");
      const GameParams g = kExampleGame;
      const auto v = vertices(g);
      const Vec3 D{26 - eps / 2, 26 - eps / 2, 26 + eps / 2};
      if (region == "triangle") oracle = ProximalOracle::hull({v.C1[2], v.C2[2], D});
      else if (region == "segments") oracle = ProximalOracle::segments({{v.B, D}, {D, v.C1[2]}});
      else if (region == "bd") oracle = ProximalOracle::segment(v.B, D);
      else throw ConfigError("example2 regions: triangle, segments, bd");
      phi = InducedMap({good_strategy(0, eps, g), good_strategy(1, eps, g), example2_defector(g, eps)}, g);
      domain = example2_z_samples(g, h);
      starts = cfg.contains("starts") ? points_from(cfg.at("starts")) : example2_default_starts(eps);
    } else {
      throw ConfigError("unknown map " + map + " (expected example1 or example2)");
    }
    const auto bw = check_blackwell(phi, *oracle, domain, h);
    double maxd = 0;
    std::size_t violations = 0;
    for (const auto& x1 : starts) {
      auto f = phi;
      const Trajectory t = iterate(f, x1, static_cast<std::size_t>(N));
      maxd = std::max(maxd, oracle->distance_to(t.final_mean()));
      if (bw.holds) violations += decay_bound_check(t, *oracle, n0).violations;
    }
    holds = bw.holds;
    out["holds"] = holds;
    if (bw.witness) out["witness"] = io::witness_json(*bw.witness);
    out["grid_pitch"] = h;
    out["max_distance"] = maxd;
    out["n0"] = n0;
    out["horizon"] = N;
    out["map"] = map;
    out["region"] = region;
    out["samples"] = bw.samples;
    if (bw.holds) out["decay_violations"] = violations;
  } else if (kind == "lyapunov" || kind == "decrease") {
    const double h = pitch_o > 0 ? pitch_o : io::value_or<double>(cfg, "grid_pitch", 0.25);
    const PayoffHull S(io::game_from_config(cfg));
    const auto setup = lyapunov_setup(cfg, S);
    const auto grid = plane_grid_outside(S, setup.spec, h);
    if (grid.empty()) throw ConfigError("no grid samples outside the sublevel set");
    json constants = spec_json(setup);
    out["kind"] = kind;
    out["grid_pitch"] = h;
    if (kind == "lyapunov") {
      const bool sufficient = io::value_or<bool>(cfg, "sufficient", setup.map == "all_good");
      const auto r = check_lyapunov(setup.spec, setup.mmap, grid, sufficient);
      holds = r.holds;
      out["samples"] = r.samples;
      if (r.witness)
        out["witness"] = {{"x", io::vec_json(r.witness->x)},
                          {"direction", setup.dirs[r.witness->index]},
                          {"omega", io::vec_json(r.witness->omega)},
                          {"value", r.witness->value}};
    } else {
      LyapunovConstants k;
      try {
        k = t1_constants(setup.spec, io::value_or<double>(cfg, "M", plane_radius(S)));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      if (cfg.contains("gamma")) k.gamma = io::number(cfg, "gamma");
      constants["t1"] = io::constants_json(k);
      const auto r = decrease_check(setup.spec, setup.mmap, k, grid);
      holds = r.holds;
      out["checks"] = r.checks;
      if (r.witness)
        out["witness"] = {{"x", io::vec_json(r.witness->x)},
                          {"omega", io::vec_json(r.witness->omega)},
                          {"alpha", r.witness->alpha},
                          {"lhs", r.witness->lhs},
                          {"rhs", r.witness->rhs}};
    }
    out["constants"] = constants;
    out["holds"] = holds;
  } else if (kind == "entrapment") {
    const GameParams g = io::game_from_config(cfg);
    const PayoffHull S(g);
    const auto setup = lyapunov_setup(cfg, S);
    if (setup.map != "all_good") throw ConfigError("entrapment runs the all-good profile");
    const double factor = io::value_or<double>(cfg, "c1_factor", 1.5);
    const long N = io::value_or<long>(cfg, "N", 100000);
    if (N < 1 || !(factor > 1)) throw ConfigError("need N >= 1 and c1_factor > 1");
    const Vec3 x1 = start_from(cfg, g, vertices(g).A);
    InducedMap phi(all_good_profile(g, setup.eps), g);
    const auto t = iterate(phi, x1, static_cast<std::size_t>(N));
    const auto r = entrapment_check(setup.spec, t, factor * setup.spec.c);
    holds = r.found;
    json constants = spec_json(setup);
    constants["c1"] = factor * setup.spec.c;
    out = {{"kind", kind}, {"holds", holds}, {"constants", constants}, {"grid_pitch", nullptr},
           {"start", io::vec_json(x1)}, {"horizon", N}};
    if (r.found) out["entry"] = r.entry, out["tail_max"] = r.tail_max;
  } else {
    throw ConfigError("unknown kind " + kind + " (expected blackwell, lyapunov, decrease or entrapment)");
  }

  write_json(path, out);
  std::cout << kind << ": " << (holds ? "holds" : "violated") << "\n";
  return holds ? kPass : kFalse;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated three-player investment game: eps-good strategies and their certificates"};
  app.require_subcommand(1);
  std::string out_name, config_file;

  auto* validate = app.add_subcommand("validate", "check a game file against the admissibility inequalities");
  std::string game_file;
  validate->add_option("game", game_file, "game JSON file")->required();
  validate->add_option("-o,--output", out_name, "report file name");

  auto* simulate = app.add_subcommand("simulate", "write the trajectory of a strategy profile as CSV");
  long N = 0;
  simulate->add_option("-c,--config", config_file, "run config JSON")->required();
  simulate->add_option("-N,--horizon", N, "override the horizon")->check(CLI::PositiveNumber);
  simulate->add_option("-o,--output", out_name, "CSV file name");

  auto* verify = app.add_subcommand("verify", "reproduce a theorem or example and report every cell");
  std::string theorem;
  double eps = 0, slack = -1;
  verify->add_option("theorem", theorem, "t3, t4, t2, example1 or example2")->required();
  verify->add_option("-c,--config", config_file, "run config JSON");
  verify->add_option("--eps", eps, "override eps")->check(CLI::PositiveNumber);
  verify->add_option("-N,--horizon", N, "override the horizon")->check(CLI::PositiveNumber);
  verify->add_option("--slack", slack, "override the payoff slack")->check(CLI::NonNegativeNumber);
  verify->add_option("-o,--output", out_name, "report file name");

  auto* certify = app.add_subcommand("certify", "grid-certify a Blackwell or Lyapunov condition");
  std::string kind;
  double pitch = 0;
  certify->add_option("kind", kind, "blackwell, lyapunov, decrease or entrapment")->required();
  certify->add_option("-c,--config", config_file, "certification config JSON");
  certify->add_option("--grid-pitch", pitch, "override the grid pitch")->check(CLI::PositiveNumber);
  certify->add_option("-o,--output", out_name, "report file name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kPass;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate) return cmd_validate(game_file, out_name.empty() ? "validate.json" : out_name);
    if (*simulate) return cmd_simulate(load_config(config_file), N, out_name);
    if (*verify) return cmd_verify(theorem, load_config(config_file), eps, N, slack, out_name);
    if (*certify) return cmd_certify(kind, load_config(config_file), pitch, out_name);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NonFiniteParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InadmissibleGame& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const io::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
