// Acceptance suite: one PASS/FAIL line per criterion. Usage:
//   acceptance <path-to-goodplay-cli>
// Exit status is the number of failing criteria (capped at 1).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "goodplay/approachability.hpp"
#include "goodplay/harness.hpp"
#include "goodplay/lyapunov.hpp"

using namespace goodplay;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr std::size_t kN = 100000;
constexpr double kEps = 0.4;
constexpr double kT3Dist = 0.1;
constexpr double kT3Seconds = 10.0;
constexpr double kPayoffSlack = 0.05;
constexpr double kDistSlack = 0.1;
constexpr double kDistGridPitch = 0.05;
constexpr double kEx2Tol = 0.1;
constexpr double kEx1Tol = 0.05;
constexpr std::size_t kEx1Starts = 20;
constexpr double kLyapunovPitch = 0.25;
constexpr double kEta = 0.1;
constexpr std::size_t kRegionSamples = 100000;
constexpr std::size_t kScalarSequences = 100;
constexpr std::size_t kScalarN = 10000;
constexpr double kScalarSlack = 10.0 / kScalarN;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  failures += ok ? 0 : 1;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::size_t failed_cells(const HarnessReport& r) {
  std::size_t n = 0;
  for (const auto& c : r.cells) n += c.pass ? 0 : 1;
  return n;
}

HarnessConfig base_config() {
  HarnessConfig c;
  c.eps = kEps;
  c.N = kN;
  c.slack = kPayoffSlack;
  c.dist_slack = kDistSlack;
  c.grid_pitch = kDistGridPitch;
  return c;
}

std::vector<Vec3> example1_starts() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<Vec3> out;
  for (std::size_t k = 0; k < kEx1Starts; ++k) {
    const double x = u(rng);
    out.push_back({x, u(rng), 0});
  }
  return out;
}

void t3() {
  auto cfg = base_config();
  cfg.dist_slack = kT3Dist;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = verify_t3(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0;
  for (const auto& c : r.cells) worst = std::max(worst, c.measured);
  report(r.pass() && r.cells.size() == 9 && secs < kT3Seconds, "all_good_converges_to_B",
         fmt("9 starts, max dist %.3g (<= %.2g), %.2f s", worst, kT3Dist, secs));
}

void t4() {
  const auto cfg = base_config();
  const auto battery = standard_battery(cfg.params, cfg.eps);
  const auto r = verify_t4(cfg, battery);
  double worst = -INFINITY;
  for (const auto& c : r.cells) worst = std::max(worst, c.measured);
  report(r.pass() && battery.size() == 13, "single_deviant_capped",
         fmt("%.0f cells, max tail x3 %.5f <= %.5f", static_cast<double>(r.cells.size()), worst,
             26 + 2 * kEps / 3 + kPayoffSlack));
}

void t2() {
  const auto cfg = base_config();
  const auto battery = standard_battery(cfg.params, cfg.eps);
  const auto r = verify_t2(cfg, all_pairs(battery));
  double min_x1 = INFINITY, max_sum = -INFINITY, max_dist = 0;
  for (const auto& c : r.cells) {
    if (c.check == "tail_min_good") min_x1 = std::min(min_x1, c.measured);
    if (c.check == "tail_max_deviant_sum") max_sum = std::max(max_sum, c.measured);
    if (c.check == "dist_to_V") max_dist = std::max(max_dist, c.measured);
  }
  report(r.pass(), "good_player_safe_against_pairs",
         fmt("min tail x1 %.4f, max tail x2+x3 %.4f, max dist to V1 %.4f", min_x1, max_sum, max_dist) + ", " +
             std::to_string(failed_cells(r)) + "/" + std::to_string(r.cells.size()) + " cells fail");
}

void example2() {
  bool ok = true;
  std::string detail;
  for (double eps : {0.1, 0.4}) {
    const auto r = run_example2(eps, example2_default_starts(eps), kN, kEx2Tol);
    double dist = 0, tail = INFINITY;
    for (const auto& c : r.harness.cells) {
      if (c.check == "dist_to_D") dist = std::max(dist, c.measured);
      if (c.check == "tail_min_x3_above_p3") tail = std::min(tail, c.measured);
    }
    ok = ok && r.harness.pass();
    detail += fmt("eps=%.1f: max |x-D| %.2g, min tail x3 %.4f; ", eps, dist, tail);
  }
  report(ok, "defector_reaches_D", detail);
}

void example1() {
  const auto r = run_example1({0, -1, 0}, {2, 1, 0}, example1_starts(), kN, kEx1Tol, 0.1);
  double worst = 0;
  for (const auto& c : r.harness.cells)
    if (c.check == "dist_to_d") worst = std::max(worst, c.measured);
  const bool ok = r.harness.pass() && r.line.holds && r.segment.holds && !r.point.holds && r.point.witness;
  report(ok, "planar_example_limit_and_blackwell",
         fmt("max |x-d| %.2g; line/segment ", worst) + (r.line.holds ? "holds" : "fails") + "/" +
             (r.segment.holds ? "holds" : "fails") + ", singleton witness inner " +
             (r.point.witness ? fmt("%.3g", r.point.witness->inner) : std::string("none")));
}

void decay() {
  std::size_t violations = 0, segments = 0, checked = 0, sharp = 0;
  auto add = [&](const Trajectory& t, const ProximalOracle& o) {
    const auto r = decay_bound_check(t, o, 1);
    violations += r.violations;
    segments += r.segments;
    checked += r.checked;
    sharp += r.sharp_violations;
  };
  const Vec3 a{0, -1, 0}, b{2, 1, 0}, d{1, 0, 0};
  for (const auto& x1 : example1_starts()) {
    Example1Map f{a, b};
    const auto t = iterate(f, x1, kN);
    add(t, ProximalOracle::segment(a, b));
    add(t, ProximalOracle::line(d, {1, 0, 0}));
    add(t, ProximalOracle::point(d));
  }
  const auto& g = kExampleGame;
  const auto v = vertices(g);
  const Vec3 D{26 - kEps / 2, 26 - kEps / 2, 26 + kEps / 2};
  for (const auto& x1 : example2_default_starts(kEps)) {
    InducedMap phi({good_strategy(0, kEps, g), good_strategy(1, kEps, g), example2_defector(g, kEps)}, g);
    const auto t = iterate(phi, x1, kN);
    add(t, ProximalOracle::hull({v.C1[2], v.C2[2], D}));
    add(t, ProximalOracle::segments({{v.B, D}, {D, v.C1[2]}}));
  }
  for (const auto& w : default_starts()) {
    InducedMap phi(all_good_profile(g, kEps), g);
    const auto t = iterate(phi, hull_point(v, w), kN);
    add(t, ProximalOracle::point(v.B));
  }
  report(violations == 0 && segments > 0, "squared_distance_decay",
         std::to_string(checked) + " stages on " + std::to_string(segments) + " verified runs, " +
             std::to_string(violations) + " violations (" + std::to_string(sharp) + " against the 1/n^2 form)");
}

void lyapunov() {
  const PayoffHull S(kExampleGame);
  const double M = plane_radius(S);
  bool ok = true;
  std::string detail;
  for (double c : {0.1, 0.3}) {
    const auto spec = plane_support({1, 2, 3, 4, 5, 6}, c, c / 2);
    const auto grid = plane_grid_outside(S, spec, kLyapunovPitch);
    const auto mm = projected_all_good_map(S, kEps);
    const auto r = check_lyapunov(spec, mm, grid, true);
    const auto dr = decrease_check(spec, mm, t1_constants(spec, M), grid);
    ok = ok && r.holds && dr.holds;
    detail += fmt("all-good c=%.1f: ", c) + (r.holds ? "holds" : "fails") + "/" +
              (dr.holds ? "decreases" : "no decrease") + "; ";
  }
  {
    const double c = (kEps + kEta) / kSqrt2;
    const auto spec = plane_support({1, 2, 3, 6}, c, kEta / (2 * kSqrt2));
    const auto grid = plane_grid_outside(S, spec, kLyapunovPitch);
    const auto mm = projected_two_good_map(S, kEps);
    const auto r = check_lyapunov(spec, mm, grid);
    const auto dr = decrease_check(spec, mm, t1_constants(spec, M), grid);
    ok = ok && r.holds && dr.holds;
    detail += std::string("two-good: ") + (r.holds ? "holds" : "fails") + "/" +
              (dr.holds ? "decreases" : "no decrease") + "; ";
  }
  {
    const double c = kEps / kSqrt2;
    const auto spec = plane_support({1, 2, 3, 4, 5, 6}, c, c / 2);
    std::size_t worst_entry = 0;
    bool trapped = true;
    for (const auto& w : default_starts()) {
      InducedMap phi(all_good_profile(kExampleGame, kEps), kExampleGame);
      const auto t = iterate(phi, hull_point(S.verts(), w), kN);
      const auto r = entrapment_check(spec, t, 1.5 * c);
      trapped = trapped && r.found && r.tail_max < 1.5 * c;
      worst_entry = std::max(worst_entry, r.entry);
    }
    ok = ok && trapped;
    detail += "entrapment " + std::string(trapped ? "found" : "missing") + ", latest entry " +
              std::to_string(worst_entry);
  }
  report(ok, "lyapunov_certificates", detail);
}

void regions() {
  const auto& g = kExampleGame;
  const auto v = vertices(g);
  std::mt19937_64 rng(2718);
  std::size_t bad_algebra = 0, bad_equiv = 0;
  for (std::size_t n = 0; n < kRegionSamples; ++n) {
    const Vec3 x = hull_point(v, random_weights(rng));
    for (double eps : {0.1, 0.4})
      for (std::size_t i = 0; i < 3; ++i) {
        const auto [j, k] = detail::others(i);
        const bool vi = in_v(g, x, i, eps), vj = in_v(g, x, j, eps), vk = in_v(g, x, k, eps);
        if (in_omega_max(x, i) && in_w(g, x, i)) ++bad_algebra;
        if (vi && !vj && !vk && !in_omega_max(x, i)) ++bad_algebra;
        if (vi && !vj && !(in_omega_max(x, i) || in_phi_min(x, j))) ++bad_algebra;
        if (vi && !vk && !(in_omega_max(x, i) || in_phi_min(x, k))) ++bad_algebra;
        if (!vi && vj && vk && !in_phi_min(x, i)) ++bad_algebra;
      }
    for (double eps : {0.1, 0.4}) {
      const bool omega = in_omega_eps(x, 0, eps) && in_omega_eps(x, 1, eps) && in_omega_eps(x, 2, eps);
      if (omega != in_delta(project_plane(x), {1, 2, 3, 4, 5, 6}, eps / kSqrt2)) ++bad_equiv;
    }
  }
  report(bad_algebra == 0 && bad_equiv == 0, "region_algebra",
         std::to_string(kRegionSamples) + " samples, " + std::to_string(bad_algebra) + " inclusion and " +
             std::to_string(bad_equiv) + " equivalence counterexamples");
}

void scalar_means() {
  // Terms in [-5, 5]; whenever the running mean is positive the next term is
  // non-positive, except for a random burn-in of up to 100 free terms.
  std::mt19937_64 rng(31415);
  std::uniform_real_distribution<double> hi(0.0, 5.0), lo(-5.0, 0.0), any(-5.0, 5.0);
  std::uniform_int_distribution<int> burn(0, 100);
  double worst = -INFINITY;
  for (std::size_t s = 0; s < kScalarSequences; ++s) {
    const int b = burn(rng);
    std::vector<double> a;
    double total = 0;
    for (std::size_t n = 0; n < kScalarN; ++n) {
      double next;
      if (static_cast<int>(n) < b) next = any(rng);
      else if (n > 0 && total / static_cast<double>(n) > 0) next = lo(rng);
      else next = s % 2 ? hi(rng) : any(rng);
      a.push_back(next);
      total += next;
    }
    worst = std::max(worst, tail_max(running_means(a), 0.5));
  }
  report(worst <= kScalarSlack, "scalar_means_stay_below_level",
         fmt("max tail mean %.3g <= %.3g over 100 sequences", worst, kScalarSlack));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism(const char* cli) {
  if (!cli) {
    report(false, "simulate_is_deterministic", "no CLI path given");
    return;
  }
  const fs::path dir = fs::temp_directory_path() / "goodplay_acceptance";
  fs::create_directories(dir);
  const fs::path cfg = dir / "sim.json";
  std::ofstream(cfg) << R"({"strategies":[{"kind":"good","eps":0.4},{"kind":"random","p":0.5,"seed":42},)"
                     << R"({"kind":"random","p":0.3,"seed":7}],"start":[28,28,10],"N":20000})";
  std::string out[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path csv = dir / ("run" + std::to_string(k) + ".csv");
    fs::remove(csv);
    const std::string cmd = "GOODPLAY_OUT_DIR='" + dir.string() + "' '" + cli + "' simulate -c '" + cfg.string() +
                            "' -o run" + std::to_string(k) + ".csv > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      report(false, "simulate_is_deterministic", "CLI run failed");
      return;
    }
    out[k] = slurp(csv);
  }
  report(!out[0].empty() && out[0] == out[1], "simulate_is_deterministic",
         std::to_string(out[0].size()) + " bytes, identical: " + (out[0] == out[1] ? "yes" : "no"));
}

}  // namespace

int main(int argc, char** argv) {
  t3();
  t4();
  t2();
  example2();
  example1();
  decay();
  lyapunov();
  regions();
  scalar_means();
  determinism(argc > 1 ? argv[1] : nullptr);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
