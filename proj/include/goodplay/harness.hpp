#pragma once

// End-to-end reproduction runs: every (start, deviant) combination becomes a
// cell with a measured value, the bound it is held to and the signed margin.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "goodplay/approachability.hpp"
#include "goodplay/dynamics.hpp"
#include "goodplay/geometry.hpp"
#include "goodplay/stage_game.hpp"
#include "goodplay/strategies.hpp"

namespace goodplay {

struct HarnessConfig {
  GameParams params = kExampleGame;
  double eps = 0.4;
  std::vector<HullWeights> starts = default_starts();
  std::size_t N = 100000;
  double w = 0.5;             // tail window
  double slack = 0.05;        // tolerance on payoff bounds
  double dist_slack = 0.1;    // tolerance on distances to regions
  double grid_pitch = 0.05;   // pitch for grid distances and Blackwell samples

  void validate() const {
    if (!(eps > 0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive");
    if (N < 1000) throw std::invalid_argument("horizon must be at least 1000");
    if (starts.empty()) throw std::invalid_argument("no starts");
    if (!(w > 0 && w < 1)) throw std::invalid_argument("tail window must lie in (0, 1)");
    if (!(slack >= 0) || !(dist_slack >= 0)) throw std::invalid_argument("slack must be non-negative");
    if (!(grid_pitch > 0)) throw std::invalid_argument("grid pitch must be positive");
    require_admissible(params);
  }
};

enum class Sense { kAtMost, kAtLeast, kAbove };

struct Cell {
  std::string theorem;
  std::string check;
  Vec3 start;
  std::vector<std::string> deviants;
  std::size_t N = 0;
  double measured = 0;
  double bound = 0;
  double tolerance = 0;
  Sense sense = Sense::kAtMost;
  double margin = 0;  // positive means inside the bound, tolerance excluded
  bool pass = false;
  std::optional<std::size_t> first_entry;  // first stage with the mean in V_1 ∩ V_2 ∩ V_3
};

inline Cell make_cell(std::string theorem, std::string check, const Vec3& start, std::vector<std::string> deviants,
                      std::size_t N, double measured, double bound, double tol, Sense sense) {
  Cell c{std::move(theorem), std::move(check), start, std::move(deviants), N, measured, bound, tol, sense};
  switch (sense) {
    case Sense::kAtMost:
      c.margin = bound - measured;
      c.pass = measured <= bound + tol;
      break;
    case Sense::kAtLeast:
      c.margin = measured - bound;
      c.pass = measured >= bound - tol;
      break;
    case Sense::kAbove:
      c.margin = measured - bound;
      c.pass = measured > bound;
      break;
  }
  return c;
}

struct HarnessReport {
  std::vector<Cell> cells;
  bool pass() const {
    if (cells.empty()) return false;
    for (const auto& c : cells)
      if (!c.pass) return false;
    return true;
  }
};

/// constant I, constant NI, random(0.5) under ten seeds derived from
/// `base_seed`, and the worked-example defector when the game admits it.
inline std::vector<Strategy> standard_battery(const GameParams& g, double eps, std::uint64_t base_seed = 2024) {
  std::vector<Strategy> out{constant_strategy(Action::I), constant_strategy(Action::NI)};
  for (std::uint64_t k = 0; k < 10; ++k) out.push_back(random_strategy(0.5, derive_seed(base_seed, k)));
  if (g == kExampleGame && eps > 0 && eps < 0.5) out.push_back(example2_defector(g, eps));
  return out;
}

namespace detail {

inline std::vector<Vec3> start_points(const HarnessConfig& cfg) {
  const auto v = vertices(cfg.params);
  std::vector<Vec3> out;
  for (const auto& w : cfg.starts) out.push_back(hull_point(v, w));
  return out;
}

inline bool in_all_v(const GameParams& g, const Vec3& x, double eps) {
  return in_v(g, x, 0, eps) && in_v(g, x, 1, eps) && in_v(g, x, 2, eps);
}

}  // namespace detail

/// All players eps-good: the mean must end within dist_slack of B.
inline HarnessReport verify_t3(const HarnessConfig& cfg) {
  cfg.validate();
  HarnessReport rep;
  const Vec3 B = vertices(cfg.params).B;
  for (const auto& x1 : detail::start_points(cfg)) {
    InducedMap phi(all_good_profile(cfg.params, cfg.eps), cfg.params);
    const Trajectory t = iterate(phi, x1, cfg.N);
    Cell c = make_cell("t3", "dist_to_B", x1, {}, cfg.N, distance(t.final_mean(), B), 0.0, cfg.dist_slack,
                       Sense::kAtMost);
    for (std::size_t k = 0; k < t.horizon(); ++k)
      if (detail::in_all_v(cfg.params, t.means[k], cfg.eps)) {
        c.first_entry = k + 1;
        break;
      }
    rep.cells.push_back(std::move(c));
  }
  return rep;
}

/// Two eps-good players and one deviant in slot `player`: the deviant's tail
/// average must stay below p3 + 2 eps / 3.
inline HarnessReport verify_t4(const HarnessConfig& cfg, const std::vector<Strategy>& deviants,
                               std::size_t player = 2) {
  cfg.validate();
  if (player > 2) throw std::out_of_range("player index must be 0..2");
  HarnessReport rep;
  const double bound = cfg.params.p3 + 2.0 * cfg.eps / 3.0;
  for (const auto& x1 : detail::start_points(cfg))
    for (const auto& dev : deviants) {
      StrategyProfile prof = all_good_profile(cfg.params, cfg.eps);
      prof[player] = dev;
      InducedMap phi(std::move(prof), cfg.params);
      const Trajectory t = iterate(phi, x1, cfg.N);
      const double m = tail_limsup(t, coordinate(player), cfg.w);
      rep.cells.push_back(make_cell("t4", "tail_max_deviant", x1, {dev.name()}, cfg.N, m, bound, cfg.slack,
                                    Sense::kAtMost));
    }
  return rep;
}

/// One eps-good player in slot `player` against a deviant pair in the other
/// two slots (in increasing index order). Three checks per run: the good
/// player's tail minimum, the deviants' tail sum and the final distance to
/// the closure of the good player's V region.
inline HarnessReport verify_t2(const HarnessConfig& cfg, const std::vector<std::pair<Strategy, Strategy>>& pairs,
                               std::size_t player = 0) {
  cfg.validate();
  if (player > 2) throw std::out_of_range("player index must be 0..2");
  HarnessReport rep;
  const auto [j, k] = detail::others(player);
  const PayoffHull S(cfg.params);
  const RegionSpec vreg = VRegion{player, cfg.eps};
  for (const auto& x1 : detail::start_points(cfg))
    for (const auto& [d1, d2] : pairs) {
      StrategyProfile prof = all_good_profile(cfg.params, cfg.eps);
      prof[j] = d1;
      prof[k] = d2;
      InducedMap phi(std::move(prof), cfg.params);
      const Trajectory t = iterate(phi, x1, cfg.N);
      const std::vector<std::string> names{d1.name(), d2.name()};
      const auto own = tail_stats(t, coordinate(player), cfg.w);
      const auto sum = tail_stats(t, [j = j, k = k](const Vec3& x) { return x[j] + x[k]; }, cfg.w);
      const auto d = dist_to_region(S, vreg, t.final_mean(), cfg.grid_pitch);
      rep.cells.push_back(make_cell("t2", "tail_min_good", x1, names, cfg.N, own.min, cfg.params.r0, cfg.slack,
                                    Sense::kAtLeast));
      rep.cells.push_back(make_cell("t2", "tail_max_deviant_sum", x1, names, cfg.N, sum.max, 2 * cfg.params.p3,
                                    cfg.slack, Sense::kAtMost));
      rep.cells.push_back(make_cell("t2", "dist_to_V", x1, names, cfg.N, d.distance, 0.0,
                                    cfg.dist_slack + d.error_bound, Sense::kAtMost));
    }
  return rep;
}

/// Every ordered pair drawn from the battery.
inline std::vector<std::pair<Strategy, Strategy>> all_pairs(const std::vector<Strategy>& battery) {
  std::vector<std::pair<Strategy, Strategy>> out;
  for (const auto& a : battery)
    for (const auto& b : battery) out.emplace_back(a, b);
  return out;
}

// ---------------------------------------------------------------------------
// The planar example: phi = a above the axis, b on or below it.

struct Example1Map {
  Vec3 a, b;
  Vec3 operator()(const Vec3& x) const { return x[1] > 0 ? a : b; }
};

struct Example1Report {
  HarnessReport harness;
  Vec3 d;
  BlackwellReport line, segment, point;
};

/// a, b live in the plane x3 = 0. Starts are planar too.
inline Example1Report run_example1(const Vec3& a, const Vec3& b, const std::vector<Vec3>& starts, std::size_t N,
                                   double tol, double pitch = 0.1) {
  if (!(a[1] < 0 && b[1] > 0) || a[0] == b[0] || a[2] != 0 || b[2] != 0)
    throw std::invalid_argument("need a2 < 0 < b2, a1 != b1 and planar points");
  if (starts.empty()) throw std::invalid_argument("no starts");
  Example1Report rep;
  const double t = -a[1] / (b[1] - a[1]);
  rep.d = a + t * (b - a);
  const Example1Map phi{a, b};
  for (const auto& x1 : starts) {
    if (x1[2] != 0) throw std::invalid_argument("starts must be planar");
    Example1Map f = phi;
    const Trajectory tr = iterate(f, x1, N);
    rep.harness.cells.push_back(make_cell("example1", "dist_to_d", x1, {}, N, distance(tr.final_mean(), rep.d), 0.0,
                                          tol, Sense::kAtMost));
  }
  Vec3 lo = rep.d, hi = rep.d;
  auto widen = [&](const Vec3& p) {
    for (std::size_t i = 0; i < 2; ++i) lo[i] = std::min(lo[i], p[i]), hi[i] = std::max(hi[i], p[i]);
  };
  widen(a), widen(b);
  for (const auto& s : starts) widen(s);
  for (std::size_t i = 0; i < 2; ++i) lo[i] = std::floor(lo[i]) - 1, hi[i] = std::ceil(hi[i]) + 1;
  const auto domain = box_grid(lo, hi, pitch);
  rep.line = check_blackwell(phi, ProximalOracle::line(rep.d, {1, 0, 0}), domain, pitch);
  rep.segment = check_blackwell(phi, ProximalOracle::segment(a, b), domain, pitch);
  rep.point = check_blackwell(phi, ProximalOracle::point(rep.d), domain, pitch);
  auto bw_cell = [&](const char* name, const BlackwellReport& r, bool expect) {
    Cell c = make_cell("example1", name, rep.d, {}, N, r.witness ? r.witness->inner : 0.0, 0.0, kBlackwellTol,
                       Sense::kAtMost);
    c.pass = r.holds == expect;
    rep.harness.cells.push_back(std::move(c));
  };
  bw_cell("blackwell_line", rep.line, true);
  bw_cell("blackwell_segment", rep.segment, true);
  bw_cell("blackwell_point_violated", rep.point, false);
  return rep;
}

// ---------------------------------------------------------------------------
// The worked-example deviation, run on Z = {x in S : x1 = x2}.

struct Example2Report {
  HarnessReport harness;
  Vec3 D;
  BlackwellReport triangle, segments;
  RefinementReport refinement;
  std::vector<IntersectionReport> intersections;
};

inline std::vector<Vec3> example2_z_samples(const GameParams& g, double h) {
  const auto v = vertices(g);
  auto out = ProximalOracle::hull({v.A, v.C1[2], v.B}).sample(h);
  const auto more = ProximalOracle::hull({v.A, v.B, v.C2[2]}).sample(h);
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

/// A, B, C1_3, C2_3, D and the centroid of Z.
inline std::vector<Vec3> example2_default_starts(double eps) {
  const auto v = vertices(kExampleGame);
  const Vec3 D{26 - eps / 2, 26 - eps / 2, 26 + eps / 2};
  return {v.A, v.B, v.C1[2], v.C2[2], D, (v.A + v.B + v.C1[2] + v.C2[2]) / 4.0};
}

inline Example2Report run_example2(double eps, const std::vector<Vec3>& starts, std::size_t N, double tol,
                                   double pitch = 0.05,
                                   std::vector<std::pair<double, double>> schedule = {{0.5, 0.2}, {0.2, 0.1}},
                                   double w = 0.5) {
  if (!(eps > 0 && eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
  if (starts.empty()) throw std::invalid_argument("no starts");
  const GameParams g = kExampleGame;
  const PayoffHull S(g);
  for (const auto& x : starts)
    if (std::abs(x[0] - x[1]) > 1e-9 || !S.contains(x)) throw std::invalid_argument("start outside Z");
  Example2Report rep;
  const auto v = vertices(g);
  rep.D = {26 - eps / 2, 26 - eps / 2, 26 + eps / 2};
  const InducedMap phi({good_strategy(0, eps, g), good_strategy(1, eps, g), example2_defector(g, eps)}, g);
  const std::string dev = phi.profile()[2].name();

  const auto tri = ProximalOracle::hull({v.C1[2], v.C2[2], rep.D});
  const auto bd = ProximalOracle::segment(v.B, rep.D);
  const auto two = ProximalOracle::segments({{v.B, rep.D}, {rep.D, v.C1[2]}});
  for (const auto& x1 : starts) {
    InducedMap f = phi;
    const Trajectory t = iterate(f, x1, N);
    rep.harness.cells.push_back(
        make_cell("example2", "dist_to_D", x1, {dev}, N, distance(t.final_mean(), rep.D), 0.0, tol, Sense::kAtMost));
    rep.harness.cells.push_back(make_cell("example2", "tail_min_x3_above_p3", x1, {dev}, N,
                                          tail_liminf(t, coordinate(2), w), g.p3, 0.0, Sense::kAbove));
    rep.intersections.push_back(intersect_attractors(t, bd, tri, tol, pitch));
    const auto& ir = rep.intersections.back();
    Cell c = make_cell("example2", "dist_to_sampled_intersection", x1, {dev}, N, ir.dist_intersection, 0.0,
                       tol + pitch * std::sqrt(3.0), Sense::kAtMost);
    c.pass = c.pass && ir.pass;
    rep.harness.cells.push_back(std::move(c));
  }

  const auto domain = example2_z_samples(g, pitch);
  InducedMap f1 = phi, f2 = phi;
  rep.triangle = check_blackwell(f1, tri, domain, pitch);
  rep.segments = check_blackwell(f2, two, domain, pitch);
  rep.refinement = refine_attractor(phi, two, bd, schedule, domain, pitch, starts, N, tol);
  auto flag = [&](const char* name, bool ok) {
    Cell c = make_cell("example2", name, rep.D, {dev}, N, ok ? 1.0 : 0.0, 1.0, 0.0, Sense::kAtLeast);
    rep.harness.cells.push_back(std::move(c));
  };
  flag("blackwell_triangle", rep.triangle.holds);
  flag("blackwell_segments", rep.segments.holds);
  flag("refinement_to_BD", rep.refinement.pass);
  return rep;
}

}  // namespace goodplay
