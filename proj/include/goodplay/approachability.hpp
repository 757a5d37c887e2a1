#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "goodplay/dynamics.hpp"
#include "goodplay/polytope.hpp"
#include "goodplay/vec.hpp"

namespace goodplay {

struct Segment {
  Vec3 a, b;
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Nearest-point oracle Π_A for the closed sets the attractor arguments use:
/// single points, lines, convex hulls of finitely many points, half-space
/// polytopes and finite unions of segments. All projections are exact.
class ProximalOracle {
 public:
  struct PointSet {
    Vec3 p;
  };
  struct LineSet {
    Vec3 p, d;
  };
  struct HullSet {
    std::vector<Vec3> pts;
  };
  struct PolytopeSet {
    Polytope poly;
  };
  struct SegmentUnion {
    std::vector<Segment> segs;
  };

  static ProximalOracle point(const Vec3& p) { return ProximalOracle(PointSet{p}, "point"); }
  static ProximalOracle line(const Vec3& p, const Vec3& d) {
    if (norm(d) == 0) throw std::invalid_argument("line direction must be non-zero");
    return ProximalOracle(LineSet{p, d}, "line");
  }
  static ProximalOracle hull(std::vector<Vec3> pts) {
    if (pts.empty()) throw std::invalid_argument("hull needs points");
    return ProximalOracle(HullSet{std::move(pts)}, "hull");
  }
  static ProximalOracle segment(const Vec3& a, const Vec3& b) { return segments({{a, b}}); }
  static ProximalOracle segments(std::vector<Segment> segs) {
    if (segs.empty()) throw std::invalid_argument("segment union needs segments");
    return ProximalOracle(SegmentUnion{std::move(segs)}, "segments");
  }
  static ProximalOracle polytope(Polytope p) { return ProximalOracle(PolytopeSet{std::move(p)}, "polytope"); }

  const std::string& kind() const { return kind_; }
  const SegmentUnion* as_segments() const { return std::get_if<SegmentUnion>(&set_); }

  /// Π_A(x): every nearest point (ties only arise for segment unions, kept
  /// within 1e-12 of the minimal distance).
  std::vector<Vec3> nearest(const Vec3& x) const {
    return std::visit(
        [&](const auto& s) -> std::vector<Vec3> {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, PointSet>) return {s.p};
          else if constexpr (std::is_same_v<S, LineSet>) return {project_line(x, s.p, s.d)};
          else if constexpr (std::is_same_v<S, HullSet>) return {project_hull(x, s.pts)};
          else if constexpr (std::is_same_v<S, PolytopeSet>) {
            auto y = s.poly.project(x);
            if (!y) throw std::runtime_error("oracle failure: empty polytope");
            return {*y};
          } else {
            std::vector<std::pair<double, Vec3>> c;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& sg : s.segs) {
              const Vec3 y = project_segment(x, sg.a, sg.b);
              const double d = distance(x, y);
              best = std::min(best, d);
              c.emplace_back(d, y);
            }
            std::vector<Vec3> out;
            for (const auto& [d, y] : c)
              if (d <= best + 1e-12 && std::find(out.begin(), out.end(), y) == out.end()) out.push_back(y);
            return out;
          }
        },
        set_);
  }

  double distance_to(const Vec3& x) const { return distance(x, nearest(x).front()); }

  /// Points of the set at spacing <= h. Lines and polytopes are unbounded or
  /// not vertex-described and cannot be sampled.
  std::vector<Vec3> sample(double h) const {
    if (!(h > 0)) throw std::invalid_argument("sampling pitch must be positive");
    auto seg_pts = [h](const Vec3& a, const Vec3& b, std::vector<Vec3>& out) {
      const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(distance(a, b) / h)));
      for (std::size_t k = 0; k <= m; ++k) out.push_back(a + (static_cast<double>(k) / m) * (b - a));
    };
    return std::visit(
        [&](const auto& s) -> std::vector<Vec3> {
          using S = std::decay_t<decltype(s)>;
          std::vector<Vec3> out;
          if constexpr (std::is_same_v<S, PointSet>) out.push_back(s.p);
          else if constexpr (std::is_same_v<S, SegmentUnion>) {
            for (const auto& sg : s.segs) seg_pts(sg.a, sg.b, out);
          } else if constexpr (std::is_same_v<S, HullSet>) {
            if (s.pts.size() > 3) throw std::invalid_argument("hull sampling supports up to triangles");
            if (s.pts.size() == 1) out.push_back(s.pts[0]);
            else if (s.pts.size() == 2) seg_pts(s.pts[0], s.pts[1], out);
            else {
              double ext = 0;
              for (const auto& p : s.pts)
                for (const auto& q : s.pts) ext = std::max(ext, distance(p, q));
              const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ext / h)));
              for (std::size_t i = 0; i <= m; ++i)
                for (std::size_t j = 0; i + j <= m; ++j) {
                  const double a = static_cast<double>(i) / m, b = static_cast<double>(j) / m;
                  out.push_back(a * s.pts[0] + b * s.pts[1] + (1 - a - b) * s.pts[2]);
                }
            }
          } else {
            throw std::invalid_argument("this set cannot be sampled");
          }
          return out;
        },
        set_);
  }

  friend bool operator==(const ProximalOracle& a, const ProximalOracle& b) {
    if (a.set_.index() != b.set_.index()) return false;
    return std::visit(
        [&](const auto& s) -> bool {
          using S = std::decay_t<decltype(s)>;
          const auto& t = std::get<S>(b.set_);
          if constexpr (std::is_same_v<S, PointSet>) return s.p == t.p;
          else if constexpr (std::is_same_v<S, LineSet>) return s.p == t.p && s.d == t.d;
          else if constexpr (std::is_same_v<S, HullSet>) return s.pts == t.pts;
          else if constexpr (std::is_same_v<S, SegmentUnion>) return s.segs == t.segs;
          else return false;
        },
        a.set_);
  }

 private:
  using Set = std::variant<PointSet, LineSet, HullSet, PolytopeSet, SegmentUnion>;
  ProximalOracle(Set s, std::string kind) : set_(std::move(s)), kind_(std::move(kind)) {}

  Set set_;
  std::string kind_;
};

inline constexpr double kBlackwellTol = 1e-9;

struct BlackwellWitness {
  Vec3 x, phi_x, y;
  double inner;
};

struct BlackwellReport {
  bool holds = true;
  std::optional<BlackwellWitness> witness;
  double grid_pitch = 0;
  std::size_t samples = 0;
};

/// <x - y, phi(x) - y> for the proximal point y minimizing it, with that y.
inline std::pair<double, Vec3> blackwell_inner(const ProximalOracle& region, const Vec3& x, const Vec3& phi_x) {
  double best = std::numeric_limits<double>::infinity();
  Vec3 arg;
  for (const auto& y : region.nearest(x)) {
    const double v = dot(x - y, phi_x - y);
    if (v < best) best = v, arg = y;
  }
  return {best, arg};
}

/// Certifies on samples that some proximal y satisfies <x - y, phi(x) - y> <= 0
/// (up to 1e-9). The first failing sample becomes the witness.
template <class Map>
BlackwellReport check_blackwell(Map&& phi, const ProximalOracle& region, std::span<const Vec3> domain,
                                double grid_pitch) {
  BlackwellReport rep;
  rep.grid_pitch = grid_pitch;
  for (const auto& x : domain) {
    ++rep.samples;
    const Vec3 fx = phi(x);
    const auto [v, y] = blackwell_inner(region, x, fx);
    if (v > kBlackwellTol) {
      rep.holds = false;
      rep.witness = BlackwellWitness{x, fx, y, v};
      return rep;
    }
  }
  return rep;
}

/// Regular grid over the box [lo, hi] with pitch h; a zero-width axis yields a
/// single layer (so planar boxes set lo[2] == hi[2]).
inline std::vector<Vec3> box_grid(const Vec3& lo, const Vec3& hi, double h) {
  if (!(h > 0)) throw std::invalid_argument("grid pitch must be positive");
  std::array<std::size_t, 3> n{};
  for (std::size_t i = 0; i < 3; ++i) n[i] = static_cast<std::size_t>(std::floor((hi[i] - lo[i]) / h + 1e-9)) + 1;
  std::vector<Vec3> out;
  out.reserve(n[0] * n[1] * n[2]);
  for (std::size_t i = 0; i < n[0]; ++i)
    for (std::size_t j = 0; j < n[1]; ++j)
      for (std::size_t k = 0; k < n[2]; ++k) out.push_back({lo[0] + i * h, lo[1] + j * h, lo[2] + k * h});
  return out;
}

// ---------------------------------------------------------------------------
// The 1/n decay of the squared distance.

struct DecayReport {
  bool holds = true;                 // no violation of (d_s + (n-s) C) / n
  std::size_t violations = 0;
  std::size_t sharp_violations = 0;  // against (d_s + (n-s) C) / n^2
  std::size_t premise_failures = 0;  // stages where the Blackwell premise failed
  std::size_t segments = 0;
  std::size_t checked = 0;
  double max_sharp_ratio = 0;        // max dist^2 / sharp bound
};

/// Along every maximal run of stages n >= n0 where the Blackwell premise is
/// verified (y_n proximal to the mean with <mean - y_n, x_{n+1} - y_n> <= 0),
/// checks dist(x̄_n, A)^2 <= (d_s + (n - s) C) / n with d_s = s^2 dist(x̄_s, A)^2
/// and C the largest |x_{n+1} - y_n|^2 on the run. The sharper bound with n^2
/// in the denominator is checked too.
inline DecayReport decay_bound_check(const Trajectory& t, const ProximalOracle& region, std::size_t n0) {
  if (n0 < 1) throw std::invalid_argument("n0 is 1-based");
  DecayReport rep;
  const std::size_t N = t.horizon();
  std::vector<double> dist2(N);
  std::vector<char> premise(N, 0);
  std::vector<double> jump2(N, 0);
  for (std::size_t k = n0 - 1; k < N; ++k) {
    const double d = region.distance_to(t.means[k]);
    dist2[k] = d * d;
    if (k + 1 < N) {
      const auto [v, y] = blackwell_inner(region, t.means[k], t.steps[k + 1]);
      premise[k] = v <= kBlackwellTol;
      const Vec3 j = t.steps[k + 1] - y;
      jump2[k] = dot(j, j);
      if (!premise[k]) ++rep.premise_failures;
    }
  }
  std::size_t k = n0 - 1;
  while (k + 1 < N) {
    if (!premise[k]) {
      ++k;
      continue;
    }
    std::size_t e = k;
    double C = 0;
    while (e + 1 < N && premise[e]) C = std::max(C, jump2[e]), ++e;
    // premise holds on [k, e-1]; the bound covers stages k..e.
    ++rep.segments;
    const double s = static_cast<double>(k + 1);
    const double ds = s * s * dist2[k];
    for (std::size_t m = k; m <= e; ++m) {
      const double n = static_cast<double>(m + 1);
      const double num = ds + (n - s) * C;
      const double slack = 1e-9 * (num + 1e-12);
      ++rep.checked;
      if (dist2[m] > num / n + slack) ++rep.violations;
      const double sharp = num / (n * n);
      if (dist2[m] > sharp + slack / (n * n)) ++rep.sharp_violations;
      if (sharp > 0) rep.max_sharp_ratio = std::max(rep.max_sharp_ratio, dist2[m] / sharp);
    }
    k = e + 1;
  }
  rep.holds = rep.violations == 0;
  return rep;
}

// ---------------------------------------------------------------------------
// Weak attractors.

struct AttractorReport {
  bool pass = false;
  double max_final_distance = 0;
  std::vector<double> final_distances;
  /// Distances at stages 1, 10, 100, ... and N, one row per start.
  std::vector<std::vector<std::pair<std::size_t, double>>> series;
};

inline std::vector<std::pair<std::size_t, double>> distance_series(const Trajectory& t, const ProximalOracle& r) {
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t n = 1; n <= t.horizon(); n *= 10) out.emplace_back(n, r.distance_to(t.means[n - 1]));
  if (out.back().first != t.horizon()) out.emplace_back(t.horizon(), r.distance_to(t.final_mean()));
  return out;
}

/// Runs a fresh copy of phi from every start and compares the final distance
/// to the region with tol.
template <class Map>
AttractorReport verify_weak_attractor(const Map& phi, const ProximalOracle& region, std::span<const Vec3> starts,
                                      std::size_t N, double tol) {
  AttractorReport rep;
  for (const auto& x1 : starts) {
    Map f = phi;
    const Trajectory t = iterate(f, x1, N);
    const double d = region.distance_to(t.final_mean());
    rep.final_distances.push_back(d);
    rep.max_final_distance = std::max(rep.max_final_distance, d);
    rep.series.push_back(distance_series(t, region));
  }
  rep.pass = !starts.empty() && rep.max_final_distance <= tol;
  return rep;
}

struct IntersectionReport {
  bool pass = false;
  double dist_a = 0, dist_b = 0, dist_intersection = 0;
  std::size_t intersection_samples = 0;
};

/// If the trajectory ends within tol of A and of the compact set B, checks it
/// also ends within tol + h sqrt(3) of A ∩ B. The intersection is sampled as
/// the points of B (pitch h) lying within h of A.
inline IntersectionReport intersect_attractors(const Trajectory& t, const ProximalOracle& a,
                                               const ProximalOracle& b, double tol, double h) {
  IntersectionReport rep;
  const Vec3& x = t.final_mean();
  rep.dist_a = a.distance_to(x);
  rep.dist_b = b.distance_to(x);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : b.sample(h)) {
    if (a.distance_to(p) > h) continue;
    ++rep.intersection_samples;
    best = std::min(best, distance(p, x));
  }
  if (rep.intersection_samples == 0) throw std::runtime_error("sampled intersection is empty");
  rep.dist_intersection = best;
  rep.pass = rep.dist_a <= tol && rep.dist_b <= tol && best <= tol + h * std::sqrt(3.0);
  return rep;
}

/// The part of the segment union A lying in cl(N^eps(B)), as sub-segments.
/// Each segment is scanned at 2048 points and the boundaries refined by
/// bisection.
inline std::vector<Segment> restrict_segments(const std::vector<Segment>& a, const ProximalOracle& b, double eps) {
  std::vector<Segment> out;
  constexpr std::size_t kScan = 2048;
  for (const auto& sg : a) {
    auto at = [&](double t) { return sg.a + t * (sg.b - sg.a); };
    auto inside = [&](double t) { return b.distance_to(at(t)) <= eps; };
    auto refine = [&](double lo, double hi, bool lo_inside) {
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) == lo_inside ? lo : hi) = mid;
      }
      return lo_inside ? lo : hi;
    };
    std::optional<double> open;
    bool prev = false;
    for (std::size_t k = 0; k <= kScan; ++k) {
      const double t = static_cast<double>(k) / kScan;
      const bool in = inside(t);
      if (in && !prev) open = k == 0 ? 0.0 : refine(static_cast<double>(k - 1) / kScan, t, false);
      if (!in && prev) {
        out.push_back({at(*open), at(refine(static_cast<double>(k - 1) / kScan, t, true))});
        open.reset();
      }
      prev = in;
    }
    if (open) out.push_back({at(*open), sg.b});
  }
  return out;
}

struct RefinementStep {
  double eps, delta;
  BlackwellReport blackwell;
  std::size_t domain_samples = 0;
  double max_final_distance = 0;
  bool pass = false;
};

struct RefinementReport {
  bool pass = false;
  bool vacuous = false;
  std::vector<RefinementStep> steps;
};

/// Refines a weak attractor A (a segment union) to a closed subset B. For each
/// scheduled (eps, delta): phi must satisfy the Blackwell condition for
/// cl(N^eps(B)) ∩ A on the samples of `domain` lying in N^delta(A), and every
/// trajectory must end within eps + tol of B.
template <class Map>
RefinementReport refine_attractor(const Map& phi, const ProximalOracle& outer, const ProximalOracle& inner,
                                  std::span<const std::pair<double, double>> schedule, std::span<const Vec3> domain,
                                  double grid_pitch, std::span<const Vec3> starts, std::size_t N, double tol) {
  RefinementReport rep;
  if (outer == inner) {
    rep.pass = rep.vacuous = true;
    return rep;
  }
  const auto* segs = outer.as_segments();
  if (!segs) throw std::invalid_argument("outer attractor must be a segment union");
  rep.pass = true;
  for (const auto& [eps, delta] : schedule) {
    RefinementStep st{eps, delta, {}, 0, 0, false};
    const auto restricted = restrict_segments(segs->segs, inner, eps);
    if (restricted.empty()) throw std::runtime_error("eps-neighbourhood of B misses A");
    const auto region = ProximalOracle::segments(restricted);
    std::vector<Vec3> near;
    for (const auto& x : domain)
      if (outer.distance_to(x) < delta) near.push_back(x);
    st.domain_samples = near.size();
    Map f = phi;
    st.blackwell = check_blackwell(f, region, near, grid_pitch);
    if (st.blackwell.holds) {
      const auto att = verify_weak_attractor(phi, inner, starts, N, eps + tol);
      st.max_final_distance = att.max_final_distance;
      st.pass = att.pass;
    }
    rep.pass = rep.pass && st.pass;
    rep.steps.push_back(std::move(st));
  }
  return rep;
}

}  // namespace goodplay
