#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "goodplay/polytope.hpp"
#include "goodplay/stage_game.hpp"
#include "goodplay/vec.hpp"

namespace goodplay {

inline constexpr double kSqrt2 = 1.4142135623730951;

/// Orthogonal projection onto the diagonal line x1 = x2 = x3.
inline PayoffVector project_diagonal(const PayoffVector& x) {
  const double m = sum(x) / 3.0;
  return {m, m, m};
}

/// Point of the zero-sum plane P = {y : y1 + y2 + y3 = 0}.
class PlanePoint {
 public:
  PlanePoint() = default;
  /// Throws std::invalid_argument unless |y1 + y2 + y3| <= 1e-9.
  explicit PlanePoint(const Vec3& y) : y_(y) {
    if (!(std::abs(sum(y)) <= 1e-9)) throw std::invalid_argument("plane point must have zero coordinate sum");
  }
  /// Coordinates (a, b) in the orthonormal basis of plane_basis().
  static PlanePoint from_coords(double a, double b);

  const Vec3& vec() const { return y_; }
  double operator[](std::size_t i) const { return y_[i]; }
  friend bool operator==(const PlanePoint&, const PlanePoint&) = default;

 private:
  Vec3 y_{};
};

/// Orthonormal basis of P.
inline std::pair<Vec3, Vec3> plane_basis() {
  static const double s6 = std::sqrt(6.0);
  return {Vec3{1 / kSqrt2, -1 / kSqrt2, 0}, Vec3{1 / s6, 1 / s6, -2 / s6}};
}

inline PlanePoint PlanePoint::from_coords(double a, double b) {
  const auto [e1, e2] = plane_basis();
  PlanePoint p;
  p.y_ = a * e1 + b * e2;
  return p;
}

inline std::pair<double, double> plane_coords(const PlanePoint& p) {
  const auto [e1, e2] = plane_basis();
  return {dot(p.vec(), e1), dot(p.vec(), e2)};
}

/// x - project_diagonal(x).
inline PlanePoint project_plane(const PayoffVector& x) {
  const double m = sum(x) / 3.0;
  return PlanePoint(Vec3{x[0] - m, x[1] - m, x[2] - m});
}

/// Unit directions v1..v6 of the plane; v_{k+3} = -v_k.
struct DirectionIndex {
  int k;
  explicit DirectionIndex(int index) : k(index) {
    if (k < 1 || k > 6) throw std::out_of_range("direction index must be 1..6");
  }
};

inline Vec3 direction(DirectionIndex d) {
  static const std::array<Vec3, 3> base{Vec3{0, -1 / kSqrt2, 1 / kSqrt2}, Vec3{-1 / kSqrt2, 0, 1 / kSqrt2},
                                        Vec3{-1 / kSqrt2, 1 / kSqrt2, 0}};
  return d.k <= 3 ? base[d.k - 1] : -base[d.k - 4];
}
inline Vec3 direction(int k) { return direction(DirectionIndex(k)); }

// ---------------------------------------------------------------------------
// Regions.

/// x_i > x_j - eps and x_i > x_k - eps.
struct OmegaEps {
  std::size_t player;
  double eps;
};
/// x_i < r0 or x_j + x_k > 2 p3.
struct WRegion {
  std::size_t player;
};
/// OmegaEps(i, eps) minus W(i): where the eps-good strategy of i invests.
struct VRegion {
  std::size_t player;
  double eps;
};
/// x_i is a maximal coordinate.
struct OmegaMax {
  std::size_t player;
};
/// x_i is a minimal coordinate.
struct PhiMin {
  std::size_t player;
};
/// Plane region: <v_k, y> < c for every k in dirs.
struct DeltaRegion {
  std::vector<int> dirs;
  double c;
};
/// Convex hull of the listed game vertices.
struct HullRegion {
  std::vector<VertexLabel> labels;
};

using RegionSpec = std::variant<OmegaEps, WRegion, VRegion, OmegaMax, PhiMin, DeltaRegion, HullRegion>;

inline bool is_plane_region(const RegionSpec& r) { return std::holds_alternative<DeltaRegion>(r); }

namespace detail {
inline std::pair<std::size_t, std::size_t> others(std::size_t i) {
  if (i > 2) throw std::out_of_range("player index must be 0..2");
  return {(i + 1) % 3, (i + 2) % 3};
}
}  // namespace detail

// Exact (strict) predicates, usable directly on hot paths.
inline bool in_omega_eps(const PayoffVector& x, std::size_t i, double eps) {
  const auto [j, k] = detail::others(i);
  return x[i] > x[j] - eps && x[i] > x[k] - eps;
}
inline bool in_w(const GameParams& g, const PayoffVector& x, std::size_t i) {
  const auto [j, k] = detail::others(i);
  return x[i] < g.r0 || x[j] + x[k] > 2 * g.p3;
}
inline bool in_v(const GameParams& g, const PayoffVector& x, std::size_t i, double eps) {
  return in_omega_eps(x, i, eps) && !in_w(g, x, i);
}
inline bool in_omega_max(const PayoffVector& x, std::size_t i) {
  const auto [j, k] = detail::others(i);
  return x[i] >= x[j] && x[i] >= x[k];
}
inline bool in_phi_min(const PayoffVector& x, std::size_t i) {
  const auto [j, k] = detail::others(i);
  return x[i] <= x[j] && x[i] <= x[k];
}
inline bool in_delta(const PlanePoint& y, std::span<const int> dirs, double c) {
  for (int k : dirs)
    if (!(dot(direction(k), y.vec()) < c)) return false;
  return true;
}
inline bool in_delta(const PlanePoint& y, std::initializer_list<int> dirs, double c) {
  return in_delta(y, std::span<const int>(dirs.begin(), dirs.size()), c);
}

/// Raised when a payoff point is tested against a plane region or vice versa.
class PointKindMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline bool in_region(const GameParams& g, const RegionSpec& spec, const PayoffVector& x) {
  return std::visit(
      [&](const auto& r) -> bool {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, OmegaEps>) return in_omega_eps(x, r.player, r.eps);
        else if constexpr (std::is_same_v<R, WRegion>) return in_w(g, x, r.player);
        else if constexpr (std::is_same_v<R, VRegion>) return in_v(g, x, r.player, r.eps);
        else if constexpr (std::is_same_v<R, OmegaMax>) return in_omega_max(x, r.player);
        else if constexpr (std::is_same_v<R, PhiMin>) return in_phi_min(x, r.player);
        else if constexpr (std::is_same_v<R, HullRegion>) {
          const auto vs = vertices(g);
          std::vector<Vec3> pts;
          for (auto l : r.labels) pts.push_back(vs[l]);
          return distance(project_hull(x, pts), x) <= 1e-9;
        } else {
          throw PointKindMismatch("plane region queried with a payoff point");
        }
      },
      spec);
}

inline bool in_region(const GameParams&, const RegionSpec& spec, const PlanePoint& y) {
  const auto* d = std::get_if<DeltaRegion>(&spec);
  if (!d) throw PointKindMismatch("payoff region queried with a plane point");
  return in_delta(y, d->dirs, d->c);
}

/// Convex pieces whose union is the closure of a payoff-space region (strict
/// inequalities relaxed), before intersecting with S. Hull regions are not
/// half-space described and return an empty list.
inline std::vector<Polytope> closure_pieces(const GameParams& g, const RegionSpec& spec) {
  auto e = [](std::size_t i) {
    Vec3 v;
    v[i] = 1;
    return v;
  };
  return std::visit(
      [&](const auto& r) -> std::vector<Polytope> {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, OmegaEps> || std::is_same_v<R, VRegion>) {
          const auto [j, k] = detail::others(r.player);
          const std::size_t i = r.player;
          // x_j - x_i <= eps, x_k - x_i <= eps
          std::vector<Halfspace> hs{{e(j) - e(i), r.eps}, {e(k) - e(i), r.eps}};
          if constexpr (std::is_same_v<R, VRegion>) {
            hs.push_back({-1.0 * e(i), -g.r0});            // x_i >= r0
            hs.push_back({e(j) + e(k), 2 * g.p3});         // x_j + x_k <= 2 p3
          }
          return {Polytope(hs)};
        } else if constexpr (std::is_same_v<R, WRegion>) {
          const auto [j, k] = detail::others(r.player);
          return {Polytope({{e(r.player), g.r0}}), Polytope({{-1.0 * (e(j) + e(k)), -2 * g.p3}})};
        } else if constexpr (std::is_same_v<R, OmegaMax>) {
          const auto [j, k] = detail::others(r.player);
          return {Polytope({{e(j) - e(r.player), 0}, {e(k) - e(r.player), 0}})};
        } else if constexpr (std::is_same_v<R, PhiMin>) {
          const auto [j, k] = detail::others(r.player);
          return {Polytope({{e(r.player) - e(j), 0}, {e(r.player) - e(k), 0}})};
        } else if constexpr (std::is_same_v<R, DeltaRegion>) {
          std::vector<Halfspace> hs;
          for (int k : r.dirs) hs.push_back({direction(k), r.c});
          return {Polytope(hs, {Hyperplane{{1, 1, 1}, 0}})};
        } else {
          return {};
        }
      },
      spec);
}

inline bool in_closure(const GameParams& g, const RegionSpec& spec, const Vec3& x, double tol = 1e-9) {
  if (const auto* h = std::get_if<HullRegion>(&spec)) {
    const auto vs = vertices(g);
    std::vector<Vec3> pts;
    for (auto l : h->labels) pts.push_back(vs[l]);
    return distance(project_hull(x, pts), x) <= tol;
  }
  for (const auto& p : closure_pieces(g, spec))
    if (p.contains(x, tol)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// The payoff polytope S and its projection onto P.

/// Convex hull S of the eight vertex payoffs, in both vertex and facet form.
class PayoffHull {
 public:
  explicit PayoffHull(const GameParams& g) : params_(g), verts_(vertices(g)) {
    const auto all = verts_.all();
    pts_.assign(all.begin(), all.end());
    facets_ = hull_halfspaces(pts_);
    lo_ = hi_ = pts_[0];
    for (const auto& p : pts_)
      for (std::size_t i = 0; i < 3; ++i) {
        lo_[i] = std::min(lo_[i], p[i]);
        hi_[i] = std::max(hi_[i], p[i]);
      }
    // Projected hexagon, as an ordered polygon in plane coordinates.
    std::vector<std::pair<double, double>> q;
    for (const auto& p : pts_) q.push_back(plane_coords(project_plane(p)));
    plane_polygon_ = convex_polygon(q);
    std::vector<Halfspace> hs;
    const auto [e1, e2] = plane_basis();
    for (std::size_t a = 0; a < plane_polygon_.size(); ++a) {
      const auto [x0, y0] = plane_polygon_[a];
      const auto [x1, y1] = plane_polygon_[(a + 1) % plane_polygon_.size()];
      // Counter-clockwise order: outward normal is (dy, -dx).
      double nx = y1 - y0, ny = -(x1 - x0);
      const double len = std::hypot(nx, ny);
      nx /= len, ny /= len;
      hs.push_back({nx * e1 + ny * e2, nx * x0 + ny * y0});
    }
    plane_hull_ = Polytope(hs, {Hyperplane{{1, 1, 1}, 0}});
  }

  const GameParams& params() const { return params_; }
  const VertexSet& verts() const { return verts_; }
  std::span<const Vec3> points() const { return pts_; }
  const Polytope& facets() const { return facets_; }
  const Vec3& lower() const { return lo_; }
  const Vec3& upper() const { return hi_; }
  /// S projected onto P, as a polytope of R^3 lying in P.
  const Polytope& plane_hull() const { return plane_hull_; }

  bool contains(const Vec3& x, double tol = 1e-9) const { return facets_.contains(x, tol); }
  bool contains_plane(const PlanePoint& y, double tol = 1e-9) const { return plane_hull_.contains(y.vec(), tol); }

  /// Parameter interval [t_lo, t_hi] of {y + t(1,1,1)} inside S, or nullopt.
  std::optional<std::pair<double, double>> fiber(const PlanePoint& y, double tol = 1e-12) const {
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    for (const auto& h : facets_.inequalities()) {
      const double a = sum(h.normal);
      const double b = h.slack(y.vec());
      if (std::abs(a) < 1e-14) {
        if (b < -tol) return std::nullopt;
      } else if (a > 0) {
        hi = std::min(hi, b / a);
      } else {
        lo = std::max(lo, b / a);
      }
    }
    if (lo > hi + tol) return std::nullopt;
    return std::pair{lo, std::max(lo, hi)};
  }

  /// Upper bound on the diameter of S.
  double diameter() const {
    double d = 0;
    for (const auto& p : pts_)
      for (const auto& q : pts_) d = std::max(d, distance(p, q));
    return d;
  }

 private:
  // Andrew's monotone chain; returns counter-clockwise hull.
  static std::vector<std::pair<double, double>> convex_polygon(std::vector<std::pair<double, double>> p) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end(),
                        [](const auto& a, const auto& b) {
                          return std::abs(a.first - b.first) < 1e-12 && std::abs(a.second - b.second) < 1e-12;
                        }),
            p.end());
    auto turn = [](const auto& o, const auto& a, const auto& b) {
      return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<double, double>> h(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      while (k >= 2 && turn(h[k - 2], h[k - 1], p[i]) <= 1e-12) --k;
      h[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
      while (k >= t && turn(h[k - 2], h[k - 1], p[i - 1]) <= 1e-12) --k;
      h[k++] = p[i - 1];
    }
    h.resize(k - 1);
    return h;
  }

  GameParams params_;
  VertexSet verts_;
  std::vector<Vec3> pts_;
  Polytope facets_;
  Polytope plane_hull_;
  std::vector<std::pair<double, double>> plane_polygon_;
  Vec3 lo_, hi_;
};

// ---------------------------------------------------------------------------
// Convex combinations and sampling of S.

using HullWeights = std::array<double, 8>;

/// Sum of w[k] * vertex k, in kAllVertexLabels order. Throws
/// std::invalid_argument unless weights are >= -1e-12 and sum to 1 within 1e-12.
inline PayoffVector hull_point(const VertexSet& v, const HullWeights& w) {
  double s = 0;
  for (double x : w) {
    if (!std::isfinite(x) || x < -1e-12) throw std::invalid_argument("hull weights must be non-negative");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("hull weights must sum to 1");
  PayoffVector x;
  for (std::size_t k = 0; k < 8; ++k) x += w[k] * v[kAllVertexLabels[k]];
  return x;
}

/// Unit weight on a single vertex.
inline HullWeights vertex_weights(VertexLabel l) {
  HullWeights w{};
  w[static_cast<std::size_t>(l)] = 1;
  return w;
}

inline HullWeights centroid_weights() {
  HullWeights w;
  w.fill(1.0 / 8.0);
  return w;
}

/// The eight vertices followed by the centroid.
inline std::vector<HullWeights> default_starts() {
  std::vector<HullWeights> out;
  for (auto l : kAllVertexLabels) out.push_back(vertex_weights(l));
  out.push_back(centroid_weights());
  return out;
}

/// Random barycentric weights. Half of the draws are flat Dirichlet over all
/// eight vertices; the rest are supported on 1..3 random vertices so that
/// faces and edges of S are hit as well.
template <class Rng>
HullWeights random_weights(Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  HullWeights w{};
  std::exponential_distribution<double> ex(1.0);
  if (unif(rng) < 0.5) {
    for (auto& x : w) x = ex(rng);
  } else {
    std::uniform_int_distribution<int> pick(0, 7), cnt(1, 3);
    const int m = cnt(rng);
    for (int t = 0; t < m; ++t) w[pick(rng)] += ex(rng);
  }
  double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= s;
  // Renormalize so hull_point's 1e-12 check always passes.
  s = std::accumulate(w.begin(), w.end(), 0.0);
  w[0] += 1.0 - s;
  if (w[0] < 0) w[0] = 0;
  return w;
}

// ---------------------------------------------------------------------------
// Distances.

/// Distance together with its guaranteed absolute error.
struct DistanceEstimate {
  double distance;
  double error_bound;
};

class EmptyRegion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact distance from x to closure(region) inside S (or inside the projected
/// hexagon for plane regions), computed piecewise by polytope projection.
inline double exact_dist_to_region(const PayoffHull& S, const RegionSpec& spec, const Vec3& x) {
  if (const auto* h = std::get_if<HullRegion>(&spec)) {
    std::vector<Vec3> pts;
    for (auto l : h->labels) pts.push_back(S.verts()[l]);
    return distance(x, project_hull(x, pts));
  }
  const Polytope& base = is_plane_region(spec) ? S.plane_hull() : S.facets();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& piece : closure_pieces(S.params(), spec))
    if (auto d = base.intersect(piece).distance_to(x)) best = std::min(best, *d);
  if (!std::isfinite(best)) throw EmptyRegion("region closure does not meet S");
  return best;
}

/// Distance from x to the closure of a region, measured against the grid of
/// pitch h (points k*h) intersected with that closure and with S. The true
/// distance to the closure lies within h*sqrt(3) of the returned value for
/// regions with non-empty interior. Hull and plane regions are convex and are
/// answered exactly (error bound 0).
inline DistanceEstimate dist_to_region(const PayoffHull& S, const RegionSpec& spec, const Vec3& x, double h) {
  if (!(h > 0)) throw std::invalid_argument("grid pitch must be positive");
  if (std::holds_alternative<HullRegion>(spec) || is_plane_region(spec))
    return {exact_dist_to_region(S, spec, x), 0.0};
  const GameParams& g = S.params();
  if (S.contains(x) && in_closure(g, spec, x)) return {0.0, h * std::sqrt(3.0)};

  const Vec3& lo = S.lower();
  const Vec3& hi = S.upper();
  std::array<long, 3> kmin{}, kmax{}, kc{};
  for (std::size_t i = 0; i < 3; ++i) {
    kmin[i] = static_cast<long>(std::floor(lo[i] / h));
    kmax[i] = static_cast<long>(std::ceil(hi[i] / h));
    kc[i] = static_cast<long>(std::llround(x[i] / h));
  }
  // Grow a cube of grid cells around x; once the best hit is within the cube
  // radius no point outside can beat it.
  long radius = 2;
  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    bool covers_all = true;
    std::array<long, 3> a{}, b{};
    for (std::size_t i = 0; i < 3; ++i) {
      a[i] = std::max(kmin[i], kc[i] - radius);
      b[i] = std::min(kmax[i], kc[i] + radius);
      if (kc[i] - radius > kmin[i] || kc[i] + radius < kmax[i]) covers_all = false;
    }
    for (long i0 = a[0]; i0 <= b[0]; ++i0)
      for (long i1 = a[1]; i1 <= b[1]; ++i1)
        for (long i2 = a[2]; i2 <= b[2]; ++i2) {
          const Vec3 p{i0 * h, i1 * h, i2 * h};
          const double d = distance(p, x);
          if (d >= best) continue;
          if (S.contains(p) && in_closure(g, spec, p)) best = d;
        }
    if (best <= (radius - 1) * h || covers_all) {
      if (!std::isfinite(best)) throw EmptyRegion("no grid point of the region at this pitch");
      return {best, h * std::sqrt(3.0)};
    }
    radius *= 2;
  }
}

}  // namespace goodplay
