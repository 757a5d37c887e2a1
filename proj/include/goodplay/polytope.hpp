#pragma once

// Exact nearest-point computations in R^3 for the convex sets that appear in
// the approachability and Lyapunov arguments: half-space polytopes, convex
// hulls of a few points, segments and lines.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "goodplay/vec.hpp"

namespace goodplay {

/// normal . x <= offset
struct Halfspace {
  Vec3 normal;
  double offset = 0;

  double slack(const Vec3& x) const { return offset - dot(normal, x); }
};

/// normal . x == offset
struct Hyperplane {
  Vec3 normal;
  double offset = 0;
};

namespace detail {

// Solves the k x k system (k <= 4) in place by Gaussian elimination with
// partial pivoting. Returns false when the matrix is numerically singular.
template <std::size_t K>
bool solve_small(std::array<std::array<double, K>, K> m, std::array<double, K> rhs,
                 std::size_t k, std::array<double, K>& out) {
  double scale = 0;
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) scale = std::max(scale, std::abs(m[r][c]));
  if (scale == 0) return false;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) <= 1e-12 * scale) return false;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = col + 1; r < k; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < k; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t r = k; r-- > 0;) {
    double s = rhs[r];
    for (std::size_t c = r + 1; c < k; ++c) s -= m[r][c] * out[c];
    out[r] = s / m[r][r];
  }
  return true;
}

// Projection of x onto {y : n_r . y = b_r, r < k}; nullopt if the normals are
// linearly dependent.
inline std::optional<Vec3> project_affine(const Vec3& x, std::span<const Hyperplane> rows) {
  const std::size_t k = rows.size();
  if (k == 0) return x;
  if (k > 3) return std::nullopt;
  std::array<std::array<double, 3>, 3> gram{};
  std::array<double, 3> rhs{}, lam{};
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) gram[r][c] = dot(rows[r].normal, rows[c].normal);
    rhs[r] = dot(rows[r].normal, x) - rows[r].offset;
  }
  if (!solve_small<3>(gram, rhs, k, lam)) return std::nullopt;
  Vec3 y = x;
  for (std::size_t r = 0; r < k; ++r) y -= lam[r] * rows[r].normal;
  return y;
}

}  // namespace detail

/// Convex polyhedron {x : equalities hold, inequalities hold}. Projection is
/// exact: the nearest point lies on the affine set cut out by at most three
/// active constraints, so all such sets are enumerated.
class Polytope {
 public:
  Polytope() = default;
  Polytope(std::vector<Halfspace> ineq, std::vector<Hyperplane> eq = {})
      : ineq_(std::move(ineq)), eq_(std::move(eq)) {
    if (eq_.size() > 3) throw std::invalid_argument("at most three equality constraints");
  }

  const std::vector<Halfspace>& inequalities() const { return ineq_; }
  const std::vector<Hyperplane>& equalities() const { return eq_; }

  Polytope intersect(const Polytope& other) const {
    Polytope out = *this;
    out.ineq_.insert(out.ineq_.end(), other.ineq_.begin(), other.ineq_.end());
    out.eq_.insert(out.eq_.end(), other.eq_.begin(), other.eq_.end());
    return out;
  }

  bool contains(const Vec3& x, double tol = 1e-9) const {
    for (const auto& h : ineq_)
      if (h.slack(x) < -tol * scale(h.normal)) return false;
    for (const auto& e : eq_)
      if (std::abs(dot(e.normal, x) - e.offset) > tol * scale(e.normal)) return false;
    return true;
  }

  /// Nearest point, or nullopt when the polytope is empty.
  std::optional<Vec3> project(const Vec3& x, double tol = 1e-10) const {
    if (contains(x, tol)) return x;
    std::optional<Vec3> best;
    double best_d = std::numeric_limits<double>::infinity();
    std::vector<Hyperplane> rows(eq_.begin(), eq_.end());
    const std::size_t free_slots = 3 - std::min<std::size_t>(3, eq_.size());
    const std::size_t m = ineq_.size();
    auto consider = [&](const std::vector<Hyperplane>& active) {
      auto y = detail::project_affine(x, active);
      if (!y || !contains(*y, tol)) return;
      const double d = distance(x, *y);
      if (d < best_d) {
        best_d = d;
        best = *y;
      }
    };
    consider(rows);
    if (free_slots >= 1)
      for (std::size_t a = 0; a < m; ++a) {
        rows.push_back(as_plane(ineq_[a]));
        consider(rows);
        if (free_slots >= 2)
          for (std::size_t b = a + 1; b < m; ++b) {
            rows.push_back(as_plane(ineq_[b]));
            consider(rows);
            if (free_slots >= 3)
              for (std::size_t c = b + 1; c < m; ++c) {
                rows.push_back(as_plane(ineq_[c]));
                consider(rows);
                rows.pop_back();
              }
            rows.pop_back();
          }
        rows.pop_back();
      }
    return best;
  }

  std::optional<double> distance_to(const Vec3& x) const {
    auto y = project(x);
    if (!y) return std::nullopt;
    return distance(x, *y);
  }

 private:
  static Hyperplane as_plane(const Halfspace& h) { return {h.normal, h.offset}; }
  static double scale(const Vec3& n) { return std::max(1.0, norm(n)); }

  std::vector<Halfspace> ineq_;
  std::vector<Hyperplane> eq_;
};

/// Nearest point of the segment [a, b].
inline Vec3 project_segment(const Vec3& x, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0) return a;
  const double t = std::clamp(dot(x - a, d) / len2, 0.0, 1.0);
  return a + t * d;
}

/// Nearest point of the line through p with direction d (d != 0).
inline Vec3 project_line(const Vec3& x, const Vec3& p, const Vec3& d) {
  return p + (dot(x - p, d) / dot(d, d)) * d;
}

/// Nearest point of conv(points). Exact: the nearest point is in the relative
/// interior of a simplex spanned by at most four of the points, and every
/// affinely independent subset of size <= 4 is tried.
inline Vec3 project_hull(const Vec3& x, std::span<const Vec3> pts) {
  if (pts.empty()) throw std::invalid_argument("hull of no points");
  const std::size_t n = pts.size();
  Vec3 best = pts[0];
  double best_d = distance(x, best);
  // Barycentric weights of the projection onto aff{p_0..p_{k-1}}.
  auto try_subset = [&](const std::vector<std::size_t>& s) {
    const std::size_t k = s.size();
    if (k == 1) {
      const double d = distance(x, pts[s[0]]);
      if (d < best_d) best_d = d, best = pts[s[0]];
      return;
    }
    const Vec3& p0 = pts[s[0]];
    std::array<Vec3, 3> e{};
    for (std::size_t r = 1; r < k; ++r) e[r - 1] = pts[s[r]] - p0;
    std::array<std::array<double, 3>, 3> gram{};
    std::array<double, 3> rhs{}, w{};
    for (std::size_t r = 0; r + 1 < k; ++r) {
      for (std::size_t c = 0; c + 1 < k; ++c) gram[r][c] = dot(e[r], e[c]);
      rhs[r] = dot(e[r], x - p0);
    }
    if (!detail::solve_small<3>(gram, rhs, k - 1, w)) return;
    double w0 = 1;
    Vec3 y = p0;
    for (std::size_t r = 0; r + 1 < k; ++r) {
      if (w[r] < -1e-12) return;
      w0 -= w[r];
      y += w[r] * e[r];
    }
    if (w0 < -1e-12) return;
    const double d = distance(x, y);
    if (d < best_d) best_d = d, best = y;
  };
  for (std::size_t a = 0; a < n; ++a) {
    try_subset({a});
    for (std::size_t b = a + 1; b < n; ++b) {
      try_subset({a, b});
      for (std::size_t c = b + 1; c < n; ++c) {
        try_subset({a, b, c});
        for (std::size_t d = c + 1; d < n; ++d) try_subset({a, b, c, d});
      }
    }
  }
  return best;
}

/// Facet description of a full-dimensional hull of points in R^3.
/// Throws if the points are coplanar.
inline Polytope hull_halfspaces(std::span<const Vec3> pts) {
  const std::size_t n = pts.size();
  double extent = 0;
  for (const auto& p : pts)
    for (const auto& q : pts) extent = std::max(extent, distance(p, q));
  const double tol = 1e-10 * std::max(1.0, extent);
  std::vector<Halfspace> faces;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        Vec3 nrm = cross(pts[b] - pts[a], pts[c] - pts[a]);
        const double len = norm(nrm);
        if (len <= tol * extent) continue;
        nrm = nrm / len;
        const double off = dot(nrm, pts[a]);
        bool below = true, above = true;
        for (const auto& p : pts) {
          const double s = dot(nrm, p) - off;
          if (s > tol) below = false;
          if (s < -tol) above = false;
        }
        if (above && below) continue;  // coplanar with everything
        if (!below && !above) continue;
        Halfspace h = below ? Halfspace{nrm, off} : Halfspace{-nrm, -off};
        bool dup = false;
        for (const auto& f : faces)
          if (distance(f.normal, h.normal) < 1e-9 && std::abs(f.offset - h.offset) < tol) dup = true;
        if (!dup) faces.push_back(h);
      }
  if (faces.size() < 4) throw std::invalid_argument("hull is not full-dimensional");
  return Polytope(std::move(faces));
}

}  // namespace goodplay
