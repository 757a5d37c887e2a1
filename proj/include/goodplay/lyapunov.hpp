#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "goodplay/dynamics.hpp"
#include "goodplay/geometry.hpp"
#include "goodplay/stage_game.hpp"
#include "goodplay/strategies.hpp"

namespace goodplay {

/// V(x) = max_i <p_i, x> over unit directions p_i, with level c and slack delta.
struct SupportSpec {
  std::vector<Vec3> dirs;
  double c = 0;
  double delta = 0;

  SupportSpec(std::vector<Vec3> directions, double level, double slack)
      : dirs(std::move(directions)), c(level), delta(slack) {
    if (dirs.empty()) throw std::invalid_argument("support function needs directions");
    for (const auto& p : dirs)
      if (std::abs(norm(p) - 1.0) > 1e-12) throw std::invalid_argument("support directions must be unit vectors");
    if (!(c > 0) || !(delta > 0 && delta < c)) throw std::invalid_argument("need 0 < delta < c");
  }
};

/// SupportSpec over the plane directions v_k for k in `ks`.
inline SupportSpec plane_support(std::initializer_list<int> ks, double c, double delta) {
  std::vector<Vec3> d;
  for (int k : ks) d.push_back(direction(k));
  return SupportSpec(std::move(d), c, delta);
}

struct SupportValue {
  double value;
  std::vector<std::size_t> active;  // {i : V_i(x) >= V(x) - delta}
};

inline double support_max(std::span<const Vec3> dirs, const Vec3& x) {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& p : dirs) v = std::max(v, dot(p, x));
  return v;
}

inline SupportValue support_value(const SupportSpec& spec, const Vec3& x) {
  SupportValue out{support_max(spec.dirs, x), {}};
  for (std::size_t i = 0; i < spec.dirs.size(); ++i)
    if (dot(spec.dirs[i], x) >= out.value - spec.delta) out.active.push_back(i);
  return out;
}

/// Finite-valued multivalued map on plane points.
using MultiMap = std::function<std::vector<Vec3>(const PlanePoint&)>;

/// Values {pi_P(w) : w in f(y), y in S, pi_P(y) = x}. Along the fibre
/// y = x + t(1,1,1) only the thresholds y_i = r0 and y_j + y_k = 2 p3 can change
/// the strategies built from V-regions, so evaluating f at every threshold
/// and at a point of every open piece between them yields the exact value set.
template <class F>
std::vector<Vec3> fiber_values(const PayoffHull& S, const PlanePoint& x, F&& f) {
  std::vector<Vec3> out;
  const auto fib = S.fiber(x);
  if (!fib) return out;
  const auto [lo, hi] = *fib;
  const GameParams& g = S.params();
  const Vec3& y = x.vec();
  std::vector<double> ts{lo, hi};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto [j, k] = detail::others(i);
    ts.push_back(g.r0 - y[i]);
    ts.push_back(g.p3 - 0.5 * (y[j] + y[k]));
  }
  std::sort(ts.begin(), ts.end());
  std::vector<double> probe;
  for (std::size_t a = 0; a < ts.size(); ++a) {
    if (ts[a] < lo || ts[a] > hi) continue;
    probe.push_back(ts[a]);
    if (a + 1 < ts.size()) {
      const double m = 0.5 * (ts[a] + std::min(ts[a + 1], hi));
      if (m > ts[a]) probe.push_back(m);
    }
  }
  for (double t : probe) {
    const Vec3 lifted = y + t * Vec3{1, 1, 1};
    for (const Vec3& w : f(lifted)) {
      const Vec3 pw = project_plane(w).vec();
      if (std::find(out.begin(), out.end(), pw) == out.end()) out.push_back(pw);
    }
  }
  return out;
}

/// The projected map of the all-good profile: x ↦ pi_P(phi(preimages of x)).
inline MultiMap projected_all_good_map(const PayoffHull& S, double eps) {
  InducedMap phi(all_good_profile(S.params(), eps), S.params());
  return [S, phi](const PlanePoint& x) mutable {
    return fiber_values(S, x, [&](const PayoffVector& y) { return std::vector<Vec3>{phi(y)}; });
  };
}

/// Stage payoffs reachable when players 1 and 2 are eps-good and player 3 is
/// arbitrary: both choices of player 3, given the actions of the good players.
inline std::vector<Vec3> two_good_values(const GameParams& g, const PayoffVector& y, double eps) {
  const Action a1 = in_v(g, y, 0, eps) ? Action::I : Action::NI;
  const Action a2 = in_v(g, y, 1, eps) ? Action::I : Action::NI;
  return {payoff(g, ActionProfile{{a1, a2, Action::I}}), payoff(g, ActionProfile{{a1, a2, Action::NI}})};
}

/// Projection of the two-good / free-third multimap.
inline MultiMap projected_two_good_map(const PayoffHull& S, double eps) {
  const GameParams g = S.params();
  return [S, g, eps](const PlanePoint& x) {
    return fiber_values(S, x, [&](const PayoffVector& y) { return two_good_values(g, y, eps); });
  };
}

/// Grid of pitch h (in orthonormal plane coordinates) over the projected
/// hexagon, keeping only points with V(x) >= c.
inline std::vector<PlanePoint> plane_grid_outside(const PayoffHull& S, const SupportSpec& spec, double h) {
  if (!(h > 0)) throw std::invalid_argument("grid pitch must be positive");
  double amin = INFINITY, amax = -INFINITY, bmin = INFINITY, bmax = -INFINITY;
  for (const auto& p : S.points()) {
    const auto [a, b] = plane_coords(project_plane(p));
    amin = std::min(amin, a), amax = std::max(amax, a);
    bmin = std::min(bmin, b), bmax = std::max(bmax, b);
  }
  std::vector<PlanePoint> out;
  for (double a = std::floor(amin / h) * h; a <= amax + 1e-12; a += h)
    for (double b = std::floor(bmin / h) * h; b <= bmax + 1e-12; b += h) {
      const auto x = PlanePoint::from_coords(a, b);
      if (!S.contains_plane(x)) continue;
      if (support_max(spec.dirs, x.vec()) < spec.c) continue;
      out.push_back(x);
    }
  return out;
}

struct LyapunovWitness {
  Vec3 x;
  std::size_t index;
  Vec3 omega;
  double value;  // V_index(omega)
};

struct LyapunovReport {
  bool holds = true;
  std::optional<LyapunovWitness> witness;
  std::size_t samples = 0;
  std::size_t skipped_inside = 0;  // samples with V(x) < c
};

inline constexpr double kLyapunovTol = 1e-9;

class EmptyGrid : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Lyapunov-type condition on samples x with V(x) >= c: every delta-active
/// direction p_i has <p_i, w> <= 0 for every value w of the map at x. With
/// `sufficient` set, also checks the stronger V_i(x) > 0 => V_i(w) <= 0 for
/// all i.
inline LyapunovReport check_lyapunov(const SupportSpec& spec, const MultiMap& mmap,
                                     std::span<const PlanePoint> samples, bool sufficient = false) {
  if (samples.empty()) throw EmptyGrid("no samples to certify");
  LyapunovReport rep;
  for (const auto& x : samples) {
    const auto sv = support_value(spec, x.vec());
    if (sv.value < spec.c) {
      ++rep.skipped_inside;
      continue;
    }
    ++rep.samples;
    const auto values = mmap(x);
    auto fail = [&](std::size_t i, const Vec3& w) {
      rep.holds = false;
      rep.witness = LyapunovWitness{x.vec(), i, w, dot(spec.dirs[i], w)};
    };
    for (std::size_t i : sv.active)
      for (const auto& w : values)
        if (dot(spec.dirs[i], w) > kLyapunovTol) {
          fail(i, w);
          return rep;
        }
    if (sufficient)
      for (std::size_t i = 0; i < spec.dirs.size(); ++i)
        if (dot(spec.dirs[i], x.vec()) > 0)
          for (const auto& w : values)
            if (dot(spec.dirs[i], w) > kLyapunovTol) {
              fail(i, w);
              return rep;
            }
  }
  if (rep.samples == 0) throw EmptyGrid("every sample lies inside the sublevel set");
  return rep;
}

/// Constants of the uniform decrease V(a w + (1-a) x) <= V(x) - a gamma.
struct LyapunovConstants {
  double M, delta, r, gamma, alpha0;
};

inline bool constants_feasible(const SupportSpec& spec, const LyapunovConstants& k) {
  const double bound = std::min({(spec.c - k.delta - k.gamma) / (spec.c - k.delta + k.M), k.r / (2 * k.M), 1.0});
  return k.r > 0 && k.r < k.delta / 2 && k.gamma > 0 && k.gamma < spec.c - k.delta && k.alpha0 > 0 &&
         k.alpha0 < bound;
}

/// One strictly feasible choice: r = delta/4, gamma = (c - delta)/2 and alpha0
/// at 90% of its upper limit. M must bound |x| over the domain.
inline LyapunovConstants t1_constants(const SupportSpec& spec, double M) {
  if (!(spec.delta < spec.c)) throw std::invalid_argument("infeasible: delta >= c");
  if (!(M > 0)) throw std::invalid_argument("M must be positive");
  LyapunovConstants k{M, spec.delta, spec.delta / 4, (spec.c - spec.delta) / 2, 0};
  k.alpha0 = 0.9 * std::min({(spec.c - spec.delta - k.gamma) / (spec.c - spec.delta + M), k.r / (2 * M), 1.0});
  if (!constants_feasible(spec, k)) throw std::invalid_argument("infeasible constants");
  return k;
}

/// sup |x| over the projected hexagon.
inline double plane_radius(const PayoffHull& S) {
  double m = 0;
  for (const auto& p : S.points()) m = std::max(m, norm(project_plane(p).vec()));
  return m;
}

struct DecreaseWitness {
  Vec3 x, omega;
  double alpha, lhs, rhs;
};

struct DecreaseReport {
  bool holds = true;
  std::optional<DecreaseWitness> witness;
  std::size_t checks = 0;
};

/// Checks V(a w + (1-a) x) <= V(x) - a gamma + 1e-9 for a in
/// {a0/8, a0/4, a0/2, a0}, every sample with V(x) >= c and every value w.
inline DecreaseReport decrease_check(const SupportSpec& spec, const MultiMap& mmap, const LyapunovConstants& k,
                                     std::span<const PlanePoint> samples) {
  DecreaseReport rep;
  const double alphas[] = {k.alpha0 / 8, k.alpha0 / 4, k.alpha0 / 2, k.alpha0};
  for (const auto& x : samples) {
    const double vx = support_max(spec.dirs, x.vec());
    if (vx < spec.c) continue;
    for (const auto& w : mmap(x))
      for (double a : alphas) {
        ++rep.checks;
        const double lhs = support_max(spec.dirs, a * w + (1 - a) * x.vec());
        const double rhs = vx - a * k.gamma;
        if (lhs > rhs + kLyapunovTol) {
          rep.holds = false;
          rep.witness = DecreaseWitness{x.vec(), w, a, lhs, rhs};
          return rep;
        }
      }
  }
  return rep;
}

struct EntrapmentReport {
  bool found = false;
  std::size_t entry = 0;        // least 1-based N with V(pi_P(x̄_n)) < c1 for all n >= N
  double tail_max = 0;          // max V over stages >= entry
  std::size_t exits_before = 0; // times the sublevel set was left before entry
};

inline EntrapmentReport entrapment_check(const SupportSpec& spec, const Trajectory& t, double c1) {
  if (!(c1 > spec.c)) throw std::invalid_argument("need c1 > c");
  EntrapmentReport rep;
  const std::size_t N = t.horizon();
  std::vector<double> v(N);
  for (std::size_t k = 0; k < N; ++k) v[k] = support_max(spec.dirs, project_plane(t.means[k]).vec());
  if (!(v.back() < c1)) return rep;
  std::size_t k = N;
  while (k > 0 && v[k - 1] < c1) --k;
  rep.found = true;
  rep.entry = k + 1;
  rep.tail_max = *std::max_element(v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  bool inside = v[0] < c1;
  for (std::size_t m = 1; m < k; ++m) {
    const bool now = v[m] < c1;
    if (inside && !now) ++rep.exits_before;
    inside = now;
  }
  return rep;
}

}  // namespace goodplay
