#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "goodplay/polytope.hpp"
#include "goodplay/vec.hpp"

namespace goodplay {

enum class Summation {
  kIncremental,  // mean_{n+1} = (n mean_n + x_{n+1}) / (n+1)
  kCompensated,  // Neumaier-compensated running sum divided by n
};

/// Running means of the stage payoffs. Index k (0-based) holds stage n = k+1:
/// means[k] is the mean of steps[0..k], and steps[0] is the start x1.
struct Trajectory {
  std::vector<PayoffVector> means;
  std::vector<PayoffVector> steps;

  std::size_t horizon() const { return means.size(); }
  const PayoffVector& start() const { return steps.front(); }
  const PayoffVector& final_mean() const { return means.back(); }
};

/// Runs x̄_{n+1} = (n x̄_n + phi(x̄_n)) / (n+1) from x̄_1 = x1 for N stages.
/// phi may carry state (random strategies); it is called exactly N-1 times in
/// order.
template <class Map>
Trajectory iterate(Map&& phi, const PayoffVector& x1, std::size_t N, Summation mode = Summation::kIncremental) {
  if (N < 1) throw std::invalid_argument("horizon must be at least 1");
  Trajectory t;
  t.means.reserve(N);
  t.steps.reserve(N);
  t.means.push_back(x1);
  t.steps.push_back(x1);
  PayoffVector mean = x1;
  PayoffVector total = x1, comp{};
  for (std::size_t n = 1; n < N; ++n) {
    const PayoffVector step = phi(mean);
    if (mode == Summation::kIncremental) {
      const double dn = static_cast<double>(n);
      mean = (dn * mean + step) / (dn + 1.0);
    } else {
      for (std::size_t i = 0; i < 3; ++i) {
        const double s = total[i] + step[i];
        comp[i] += std::abs(total[i]) >= std::abs(step[i]) ? (total[i] - s) + step[i] : (step[i] - s) + total[i];
        total[i] = s;
      }
      mean = (total + comp) / static_cast<double>(n + 1);
    }
    t.steps.push_back(step);
    t.means.push_back(mean);
  }
  return t;
}

/// N0 with |beta_n(x) - x| < xi for every n > N0, every x and every map phi,
/// given M >= diam S: the displacement is |phi(x) - x| / (n+1) <= M / (n+1).
inline std::size_t step_size_bound(double diameter_bound, double xi) {
  if (!(diameter_bound >= 0) || !(xi > 0)) throw std::invalid_argument("need M >= 0 and xi > 0");
  const double r = std::ceil(diameter_bound / xi);
  return std::max<std::size_t>(1, static_cast<std::size_t>(r));
}

/// First 0-based index of the tail window [ceil((1-w)N), N] (1-based).
inline std::size_t tail_begin(std::size_t N, double w) {
  if (!(w > 0 && w < 1)) throw std::invalid_argument("tail window must lie in (0, 1)");
  if (static_cast<double>(N) * w < 1) throw std::invalid_argument("tail window holds no stage");
  const auto first = static_cast<std::size_t>(std::ceil((1 - w) * static_cast<double>(N)));
  return first == 0 ? 0 : first - 1;
}

/// Estimates of limsup / liminf of a functional of the means over the tail.
struct TailStats {
  double window;
  double max;
  double min;
};

template <class F>
TailStats tail_stats(const Trajectory& t, F&& f, double w = 0.5) {
  const std::size_t b = tail_begin(t.horizon(), w);
  TailStats s{w, -INFINITY, INFINITY};
  for (std::size_t k = b; k < t.horizon(); ++k) {
    const double v = f(t.means[k]);
    s.max = std::max(s.max, v);
    s.min = std::min(s.min, v);
  }
  return s;
}

template <class F>
double tail_limsup(const Trajectory& t, F&& f, double w = 0.5) {
  return tail_stats(t, std::forward<F>(f), w).max;
}

template <class F>
double tail_liminf(const Trajectory& t, F&& f, double w = 0.5) {
  return tail_stats(t, std::forward<F>(f), w).min;
}

inline std::function<double(const PayoffVector&)> coordinate(std::size_t i) {
  return [i](const PayoffVector& x) { return x[i]; };
}

/// Witness for the mixing property: the distance from the weighted average
/// (T a0 + sum n_i a_i) / (T + n) to co{a_1..a_k}.
struct MixingReport {
  PayoffVector point;
  double distance;
  bool inside;
};

inline MixingReport mixing_bound_check(const PayoffVector& a0, std::span<const PayoffVector> a, std::size_t T,
                                       std::span<const std::size_t> counts, double eps) {
  if (a.empty() || a.size() != counts.size()) throw std::invalid_argument("need one count per point");
  double total = static_cast<double>(T);
  PayoffVector acc = static_cast<double>(T) * a0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(counts[i]) * a[i];
    total += static_cast<double>(counts[i]);
  }
  const PayoffVector p = acc / total;
  const double d = distance(p, project_hull(p, a));
  return {p, d, d < eps};
}

// Scalar sequences.

inline std::vector<double> running_means(std::span<const double> a) {
  std::vector<double> out;
  out.reserve(a.size());
  double mean = 0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    mean = (static_cast<double>(n) * mean + a[n]) / static_cast<double>(n + 1);
    out.push_back(mean);
  }
  return out;
}

inline double tail_max(std::span<const double> v, double w = 0.5) {
  const std::size_t b = tail_begin(v.size(), w);
  return *std::max_element(v.begin() + static_cast<std::ptrdiff_t>(b), v.end());
}

}  // namespace goodplay
