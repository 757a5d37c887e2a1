#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "goodplay/geometry.hpp"
#include "goodplay/stage_game.hpp"

namespace goodplay {

/// Invests iff the average payoff lies in V_i = OmegaEps(i, eps) \ W(i).
struct GoodStrategy {
  std::size_t player;
  double eps;
  GameParams params;

  Action operator()(const PayoffVector& x) const {
    return in_v(params, x, player, eps) ? Action::I : Action::NI;
  }
};

struct ConstantStrategy {
  Action action;
  Action operator()(const PayoffVector&) const { return action; }
};

/// Ignores the history and invests with probability p at every stage.
///
/// Generator: std::mt19937_64 seeded with `seed`. Each stage consumes one
/// 64-bit output w and invests iff (w >> 11) * 2^-53 < p. Both the engine and
/// this conversion are fully specified, so transcripts are bit-reproducible
/// across platforms (std::bernoulli_distribution is not).
struct RandomStrategy {
  double p;
  std::uint64_t seed;
  std::mt19937_64 engine;

  RandomStrategy(double prob, std::uint64_t s) : p(prob), seed(s), engine(s) {}

  Action operator()(const PayoffVector&) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    return u < p ? Action::I : Action::NI;
  }
};

/// A deviation for player 3 against two eps-good players in the worked
/// example game: play NI exactly on V_1 ∩ Z ∩ co{B, D, C1_3}, where
/// Z = {x1 = x2} and D = (26 - eps/2, 26 - eps/2, 26 + eps/2).
struct Example2Defector {
  GameParams params;
  double eps;

  static constexpr double kTol = 1e-10;

  Example2Defector(const GameParams& g, double e) : params(g), eps(e) {
    if (!(g == kExampleGame)) throw std::invalid_argument("defector is defined for the worked example game only");
    if (!(e > 0 && e < 0.5)) throw std::invalid_argument("defector eps must lie in (0, 1/2)");
    const auto v = vertices(g);
    const PayoffVector d = point_d();
    tri_ = {v.B[0], v.B[2], d[0], d[2], v.C1[2][0], v.C1[2][2]};
  }

  PayoffVector point_d() const { return {26 - eps / 2, 26 - eps / 2, 26 + eps / 2}; }

  /// Membership in the triangle co{B, D, C1_3}, evaluated in the (x1, x3)
  /// coordinates of the plane Z.
  bool in_triangle(const PayoffVector& x) const {
    const auto [ax, ay, bx, by, cx, cy] = tri_;
    const double px = x[0], py = x[2];
    const double det = (by - cy) * (ax - cx) + (cx - bx) * (ay - cy);
    const double l1 = ((by - cy) * (px - cx) + (cx - bx) * (py - cy)) / det;
    const double l2 = ((cy - ay) * (px - cx) + (ax - cx) * (py - cy)) / det;
    const double l3 = 1 - l1 - l2;
    return l1 >= -kTol && l2 >= -kTol && l3 >= -kTol;
  }

  bool in_z(const PayoffVector& x) const { return std::abs(x[0] - x[1]) <= kTol; }

  Action operator()(const PayoffVector& x) const {
    if (in_z(x) && in_v(params, x, 0, eps) && in_triangle(x)) return Action::NI;
    return Action::I;
  }

 private:
  std::array<double, 6> tri_{};
};

/// Any user-supplied deterministic rule.
struct CustomStrategy {
  std::string label;
  std::function<Action(const PayoffVector&)> rule;
  Action operator()(const PayoffVector& x) const { return rule(x); }
};

/// A total map from S to {I, NI}. Value type: copying a random strategy
/// copies its generator state.
class Strategy {
 public:
  using Impl = std::variant<GoodStrategy, ConstantStrategy, RandomStrategy, Example2Defector, CustomStrategy>;

  Strategy(Impl impl) : impl_(std::move(impl)) {}

  Action operator()(const PayoffVector& x) {
    return std::visit([&](auto& s) { return s(x); }, impl_);
  }

  const Impl& impl() const { return impl_; }
  template <class T>
  const T* as() const {
    return std::get_if<T>(&impl_);
  }

  std::string name() const {
    return std::visit(
        [](const auto& s) -> std::string {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, GoodStrategy>) return "good(eps=" + fmt_num(s.eps) + ")";
          else if constexpr (std::is_same_v<S, ConstantStrategy>) return std::string("constant(") + to_string(s.action) + ")";
          else if constexpr (std::is_same_v<S, RandomStrategy>)
            return "random(p=" + fmt_num(s.p) + ",seed=" + std::to_string(s.seed) + ")";
          else if constexpr (std::is_same_v<S, Example2Defector>) return "example2_defector(eps=" + fmt_num(s.eps) + ")";
          else return s.label;
        },
        impl_);
  }

  /// Same strategy with its generator restarted from `seed` (no-op for
  /// deterministic strategies).
  Strategy reseeded(std::uint64_t seed) const {
    if (const auto* r = as<RandomStrategy>()) return Strategy(RandomStrategy(r->p, seed));
    return *this;
  }

  /// The same rule assigned to another player slot (good strategies only
  /// depend on their own index).
  Strategy for_player(std::size_t player) const {
    if (const auto* g = as<GoodStrategy>()) return Strategy(GoodStrategy{player, g->eps, g->params});
    return *this;
  }

 private:
  static std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
  }
  Impl impl_;
};

using StrategyProfile = std::array<Strategy, 3>;

/// splitmix64 step; derives independent child seeds from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Strategy good_strategy(std::size_t player, double eps, const GameParams& g) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  if (player > 2) throw std::out_of_range("player index must be 0..2");
  require_admissible(g);
  return Strategy(GoodStrategy{player, eps, g});
}

inline Strategy constant_strategy(Action a) { return Strategy(ConstantStrategy{a}); }

inline Strategy random_strategy(double prob_invest, std::uint64_t seed) {
  if (!(prob_invest >= 0 && prob_invest <= 1)) throw std::invalid_argument("probability must lie in [0, 1]");
  return Strategy(RandomStrategy(prob_invest, seed));
}

inline Strategy example2_defector(const GameParams& g, double eps) { return Strategy(Example2Defector(g, eps)); }

inline Strategy custom_strategy(std::string label, std::function<Action(const PayoffVector&)> rule) {
  return Strategy(CustomStrategy{std::move(label), std::move(rule)});
}

inline StrategyProfile all_good_profile(const GameParams& g, double eps) {
  return {good_strategy(0, eps, g), good_strategy(1, eps, g), good_strategy(2, eps, g)};
}

/// phi = G o s: the stage payoff produced when every player reacts to the
/// current average x. Holds its own copy of the profile.
class InducedMap {
 public:
  InducedMap(StrategyProfile profile, const GameParams& g) : profile_(std::move(profile)), params_(g) {}

  ActionProfile actions(const PayoffVector& x) {
    return ActionProfile{{profile_[0](x), profile_[1](x), profile_[2](x)}};
  }

  PayoffVector operator()(const PayoffVector& x) { return payoff(params_, actions(x)); }

  const StrategyProfile& profile() const { return profile_; }
  const GameParams& params() const { return params_; }

 private:
  StrategyProfile profile_;
  GameParams params_;
};

inline InducedMap induced_map(StrategyProfile profile, const GameParams& g) {
  return InducedMap(std::move(profile), g);
}

}  // namespace goodplay
