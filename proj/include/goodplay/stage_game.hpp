#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "goodplay/vec.hpp"

namespace goodplay {

/// Raised when a game parameter is NaN or infinite.
class NonFiniteParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation needs an admissible game and did not get one.
class InadmissibleGame : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Payoffs of the symmetric 3-player invest / not-invest game. A non-investor
/// receives r0, r1, r2 when 0, 1, 2 others invest; an investor receives
/// p1, p2, p3 when 1, 2, 3 players invest in total.
struct GameParams {
  double r0 = 0, r1 = 0, r2 = 0;
  double p1 = 0, p2 = 0, p3 = 0;

  friend bool operator==(const GameParams&, const GameParams&) = default;
};

/// The worked-example table used throughout the tests and CLI defaults.
inline constexpr GameParams kExampleGame{20, 28, 36, 10, 18, 26};

enum class Action { I, NI };

inline const char* to_string(Action a) { return a == Action::I ? "I" : "NI"; }

struct ActionProfile {
  std::array<Action, 3> a{Action::NI, Action::NI, Action::NI};

  constexpr Action operator[](std::size_t i) const { return a[i]; }
  constexpr int investors() const {
    return (a[0] == Action::I) + (a[1] == Action::I) + (a[2] == Action::I);
  }
  friend constexpr bool operator==(const ActionProfile&, const ActionProfile&) = default;
};

/// All 8 profiles, index bit i set means player i invests.
inline std::array<ActionProfile, 8> all_profiles() {
  std::array<ActionProfile, 8> out{};
  for (int m = 0; m < 8; ++m)
    for (int i = 0; i < 3; ++i)
      out[m].a[i] = (m >> i) & 1 ? Action::I : Action::NI;
  return out;
}

/// Admissibility constraint groups. Labels are stable identifiers printed by
/// the CLI.
enum class Constraint {
  kMonotone,        // 0 < r0 < r1 < r2 and 0 < p1 < p2 < p3
  kNashAllNI,       // p1 < r0
  kSumIncreasing,   // 3r0 < p1+2r1 < 2p2+r2 < 3p3
  kCoalition,       // p1 + r1 < 2p3
  kParetoNotNash,   // p2 < r2
};

inline const char* label(Constraint c) {
  switch (c) {
    case Constraint::kMonotone: return "monotone: 0<r0<r1<r2 and 0<p1<p2<p3";
    case Constraint::kNashAllNI: return "nash_all_ni: p1<r0";
    case Constraint::kSumIncreasing: return "sum_increasing: 3r0<p1+2r1<2p2+r2<3p3";
    case Constraint::kCoalition: return "coalition: p1+r1<2p3";
    case Constraint::kParetoNotNash: return "pareto_not_nash: p2<r2";
  }
  return "?";
}

struct ValidationReport {
  std::vector<Constraint> violated;
  bool ok() const { return violated.empty(); }
  bool violates(Constraint c) const {
    for (auto v : violated)
      if (v == c) return true;
    return false;
  }
};

/// Checks the five admissibility groups strictly, with no tolerance.
/// Throws NonFiniteParameter on NaN/inf input.
inline ValidationReport validate_params(const GameParams& g) {
  for (double v : {g.r0, g.r1, g.r2, g.p1, g.p2, g.p3})
    if (!std::isfinite(v)) throw NonFiniteParameter("game parameters must be finite");

  ValidationReport rep;
  if (!(0 < g.r0 && g.r0 < g.r1 && g.r1 < g.r2 && 0 < g.p1 && g.p1 < g.p2 && g.p2 < g.p3))
    rep.violated.push_back(Constraint::kMonotone);
  if (!(g.p1 < g.r0)) rep.violated.push_back(Constraint::kNashAllNI);
  const double s0 = 3 * g.r0, s1 = g.p1 + 2 * g.r1, s2 = 2 * g.p2 + g.r2, s3 = 3 * g.p3;
  if (!(s0 < s1 && s1 < s2 && s2 < s3)) rep.violated.push_back(Constraint::kSumIncreasing);
  if (!(g.p1 + g.r1 < 2 * g.p3)) rep.violated.push_back(Constraint::kCoalition);
  if (!(g.p2 < g.r2)) rep.violated.push_back(Constraint::kParetoNotNash);
  return rep;
}

inline void require_admissible(const GameParams& g) {
  auto rep = validate_params(g);
  if (!rep.ok()) throw InadmissibleGame(std::string("inadmissible game: ") + label(rep.violated.front()));
}

/// Payoff of an investor when n players invest in total (n = 1..3).
inline double investor_payoff(const GameParams& g, int n) {
  switch (n) {
    case 1: return g.p1;
    case 2: return g.p2;
    case 3: return g.p3;
  }
  throw std::out_of_range("investor count must be 1..3");
}

/// Payoff of a non-investor when n players invest in total (n = 0..2).
inline double non_investor_payoff(const GameParams& g, int n) {
  switch (n) {
    case 0: return g.r0;
    case 1: return g.r1;
    case 2: return g.r2;
  }
  throw std::out_of_range("investor count must be 0..2");
}

/// The vector payoff G(profile). Indexes the two payoff columns by the
/// number of investors, so it is permutation-equivariant by construction.
inline PayoffVector payoff(const GameParams& g, const ActionProfile& profile) {
  const int n = profile.investors();
  PayoffVector x;
  for (std::size_t i = 0; i < 3; ++i)
    x[i] = profile[i] == Action::I ? investor_payoff(g, n) : non_investor_payoff(g, n);
  return x;
}

enum class VertexLabel { A, B, C1_1, C1_2, C1_3, C2_1, C2_2, C2_3 };

inline constexpr std::array<VertexLabel, 8> kAllVertexLabels{
    VertexLabel::A,    VertexLabel::B,    VertexLabel::C1_1, VertexLabel::C1_2,
    VertexLabel::C1_3, VertexLabel::C2_1, VertexLabel::C2_2, VertexLabel::C2_3};

inline const char* to_string(VertexLabel v) {
  constexpr const char* names[] = {"A", "B", "C1_1", "C1_2", "C1_3", "C2_1", "C2_2", "C2_3"};
  return names[static_cast<int>(v)];
}

/// Payoff vectors of the pure profiles. C1_j: player j invests alone.
/// C2_j: player j is the only non-investor.
struct VertexSet {
  PayoffVector A, B;
  std::array<PayoffVector, 3> C1, C2;

  const PayoffVector& operator[](VertexLabel v) const {
    switch (v) {
      case VertexLabel::A: return A;
      case VertexLabel::B: return B;
      case VertexLabel::C1_1: return C1[0];
      case VertexLabel::C1_2: return C1[1];
      case VertexLabel::C1_3: return C1[2];
      case VertexLabel::C2_1: return C2[0];
      case VertexLabel::C2_2: return C2[1];
      case VertexLabel::C2_3: return C2[2];
    }
    return A;
  }

  std::array<PayoffVector, 8> all() const {
    std::array<PayoffVector, 8> out{};
    for (std::size_t k = 0; k < 8; ++k) out[k] = (*this)[kAllVertexLabels[k]];
    return out;
  }
};

inline VertexSet vertices(const GameParams& g) {
  VertexSet v;
  v.A = {g.r0, g.r0, g.r0};
  v.B = {g.p3, g.p3, g.p3};
  for (std::size_t j = 0; j < 3; ++j) {
    v.C1[j] = {g.r1, g.r1, g.r1};
    v.C1[j][j] = g.p1;
    v.C2[j] = {g.p2, g.p2, g.p2};
    v.C2[j][j] = g.r2;
  }
  return v;
}

}  // namespace goodplay
