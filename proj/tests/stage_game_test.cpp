#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "goodplay/stage_game.hpp"

using namespace goodplay;

TEST(Validate, WorkedExampleIsAdmissible) { EXPECT_TRUE(validate_params(kExampleGame).ok()); }

TEST(Validate, BoundaryP1EqualsR0BreaksNashProperty) {
  const auto rep = validate_params({20, 28, 36, 20, 18, 26});
  EXPECT_TRUE(rep.violates(Constraint::kNashAllNI));
}

TEST(Validate, TiedSumChainIsRejected) {
  // 2*18 + 36 = 72 = 3*24.
  const auto rep = validate_params({20, 28, 36, 10, 18, 24});
  ASSERT_EQ(rep.violated.size(), 1u);
  EXPECT_TRUE(rep.violates(Constraint::kSumIncreasing));
}

TEST(Validate, EachGroupCanFailAlone) {
  EXPECT_TRUE(validate_params({20, 28, 36, 10, 18, 26}).ok());
  // p2 >= r2 while keeping the rest
  auto r = validate_params({20, 28, 29, 10, 29.5, 40});
  EXPECT_TRUE(r.violates(Constraint::kParetoNotNash));
  r = validate_params({20, 40, 50, 19, 30, 29.4});
  EXPECT_TRUE(r.violates(Constraint::kCoalition));
  r = validate_params({-1, 28, 36, 10, 18, 26});
  EXPECT_TRUE(r.violates(Constraint::kMonotone));
}

TEST(Validate, NonFiniteInputHasItsOwnError) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(validate_params({20, 28, 36, nan, 18, 26}), NonFiniteParameter);
  EXPECT_THROW(validate_params({20, 28, INFINITY, 10, 18, 26}), NonFiniteParameter);
  EXPECT_THROW(require_admissible({20, 28, 36, 20, 18, 26}), InadmissibleGame);
}

TEST(Payoff, WorkedExampleRows) {
  const auto& g = kExampleGame;
  EXPECT_EQ(payoff(g, {{Action::I, Action::I, Action::I}}), (Vec3{26, 26, 26}));
  EXPECT_EQ(payoff(g, {{Action::NI, Action::NI, Action::NI}}), (Vec3{20, 20, 20}));
  EXPECT_EQ(payoff(g, {{Action::I, Action::NI, Action::NI}}), (Vec3{10, 28, 28}));
  EXPECT_EQ(payoff(g, {{Action::NI, Action::I, Action::I}}), (Vec3{36, 18, 18}));
}

TEST(Payoff, PermutationEquivariance) {
  const auto& g = kExampleGame;
  std::array<int, 3> perm{0, 1, 2};
  do {
    for (const auto& prof : all_profiles()) {
      ActionProfile moved;
      for (int i = 0; i < 3; ++i) moved.a[perm[i]] = prof.a[i];
      const Vec3 x = payoff(g, prof), y = payoff(g, moved);
      for (int i = 0; i < 3; ++i) EXPECT_EQ(y[perm[i]], x[i]);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(Payoff, SumStrictlyIncreasesWithInvestors) {
  const auto& g = kExampleGame;
  std::array<double, 4> s{NAN, NAN, NAN, NAN};
  for (const auto& p : all_profiles()) {
    const double v = sum(payoff(g, p));
    const int n = p.investors();
    if (std::isnan(s[n])) s[n] = v;
    EXPECT_DOUBLE_EQ(s[n], v);
  }
  EXPECT_DOUBLE_EQ(s[0], 3 * g.r0);
  EXPECT_DOUBLE_EQ(s[3], 3 * g.p3);
  for (int n = 0; n < 3; ++n) EXPECT_LT(s[n], s[n + 1]);
}

TEST(Vertices, WorkedExample) {
  const auto v = vertices(kExampleGame);
  EXPECT_EQ(v.A, (Vec3{20, 20, 20}));
  EXPECT_EQ(v.B, (Vec3{26, 26, 26}));
  EXPECT_EQ(v.C2[0], (Vec3{36, 18, 18}));
  EXPECT_EQ(v.C1[2], (Vec3{28, 28, 10}));
  EXPECT_EQ(v[VertexLabel::C1_1], (Vec3{10, 28, 28}));
}

TEST(Vertices, MatchProfilesByInvestorPattern) {
  const auto& g = kExampleGame;
  const auto v = vertices(g);
  for (std::size_t j = 0; j < 3; ++j) {
    ActionProfile alone{{Action::NI, Action::NI, Action::NI}};
    alone.a[j] = Action::I;
    EXPECT_EQ(payoff(g, alone), v.C1[j]);
    ActionProfile out{{Action::I, Action::I, Action::I}};
    out.a[j] = Action::NI;
    EXPECT_EQ(payoff(g, out), v.C2[j]);
  }
}

TEST(Profiles, EightDistinct) {
  const auto ps = all_profiles();
  for (std::size_t a = 0; a < ps.size(); ++a)
    for (std::size_t b = a + 1; b < ps.size(); ++b) EXPECT_NE(ps[a].a, ps[b].a);
}
