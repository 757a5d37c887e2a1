#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "goodplay/approachability.hpp"
#include "goodplay/harness.hpp"

using namespace goodplay;

namespace {
const Vec3 a{0, -1, 0}, b{2, 1, 0}, d{1, 0, 0};
const Example1Map phi1{a, b};

std::vector<Vec3> plane_box() { return box_grid({-3, -3, 0}, {5, 3, 0}, 0.25); }

struct Const {
  Vec3 v;
  Vec3 operator()(const Vec3&) const { return v; }
};
}  // namespace

TEST(Oracle, NearestPoints) {
  EXPECT_EQ(ProximalOracle::point(d).nearest({5, 5, 5}).front(), d);
  EXPECT_EQ(ProximalOracle::line(d, {1, 0, 0}).nearest({3, 2, 0}).front(), (Vec3{3, 0, 0}));
  EXPECT_EQ(ProximalOracle::segment(a, b).nearest({10, 1, 0}).front(), b);
  const auto ties = ProximalOracle::segments({{{-1, 1, 0}, {-1, -1, 0}}, {{1, 1, 0}, {1, -1, 0}}}).nearest({0, 0, 0});
  EXPECT_EQ(ties.size(), 2u);
  const auto hull = ProximalOracle::hull({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}});
  EXPECT_NEAR(hull.distance_to({1, 1, 0}), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(hull.distance_to({0.2, 0.2, 3}), 3, 1e-12);
}

TEST(Oracle, PolytopeMatchesHull) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  const std::vector<Vec3> cube{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}};
  const auto h = ProximalOracle::hull(cube);
  const auto p = ProximalOracle::polytope(hull_halfspaces(cube));
  for (int k = 0; k < 500; ++k) {
    const Vec3 x{u(rng), u(rng), u(rng)};
    Vec3 clamp{std::clamp(x[0], 0.0, 1.0), std::clamp(x[1], 0.0, 1.0), std::clamp(x[2], 0.0, 1.0)};
    EXPECT_NEAR(h.distance_to(x), distance(x, clamp), 1e-9);
    EXPECT_NEAR(p.distance_to(x), distance(x, clamp), 1e-9);
  }
}

TEST(Oracle, Sampling) {
  const auto pts = ProximalOracle::segment({0, 0, 0}, {1, 0, 0}).sample(0.25);
  EXPECT_EQ(pts.size(), 5u);
  EXPECT_THROW(ProximalOracle::line(d, {1, 0, 0}).sample(0.1), std::invalid_argument);
  EXPECT_THROW(ProximalOracle::line(d, {0, 0, 0}), std::invalid_argument);
}

TEST(Blackwell, ExampleOneLineAndSegmentHold) {
  const auto dom = plane_box();
  EXPECT_TRUE(check_blackwell(phi1, ProximalOracle::line(d, {1, 0, 0}), dom, 0.25).holds);
  EXPECT_TRUE(check_blackwell(phi1, ProximalOracle::segment(a, b), dom, 0.25).holds);
}

TEST(Blackwell, ExampleOneSingletonWitness) {
  const std::vector<Vec3> one{{2, 0, 0}};
  const auto r = check_blackwell(phi1, ProximalOracle::point(d), one, 0.25);
  ASSERT_FALSE(r.holds);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->phi_x, b);
  EXPECT_EQ(r.witness->inner, 1.0);
  // Re-evaluating the witness reproduces the inner product exactly.
  EXPECT_EQ(dot(r.witness->x - r.witness->y, r.witness->phi_x - r.witness->y), r.witness->inner);
  const auto full = check_blackwell(phi1, ProximalOracle::point(d), plane_box(), 0.25);
  EXPECT_FALSE(full.holds);
  EXPECT_GT(full.witness->inner, 0);
}

TEST(Decay, ConstantMapIntoPoint) {
  const auto t = iterate(Const{d}, {5, 5, 0}, 10000);
  const auto r = decay_bound_check(t, ProximalOracle::point(d), 1);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.premise_failures, 0u);
  EXPECT_EQ(r.sharp_violations, 0u);
}

TEST(Decay, ExampleOneSegment) {
  for (const Vec3 x1 : {Vec3{-3, 2, 0}, Vec3{4, -2, 0}, Vec3{0.3, 0.1, 0}}) {
    Example1Map f = phi1;
    const auto t = iterate(f, x1, 20000);
    const auto r = decay_bound_check(t, ProximalOracle::segment(a, b), 1);
    EXPECT_TRUE(r.holds);
    EXPECT_EQ(r.sharp_violations, 0u);
    EXPECT_EQ(r.premise_failures, 0u);
  }
}

TEST(Decay, AllGoodRunAgainstImageHull) {
  const auto& g = kExampleGame;
  const auto v = vertices(g);
  // Every value of the all-good map lies in the hull of the vertices, and
  // the iteration enters V1∩V2∩V3 where the value is B.
  const auto region = ProximalOracle::hull({v.A, v.B, v.C1[0], v.C1[1], v.C1[2], v.C2[0], v.C2[1], v.C2[2]});
  auto phi = induced_map(all_good_profile(g, 0.4), g);
  const auto t = iterate(phi, v.C1[0], 5000);
  const auto r = decay_bound_check(t, region, 1);
  EXPECT_TRUE(r.holds);
  const auto seg = ProximalOracle::point(v.B);
  const auto rb = decay_bound_check(t, seg, 1);
  EXPECT_EQ(rb.violations, 0u);
}

TEST(Attractor, ExampleOnePoint) {
  const std::vector<Vec3> starts{{-4, 3, 0}, {5, -5, 0}, {1, 0, 0}};
  const auto r = verify_weak_attractor(phi1, ProximalOracle::point(d), starts, 100000, 0.05);
  EXPECT_TRUE(r.pass) << r.max_final_distance;
  EXPECT_EQ(r.series.size(), 3u);
}

TEST(Attractor, MapIntoConvexRegion) {
  const auto region = ProximalOracle::hull({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}});
  const std::vector<Vec3> starts{{10, 10, 10}};
  const std::size_t N = 10000;
  const auto r = verify_weak_attractor(Const{{0.2, 0.2, 0}}, region, starts, N, region.distance_to(starts[0]) / N);
  EXPECT_TRUE(r.pass);
}

TEST(Attractor, DisjointRegionFails) {
  const std::vector<Vec3> starts{{0, 0, 0}};
  const auto r = verify_weak_attractor(phi1, ProximalOracle::point({10, 10, 0}), starts, 1000, 0.1);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.max_final_distance, 1);
}

TEST(Intersection, ExampleOne) {
  Example1Map f = phi1;
  const auto t = iterate(f, {-2, 2, 0}, 100000);
  const auto r = intersect_attractors(t, ProximalOracle::line(d, {1, 0, 0}), ProximalOracle::segment(a, b), 0.05, 0.01);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.intersection_samples, 0u);
}

TEST(Intersection, SameRegion) {
  Example1Map f = phi1;
  const auto t = iterate(f, {-2, 2, 0}, 10000);
  const auto s = ProximalOracle::segment(a, b);
  EXPECT_TRUE(intersect_attractors(t, s, s, 0.05, 0.01).pass);
}

TEST(Intersection, EmptySampleThrows) {
  Example1Map f = phi1;
  const auto t = iterate(f, {-2, 2, 0}, 100);
  EXPECT_THROW(intersect_attractors(t, ProximalOracle::point({50, 50, 0}), ProximalOracle::segment(a, b), 0.05, 0.01),
               std::runtime_error);
}

TEST(Refinement, SameRegionIsVacuous) {
  const auto s = ProximalOracle::segment(a, b);
  const std::vector<std::pair<double, double>> sched{{0.1, 0.1}};
  const std::vector<Vec3> starts{{0, 0, 0}};
  const auto r = refine_attractor(phi1, s, s, sched, plane_box(), 0.25, starts, 100, 0.1);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.vacuous);
}

TEST(Refinement, WorkedExampleSegments) {
  const auto& g = kExampleGame;
  const double eps = 0.4;
  const auto v = vertices(g);
  const Vec3 D{25.8, 25.8, 26.2};
  const InducedMap phi({good_strategy(0, eps, g), good_strategy(1, eps, g), example2_defector(g, eps)}, g);
  const auto outer = ProximalOracle::segments({{v.B, D}, {D, v.C1[2]}});
  const auto inner = ProximalOracle::segment(v.B, D);
  const auto dom = example2_z_samples(g, 0.1);
  const std::vector<Vec3> starts{v.A, v.B, v.C2[2]};
  const std::vector<std::pair<double, double>> sched{{0.5, 0.2}, {0.2, 0.1}};
  const auto r = refine_attractor(phi, outer, inner, sched, dom, 0.1, starts, 50000, 0.05);
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.steps.size(), 2u);
  for (const auto& s : r.steps) EXPECT_GT(s.domain_samples, 0u);
}

TEST(Refinement, LargeDeltaBreaksTheCondition) {
  const auto& g = kExampleGame;
  const double eps = 0.4;
  const auto v = vertices(g);
  const Vec3 D{25.8, 25.8, 26.2};
  const InducedMap phi({good_strategy(0, eps, g), good_strategy(1, eps, g), example2_defector(g, eps)}, g);
  const auto outer = ProximalOracle::segments({{v.B, D}, {D, v.C1[2]}});
  const auto inner = ProximalOracle::segment(v.B, D);
  const auto dom = example2_z_samples(g, 0.1);
  const std::vector<Vec3> starts{v.A};
  const std::vector<std::pair<double, double>> sched{{0.2, 30.0}};
  const auto r = refine_attractor(phi, outer, inner, sched, dom, 0.1, starts, 1000, 0.05);
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.steps[0].blackwell.witness);
  EXPECT_GT(r.steps[0].blackwell.witness->inner, 0);
}

TEST(Grid, BoxShape) {
  EXPECT_EQ(box_grid({0, 0, 0}, {1, 1, 0}, 0.5).size(), 9u);
  EXPECT_EQ(box_grid({0, 0, 0}, {1, 1, 1}, 0.5).size(), 27u);
  EXPECT_THROW(box_grid({0, 0, 0}, {1, 1, 1}, 0), std::invalid_argument);
}
