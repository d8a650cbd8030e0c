#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kin_oracles.hpp"
#include "origami/kinematics.hpp"

using namespace origami;
using kin::VertexCrease;

namespace {

constexpr double pi = std::numbers::pi;

// Square seed on 9x9 with corner (3,3) extended towards -y, -x and the diagonal.
CreaseGraph corner_pattern(int mode) {
  Board board(9, 9, {});
  auto g = seed_square(board, 1, {4, 4});
  const int c1 = g.vertex_at({3, 3});
  const int a = g.add_vertex({3, 1});
  const int b = g.add_vertex({1, 3});
  const int d = g.add_vertex({1, 1});
  g.add_crease(c1, a);
  g.add_crease(c1, b);
  g.add_crease(c1, d);
  g.vertex(c1).extended = true;
  g.vertex(c1).mode = mode;
  return g;
}

}  // namespace

TEST(SectorAngles, AxisAligned) {
  CreaseGraph g(5, 5);
  const int c = g.add_vertex({2, 2});
  for (Cell q : {Cell{4, 2}, Cell{2, 4}, Cell{0, 2}, Cell{2, 0}}) g.add_crease(c, g.add_vertex(q));
  const auto sa = kin::sector_angles(g, c);
  ASSERT_EQ(sa.angles.size(), 4u);
  for (double a : sa.angles) EXPECT_NEAR(a, pi / 2, 1e-12);
}

TEST(SectorAngles, MixedDirections) {
  // Directions 0, 60, 180, 270 degrees; 60 degrees needs an irrational
  // lattice direction, so build the vertex list directly.
  std::vector<double> th{0, pi / 3, pi, 3 * pi / 2};
  std::vector<double> expect{pi / 3, 2 * pi / 3, pi / 2, pi / 2};
  for (std::size_t k = 0; k < 4; ++k) {
    const double next = k + 1 < 4 ? th[k + 1] : th[0] + 2 * pi;
    EXPECT_NEAR(next - th[k], expect[k], 1e-12);
  }
  CreaseGraph g(9, 9);
  const int c = g.add_vertex({4, 4});
  for (Cell q : {Cell{8, 4}, Cell{5, 7}, Cell{0, 4}, Cell{4, 0}}) g.add_crease(c, g.add_vertex(q));
  const auto sa = kin::sector_angles(g, c);
  const double t1 = std::atan2(3.0, 1.0);
  EXPECT_NEAR(sa.angles[0], t1, 1e-12);
  EXPECT_NEAR(sa.angles[1], pi - t1, 1e-12);
  EXPECT_NEAR(sa.angles[2], pi / 2, 1e-12);
  EXPECT_NEAR(sa.angles[3], pi / 2, 1e-12);
}

TEST(SectorAngles, SumToFullTurn) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> cell(0, 10);
  for (int trial = 0; trial < 50; ++trial) {
    CreaseGraph g(11, 11);
    const int c = g.add_vertex({5, 5});
    for (int k = 0; k < 5; ++k) {
      Cell q{cell(rng), cell(rng)};
      if (g.vertex_at(q) >= 0) continue;
      g.add_crease(c, g.add_vertex(q));
    }
    if (g.incident(c).empty()) continue;
    double sum = 0;
    for (double a : kin::sector_angles(g, c).angles) sum += a;
    EXPECT_NEAR(sum, 2 * pi, 1e-12);
  }
}

TEST(SphericalTriangle, Examples) {
  EXPECT_TRUE(kin::spherical_triangle_ok({pi / 2, pi / 2, pi / 2}));
  EXPECT_FALSE(kin::spherical_triangle_ok({0.1, 0.1, 1.0}));
  EXPECT_TRUE(kin::spherical_triangle_ok({0.3, 0.7, 1.0}));
}

TEST(UnitAngles, FlatReduction) {
  std::vector<VertexCrease> cs{{0.0, true, 0}, {0.7, false, 0}, {1.9, true, 0}, {3.0, false, 0}, {4.2, true, 0}};
  const auto u = kin::unit_angles(cs);
  auto arc = [](double a) { return std::min(a, 2 * pi - a); };
  EXPECT_NEAR(u.u1, arc(1.9), 1e-12);
  EXPECT_NEAR(u.u2, arc(4.2 - 1.9), 1e-12);
  EXPECT_NEAR(u.u3, arc(2 * pi - 4.2), 1e-12);
}

TEST(UnitAngles, SourceVertexMatchesSectors) {
  std::vector<VertexCrease> cs{{0.0, true, 0}, {2.0, true, 0}, {4.0, true, 0}};
  const auto u = kin::unit_angles(cs);
  EXPECT_NEAR(u.u1, 2.0, 1e-12);
  EXPECT_NEAR(u.u2, 2.0, 1e-12);
  EXPECT_NEAR(u.u3, 2 * pi - 4.0, 1e-12);
}

TEST(UnitAngles, DegreeFiveAgreesWithRotationOracle) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> rho(-2.5, 2.5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<VertexCrease> cs{{0.2, true, 0}, {1.1, false, rho(rng)}, {2.3, false, rho(rng)},
                                 {3.5, true, 0}, {5.0, true, 0}};
    const auto u = kin::unit_angles(cs);
    // Folded direction of crease 3 seen from crease 0's panel.
    Eigen::Vector3d d3(std::cos(3.5), std::sin(3.5), 0);
    Eigen::Vector3d d0(std::cos(0.2), std::sin(0.2), 0);
    const Eigen::Matrix3d fan = test_oracle::rodrigues(cs[1].theta, cs[1].rho) * test_oracle::rodrigues(cs[2].theta, cs[2].rho);
    EXPECT_NEAR(u.u1, std::acos(std::clamp(d0.dot(fan * d3), -1.0, 1.0)), 1e-9);
    EXPECT_NEAR(u.u2, 1.5, 1e-9);
    EXPECT_NEAR(u.u3, 2 * pi - 4.8, 1e-9);
  }
}

TEST(SolveVertex, FlatStaysFlat) {
  std::vector<VertexCrease> cs{{0.0, true, 0}, {1.0, false, 0}, {2.5, true, 0}, {4.0, true, 0}};
  const auto out = kin::solve_vertex(cs, 1);
  for (double r : out) EXPECT_EQ(r, 0.0);
}

TEST(SolveVertex, RandomVerticesCloseTheLoop) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ang(0, 2 * pi);
  std::uniform_real_distribution<double> rho(-1.5, 1.5);
  int solved = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int degree = 4 + trial % 3;
    std::vector<double> th;
    for (int k = 0; k < degree; ++k) th.push_back(ang(rng));
    std::sort(th.begin(), th.end());
    std::vector<VertexCrease> cs;
    std::vector<int> idx(degree);
    for (int k = 0; k < degree; ++k) idx[k] = k;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<bool> out(degree, false);
    for (int k = 0; k < 3; ++k) out[idx[k]] = true;
    for (int k = 0; k < degree; ++k) cs.push_back({th[k], bool(out[k]), out[k] ? 0.0 : rho(rng)});
    for (int mode : {-1, 1}) {
      try {
        const auto r = kin::solve_vertex(cs, mode);
        EXPECT_LE(test_oracle::closure_residual(cs, r), 1e-9);
        ++solved;
      } catch (const FoldError&) {
        EXPECT_FALSE(kin::spherical_triangle_ok(kin::unit_angles(cs), -1e-9));
      }
    }
  }
  EXPECT_GT(solved, 1000);
}

TEST(SolveVertex, ModesGiveTwoDistinctRoots) {
  std::vector<VertexCrease> cs{{0.0, false, 0.6}, {pi / 2, true, 0}, {pi, true, 0}, {5.0, true, 0}};
  const auto a = kin::solve_vertex(cs, 1);
  const auto b = kin::solve_vertex(cs, -1);
  EXPECT_LE(test_oracle::closure_residual(cs, a), 1e-9);
  EXPECT_LE(test_oracle::closure_residual(cs, b), 1e-9);
  double diff = 0;
  for (int k = 0; k < 3; ++k) diff += std::abs(a[k] - b[k]);
  EXPECT_GT(diff, 1e-3);
}

TEST(SolveVertex, SourceFoldsAboutItsStraightLine) {
  std::vector<VertexCrease> cs{{0.0, true, 0}, {pi / 2, true, 0}, {pi, true, 0}};
  const auto a = kin::solve_vertex(cs, 1, 0.4);
  EXPECT_DOUBLE_EQ(a[0], 0.4);
  EXPECT_DOUBLE_EQ(a[1], 0.0);
  EXPECT_DOUBLE_EQ(a[2], 0.4);
  const auto b = kin::solve_vertex(cs, -1, 0.4);
  EXPECT_DOUBLE_EQ(b[2], -0.4);
  std::vector<VertexCrease> bent{{0.0, true, 0}, {2.0, true, 0}, {4.0, true, 0}};
  for (double r : kin::solve_vertex(bent, 1, 0.4)) EXPECT_EQ(r, 0.0);
}

TEST(FoldGraph, ZeroAngleIsPlanar) {
  const auto g = corner_pattern(1);
  const auto st = kin::fold_graph(g, 0.0);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const Cell c = g.vertex(v).pos;
    EXPECT_DOUBLE_EQ(st.positions[v].x(), c.i - 4.0);
    EXPECT_DOUBLE_EQ(st.positions[v].y(), c.j - 4.0);
    EXPECT_DOUBLE_EQ(st.positions[v].z(), 0.0);
  }
}

TEST(FoldGraph, PreservesCreaseLengths) {
  for (int mode : {-1, 1}) {
    const auto g = corner_pattern(mode);
    for (double rho0 : {0.3, 1.0, 2.0}) {
      const auto st = kin::fold_graph(g, rho0);
      for (const auto& c : g.creases())
        EXPECT_NEAR((st.positions[c.from] - st.positions[c.to]).norm(), c.planar_length, 1e-9);
      // Triangles keep their planar areas.
      const auto layout = kin::build_panel_layout(g);
      for (std::size_t t = 0; t < layout.triangles.size(); ++t) {
        const auto& ids = layout.triangles[t].v;
        const Cell p = g.vertex(ids[0]).pos, q = g.vertex(ids[1]).pos, r = g.vertex(ids[2]).pos;
        const double planar = 0.5 * std::abs(double((q.i - p.i) * (r.j - p.j) - (q.j - p.j) * (r.i - p.i)));
        EXPECT_NEAR(st.mesh[t].tri.area(), planar, 1e-9);
      }
    }
  }
}

TEST(FoldGraph, SeedSquareStaysFlatAndCollisionFree) {
  Board board(9, 9, {});
  const auto g = seed_square(board, 2, {4, 4});
  EXPECT_TRUE(kin::motion_collision_free(g, pi / 2, 20));
  const auto st = kin::fold_graph(g, 1.0);
  for (const auto& p : st.positions) EXPECT_DOUBLE_EQ(p.z(), 0.0);
}

TEST(FoldGraph, CornerFoldRaisesFlaps) {
  const auto g = corner_pattern(1);
  const auto st = kin::fold_graph(g, 0.5);
  const auto layout = kin::build_panel_layout(g);
  EXPECT_EQ(layout.panels.size(), 5u);  // square plus one flap per sector at (3,3)
  double zmax = 0;
  for (const auto& p : st.positions) zmax = std::max(zmax, std::abs(p.z()));
  EXPECT_GT(zmax, 0.1);
}

TEST(Collision, CornerFlapsPassThroughEachOther) {
  // The two driving creases at (3,3) lift their flaps towards each other;
  // they meet at rho0 = pi/2 and interpenetrate beyond it.
  for (int mode : {-1, 1}) {
    const auto g = corner_pattern(mode);
    EXPECT_TRUE(kin::motion_collision_free(g, 1.2, 20));
    EXPECT_FALSE(kin::motion_collision_free(g, 0.95 * pi, 20));
  }
}

TEST(Collision, SweepPropagatesFoldErrors) {
  // rho0 = pi puts the tenth sweep step on the singular configuration.
  EXPECT_THROW(kin::motion_collision_free(corner_pattern(1), pi, 20), FoldError);
}
