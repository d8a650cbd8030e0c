#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "origami/pattern.hpp"

using namespace origami;

namespace {

std::set<std::pair<int, int>> cells(const std::vector<Cell>& v) {
  std::set<std::pair<int, int>> s;
  for (Cell c : v) s.insert({c.i, c.j});
  return s;
}

}  // namespace

TEST(Board, RejectsBadSizes) {
  EXPECT_THROW(Board(0, 3, {}), ConfigError);
  EXPECT_THROW(Board(4, 5, {.xy = true}), ConfigError);
}

TEST(SeedSquare, CornersOfTheCubeSeed) {
  Board board(9, 9, {.x = true, .y = true});
  const auto g = seed_square(board, 1, {4, 4});
  EXPECT_EQ(g.vertex_count(), 4u);
  EXPECT_EQ(g.crease_count(), 4u);
  std::vector<Cell> pos;
  for (const auto& v : g.vertices()) pos.push_back(v.pos);
  EXPECT_EQ(cells(pos), (std::set<std::pair<int, int>>{{3, 3}, {3, 5}, {5, 3}, {5, 5}}));
  EXPECT_FALSE(find_violation(board, g));
  EXPECT_TRUE(g.topological_order().has_value());
}

TEST(SeedSquare, OutOfBounds) {
  Board board(9, 9, {});
  EXPECT_THROW(seed_square(board, 5, {4, 4}), PatternError);
}

TEST(SeedSingleCrease, FaceSeed) {
  Board board(25, 25, {.y = true}, 2.9);
  const auto g = seed_single_crease(board, {10, 12}, {14, 12});
  EXPECT_EQ(g.vertex_count(), 2u);
  EXPECT_EQ(g.crease_count(), 1u);
  EXPECT_FALSE(find_violation(board, g));
  EXPECT_THROW(seed_single_crease(board, {3, 3}, {3, 3}), PatternError);
}

TEST(SeedFromGraph, ChairSeedAccepted) {
  Board board(13, 13, {.y = true});
  const auto chair = seed_chair(board);
  EXPECT_NO_THROW(seed_from_graph(board, chair));
  EXPECT_EQ(chair.vertex_count(), 10u);
  EXPECT_EQ(chair.crease_count(), 10u);
}

TEST(SeedFromGraph, CrossingCreasesRejected) {
  Board board(9, 9, {});
  CreaseGraph g(9, 9);
  const int a = g.add_vertex({0, 0}), b = g.add_vertex({4, 4}), c = g.add_vertex({0, 4}), d = g.add_vertex({4, 0});
  g.add_crease(a, b, true);
  g.add_crease(c, d, true);
  try {
    seed_from_graph(board, g);
    FAIL();
  } catch (const PatternError& e) {
    EXPECT_NE(std::string(e.what()).find("planarity"), std::string::npos);
  }
}

TEST(SeedFromGraph, DirectedCycleRejected) {
  Board board(9, 9, {});
  CreaseGraph g(9, 9);
  const int a = g.add_vertex({0, 0}), b = g.add_vertex({4, 0}), c = g.add_vertex({4, 4});
  g.add_crease(a, b, true);
  g.add_crease(b, c, true);
  g.add_crease(c, a, true);
  try {
    seed_from_graph(board, g);
    FAIL();
  } catch (const PatternError& e) {
    EXPECT_NE(std::string(e.what()).find("acyclicity"), std::string::npos);
  }
}

TEST(SeedFromGraph, VertexInsideCreaseRejected) {
  Board board(9, 9, {});
  CreaseGraph g(9, 9);
  const int a = g.add_vertex({0, 0}), b = g.add_vertex({4, 0});
  g.add_vertex({2, 0});
  g.add_crease(a, b, true);
  EXPECT_EQ(find_violation(board, g), "planarity");
}

TEST(ReflectAction, Orbits) {
  Board b9(9, 9, {.x = true, .y = true});
  EXPECT_EQ(cells(reflect_action(b9, {2, 3})), (std::set<std::pair<int, int>>{{2, 3}, {6, 3}, {2, 5}, {6, 5}}));
  EXPECT_EQ(reflect_action(b9, {4, 4}).size(), 1u);
  Board b25(25, 25, {.x = true, .y = true, .xy = true});
  EXPECT_EQ(reflect_action(b25, {2, 7}).size(), 8u);
  EXPECT_EQ(reflect_action(b25, {5, 5}).size(), 4u);
}

TEST(PlayableArea, Counts) {
  EXPECT_EQ(playable_area(Board(13, 13, {.x = true, .y = true})).size(), 49u);
  EXPECT_EQ(playable_area(Board(9, 9, {})).size(), 81u);
  EXPECT_EQ(playable_area(Board(25, 25, {.x = true, .y = true, .xy = true})).size(), 91u);
  EXPECT_EQ(playable_area(Board(25, 25, {.y = true})).size(), 13u * 25u);
}

TEST(PlayableArea, EveryOrbitHitsItOnce) {
  for (SymmetryAxes ax : {SymmetryAxes{}, SymmetryAxes{.y = true}, SymmetryAxes{.x = true, .y = true},
                          SymmetryAxes{.x = true, .y = true, .xy = true}}) {
    Board b(9, 9, ax);
    std::set<std::pair<int, int>> seen;
    for (int c = 0; c < b.cell_count(); ++c) {
      const auto orbit = b.orbit(b.cell_at(c));
      const auto n = std::count_if(orbit.begin(), orbit.end(), [&](Cell q) { return b.is_playable(q); });
      EXPECT_EQ(n, 1);
    }
  }
}

TEST(Invariants, SymmetryViolation) {
  Board board(9, 9, {.y = true});
  auto g = seed_square(board, 1, {4, 4});
  const int c = g.vertex_at({3, 3});
  g.add_crease(c, g.add_vertex({3, 1}));
  g.add_crease(c, g.add_vertex({1, 3}));
  g.add_crease(c, g.add_vertex({1, 1}));
  g.vertex(c).extended = true;
  EXPECT_EQ(find_violation(board, g), "symmetry");
}

TEST(Invariants, CreaseLength) {
  Board board(9, 9, {}, 2.9);
  auto g = seed_square(board, 1, {4, 4});
  const int c = g.vertex_at({3, 3});
  g.add_crease(c, g.add_vertex({3, 0}));
  g.add_crease(c, g.add_vertex({1, 3}));
  g.add_crease(c, g.add_vertex({1, 1}));
  g.vertex(c).extended = true;
  EXPECT_EQ(find_violation(board, g), "crease-length");
}
