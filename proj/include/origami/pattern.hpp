#pragma once

// Grid board, crease-pattern graph, symmetry machinery and seeding patterns.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "origami/error.hpp"
#include "origami/geom.hpp"

namespace origami {

using geom::Cell;

/// Reflection axes. `Y` mirrors across the vertical centre line (i -> w-1-i),
/// `X` across the horizontal centre line (j -> h-1-j), `XY` across the main
/// diagonal (i <-> j).
struct SymmetryAxes {
  bool x = false;
  bool y = false;
  bool xy = false;

  bool any() const { return x || y || xy; }
  friend bool operator==(const SymmetryAxes&, const SymmetryAxes&) = default;
};

/// One element of the board's symmetry group: optional swap, then flips.
struct BoardSymmetry {
  bool swap = false;
  bool flip_i = false;
  bool flip_j = false;

  friend bool operator==(const BoardSymmetry&, const BoardSymmetry&) = default;

  Cell apply(Cell c, int width, int height) const {
    Cell r = swap ? Cell{c.j, c.i} : c;
    if (flip_i) r.i = width - 1 - r.i;
    if (flip_j) r.j = height - 1 - r.j;
    return r;
  }
  /// +1 for proper (orientation preserving) elements, -1 for reflections.
  int orientation() const { return ((swap ? 1 : 0) + (flip_i ? 1 : 0) + (flip_j ? 1 : 0)) % 2 == 0 ? 1 : -1; }
};

class Board {
 public:
  Board(int width, int height, SymmetryAxes axes = {},
        double max_crease_length = std::numeric_limits<double>::infinity())
      : width_(width), height_(height), axes_(axes), max_crease_length_(max_crease_length) {
    if (width < 2 || height < 2) throw ConfigError("board must be at least 2x2");
    if (axes.xy && width != height) throw ConfigError("xy symmetry requires a square board");
    build_group();
    build_playable();
  }

  int width() const { return width_; }
  int height() const { return height_; }
  const SymmetryAxes& axes() const { return axes_; }
  double max_crease_length() const { return max_crease_length_; }
  bool bounded_crease_length() const { return std::isfinite(max_crease_length_); }
  const std::vector<BoardSymmetry>& group() const { return group_; }

  bool contains(Cell c) const { return c.i >= 0 && c.j >= 0 && c.i < width_ && c.j < height_; }
  int cell_index(Cell c) const { return c.j * width_ + c.i; }
  Cell cell_at(int index) const { return {index % width_, index / width_}; }
  int cell_count() const { return width_ * height_; }

  /// Board centre in grid units; 3D coordinates are measured from here.
  double center_i() const { return 0.5 * (width_ - 1); }
  double center_j() const { return 0.5 * (height_ - 1); }
  double diagonal() const { return std::hypot(width_ - 1.0, height_ - 1.0); }

  const std::vector<Cell>& playable_area() const { return playable_; }
  bool is_playable(Cell c) const { return contains(c) && playable_mask_[cell_index(c)]; }
  /// Position of a playable cell in playable_area(), or -1.
  int playable_index(Cell c) const { return contains(c) ? playable_index_[cell_index(c)] : -1; }

  /// Orbit of a cell under the enabled reflections, sorted, without duplicates.
  std::vector<Cell> orbit(Cell c) const {
    std::vector<Cell> out;
    out.reserve(group_.size());
    for (const auto& g : group_) out.push_back(g.apply(c, width_, height_));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  void build_group() {
    std::vector<BoardSymmetry> gens;
    if (axes_.y) gens.push_back({false, true, false});
    if (axes_.x) gens.push_back({false, false, true});
    if (axes_.xy) gens.push_back({true, false, false});
    group_ = {BoardSymmetry{}};
    // Closure; elements are identified by their action on probe cells.
    const std::array<BoardSymmetry, 8> all{{{false, false, false},
                                            {false, true, false},
                                            {false, false, true},
                                            {false, true, true},
                                            {true, false, false},
                                            {true, true, false},
                                            {true, false, true},
                                            {true, true, true}}};
    const std::array<Cell, 2> probes{{{0, 1}, {2, 5}}};
    auto compose = [&](const BoardSymmetry& a, const BoardSymmetry& b) {
      for (const auto& cand : all) {
        bool ok = true;
        for (Cell p : probes) {
          const int n = std::max(width_, height_) + 8;
          const Cell q = b.apply(a.apply(p, n, n), n, n);
          if (cand.apply(p, n, n) != q) ok = false;
        }
        if (ok) return cand;
      }
      return BoardSymmetry{};
    };
    bool grew = true;
    while (grew) {
      grew = false;
      const auto current = group_;
      for (const auto& a : current)
        for (const auto& g : gens) {
          const auto c = compose(a, g);
          if (std::find(group_.begin(), group_.end(), c) == group_.end()) {
            group_.push_back(c);
            grew = true;
          }
        }
    }
  }

  void build_playable() {
    bool has_fi = false, has_fj = false, has_swap = false;
    for (const auto& g : group_) {
      if (!g.swap && g.flip_i && !g.flip_j) has_fi = true;
      if (!g.swap && !g.flip_i && g.flip_j) has_fj = true;
      if (g.swap) has_swap = true;
    }
    playable_mask_.assign(cell_count(), false);
    playable_index_.assign(cell_count(), -1);
    for (int j = 0; j < height_; ++j)
      for (int i = 0; i < width_; ++i) {
        if (has_fi && 2 * i > width_ - 1) continue;
        if (has_fj && 2 * j > height_ - 1) continue;
        if (has_swap && i > j) continue;
        const Cell c{i, j};
        playable_mask_[cell_index(c)] = true;
        playable_index_[cell_index(c)] = static_cast<int>(playable_.size());
        playable_.push_back(c);
      }
  }

  int width_, height_;
  SymmetryAxes axes_;
  double max_crease_length_;
  std::vector<BoardSymmetry> group_;
  std::vector<Cell> playable_;
  std::vector<bool> playable_mask_;
  std::vector<int> playable_index_;
};

inline std::vector<Cell> reflect_action(const Board& board, Cell cell) { return board.orbit(cell); }
inline const std::vector<Cell>& playable_area(const Board& board) { return board.playable_area(); }

enum class VertexKind { Source, Interior };

struct Vertex {
  int id = -1;
  Cell pos;
  int mode = 0;  // rigid body mode M in {-1, +1}; 0 until chosen
  VertexKind kind = VertexKind::Interior;
  bool extended = false;
};

/// A directed crease. Driving creases carry the driving angle directly and
/// are treated as known (incoming) at both endpoints.
struct Crease {
  int from = -1;
  int to = -1;
  bool driving = false;
  double planar_length = 0.0;
};

class CreaseGraph {
 public:
  CreaseGraph() = default;
  CreaseGraph(int width, int height) : width_(width), height_(height), cell_vertex_(width * height, -1) {}

  int width() const { return width_; }
  int height() const { return height_; }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Crease>& creases() const { return creases_; }
  const Vertex& vertex(int id) const { return vertices_.at(id); }
  Vertex& vertex(int id) { return vertices_.at(id); }
  const Crease& crease(int id) const { return creases_.at(id); }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t crease_count() const { return creases_.size(); }

  /// Crease ids incident to a vertex, in insertion order.
  const std::vector<int>& incident(int v) const { return incident_.at(v); }

  std::vector<int> source_ids() const {
    std::vector<int> out;
    for (const auto& v : vertices_)
      if (v.kind == VertexKind::Source) out.push_back(v.id);
    return out;
  }

  int vertex_at(Cell c) const {
    if (c.i < 0 || c.j < 0 || c.i >= width_ || c.j >= height_) return -1;
    return cell_vertex_[c.j * width_ + c.i];
  }

  int add_vertex(Cell c, VertexKind kind = VertexKind::Interior) {
    if (c.i < 0 || c.j < 0 || c.i >= width_ || c.j >= height_) throw PatternError("vertex outside the board");
    if (vertex_at(c) >= 0) throw PatternError("cell already holds a vertex");
    const int id = static_cast<int>(vertices_.size());
    vertices_.push_back(Vertex{id, c, 0, kind, false});
    incident_.emplace_back();
    cell_vertex_[c.j * width_ + c.i] = id;
    return id;
  }

  int add_crease(int from, int to, bool driving = false) {
    if (from == to) throw PatternError("crease endpoints must differ");
    const Cell a = vertices_.at(from).pos, b = vertices_.at(to).pos;
    const int id = static_cast<int>(creases_.size());
    creases_.push_back(Crease{from, to, driving, std::hypot(double(a.i - b.i), double(a.j - b.j))});
    incident_[from].push_back(id);
    incident_[to].push_back(id);
    return id;
  }

  /// Creases leaving v that must be solved at v (driving creases excluded).
  int out_degree(int v) const {
    int n = 0;
    for (int e : incident_.at(v))
      if (!creases_[e].driving && creases_[e].from == v) ++n;
    return n;
  }

  bool connected(int a, int b) const {
    for (int e : incident_.at(a))
      if (creases_[e].from == b || creases_[e].to == b) return true;
    return false;
  }

  int other_end(int e, int v) const { return creases_[e].from == v ? creases_[e].to : creases_[e].from; }

  /// Vertices that reach `targets` along directed creases (including targets).
  std::vector<bool> ancestors_of(const std::vector<int>& targets) const {
    std::vector<bool> seen(vertices_.size(), false);
    std::vector<int> stack;
    for (int t : targets)
      if (!seen[t]) {
        seen[t] = true;
        stack.push_back(t);
      }
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int e : incident_[v]) {
        if (creases_[e].to != v) continue;
        const int u = creases_[e].from;
        if (!seen[u]) {
          seen[u] = true;
          stack.push_back(u);
        }
      }
    }
    return seen;
  }

  /// Kahn topological order over all creases; nullopt if a directed cycle exists.
  std::optional<std::vector<int>> topological_order() const {
    std::vector<int> indeg(vertices_.size(), 0);
    for (const auto& c : creases_) ++indeg[c.to];
    std::vector<int> order, queue;
    for (std::size_t v = 0; v < vertices_.size(); ++v)
      if (indeg[v] == 0) queue.push_back(static_cast<int>(v));
    std::size_t head = 0;
    while (head < queue.size()) {
      const int v = queue[head++];
      order.push_back(v);
      for (int e : incident_[v]) {
        if (creases_[e].from != v) continue;
        if (--indeg[creases_[e].to] == 0) queue.push_back(creases_[e].to);
      }
    }
    if (order.size() != vertices_.size()) return std::nullopt;
    return order;
  }

  friend bool operator==(const CreaseGraph& a, const CreaseGraph& b) {
    if (a.width_ != b.width_ || a.height_ != b.height_ || a.vertices_.size() != b.vertices_.size() ||
        a.creases_.size() != b.creases_.size())
      return false;
    for (std::size_t k = 0; k < a.vertices_.size(); ++k) {
      const auto &u = a.vertices_[k], &v = b.vertices_[k];
      if (u.pos != v.pos || u.mode != v.mode || u.kind != v.kind || u.extended != v.extended) return false;
    }
    for (std::size_t k = 0; k < a.creases_.size(); ++k) {
      const auto &u = a.creases_[k], &v = b.creases_[k];
      if (u.from != v.from || u.to != v.to || u.driving != v.driving) return false;
    }
    return true;
  }

 private:
  int width_ = 0, height_ = 0;
  std::vector<Vertex> vertices_;
  std::vector<Crease> creases_;
  std::vector<std::vector<int>> incident_;
  std::vector<int> cell_vertex_;
};

/// Name of the first violated structural invariant, or nullopt.
inline std::optional<std::string> find_violation(const Board& board, const CreaseGraph& g) {
  if (g.width() != board.width() || g.height() != board.height()) return "board-size";
  for (const auto& v : g.vertices())
    if (!board.contains(v.pos)) return "bounds";
  for (const auto& v : g.vertices()) {
    const int out = g.out_degree(v.id);
    if (v.extended ? out != 3 : out != 0) return "out-degree";
  }
  if (board.bounded_crease_length())
    for (const auto& c : g.creases())
      if (!c.driving && c.planar_length > board.max_crease_length() + 1e-12) return "crease-length";
  if (!g.topological_order()) return "acyclicity";
  const auto& cs = g.creases();
  for (std::size_t a = 0; a < cs.size(); ++a)
    for (std::size_t b = a + 1; b < cs.size(); ++b)
      if (geom::seg_seg_intersect_2d(g.vertex(cs[a].from).pos, g.vertex(cs[a].to).pos, g.vertex(cs[b].from).pos,
                                     g.vertex(cs[b].to).pos))
        return "planarity";
  // No vertex may sit in the interior of a crease.
  for (const auto& c : cs) {
    const Cell p = g.vertex(c.from).pos, q = g.vertex(c.to).pos;
    for (const auto& v : g.vertices()) {
      if (v.id == c.from || v.id == c.to) continue;
      const long cross = long(q.i - p.i) * (v.pos.j - p.j) - long(q.j - p.j) * (v.pos.i - p.i);
      if (cross != 0) continue;
      if (std::min(p.i, q.i) <= v.pos.i && v.pos.i <= std::max(p.i, q.i) && std::min(p.j, q.j) <= v.pos.j &&
          v.pos.j <= std::max(p.j, q.j))
        return "planarity";
    }
  }
  for (const auto& sym : board.group()) {
    for (const auto& c : cs) {
      const int a = g.vertex_at(sym.apply(g.vertex(c.from).pos, board.width(), board.height()));
      const int b = g.vertex_at(sym.apply(g.vertex(c.to).pos, board.width(), board.height()));
      if (a < 0 || b < 0) return "symmetry";
      bool found = false;
      for (int e : g.incident(a)) {
        const auto& o = cs[e];
        if (c.driving ? ((o.from == a && o.to == b) || (o.from == b && o.to == a)) : (o.from == a && o.to == b))
          found = true;
      }
      if (!found) return "symmetry";
    }
  }
  return std::nullopt;
}

inline void require_valid(const Board& board, const CreaseGraph& g) {
  if (auto v = find_violation(board, g)) throw PatternError("invariant violated: " + *v);
}

/// Four driving creases around a square, oriented as a directed path so the
/// graph stays acyclic.
inline CreaseGraph seed_square(const Board& board, int half_size, Cell center) {
  if (half_size < 1) throw PatternError("square half size must be >= 1");
  const std::array<Cell, 4> corners{{{center.i - half_size, center.j - half_size},
                                     {center.i + half_size, center.j - half_size},
                                     {center.i + half_size, center.j + half_size},
                                     {center.i - half_size, center.j + half_size}}};
  for (Cell c : corners)
    if (!board.contains(c)) throw PatternError("seed square out of bounds");
  CreaseGraph g(board.width(), board.height());
  std::array<int, 4> id{};
  for (int k = 0; k < 4; ++k) id[k] = g.add_vertex(corners[k], VertexKind::Source);
  g.add_crease(id[0], id[1], true);
  g.add_crease(id[1], id[2], true);
  g.add_crease(id[2], id[3], true);
  g.add_crease(id[0], id[3], true);
  return g;
}

inline CreaseGraph seed_single_crease(const Board& board, Cell p1, Cell p2) {
  if (!board.contains(p1) || !board.contains(p2)) throw PatternError("seed crease out of bounds");
  if (p1 == p2) throw PatternError("seed crease endpoints must differ");
  CreaseGraph g(board.width(), board.height());
  const int a = g.add_vertex(p1, VertexKind::Source);
  const int b = g.add_vertex(p2, VertexKind::Source);
  g.add_crease(a, b, true);
  return g;
}

/// Chair seed: fixed square of half size 2 around the board centre whose two
/// +j corners are already extended outwards, mirrored across the y axis.
inline CreaseGraph seed_chair(const Board& board, int mode = 1) {
  const Cell c{board.width() / 2, board.height() / 2};
  auto g = seed_square(board, 2, c);
  const int c3 = g.vertex_at({c.i + 2, c.j + 2});
  const int c4 = g.vertex_at({c.i - 2, c.j + 2});
  const std::array<Cell, 3> arm{{{0, 2}, {-2, 2}, {-2, 0}}};
  for (int side : {-1, 1}) {
    const int v = side < 0 ? c4 : c3;
    const Cell p = g.vertex(v).pos;
    for (Cell d : arm) {
      const Cell q{p.i - side * d.i, p.j + d.j};
      g.add_crease(v, g.add_vertex(q));
    }
    g.vertex(v).extended = true;
    g.vertex(v).mode = mode;
  }
  return g;
}

inline CreaseGraph seed_from_graph(const Board& board, const CreaseGraph& graph) {
  require_valid(board, graph);
  return graph;
}

}  // namespace origami
