#pragma once

// Objectives: Hausdorff shape approximation against a fixed target sample
// set, and the four abstract furniture objectives.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "origami/error.hpp"
#include "origami/geom.hpp"
#include "origami/kinematics.hpp"
#include "origami/pattern.hpp"

namespace origami::obj {

using geom::Point3;
using geom::Triangle3;

inline constexpr double kDiscard = -1e6;
inline constexpr int kTargetSamples = 4096;
inline constexpr int kSurfaceSamples = 4096;
inline constexpr std::uint64_t kTargetSeed = 0x7a46e7ULL;
inline constexpr std::uint64_t kSurfaceSeed = 0x5a1faceULL;

struct TargetShape {
  std::string name;
  std::vector<Triangle3> mesh;
  geom::PointSet samples;  // Y
  bool closed = false;
  std::shared_ptr<const geom::PointIndex> index;  // over Y

  const geom::PointIndex& sample_index() const { return *index; }
};

inline TargetShape make_target(std::string name, std::vector<Triangle3> mesh, bool closed,
                               int sample_count = kTargetSamples, std::uint64_t seed = kTargetSeed) {
  TargetShape t;
  t.name = std::move(name);
  t.mesh = std::move(mesh);
  t.closed = closed;
  t.samples = geom::sample_surface(t.mesh, sample_count, seed);
  t.samples.provenance = geom::Provenance::TargetSample;
  // Mesh corners join Y so that folded vertices can hit them exactly.
  std::vector<Point3> corners;
  for (const auto& tri : t.mesh) corners.insert(corners.end(), {tri.a, tri.b, tri.c});
  std::sort(corners.begin(), corners.end(), [](const Point3& a, const Point3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  });
  corners.erase(std::unique(corners.begin(), corners.end()), corners.end());
  t.samples.points.insert(t.samples.points.end(), corners.begin(), corners.end());
  t.index = std::make_shared<geom::PointIndex>(t.samples.points);
  return t;
}

/// Signed volume by the divergence theorem; positive for outward faces.
inline double signed_volume(const std::vector<Triangle3>& mesh) {
  double v = 0;
  for (const auto& t : mesh) v += t.a.dot(t.b.cross(t.c)) / 6.0;
  return v;
}

/// Every undirected edge is shared by exactly two triangles.
inline bool is_watertight(const std::vector<Triangle3>& mesh) {
  std::vector<std::pair<std::array<double, 6>, int>> edges;
  auto key = [](const Point3& p, const Point3& q) {
    std::array<double, 3> a{p.x(), p.y(), p.z()}, b{q.x(), q.y(), q.z()};
    if (b < a) std::swap(a, b);
    return std::array<double, 6>{a[0], a[1], a[2], b[0], b[1], b[2]};
  };
  for (const auto& t : mesh) {
    edges.push_back({key(t.a, t.b), 1});
    edges.push_back({key(t.b, t.c), 1});
    edges.push_back({key(t.c, t.a), 1});
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t k = 0; k < edges.size();) {
    std::size_t m = k;
    while (m < edges.size() && edges[m].first == edges[k].first) ++m;
    if (m - k != 2) return false;
    k = m;
  }
  return true;
}

/// `scale` shrinks the whole shape (tiny-board experiments use 0.5).
inline TargetShape build_pyramid(int sample_count = kTargetSamples, double scale = 1.0) {
  const double s = 2.0 * scale, h = std::sqrt(8.0) * scale;
  const Point3 a(s, s, 0), b(-s, s, 0), c(-s, -s, 0), d(s, -s, 0), apex(0, 0, h);
  std::vector<Triangle3> m{{a, b, apex}, {b, c, apex}, {c, d, apex}, {d, a, apex}, {a, d, c}, {a, c, b}};
  return make_target("pyramid", std::move(m), true, sample_count);
}

inline TargetShape build_cube(int sample_count = kTargetSamples) {
  auto P = [](int i, int j, int k) { return Point3(i ? 1.0 : -1.0, j ? 1.0 : -1.0, k ? 2.0 : 0.0); };
  // Outward quads as corner bit codes (i<<2 | j<<1 | k).
  const int quads[6][4] = {{0, 2, 6, 4}, {1, 5, 7, 3}, {0, 4, 5, 1}, {2, 3, 7, 6}, {0, 1, 3, 2}, {4, 6, 7, 5}};
  std::vector<Triangle3> m;
  for (const auto& q : quads) {
    Point3 c[4];
    for (int k = 0; k < 4; ++k) c[k] = P(q[k] >> 2 & 1, q[k] >> 1 & 1, q[k] & 1);
    m.push_back({c[0], c[1], c[2]});
    m.push_back({c[0], c[2], c[3]});
  }
  return make_target("cube", std::move(m), true, sample_count);
}

inline double bowl_height(double r) { return 0.2 * r * r - 0.6; }

inline TargetShape build_bowl(int sample_count = kTargetSamples, int rings = 24, int segments = 72) {
  constexpr double r_in = 1.6, r_out = 5.0;
  std::vector<Triangle3> m;
  auto at = [](double r, double phi, double z) { return Point3(r * std::cos(phi), r * std::sin(phi), z); };
  const double dphi = 2 * std::numbers::pi / segments;
  for (int k = 0; k < rings; ++k) {
    const double r0 = r_in + (r_out - r_in) * k / rings, r1 = r_in + (r_out - r_in) * (k + 1) / rings;
    for (int s = 0; s < segments; ++s) {
      const double p0 = s * dphi, p1 = (s + 1) * dphi;
      const Point3 a = at(r0, p0, bowl_height(r0)), b = at(r1, p0, bowl_height(r1));
      const Point3 c = at(r1, p1, bowl_height(r1)), d = at(r0, p1, bowl_height(r0));
      m.push_back({a, b, c});
      m.push_back({a, c, d});
    }
  }
  const double zb = bowl_height(r_in);
  for (int s = 0; s < segments; ++s)
    m.push_back({Point3(0, 0, zb), at(r_in, s * dphi, zb), at(r_in, (s + 1) * dphi, zb)});
  return make_target("bowl", std::move(m), false, sample_count);
}

/// Wavefront OBJ: `v x y z` and `f a b c ...` lines, polygons fan-split.
inline TargetShape load_target_mesh(const std::string& path, int sample_count = kTargetSamples) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file: " + path);
  std::vector<Point3> verts;
  std::vector<Triangle3> m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) throw ConfigError(path + ":" + std::to_string(lineno) + ": bad vertex");
      verts.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        int k = 0;
        try {
          k = std::stoi(tok.substr(0, tok.find('/')));
        } catch (const std::exception&) {
          throw ConfigError(path + ":" + std::to_string(lineno) + ": bad face index");
        }
        k = k < 0 ? static_cast<int>(verts.size()) + k : k - 1;
        if (k < 0 || k >= static_cast<int>(verts.size()))
          throw ConfigError(path + ":" + std::to_string(lineno) + ": face index out of range");
        idx.push_back(k);
      }
      if (idx.size() < 3) throw ConfigError(path + ":" + std::to_string(lineno) + ": face needs 3 vertices");
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) m.push_back({verts[idx[0]], verts[idx[k]], verts[idx[k + 1]]});
    }
  }
  if (m.empty()) throw ConfigError("mesh file has no faces: " + path);
  std::string name = path.substr(path.find_last_of('/') + 1);
  return make_target(name.substr(0, name.find('.')), std::move(m), false, sample_count);
}

// ---------------------------------------------------------------------------
// Shape approximation

namespace detail {

inline std::vector<Point3> outside_points(const std::vector<Point3>& pts, const TargetShape& target) {
  if (!target.closed) return pts;
  std::vector<Point3> out;
  for (const auto& p : pts)
    if (!geom::point_in_closed_mesh(p, target.mesh)) out.push_back(p);
  return out;
}

}  // namespace detail

/// -d(P, Y) over folded vertex positions; vertices enclosed by a closed
/// target are ignored.
inline double shape_potential(const kin::FoldedState& st, const TargetShape& target) {
  const auto pts = detail::outside_points(st.positions, target);
  if (pts.empty()) return 0.0;
  return -geom::directed_hausdorff(pts, target.sample_index());
}

/// -max{d(P, Y), d(Y, X)} with X sampled on the folded surface. When the
/// value is below `floor` the evaluation may stop early and return any value
/// below `floor`.
inline double shape_terminal(const kin::FoldedState& st, const TargetShape& target,
                             int sample_count = kSurfaceSamples, std::uint64_t seed = kSurfaceSeed,
                             double floor = -std::numeric_limits<double>::infinity()) {
  const double forward = -shape_potential(st, target);
  if (-forward < floor) return -forward;
  const auto tris = st.triangles();
  std::vector<Point3> xs;
  if (!tris.empty()) xs = detail::outside_points(geom::sample_surface(tris, sample_count, seed).points, target);
  // No surface outside the target: fall back to the vertices themselves.
  if (xs.empty()) xs = st.positions;
  const geom::PointIndex xi(xs);
  const double backward = geom::directed_hausdorff(target.samples.points, xi, -floor);
  return -std::max(forward, backward);
}

// ---------------------------------------------------------------------------
// Abstract objectives

inline double bucket_objective(const CreaseGraph& g, const kin::FoldedState& st) {
  double zmin = std::numeric_limits<double>::infinity(), zmax = -zmin;
  double rmin = zmin, rmax = -zmin;
  int n = 0;
  for (const auto& v : g.vertices()) {
    if (v.extended) continue;
    const Point3& p = st.positions[v.id];
    zmin = std::min(zmin, p.z());
    zmax = std::max(zmax, p.z());
    const double r = std::hypot(p.x(), p.y());
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
    ++n;
  }
  if (n == 0) return kDiscard;
  if (zmax > 2 * zmin || rmax > 2 * rmin) return kDiscard;
  return zmin;
}

struct ShelfParams {
  double parallel_cos = 0.99;
  double level_gap = 0.25;
};

inline double shelf_objective(const std::vector<Triangle3>& tris, ShelfParams prm = {}) {
  struct Group {
    geom::Vec3 n;
    std::vector<std::pair<double, double>> offset_area;
  };
  std::vector<Group> groups;
  for (const auto& t : tris) {
    const double area = t.area();
    if (!(area > geom::kDegenerateArea)) continue;
    geom::Vec3 n = t.normal().normalized();
    const Point3 c = (t.a + t.b + t.c) / 3.0;
    Group* hit = nullptr;
    for (auto& gr : groups)
      if (std::abs(gr.n.dot(n)) >= prm.parallel_cos) {
        hit = &gr;
        break;
      }
    if (!hit) {
      groups.push_back({n, {}});
      hit = &groups.back();
    }
    hit->offset_area.push_back({hit->n.dot(c), area});
  }
  double best = kDiscard;
  for (auto& gr : groups) {
    auto& oa = gr.offset_area;
    std::sort(oa.begin(), oa.end());
    std::vector<double> levels{oa[0].second};
    for (std::size_t k = 1; k < oa.size(); ++k) {
      if (oa[k].first - oa[k - 1].first >= prm.level_gap) levels.push_back(0.0);
      levels.back() += oa[k].second;
    }
    if (levels.size() < 3) continue;
    best = std::max(best, *std::min_element(levels.begin(), levels.end()));
  }
  return best;
}

inline double table_objective(const std::vector<Point3>& pts) {
  const std::size_t n = pts.size();
  if (n < 4) return kDiscard;
  std::vector<double> z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = pts[k].z();
  std::sort(z.begin(), z.end(), std::greater<>());
  double top = 0, rest = 0;
  for (std::size_t k = 0; k < 4; ++k) top += std::abs(z[k] - 2.5);
  for (std::size_t k = 4; k < n; ++k) rest += std::abs(z[k]);
  return -top / 4.0 - (n > 4 ? rest / double(n - 4) : 0.0);
}

struct ChairParams {
  double extent = 4.0;
  double leg_spread = 0.3;
};

inline double chair_objective(const std::vector<Point3>& pts, ChairParams prm = {}) {
  const std::size_t n = pts.size();
  if (n < 3) return kDiscard;
  for (const auto& p : pts)
    if (std::abs(p.x()) > prm.extent || std::abs(p.y()) > prm.extent) return kDiscard;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pts[a].z() < pts[b].z(); });
  const Point3 &l0 = pts[order[0]], &l1 = pts[order[1]], &l2 = pts[order[2]];
  if (l2.z() - l0.z() > prm.leg_spread) return kDiscard;
  const bool all_front = l0.y() > 0 && l1.y() > 0 && l2.y() > 0;
  const bool all_back = l0.y() < 0 && l1.y() < 0 && l2.y() < 0;
  if (all_front || all_back) return kDiscard;
  double legs = 0;
  for (int k = 0; k < 3; ++k) {
    const Point3& p = pts[order[k]];
    legs += std::abs(p.z() + 4.0) + std::abs(std::abs(p.y()) - 2.1);
  }
  legs /= 3.0;
  double zmax = -std::numeric_limits<double>::infinity(), rest = 0;
  int above = 0;
  for (const auto& p : pts) {
    zmax = std::max(zmax, p.z());
    if (p.z() > 0) {
      rest += std::abs(std::abs(p.y()) - 2.1);
      ++above;
    }
  }
  if (above == 0) return kDiscard;  // no backrest at all
  return -legs - (std::abs(zmax - 4.0) + rest / above);
}

// ---------------------------------------------------------------------------

enum class ObjectiveKind { Shape, Bucket, Shelf, Table, Chair };

/// An objective as seen by the environment: shaped potentials for shape
/// approximation, terminal-only values for the abstract ones.
struct Objective {
  ObjectiveKind kind = ObjectiveKind::Shape;
  std::shared_ptr<const TargetShape> target;
  ShelfParams shelf;
  ChairParams chair;

  bool shaped() const { return kind == ObjectiveKind::Shape; }

  double potential(const kin::FoldedState& st) const { return shaped() ? shape_potential(st, *target) : 0.0; }

  /// f(s_T, rho). Shape scores below `floor` may be returned inexactly
  /// (still below `floor`).
  double terminal(const CreaseGraph& g, const kin::FoldedState& st,
                  double floor = -std::numeric_limits<double>::infinity()) const {
    switch (kind) {
      case ObjectiveKind::Shape: return shape_terminal(st, *target, kSurfaceSamples, kSurfaceSeed, floor);
      case ObjectiveKind::Bucket: return bucket_objective(g, st);
      case ObjectiveKind::Shelf: return shelf_objective(st.triangles(), shelf);
      case ObjectiveKind::Table: return table_objective(st.positions);
      case ObjectiveKind::Chair: return chair_objective(st.positions, chair);
    }
    return kDiscard;
  }
};

inline Objective shape_objective(TargetShape t) {
  Objective o;
  o.kind = ObjectiveKind::Shape;
  o.target = std::make_shared<const TargetShape>(std::move(t));
  return o;
}

inline Objective abstract_objective(ObjectiveKind kind) {
  if (kind == ObjectiveKind::Shape) throw ConfigError("shape objective needs a target");
  Objective o;
  o.kind = kind;
  return o;
}

}  // namespace origami::obj
