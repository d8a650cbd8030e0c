#pragma once

// Geometry kernel: triangle/segment intersection, surface sampling,
// point-in-mesh and Hausdorff distances.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "origami/error.hpp"

namespace origami::geom {

using Point3 = Eigen::Vector3d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kDegenerateArea = 1e-9;
inline constexpr double kSharedVertexTolerance = 1e-7;

/// Integer board cell; i is the column (x), j the row (y).
struct Cell {
  int i = 0;
  int j = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct Triangle3 {
  Point3 a, b, c;

  Vec3 normal() const { return (b - a).cross(c - a); }
  double area() const { return 0.5 * normal().norm(); }
};

enum class Provenance { TargetSample, VertexPositions, SurfaceSample };

struct PointSet {
  std::vector<Point3> points;
  Provenance provenance = Provenance::VertexPositions;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

inline double squared_distance(const Point3& p, const Point3& q) {
  const double dx = p.x() - q.x();
  const double dy = p.y() - q.y();
  const double dz = p.z() - q.z();
  return dx * dx + dy * dy + dz * dz;
}

namespace detail {

inline void require_nondegenerate(const Triangle3& t) {
  if (!(t.area() > kDegenerateArea)) throw GeometryError("degenerate triangle (area <= 1e-9)");
}

// Orientation of (a, b, c) in 2D.
inline double orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

inline bool strictly_inside_2d(const Eigen::Vector2d& p, const std::array<Eigen::Vector2d, 3>& t, double eps) {
  const double o = orient2d(t[0], t[1], t[2]);
  const double s = o > 0 ? 1.0 : -1.0;
  return s * orient2d(t[0], t[1], p) > eps && s * orient2d(t[1], t[2], p) > eps &&
         s * orient2d(t[2], t[0], p) > eps;
}

inline bool proper_cross_2d(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                            const Eigen::Vector2d& q2, double eps) {
  const double d1 = orient2d(q1, q2, p1);
  const double d2 = orient2d(q1, q2, p2);
  const double d3 = orient2d(p1, p2, q1);
  const double d4 = orient2d(p1, p2, q2);
  return ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
         ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps));
}

inline bool coplanar_overlap(const Triangle3& t1, const Triangle3& t2, const Vec3& n) {
  // Drop the dominant axis of the normal.
  int drop = 0;
  n.cwiseAbs().maxCoeff(&drop);
  auto proj = [drop](const Point3& p) {
    switch (drop) {
      case 0: return Eigen::Vector2d(p.y(), p.z());
      case 1: return Eigen::Vector2d(p.z(), p.x());
      default: return Eigen::Vector2d(p.x(), p.y());
    }
  };
  const std::array<Eigen::Vector2d, 3> a{proj(t1.a), proj(t1.b), proj(t1.c)};
  const std::array<Eigen::Vector2d, 3> b{proj(t2.a), proj(t2.b), proj(t2.c)};
  constexpr double eps = 1e-12;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (proper_cross_2d(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3], eps)) return true;
  for (int i = 0; i < 3; ++i) {
    if (strictly_inside_2d(a[i], b, eps) || strictly_inside_2d(b[i], a, eps)) return true;
  }
  const Eigen::Vector2d ca = (a[0] + a[1] + a[2]) / 3.0;
  const Eigen::Vector2d cb = (b[0] + b[1] + b[2]) / 3.0;
  return strictly_inside_2d(ca, b, eps) || strictly_inside_2d(cb, a, eps);
}

// Interval of the triangle's intersection with the other plane, projected on `dir`.
inline bool plane_interval(const std::array<Point3, 3>& v, const std::array<double, 3>& d, const Vec3& dir,
                           double eps, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  bool any = false;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) <= eps) {
      const double p = dir.dot(v[k]);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
      any = true;
    }
  }
  for (int k = 0; k < 3; ++k) {
    const int m = (k + 1) % 3;
    if ((d[k] > eps && d[m] < -eps) || (d[k] < -eps && d[m] > eps)) {
      const double s = d[k] / (d[k] - d[m]);
      const double p = dir.dot(v[k] + s * (v[m] - v[k]));
      lo = std::min(lo, p);
      hi = std::max(hi, p);
      any = true;
    }
  }
  return any;
}

}  // namespace detail

/// Triangle-triangle intersection in the spirit of Moeller's interval test.
/// Reports true only when the overlap extends beyond shared boundary
/// features by more than `shared_vertex_tolerance`.
inline bool tri_tri_intersect(const Triangle3& t1, const Triangle3& t2,
                              double shared_vertex_tolerance = kSharedVertexTolerance) {
  detail::require_nondegenerate(t1);
  detail::require_nondegenerate(t2);

  const Vec3 n1 = t1.normal().normalized();
  const Vec3 n2 = t2.normal().normalized();
  const std::array<Point3, 3> v1{t1.a, t1.b, t1.c};
  const std::array<Point3, 3> v2{t2.a, t2.b, t2.c};
  constexpr double eps = 1e-10;

  std::array<double, 3> d1{}, d2{};
  for (int k = 0; k < 3; ++k) {
    d1[k] = n2.dot(v1[k] - t2.a);
    d2[k] = n1.dot(v2[k] - t1.a);
  }
  auto same_side = [](const std::array<double, 3>& d) {
    return (d[0] > eps && d[1] > eps && d[2] > eps) || (d[0] < -eps && d[1] < -eps && d[2] < -eps);
  };
  if (same_side(d1) || same_side(d2)) return false;

  const bool coplanar = std::abs(d1[0]) <= eps && std::abs(d1[1]) <= eps && std::abs(d1[2]) <= eps;
  if (coplanar) return detail::coplanar_overlap(t1, t2, n1);

  Vec3 dir = n1.cross(n2);
  const double len = dir.norm();
  if (len < 1e-14) return detail::coplanar_overlap(t1, t2, n1);
  dir /= len;

  double lo1, hi1, lo2, hi2;
  if (!detail::plane_interval(v1, d1, dir, eps, lo1, hi1)) return false;
  if (!detail::plane_interval(v2, d2, dir, eps, lo2, hi2)) return false;
  const double overlap = std::min(hi1, hi2) - std::max(lo1, lo2);
  return overlap > shared_vertex_tolerance;
}

/// True iff the open segments p1p2 and q1q2 cross or overlap. Touching only at
/// a shared endpoint is not an intersection; any other contact is.
inline bool seg_seg_intersect_2d(Cell p1, Cell p2, Cell q1, Cell q2) {
  if (p1 == p2 || q1 == q2) throw GeometryError("zero-length segment");
  auto orient = [](Cell a, Cell b, Cell c) -> std::int64_t {
    return std::int64_t(b.i - a.i) * (c.j - a.j) - std::int64_t(b.j - a.j) * (c.i - a.i);
  };
  auto sign = [](std::int64_t v) { return (v > 0) - (v < 0); };
  auto on_segment = [](Cell a, Cell b, Cell p) {  // p collinear with ab
    return std::min(a.i, b.i) <= p.i && p.i <= std::max(a.i, b.i) && std::min(a.j, b.j) <= p.j &&
           p.j <= std::max(a.j, b.j);
  };

  const int o1 = sign(orient(p1, p2, q1));
  const int o2 = sign(orient(p1, p2, q2));
  const int o3 = sign(orient(q1, q2, p1));
  const int o4 = sign(orient(q1, q2, p2));

  if (o1 == 0 && o2 == 0) {
    // Collinear: overlap of positive length, or a single contact point.
    const bool horizontal = p1.i != p2.i;
    auto key = [horizontal](Cell c) { return horizontal ? c.i : c.j; };
    const int plo = std::min(key(p1), key(p2)), phi = std::max(key(p1), key(p2));
    const int qlo = std::min(key(q1), key(q2)), qhi = std::max(key(q1), key(q2));
    const int lo = std::max(plo, qlo), hi = std::min(phi, qhi);
    if (lo < hi) return true;
    if (lo > hi) return false;
    // Single common point: legal only if it is an endpoint of both.
    const bool shared = (p1 == q1 || p1 == q2 || p2 == q1 || p2 == q2);
    return !shared;
  }
  if (o1 != o2 && o3 != o4) {
    // Segments meet at exactly one point.
    const bool shared = (p1 == q1 || p1 == q2 || p2 == q1 || p2 == q2);
    if (shared) return false;
    return true;
  }
  // Touching configurations where one endpoint lies on the other segment.
  if (o1 == 0 && on_segment(p1, p2, q1) && q1 != p1 && q1 != p2) return true;
  if (o2 == 0 && on_segment(p1, p2, q2) && q2 != p1 && q2 != p2) return true;
  if (o3 == 0 && on_segment(q1, q2, p1) && p1 != q1 && p1 != q2) return true;
  if (o4 == 0 && on_segment(q1, q2, p2) && p2 != q1 && p2 != q2) return true;
  return false;
}

/// Area-weighted uniform samples on a triangle mesh.
inline PointSet sample_surface(std::span<const Triangle3> mesh, int count, std::uint64_t seed) {
  if (mesh.empty()) throw GeometryError("cannot sample an empty mesh");
  if (count < 1) throw GeometryError("sample count must be >= 1");
  std::vector<double> cumulative(mesh.size());
  double total = 0.0;
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    total += mesh[k].area();
    cumulative[k] = total;
  }
  if (!(total > 0.0)) throw GeometryError("mesh has zero area");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  PointSet out;
  out.provenance = Provenance::SurfaceSample;
  out.points.reserve(count);
  for (int s = 0; s < count; ++s) {
    const double pick = uni(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    const std::size_t k = std::min<std::size_t>(it - cumulative.begin(), mesh.size() - 1);
    const double r1 = std::sqrt(uni(rng));
    const double r2 = uni(rng);
    const Triangle3& t = mesh[k];
    out.points.push_back((1.0 - r1) * t.a + r1 * (1.0 - r2) * t.b + r1 * r2 * t.c);
  }
  return out;
}

/// max over x in X of the distance to the nearest y in Y (exact, early-break).
inline double directed_hausdorff(std::span<const Point3> x, std::span<const Point3> y) {
  if (x.empty() || y.empty()) throw GeometryError("Hausdorff distance of an empty point set");
  double cmax = 0.0;
  for (const Point3& p : x) {
    double cmin = std::numeric_limits<double>::infinity();
    for (const Point3& q : y) {
      const double d = squared_distance(p, q);
      if (d < cmax) {
        cmin = d;
        break;
      }
      if (d < cmin) cmin = d;
    }
    if (cmin > cmax) cmax = cmin;
  }
  return std::sqrt(cmax);
}

inline double directed_hausdorff(const PointSet& x, const PointSet& y) {
  return directed_hausdorff(std::span<const Point3>(x.points), std::span<const Point3>(y.points));
}

inline double hausdorff(const PointSet& x, const PointSet& y) {
  return std::max(directed_hausdorff(x, y), directed_hausdorff(y, x));
}

/// Exact nearest-neighbour index (k-d tree) over a fixed point cloud.
/// Queries return the same squared distance as a linear scan.
class PointIndex {
 public:
  explicit PointIndex(std::span<const Point3> pts) : pts_(pts.begin(), pts.end()) {
    if (pts_.empty()) throw GeometryError("cannot index an empty point set");
    order_.resize(pts_.size());
    for (std::size_t k = 0; k < order_.size(); ++k) order_[k] = static_cast<int>(k);
    nodes_.reserve(2 * pts_.size() / kLeaf + 2);
    build(0, static_cast<int>(order_.size()));
  }

  /// Squared distance from p to its nearest indexed point.
  double nearest_squared(const Point3& p) const {
    double best = std::numeric_limits<double>::infinity();
    search(0, p, best);
    return best;
  }

  /// Like nearest_squared, but may stop early with any value <= floor once
  /// some point lies within sqrt(floor) of p.
  double nearest_squared_above(const Point3& p, double floor) const {
    double best = std::numeric_limits<double>::infinity();
    search_until(0, p, best, floor);
    return best;
  }

  const std::vector<Point3>& points() const { return pts_; }

 private:
  static constexpr int kLeaf = 8;
  struct Node {
    int begin, end;
    int axis = -1;  // -1 = leaf
    double split = 0.0;
    int left = -1, right = -1;
  };

  int build(int begin, int end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeaf) return id;
    Point3 lo = pts_[order_[begin]], hi = lo;
    for (int k = begin; k < end; ++k) {
      lo = lo.cwiseMin(pts_[order_[k]]);
      hi = hi.cwiseMax(pts_[order_[k]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) { return pts_[a][axis] < pts_[b][axis]; });
    const double split = pts_[order_[mid]][axis];
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search(int id, const Point3& p, double& best) const {
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (int k = n.begin; k < n.end; ++k) best = std::min(best, squared_distance(p, pts_[order_[k]]));
      return;
    }
    // Left holds coordinates <= split, right >= split.
    const double diff = p[n.axis] - n.split;
    const int near = diff < 0 ? n.left : n.right;
    const int far = diff < 0 ? n.right : n.left;
    search(near, p, best);
    if (diff * diff <= best) search(far, p, best);
  }

  void search_until(int id, const Point3& p, double& best, double floor) const {
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (int k = n.begin; k < n.end && best > floor; ++k) best = std::min(best, squared_distance(p, pts_[order_[k]]));
      return;
    }
    const double diff = p[n.axis] - n.split;
    const int near = diff < 0 ? n.left : n.right;
    const int far = diff < 0 ? n.right : n.left;
    search_until(near, p, best, floor);
    if (best > floor && diff * diff <= best) search_until(far, p, best, floor);
  }

  std::vector<Point3> pts_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

/// directed_hausdorff(x, indexed y). Queries break off as soon as they cannot
/// raise the running maximum. Once the maximum exceeds give_up the scan stops
/// and returns that partial value (a lower bound, > give_up).
inline double directed_hausdorff(std::span<const Point3> x, const PointIndex& y,
                                 double give_up = std::numeric_limits<double>::infinity()) {
  if (x.empty()) throw GeometryError("Hausdorff distance of an empty point set");
  const double stop = give_up * give_up;
  double cmax = 0.0;
  for (const Point3& p : x) {
    const double d = y.nearest_squared_above(p, cmax);
    if (d > cmax) cmax = d;
    if (cmax > stop) break;
  }
  return std::sqrt(cmax);
}

namespace detail {

enum class RayHit { Miss, Hit, Ambiguous, OnSurface };

// Moeller-Trumbore ray/triangle, flagging grazing hits.
inline RayHit ray_triangle(const Point3& o, const Vec3& dir, const Triangle3& t) {
  constexpr double graze = 1e-9;
  const Vec3 e1 = t.b - t.a;
  const Vec3 e2 = t.c - t.a;
  const Vec3 p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-14) return RayHit::Miss;
  const double inv = 1.0 / det;
  const Vec3 s = o - t.a;
  const double u = s.dot(p) * inv;
  const Vec3 q = s.cross(e1);
  const double v = dir.dot(q) * inv;
  const double dist = e2.dot(q) * inv;
  if (u < -graze || v < -graze || u + v > 1.0 + graze || dist < -graze) return RayHit::Miss;
  if (std::abs(dist) < graze) return RayHit::OnSurface;
  if (u < graze || v < graze || u + v > 1.0 - graze || dist < graze) return RayHit::Ambiguous;
  return RayHit::Hit;
}

}  // namespace detail

/// Ray-parity containment test for a watertight mesh. Results for meshes that
/// are not closed are unspecified.
inline bool point_in_closed_mesh(const Point3& p, std::span<const Triangle3> mesh) {
  std::optional<std::mt19937_64> rng;
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 dir(0.5773502691896258, 0.6123724356957945, 0.5400617248673217);
  for (int attempt = 0; attempt < 8; ++attempt) {
    int crossings = 0;
    bool ambiguous = false;
    for (const Triangle3& t : mesh) {
      const auto hit = detail::ray_triangle(p, dir, t);
      if (hit == detail::RayHit::OnSurface) return false;  // boundary is not strictly inside
      if (hit == detail::RayHit::Ambiguous) {
        ambiguous = true;
        break;
      }
      if (hit == detail::RayHit::Hit) ++crossings;
    }
    if (!ambiguous) return crossings % 2 == 1;
    if (!rng) rng.emplace(0x5eedULL);
    dir = Vec3(gauss(*rng), gauss(*rng), gauss(*rng)).normalized();
  }
  return false;
}

}  // namespace origami::geom
