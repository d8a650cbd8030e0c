#pragma once

// Forward kinematics of single-DOF rigid crease patterns: per-vertex
// spherical closure solve, fold propagation from the sources to the leaves,
// rigid panel placement and collision sweeps.
//
// Sign convention: crossing crease k counter-clockwise around a vertex, the
// next panel is rotated by +rho_k about the crease direction (pointing away
// from the vertex). rho > 0 is a valley fold (panels rise towards +z).

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "origami/error.hpp"
#include "origami/geom.hpp"
#include "origami/pattern.hpp"

namespace origami::kin {

using geom::Mat3;
using geom::Point3;
using geom::Vec3;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTriangleSlack = 1e-9;

inline Mat3 rotation(const Vec3& axis, double angle) { return Eigen::AngleAxisd(angle, axis).toRotationMatrix(); }

inline Vec3 planar_direction(double theta) { return Vec3(std::cos(theta), std::sin(theta), 0.0); }

/// One crease as seen from a vertex.
struct VertexCrease {
  double theta = 0.0;     // planar direction, radians
  bool outgoing = false;  // unknown dihedral, solved at this vertex
  double rho = 0.0;       // known dihedral for incoming creases
};

struct SectorAngles {
  std::vector<int> creases;    // incident crease ids in counter-clockwise order
  std::vector<double> thetas;  // their planar directions
  std::vector<double> angles;  // angles[k] lies between creases[k] and creases[k+1]
};

struct UnitAngles {
  double u1 = 0.0, u2 = 0.0, u3 = 0.0;

  std::array<double, 3> sorted() const {
    std::array<double, 3> s{u1, u2, u3};
    std::sort(s.begin(), s.end());
    return s;
  }
};

inline bool spherical_triangle_ok(const UnitAngles& u, double slack = kTriangleSlack) {
  const auto s = u.sorted();
  return s[0] + s[1] >= s[2] - slack;
}

inline SectorAngles sector_angles(const CreaseGraph& g, int v) {
  const auto& inc = g.incident(v);
  if (inc.empty()) throw FoldError("isolated vertex has no sector angles", v);
  SectorAngles out;
  std::vector<std::pair<double, int>> dirs;
  const Cell p = g.vertex(v).pos;
  for (int e : inc) {
    const Cell q = g.vertex(g.other_end(e, v)).pos;
    double t = std::atan2(double(q.j - p.j), double(q.i - p.i));
    if (t < 0) t += 2 * kPi;
    dirs.emplace_back(t, e);
  }
  std::sort(dirs.begin(), dirs.end());
  for (auto& [t, e] : dirs) {
    out.thetas.push_back(t);
    out.creases.push_back(e);
  }
  const std::size_t n = dirs.size();
  for (std::size_t k = 0; k < n; ++k) {
    double a = (k + 1 < n ? out.thetas[k + 1] : out.thetas[0] + 2 * kPi) - out.thetas[k];
    if (n == 1) a = 2 * kPi;
    out.angles.push_back(a);
  }
  return out;
}

/// Product of the rotations about every crease in the half-open cyclic range
/// (from, to): the relative frame of the fan between two creases.
inline Mat3 fan_rotation(std::span<const VertexCrease> cs, std::span<const Vec3> dirs, int from, int to) {
  const int n = static_cast<int>(cs.size());
  Mat3 r = Mat3::Identity();
  for (int k = (from + 1) % n; k != to; k = (k + 1) % n) r = r * rotation(dirs[k], cs[k].rho);
  return r;
}

/// Loop-closure product around a vertex (identity for a rigidly foldable vertex).
inline Mat3 closure_product(std::span<const double> thetas, std::span<const double> rhos) {
  Mat3 r = Mat3::Identity();
  for (std::size_t k = 0; k < thetas.size(); ++k) r = r * rotation(planar_direction(thetas[k]), rhos[k]);
  return r;
}

namespace detail {

inline std::array<int, 3> outgoing_positions(std::span<const VertexCrease> cs) {
  std::array<int, 3> o{};
  int n = 0;
  for (int k = 0; k < static_cast<int>(cs.size()); ++k)
    if (cs[k].outgoing) {
      if (n == 3) throw FoldError("vertex has more than three outgoing creases");
      o[n++] = k;
    }
  if (n != 3) throw FoldError("vertex needs exactly three outgoing creases");
  return o;
}

inline double clamp_cos(double c) { return std::clamp(c, -1.0, 1.0); }

}  // namespace detail

/// Unit angles spanned by the three outgoing creases once every incoming fan
/// is folded by its known dihedral angles. Ordered (o0->o1, o1->o2, o2->o0)
/// counter-clockwise.
inline UnitAngles unit_angles(std::span<const VertexCrease> cs) {
  const auto o = detail::outgoing_positions(cs);
  std::vector<Vec3> dirs(cs.size());
  for (std::size_t k = 0; k < cs.size(); ++k) dirs[k] = planar_direction(cs[k].theta);
  UnitAngles u;
  double* out[3] = {&u.u1, &u.u2, &u.u3};
  for (int s = 0; s < 3; ++s) {
    const int a = o[s], b = o[(s + 1) % 3];
    const Vec3 db = fan_rotation(cs, dirs, a, b) * dirs[b];
    *out[s] = std::acos(detail::clamp_cos(dirs[a].dot(db)));
  }
  return u;
}

/// Solve the three outgoing dihedral angles of a vertex from its incoming ones.
/// `mode` picks the branch: the sign of det[d_a, d_b, d_c] of the folded
/// outgoing directions in counter-clockwise order. That sign is invariant
/// under mirroring the layout, so mirrored vertices share the same mode.
/// Vertices without incoming creases (degree-3 sources) fold only about a
/// straight line through them; `source_rho` is applied to that line.
inline std::array<double, 3> solve_vertex(std::span<const VertexCrease> cs, int mode, double source_rho = 0.0) {
  const auto o = detail::outgoing_positions(cs);
  const int n = static_cast<int>(cs.size());
  std::array<double, 3> result{0.0, 0.0, 0.0};

  if (n == 3) {
    for (int s = 0; s < 3; ++s) {
      const int a = o[s], b = o[(s + 1) % 3];
      const double diff = std::remainder(cs[b].theta - cs[a].theta, 2 * kPi);
      if (std::abs(std::abs(diff) - kPi) < 1e-12) {
        const double m = mode < 0 ? -1.0 : 1.0;
        result[s] = m * source_rho;
        result[(s + 1) % 3] = m * source_rho;
        return result;
      }
    }
    return result;
  }

  bool flat = true;
  for (const auto& c : cs)
    if (!c.outgoing && c.rho != 0.0) flat = false;
  if (flat) return result;

  std::vector<Vec3> dirs(n);
  for (int k = 0; k < n; ++k) dirs[k] = planar_direction(cs[k].theta);

  struct Labeling {
    int s;
    double score;
  };
  std::array<Labeling, 3> labelings{};
  for (int s = 0; s < 3; ++s) {
    const int i = o[s], j = o[(s + 1) % 3], l = o[(s + 2) % 3];
    const Mat3 ga = fan_rotation(cs, dirs, i, j);
    const Mat3 gb = fan_rotation(cs, dirs, j, l);
    const Mat3 gc = fan_rotation(cs, dirs, l, i);
    const Vec3 e = ga * dirs[j];
    const Vec3 r = ga * gb * dirs[l];
    const double sin_ij = e.cross(dirs[i]).norm();
    const double sin_jl = e.cross(r).norm();
    const double sin_li = (gc * dirs[i]).cross(dirs[l]).norm();
    labelings[s] = {s, std::min(sin_ij * sin_jl, sin_li)};
  }
  std::sort(labelings.begin(), labelings.end(), [](auto& a, auto& b) { return a.score > b.score; });

  const int s = labelings[0].s;
  if (labelings[0].score < 1e-12) throw FoldError("degenerate vertex configuration");
  const int i = o[s], j = o[(s + 1) % 3], l = o[(s + 2) % 3];
  const Mat3 ga = fan_rotation(cs, dirs, i, j);
  const Mat3 gb = fan_rotation(cs, dirs, j, l);
  const Mat3 gc = fan_rotation(cs, dirs, l, i);
  const Vec3& di = dirs[i];
  const Vec3 e = ga * dirs[j];
  const Vec3 r = ga * gb * dirs[l];
  const double cos_li = dirs[l].dot(gc * di);

  // d_i . Rot(e, phi) r = cos U_li  ->  A cos(phi) + B sin(phi) = K
  const Vec3 r_par = r.dot(e) * e;
  const Vec3 r_perp = r - r_par;
  const Vec3 r_cross = e.cross(r);
  const double A = di.dot(r_perp);
  const double B = di.dot(r_cross);
  const double K = cos_li - di.dot(r_par);
  const double R = std::hypot(A, B);
  double ratio = K / R;
  if (std::abs(ratio) > 1.0 + 1e-9) throw FoldError("spherical triangle inequality violated");
  ratio = detail::clamp_cos(ratio);
  const double base = std::atan2(B, A);
  const double delta = std::acos(ratio);

  double phi = base + delta;
  {
    auto det_for = [&](double p) {
      const Mat3 w = ga * rotation(dirs[j], p) * gb;
      return di.dot(e.cross(w * dirs[l]));
    };
    const double d_plus = det_for(base + delta);
    const double d_minus = det_for(base - delta);
    const double want = mode < 0 ? -1.0 : 1.0;
    phi = (want * d_plus >= want * d_minus) ? base + delta : base - delta;
  }
  phi = std::remainder(phi, 2 * kPi);

  const Mat3 w = ga * rotation(dirs[j], phi) * gb;
  const Mat3 wt = w.transpose();
  // Rot(d_l, rho_l) * (G_C d_i) = W^T d_i
  const Vec3& dl = dirs[l];
  auto perp = [](const Vec3& v, const Vec3& axis) { return Vec3(v - v.dot(axis) * axis); };
  const Vec3 a = perp(gc * di, dl);
  const Vec3 b = perp(wt * di, dl);
  const double rho_l = std::atan2(dl.dot(a.cross(b)), a.dot(b));
  // Rot(d_i, rho_i) = G_C^T Rot(d_l, -rho_l) W^T
  const Mat3 ri = gc.transpose() * rotation(dl, -rho_l) * wt;
  const Vec3 u = Vec3::UnitZ();  // perpendicular to every planar direction
  const Vec3 ru = ri * u;
  const Vec3 ru_perp = perp(ru, di);
  const double rho_i = std::atan2(di.dot(u.cross(ru_perp)), u.dot(ru_perp));

  std::array<double, 3> by_position{};
  by_position[s] = rho_i;
  by_position[(s + 1) % 3] = phi;
  by_position[(s + 2) % 3] = rho_l;
  return by_position;
}

/// Frobenius residual of the loop closure around a vertex.
inline double closure_residual(std::span<const double> thetas, std::span<const double> rhos) {
  return (closure_product(thetas, rhos) - Mat3::Identity()).norm();
}

/// Incident creases of `v` in counter-clockwise order with known dihedrals
/// filled in from `rho` (NaN = unknown).
inline std::vector<VertexCrease> vertex_creases(const CreaseGraph& g, int v, const SectorAngles& sa,
                                                std::span<const double> rho, double rho0) {
  std::vector<VertexCrease> cs(sa.creases.size());
  for (std::size_t k = 0; k < sa.creases.size(); ++k) {
    const auto& c = g.crease(sa.creases[k]);
    cs[k].theta = sa.thetas[k];
    cs[k].outgoing = !c.driving && c.from == v;
    cs[k].rho = c.driving ? rho0 : rho[sa.creases[k]];
  }
  return cs;
}

/// Dihedral angle of every crease at driving angle rho0, propagated in
/// topological order from the sources. Unsolvable creases stay NaN.
inline std::vector<double> solve_dihedrals(const CreaseGraph& g, double rho0) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> rho(g.crease_count(), nan);
  for (std::size_t e = 0; e < g.crease_count(); ++e)
    if (g.crease(e).driving) rho[e] = rho0;
  const auto order = g.topological_order();
  if (!order) throw FoldError("crease graph has a directed cycle");
  for (int v : *order) {
    const auto& vx = g.vertex(v);
    if (!vx.extended) continue;
    const auto sa = sector_angles(g, v);
    auto cs = vertex_creases(g, v, sa, rho, rho0);
    bool has_incoming = false;
    for (std::size_t k = 0; k < cs.size(); ++k) {
      if (cs[k].outgoing) continue;
      has_incoming = true;
      if (std::isnan(cs[k].rho)) throw FoldError("incoming crease not solved", v);
    }
    (void)has_incoming;
    std::array<double, 3> out;
    try {
      out = solve_vertex(cs, vx.mode, rho0);
    } catch (const FoldError& err) {
      throw FoldError(std::string(err.what()) + " at vertex " + std::to_string(v), v);
    }
    int m = 0;
    for (std::size_t k = 0; k < cs.size(); ++k)
      if (cs[k].outgoing) rho[sa.creases[k]] = out[m++];
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Panel layout

struct Panel {
  std::vector<int> cycle;       // vertex ids, counter-clockwise
  std::vector<int> half_edges;  // crease half-edges bounding the panel (panel on their left)
  bool bounded = false;         // bounded face of the crease graph
};

struct MeshTriangle {
  std::array<int, 3> v;
  int panel = -1;
};

/// Planar decomposition of the sheet into rigid panels; depends only on the
/// graph, not on the driving angle. Half-edge 2e runs from->to along crease
/// e, 2e+1 runs to->from.
struct PanelLayout {
  std::vector<Panel> panels;
  std::vector<int> half_edge_panel;  // panel on the left of each half-edge, or -1
  std::vector<MeshTriangle> triangles;
};

namespace detail {

inline long long area2(const CreaseGraph& g, const std::vector<int>& cycle) {
  long long a = 0;
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    const Cell p = g.vertex(cycle[k]).pos;
    const Cell q = g.vertex(cycle[(k + 1) % cycle.size()]).pos;
    a += (long long)p.i * q.j - (long long)q.i * p.j;
  }
  return a;
}

inline long long orient(Cell a, Cell b, Cell c) {
  return (long long)(b.i - a.i) * (c.j - a.j) - (long long)(b.j - a.j) * (c.i - a.i);
}

// Ear clipping on a counter-clockwise polygon given by vertex ids.
inline std::vector<std::array<int, 3>> ear_clip(const CreaseGraph& g, std::vector<int> poly) {
  std::vector<std::array<int, 3>> tris;
  // Remove spikes (a, b, a) and repeated vertices.
  bool changed = true;
  while (changed && poly.size() >= 3) {
    changed = false;
    for (std::size_t k = 0; k < poly.size() && poly.size() >= 3; ++k) {
      const std::size_t n = poly.size();
      const int prev = poly[(k + n - 1) % n], next = poly[(k + 1) % n];
      if (prev == next || poly[k] == next) {
        // Drop the spike tip and one copy of its base.
        const std::size_t a = k, b = (k + 1) % n;
        if (a < b) {
          poly.erase(poly.begin() + b);
          poly.erase(poly.begin() + a);
        } else {
          poly.erase(poly.begin() + a);
          poly.erase(poly.begin() + b);
        }
        changed = true;
        break;
      }
    }
  }
  auto pos = [&](int v) { return g.vertex(v).pos; };
  while (poly.size() > 3) {
    const std::size_t n = poly.size();
    bool clipped = false;
    // Drop collinear vertices first; they add no area.
    for (std::size_t k = 0; k < n; ++k) {
      const int a = poly[(k + n - 1) % n], b = poly[k], c = poly[(k + 1) % n];
      if (orient(pos(a), pos(b), pos(c)) == 0) {
        poly.erase(poly.begin() + k);
        clipped = true;
        break;
      }
    }
    if (clipped) continue;
    for (std::size_t k = 0; k < n && !clipped; ++k) {
      const int a = poly[(k + n - 1) % n], b = poly[k], c = poly[(k + 1) % n];
      if (orient(pos(a), pos(b), pos(c)) <= 0) continue;
      bool ear = true;
      for (std::size_t m = 0; m < n && ear; ++m) {
        const int p = poly[m];
        if (p == a || p == b || p == c) continue;
        const Cell q = pos(p);
        if (q == pos(a) || q == pos(b) || q == pos(c)) continue;
        if (orient(pos(a), pos(b), q) >= 0 && orient(pos(b), pos(c), q) >= 0 && orient(pos(c), pos(a), q) >= 0)
          ear = false;
      }
      if (ear) {
        tris.push_back({a, b, c});
        poly.erase(poly.begin() + k);
        clipped = true;
      }
    }
    if (!clipped) {
      // Not simple; clip the first convex corner so the layout still covers the panel.
      for (std::size_t k = 0; k < n && !clipped; ++k) {
        const int a = poly[(k + n - 1) % n], b = poly[k], c = poly[(k + 1) % n];
        if (orient(pos(a), pos(b), pos(c)) > 0) {
          tris.push_back({a, b, c});
          poly.erase(poly.begin() + k);
          clipped = true;
        }
      }
      if (!clipped) break;
    }
  }
  if (poly.size() == 3 && orient(pos(poly[0]), pos(poly[1]), pos(poly[2])) > 0)
    tris.push_back({poly[0], poly[1], poly[2]});
  return tris;
}

}  // namespace detail

inline PanelLayout build_panel_layout(const CreaseGraph& g) {
  PanelLayout layout;
  const int nh = static_cast<int>(2 * g.crease_count());
  layout.half_edge_panel.assign(nh, -1);
  if (nh == 0) return layout;

  auto tail = [&](int h) { return h % 2 == 0 ? g.crease(h / 2).from : g.crease(h / 2).to; };
  auto head = [&](int h) { return h % 2 == 0 ? g.crease(h / 2).to : g.crease(h / 2).from; };

  // Outgoing half-edges per vertex, counter-clockwise, and each half-edge's slot.
  std::vector<std::vector<int>> around(g.vertex_count());
  std::vector<int> slot(nh, -1);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (g.incident(v).empty()) continue;
    const auto sa = sector_angles(g, static_cast<int>(v));
    for (int e : sa.creases) {
      const int h = g.crease(e).from == static_cast<int>(v) ? 2 * e : 2 * e + 1;
      slot[h] = static_cast<int>(around[v].size());
      around[v].push_back(h);
    }
  }
  // Face on the left: next(u->v) is the clockwise neighbour of v->u at v.
  auto next = [&](int h) {
    const int v = head(h);
    const int twin = h ^ 1;
    const auto& ring = around[v];
    const int k = slot[twin];
    return ring[(k + ring.size() - 1) % ring.size()];
  };

  std::vector<int> face_of(nh, -1);
  std::vector<std::vector<int>> faces;
  for (int h0 = 0; h0 < nh; ++h0) {
    if (face_of[h0] >= 0) continue;
    const int f = static_cast<int>(faces.size());
    faces.emplace_back();
    int h = h0;
    do {
      face_of[h] = f;
      faces[f].push_back(h);
      h = next(h);
    } while (h != h0);
  }

  for (const auto& face : faces) {
    std::vector<int> cycle;
    for (int h : face) cycle.push_back(tail(h));
    if (detail::area2(g, cycle) > 0) {
      Panel p;
      p.cycle = cycle;
      p.half_edges = face;
      p.bounded = true;
      layout.panels.push_back(std::move(p));
      continue;
    }
    // Outer boundary walk: the paper ends at non-extended vertices, so split
    // the walk into chains between them.
    const std::size_t n = face.size();
    std::size_t start = n;
    for (std::size_t k = 0; k < n; ++k)
      if (!g.vertex(tail(face[k])).extended) {
        start = k;
        break;
      }
    if (start == n) continue;
    std::vector<int> chain_edges;
    for (std::size_t step = 0; step < n; ++step) {
      const int h = face[(start + step) % n];
      chain_edges.push_back(h);
      if (!g.vertex(head(h)).extended) {
        if (chain_edges.size() >= 2) {
          std::vector<int> cycle_c;
          for (int ce : chain_edges) cycle_c.push_back(tail(ce));
          cycle_c.push_back(head(chain_edges.back()));
          if (cycle_c.front() != cycle_c.back() && detail::area2(g, cycle_c) > 0) {
            Panel p;
            p.cycle = cycle_c;
            p.half_edges = chain_edges;
            layout.panels.push_back(std::move(p));
          }
        }
        chain_edges.clear();
      }
    }
  }

  for (std::size_t p = 0; p < layout.panels.size(); ++p) {
    for (int h : layout.panels[p].half_edges) layout.half_edge_panel[h] = static_cast<int>(p);
    for (const auto& t : detail::ear_clip(g, layout.panels[p].cycle))
      layout.triangles.push_back(MeshTriangle{t, static_cast<int>(p)});
  }
  return layout;
}

// ---------------------------------------------------------------------------
// Folding

struct FoldedTriangle {
  geom::Triangle3 tri;
  std::array<int, 3> v;
  int panel = -1;
};

struct FoldedState {
  double rho0 = 0.0;
  std::vector<double> rho;          // per crease
  std::vector<Point3> positions;    // per vertex, board-centred coordinates
  std::vector<FoldedTriangle> mesh;

  std::vector<geom::Triangle3> triangles() const {
    std::vector<geom::Triangle3> out;
    out.reserve(mesh.size());
    for (const auto& t : mesh) out.push_back(t.tri);
    return out;
  }
};

inline Point3 planar_point(const CreaseGraph& g, Cell c) {
  return Point3(c.i - 0.5 * (g.width() - 1), c.j - 0.5 * (g.height() - 1), 0.0);
}

/// Fold the graph at driving angle rho0 using a precomputed panel layout.
inline FoldedState fold_graph(const CreaseGraph& g, const PanelLayout& layout, double rho0) {
  FoldedState st;
  st.rho0 = rho0;
  st.rho = solve_dihedrals(g, rho0);

  struct Affine {
    Mat3 r = Mat3::Identity();
    Vec3 t = Vec3::Zero();
    Point3 operator()(const Point3& p) const { return r * p + t; }
  };
  const std::size_t np = layout.panels.size();
  std::vector<Affine> frame(np);
  std::vector<bool> placed(np, false);

  auto tail = [&](int h) { return h % 2 == 0 ? g.crease(h / 2).from : g.crease(h / 2).to; };
  auto head = [&](int h) { return h % 2 == 0 ? g.crease(h / 2).to : g.crease(h / 2).from; };

  std::vector<int> queue;
  for (std::size_t e = 0; e < g.crease_count(); ++e) {
    for (int h : {int(2 * e), int(2 * e + 1)}) {
      const int root = layout.half_edge_panel[h];
      if (root < 0 || placed[root]) continue;
      placed[root] = true;
      queue.assign(1, root);
      for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const int p = queue[qi];
        for (int he : layout.panels[p].half_edges) {
          const int e2 = he / 2;
          const double rho = st.rho[e2];
          if (std::isnan(rho)) throw FoldError("crease without a dihedral angle");
          const int q = layout.half_edge_panel[he ^ 1];
          if (q < 0) continue;
          if (q == p) {
            if (std::abs(rho) > 1e-9) throw FoldError("crease ends inside a panel", head(he));
            continue;
          }
          // Panel p lies left of he = (u->v): T_p = T_q o Rot(line u->v, rho).
          const Point3 u = planar_point(g, g.vertex(tail(he)).pos);
          const Point3 v = planar_point(g, g.vertex(head(he)).pos);
          const Vec3 axis = (v - u).normalized();
          const Mat3 rot = rotation(axis, -rho);
          Affine fq;
          fq.r = frame[p].r * rot;
          fq.t = frame[p].r * (u - rot * u) + frame[p].t;
          if (!placed[q]) {
            placed[q] = true;
            frame[q] = fq;
            queue.push_back(q);
          } else if ((frame[q].r - fq.r).norm() > 1e-6 || (frame[q].t - fq.t).norm() > 1e-6) {
            throw FoldError("panel frames are inconsistent", tail(he));
          }
        }
      }
    }
  }

  st.positions.resize(g.vertex_count());
  std::vector<bool> have(g.vertex_count(), false);
  for (std::size_t p = 0; p < np; ++p)
    for (int v : layout.panels[p].cycle) {
      const Point3 x = frame[p](planar_point(g, g.vertex(v).pos));
      if (!have[v]) {
        st.positions[v] = x;
        have[v] = true;
      } else if ((st.positions[v] - x).norm() > 1e-6) {
        throw FoldError("vertex placed inconsistently by neighbouring panels", v);
      }
    }
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (!have[v]) st.positions[v] = planar_point(g, g.vertex(v).pos);

  st.mesh.reserve(layout.triangles.size());
  for (const auto& t : layout.triangles) {
    FoldedTriangle ft;
    ft.v = t.v;
    ft.panel = t.panel;
    ft.tri = geom::Triangle3{st.positions[t.v[0]], st.positions[t.v[1]], st.positions[t.v[2]]};
    st.mesh.push_back(ft);
  }
  return st;
}

inline FoldedState fold_graph(const CreaseGraph& g, double rho0) { return fold_graph(g, build_panel_layout(g), rho0); }

inline constexpr double kContactShrink = 1e-6;

/// True iff no two triangles from different panels intersect. Panels meet
/// along creases and at T-junctions; each triangle is pulled towards its
/// centroid by a relative 1e-6 so that boundary contact does not count.
inline bool mesh_collision_free(const FoldedState& st, double tol = geom::kSharedVertexTolerance) {
  const std::size_t n = st.mesh.size();
  std::vector<geom::Triangle3> tris(n);
  std::vector<Eigen::AlignedBox3d> boxes(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& t = st.mesh[k].tri;
    const Point3 c = (t.a + t.b + t.c) / 3.0;
    auto pull = [&](const Point3& p) { return Point3(p + kContactShrink * (c - p)); };
    tris[k] = geom::Triangle3{pull(t.a), pull(t.b), pull(t.c)};
    boxes[k].extend(tris[k].a);
    boxes[k].extend(tris[k].b);
    boxes[k].extend(tris[k].c);
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      if (st.mesh[a].panel == st.mesh[b].panel) continue;
      if (!boxes[a].intersects(boxes[b])) continue;
      if (geom::tri_tri_intersect(tris[a], tris[b], tol)) return false;
    }
  return true;
}

/// Checks the folding motion at rho0*k/sweep_steps, k = 1..sweep_steps.
inline bool motion_collision_free(const CreaseGraph& g, const PanelLayout& layout, double rho0, int sweep_steps) {
  for (int k = 1; k <= sweep_steps; ++k) {
    const auto st = fold_graph(g, layout, rho0 * k / sweep_steps);
    if (!mesh_collision_free(st)) return false;
  }
  return true;
}

inline bool motion_collision_free(const CreaseGraph& g, double rho0, int sweep_steps = 20) {
  return motion_collision_free(g, build_panel_layout(g), rho0, sweep_steps);
}

}  // namespace origami::kin
