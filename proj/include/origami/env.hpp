#pragma once

// The origami game. A turn selects a non-extended vertex (with a rigid body
// mode) and then places its three outgoing creases; every action is applied
// to the whole symmetry orbit. Ten driving angles are tracked in parallel
// and dropped as soon as the folding motion self-intersects.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "origami/error.hpp"
#include "origami/kinematics.hpp"
#include "origami/objectives.hpp"
#include "origami/pattern.hpp"

namespace origami::env {

// ---------------------------------------------------------------------------
// Actions

enum class ActionKind : std::uint8_t { SelectVertex, PlaceEndpoint, Source, Terminate };

struct Action {
  ActionKind kind = ActionKind::Terminate;
  Cell cell{};      // vertex cell for SelectVertex, target cell otherwise
  int mode = 0;     // SelectVertex only

  static Action select(Cell c, int m) { return {ActionKind::SelectVertex, c, m < 0 ? -1 : 1}; }
  static Action endpoint(Cell c) { return {ActionKind::PlaceEndpoint, c, 0}; }
  static Action source(Cell c) { return {ActionKind::Source, c, 0}; }
  static Action terminate() { return {}; }

  friend bool operator==(const Action&, const Action&) = default;

  std::string str() const {
    std::ostringstream os;
    switch (kind) {
      case ActionKind::SelectVertex: os << "select " << cell.i << ' ' << cell.j << ' ' << (mode < 0 ? -1 : 1); break;
      case ActionKind::PlaceEndpoint: os << "endpoint " << cell.i << ' ' << cell.j; break;
      case ActionKind::Source: os << "source " << cell.i << ' ' << cell.j; break;
      case ActionKind::Terminate: os << "terminate"; break;
    }
    return os.str();
  }

  static Action parse(const std::string& s) {
    std::istringstream is(s);
    std::string tag;
    is >> tag;
    Action a;
    if (tag == "terminate") return a;
    if (!(is >> a.cell.i >> a.cell.j)) throw EnvError("malformed action: " + s);
    if (tag == "select") {
      a.kind = ActionKind::SelectVertex;
      if (!(is >> a.mode) || (a.mode != 1 && a.mode != -1)) throw EnvError("malformed action: " + s);
    } else if (tag == "endpoint") {
      a.kind = ActionKind::PlaceEndpoint;
    } else if (tag == "source") {
      a.kind = ActionKind::Source;
    } else {
      throw EnvError("unknown action: " + s);
    }
    return a;
  }
};

/// Flat action index: SelectVertex 2c+(M>0), PlaceEndpoint 2d+c, Source 3d+c,
/// Terminate 4d, with c the playable index of the cell and d the playable
/// area size.
inline int action_index(const Action& a, const Board& board) {
  const int d = static_cast<int>(board.playable_area().size());
  if (a.kind == ActionKind::Terminate) return 4 * d;
  const int c = board.playable_index(a.cell);
  if (c < 0) throw EnvError("action cell outside the playable area");
  switch (a.kind) {
    case ActionKind::SelectVertex: return 2 * c + (a.mode > 0 ? 1 : 0);
    case ActionKind::PlaceEndpoint: return 2 * d + c;
    case ActionKind::Source: return 3 * d + c;
    default: return 4 * d;
  }
}

inline Action action_from_index(int index, const Board& board) {
  const int d = static_cast<int>(board.playable_area().size());
  if (index < 0 || index > 4 * d) throw EnvError("action index out of range");
  if (index == 4 * d) return Action::terminate();
  const auto& cells = board.playable_area();
  if (index < 2 * d) return Action::select(cells[index / 2], index % 2 ? 1 : -1);
  if (index < 3 * d) return Action::endpoint(cells[index - 2 * d]);
  return Action::source(cells[index - 3 * d]);
}

inline int action_space_size(const Board& board) { return 4 * static_cast<int>(board.playable_area().size()) + 1; }

// ---------------------------------------------------------------------------
// Configuration and state

enum class SeedKind { Fixed, AgentSquare };

struct EnvConfig {
  int width = 9;
  int height = 9;
  SymmetryAxes axes{};
  double max_crease_length = std::numeric_limits<double>::infinity();
  obj::Objective objective;
  SeedKind seed_kind = SeedKind::Fixed;
  CreaseGraph seed_graph;  // used when seed_kind == Fixed
  double rho0_max = std::numbers::pi;
  int angle_count = 10;
  int sweep_steps = 20;
  bool allow_sources = false;
  bool fixed_rho = false;  // track a single angle: the largest the seed admits
  std::optional<double> r_min;
  int max_steps = 512;

  Board board() const { return Board(width, height, axes, max_crease_length); }
};

enum class Phase { SeedChoice, SelectVertex, PlaceEdge };
enum class DoneReason { None, Terminated, NoActions, Rollback, DeadEnd, StepCap };

inline const char* reason_name(DoneReason r) {
  switch (r) {
    case DoneReason::None: return "running";
    case DoneReason::Terminated: return "terminated";
    case DoneReason::NoActions: return "no-actions";
    case DoneReason::Rollback: return "rollback";
    case DoneReason::DeadEnd: return "dead-end";
    case DoneReason::StepCap: return "step-cap";
  }
  return "?";
}

struct AngleSlot {
  double rho = 0.0;
  bool alive = true;
  double phi = 0.0;  // potential credited so far at this angle
  std::optional<kin::FoldedState> folded;  // current graph folded at rho
};

struct TraceRecord {
  int step = 0;
  Action action;
  double reward = 0.0;
  int alive = 0;
};

struct GameState {
  CreaseGraph graph;
  Phase phase = Phase::SelectVertex;
  int selected = -1;  // representative vertex of the current extension
  int placed = 0;     // endpoints placed in the current extension
  CreaseGraph snapshot;
  std::vector<AngleSlot> angles;
  // Dihedrals of the snapshot at the angles checked by the third-crease mask.
  std::vector<std::vector<double>> mask_rho;
  double reward_sum = 0.0;
  int steps = 0;
  DoneReason reason = DoneReason::None;
  double final_value = 0.0;  // f(s_T, rho*) once done (not set for rollbacks)
  int best_angle = -1;
  std::vector<TraceRecord> trace;

  bool done() const { return reason != DoneReason::None; }
  int alive_count() const {
    return static_cast<int>(std::count_if(angles.begin(), angles.end(), [](const AngleSlot& a) { return a.alive; }));
  }
  std::vector<Action> actions() const {
    std::vector<Action> out;
    for (const auto& t : trace) out.push_back(t.action);
    return out;
  }
};

struct StepResult {
  double reward = 0.0;
  bool done = false;
};

/// Observation tensor of shape w x h x (w*h + 2), row-major in (i, j, k).
struct Observation {
  int width = 0, height = 0, depth = 0;
  std::vector<std::int8_t> data;

  std::int8_t at(int i, int j, int k) const { return data[(std::size_t(i) * height + j) * depth + k]; }
  std::int8_t& at(int i, int j, int k) { return data[(std::size_t(i) * height + j) * depth + k]; }
};

// ---------------------------------------------------------------------------

class Environment {
 public:
  explicit Environment(EnvConfig cfg) : cfg_(std::move(cfg)), board_(cfg_.board()) {
    if (cfg_.angle_count < 1) throw ConfigError("angle_count must be >= 1");
    if (cfg_.sweep_steps < 1) throw ConfigError("sweep_steps must be >= 1");
    if (!(cfg_.rho0_max > 0.0) || cfg_.rho0_max > std::numbers::pi) throw ConfigError("rho0_max must lie in (0, pi]");
    if (cfg_.objective.kind == obj::ObjectiveKind::Shape && !cfg_.objective.target)
      throw ConfigError("shape objective without a target");
    if (cfg_.r_min && !(*cfg_.r_min < 0.0)) throw ConfigError("r_min must be negative");
    if (cfg_.seed_kind == SeedKind::Fixed) require_valid(board_, cfg_.seed_graph);
    build_completable();
    if (cfg_.fixed_rho) fixed_angle_ = find_fixed_angle();
  }

  const EnvConfig& config() const { return cfg_; }
  const Board& board() const { return board_; }
  double penalty() const { return cfg_.r_min ? *cfg_.r_min : -board_.diagonal(); }
  std::optional<double> fixed_angle() const { return fixed_angle_; }

  GameState reset() const {
    GameState s;
    if (fixed_angle_) {
      s.angles.push_back(AngleSlot{*fixed_angle_});
    } else {
      for (int k = 1; k <= cfg_.angle_count; ++k) s.angles.push_back(AngleSlot{cfg_.rho0_max * k / cfg_.angle_count});
    }
    if (cfg_.seed_kind == SeedKind::AgentSquare) {
      s.graph = CreaseGraph(board_.width(), board_.height());
      s.phase = Phase::SeedChoice;
      return s;
    }
    s.graph = cfg_.seed_graph;
    s.phase = Phase::SelectVertex;
    evaluate_angles(s.graph, s.angles);
    if (s.alive_count() == 0) throw ConfigError("seed pattern is not foldable at any tracked angle");
    // Potentials of the seed are credited by the first graph-changing step.
    return s;
  }

  std::vector<Action> legal_actions(const GameState& s) const {
    std::vector<Action> out;
    if (s.done()) return out;
    switch (s.phase) {
      case Phase::SeedChoice:
        for (int h : seed_sizes()) out.push_back(Action::endpoint(seed_corner(h)));
        break;
      case Phase::SelectVertex:
        for (const auto& v : s.graph.vertices()) {
          if (!select_ok(s, Action::select(v.pos, 1))) continue;
          out.push_back(Action::select(v.pos, -1));
          out.push_back(Action::select(v.pos, 1));
        }
        if (cfg_.allow_sources)
          for (Cell c : board_.playable_area())
            if (source_ok(s.graph, c)) out.push_back(Action::source(c));
        out.push_back(Action::terminate());
        break;
      case Phase::PlaceEdge:
        for (Cell c : legal_endpoints(s)) out.push_back(Action::endpoint(c));
        break;
    }
    return out;
  }

  bool is_legal(const GameState& s, const Action& a) const {
    if (s.done()) return false;
    switch (s.phase) {
      case Phase::SeedChoice: {
        if (a.kind != ActionKind::PlaceEndpoint) return false;
        const auto sizes = seed_sizes();
        return std::any_of(sizes.begin(), sizes.end(), [&](int h) { return seed_corner(h) == a.cell; });
      }
      case Phase::SelectVertex:
        switch (a.kind) {
          case ActionKind::Terminate: return true;
          case ActionKind::SelectVertex: return select_ok(s, a);
          case ActionKind::Source: return cfg_.allow_sources && board_.is_playable(a.cell) && source_ok(s.graph, a.cell);
          default: return false;
        }
      case Phase::PlaceEdge:
        return a.kind == ActionKind::PlaceEndpoint && endpoint_ok(s, EndpointContext(s, *this), a.cell);
    }
    return false;
  }

  StepResult step(GameState& s, const Action& a) const {
    if (s.done()) throw EnvError("step on a finished episode");
    if (!is_legal(s, a)) throw EnvError("illegal action: " + a.str());
    ++s.steps;
    double reward = 0.0;
    switch (a.kind) {
      case ActionKind::Terminate:
        reward += finish(s, DoneReason::Terminated);
        break;
      case ActionKind::SelectVertex: {
        const int v = s.graph.vertex_at(a.cell);
        for (int u : copies(s.graph, v)) s.graph.vertex(u).mode = a.mode;
        begin_extension(s, v);
        break;
      }
      case ActionKind::Source: {
        begin_extension(s, -1);  // snapshot before the new vertices appear
        int rep = -1;
        for (Cell c : board_.orbit(a.cell)) {
          const int id = s.graph.add_vertex(c, VertexKind::Source);
          s.graph.vertex(id).mode = 1;
          if (c == a.cell) rep = id;
        }
        s.selected = rep;
        break;
      }
      case ActionKind::PlaceEndpoint:
        if (s.phase == Phase::SeedChoice) {
          s.graph = seed_square(board_, seed_center().i - a.cell.i, seed_center());
          s.phase = Phase::SelectVertex;
          reward += commit(s);
        } else {
          place(s, a.cell);
          if (s.graph.out_degree(s.selected) == 3) {
            for (int u : copies(s.graph, s.selected)) s.graph.vertex(u).extended = true;
            reward += commit(s);
          }
        }
        break;
    }
    if (!s.done()) {
      if (s.phase == Phase::PlaceEdge && legal_endpoints(s).empty()) {
        restore(s);
        reward += finish(s, DoneReason::DeadEnd);
      } else if (s.phase == Phase::SelectVertex && only_terminate(s)) {
        reward += finish(s, DoneReason::NoActions);
      } else if (s.steps >= cfg_.max_steps) {
        if (s.phase == Phase::PlaceEdge) restore(s);
        reward += finish(s, DoneReason::StepCap);
      }
    }
    s.trace.push_back({s.steps, a, reward, s.alive_count()});
    return {reward, s.done()};
  }

  Observation encode_observation(const GameState& s) const {
    Observation o;
    o.width = board_.width();
    o.height = board_.height();
    o.depth = o.width * o.height + 2;
    o.data.assign(std::size_t(o.width) * o.height * o.depth, 0);
    const auto& g = s.graph;
    for (const auto& v : g.vertices()) o.at(v.pos.i, v.pos.j, 0) = static_cast<std::int8_t>(v.mode);
    for (const auto& c : g.creases()) {
      const Cell a = g.vertex(c.from).pos, b = g.vertex(c.to).pos;
      o.at(b.i, b.j, 1 + c.from) = 1;
      o.at(a.i, a.j, 1 + c.to) = -1;
    }
    if (s.phase == Phase::PlaceEdge && s.selected >= 0) {
      const Cell p = g.vertex(s.selected).pos;
      o.at(p.i, p.j, o.depth - 1) = 1;
    }
    return o;
  }

  /// Replays an action sequence from reset.
  GameState replay(const std::vector<Action>& actions) const {
    GameState s = reset();
    for (const auto& a : actions) {
      if (s.done()) throw EnvError("replay continues past the end of the episode");
      step(s, a);
    }
    return s;
  }

  /// Tab-separated trace: step, action, reward, alive angles.
  static std::string trace_log(const GameState& s) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& t : s.trace) os << t.step << '\t' << t.action.str() << '\t' << t.reward << '\t' << t.alive << '\n';
    return os.str();
  }

  // -------------------------------------------------------------------------
  // Helpers exposed for tests and searches.

  std::vector<int> seed_sizes() const {
    const Cell c = seed_center();
    std::vector<int> out;
    for (int h = 1; c.i - h >= 0 && c.j - h >= 0 && c.i + h < board_.width() && c.j + h < board_.height(); ++h)
      out.push_back(h);
    return out;
  }
  Cell seed_center() const { return {board_.width() / 2, board_.height() / 2}; }
  Cell seed_corner(int h) const { return {seed_center().i - h, seed_center().j - h}; }

  /// Vertex ids of the symmetry orbit of v (v first).
  std::vector<int> copies(const CreaseGraph& g, int v) const {
    std::vector<int> out{v};
    for (Cell c : board_.orbit(g.vertex(v).pos)) {
      const int u = g.vertex_at(c);
      if (u < 0) throw EnvError("symmetry orbit of a vertex is incomplete");
      if (u != v) out.push_back(u);
    }
    return out;
  }

  /// Folds `g` at every alive angle and at a sweep of the largest one, in
  /// increasing order; the first infeasible or self-intersecting check point
  /// kills every angle at or above it. Surviving angles keep their folds.
  void evaluate_angles(const CreaseGraph& g, std::vector<AngleSlot>& angles) const {
    struct Check {
      double rho;
      int angle;
    };
    std::vector<Check> checks;
    int largest = -1;
    for (int k = 0; k < static_cast<int>(angles.size()); ++k)
      if (angles[k].alive) {
        checks.push_back({angles[k].rho, k});
        if (largest < 0 || angles[k].rho > angles[largest].rho) largest = k;
      }
    if (largest < 0) return;
    for (int m = 1; m < cfg_.sweep_steps; ++m) {
      const double r = angles[largest].rho * m / cfg_.sweep_steps;
      bool dup = false;
      for (const auto& c : checks)
        if (std::abs(c.rho - r) <= 1e-12 * cfg_.rho0_max) dup = true;
      if (!dup) checks.push_back({r, -1});
    }
    std::sort(checks.begin(), checks.end(), [](const Check& a, const Check& b) { return a.rho < b.rho; });
    const auto layout = kin::build_panel_layout(g);
    double fail = std::numeric_limits<double>::infinity();
    for (const auto& c : checks) {
      try {
        auto st = kin::fold_graph(g, layout, c.rho);
        if (!kin::mesh_collision_free(st)) {
          fail = c.rho;
          break;
        }
        if (c.angle >= 0) angles[c.angle].folded = std::move(st);
      } catch (const FoldError&) {
        fail = c.rho;
        break;
      }
    }
    for (auto& a : angles)
      if (a.alive && a.rho >= fail) {
        a.alive = false;
        a.folded.reset();
      }
  }

  std::vector<Cell> legal_endpoints(const GameState& s) const {
    std::vector<Cell> out;
    if (s.phase != Phase::PlaceEdge) return out;
    const EndpointContext ctx(s, *this);
    for (Cell e : board_.playable_area())
      if (endpoint_ok(s, ctx, e)) out.push_back(e);
    return out;
  }

 private:
  struct EndpointContext {
    EndpointContext(const GameState& s, const Environment& env)
        : v(s.selected),
          vp(s.graph.vertex(v).pos),
          anc(s.graph.ancestors_of(env.copies(s.graph, v))),
          out_deg(s.graph.out_degree(v)) {}
    int v;
    Cell vp;
    std::vector<bool> anc;
    int out_deg;
  };

  bool endpoint_ok(const GameState& s, const EndpointContext& ctx, Cell e) const {
    const auto& g = s.graph;
    if (e == ctx.vp || !board_.is_playable(e)) return false;
    const double len = std::hypot(double(e.i - ctx.vp.i), double(e.j - ctx.vp.j));
    if (board_.bounded_crease_length() && len > board_.max_crease_length() + 1e-12) return false;
    const int u = g.vertex_at(e);
    if (u >= 0 && (g.vertex(u).extended || ctx.anc[u] || g.connected(ctx.v, u))) return false;
    const auto images = crease_images(ctx.vp, e);
    int at_v = 0;
    for (const auto& [p, q] : images) at_v += p == ctx.vp;
    if (ctx.out_deg + at_v > 3) return false;
    if (!images_fit(g, images, ctx.anc)) return false;
    if (ctx.out_deg + at_v == 3 && !third_crease_ok(s, images)) return false;
    return true;
  }

  bool select_ok(const GameState& s, const Action& a) const {
    if ((a.mode != 1 && a.mode != -1) || !board_.is_playable(a.cell)) return false;
    const int v = s.graph.vertex_at(a.cell);
    return v >= 0 && !s.graph.vertex(v).extended && completable_[board_.cell_index(a.cell)];
  }

  // Vertices whose stabilizer fixes some other cell can reach exactly three
  // outgoing creases; the rest (e.g. the centre under x,y symmetry) cannot.
  void build_completable() {
    completable_.assign(board_.cell_count(), false);
    for (int c = 0; c < board_.cell_count(); ++c) {
      const Cell p = board_.cell_at(c);
      std::vector<BoardSymmetry> stab;
      for (const auto& g : board_.group())
        if (g.apply(p, board_.width(), board_.height()) == p) stab.push_back(g);
      for (int q = 0; q < board_.cell_count() && !completable_[c]; ++q) {
        if (q == c) continue;
        const Cell qc = board_.cell_at(q);
        bool fixed = true;
        for (const auto& g : stab) fixed = fixed && g.apply(qc, board_.width(), board_.height()) == qc;
        if (fixed) completable_[c] = true;
      }
    }
  }

  std::optional<double> find_fixed_angle() const {
    if (cfg_.seed_kind != SeedKind::Fixed) throw ConfigError("fixed driving angle needs a fixed seed");
    const int n = cfg_.angle_count * cfg_.sweep_steps;
    const auto layout = kin::build_panel_layout(cfg_.seed_graph);
    int best = 0;
    for (int j = 1; j <= n; ++j) {
      try {
        if (!kin::mesh_collision_free(kin::fold_graph(cfg_.seed_graph, layout, cfg_.rho0_max * j / n))) break;
      } catch (const FoldError&) {
        break;
      }
      best = j;
    }
    if (best == 0) throw ConfigError("seed pattern admits no positive driving angle");
    return cfg_.rho0_max * best / n;
  }

  /// Directed images (g(v) -> g(e)) of a new crease, deduplicated.
  std::vector<std::pair<Cell, Cell>> crease_images(Cell v, Cell e) const {
    std::vector<std::pair<Cell, Cell>> out;
    for (const auto& g : board_.group()) {
      std::pair<Cell, Cell> im{g.apply(v, board_.width(), board_.height()), g.apply(e, board_.width(), board_.height())};
      if (std::find(out.begin(), out.end(), im) == out.end()) out.push_back(im);
    }
    return out;
  }

  bool images_fit(const CreaseGraph& g, const std::vector<std::pair<Cell, Cell>>& images,
                  const std::vector<bool>& anc) const {
    for (std::size_t a = 0; a < images.size(); ++a) {
      const auto& [p, q] = images[a];
      const int qu = g.vertex_at(q);
      if (qu >= 0 && (anc[qu] || g.vertex(qu).extended)) return false;
      for (const auto& c : g.creases())
        if (geom::seg_seg_intersect_2d(p, q, g.vertex(c.from).pos, g.vertex(c.to).pos)) return false;
      for (const auto& w : g.vertices())
        if (strictly_inside(p, q, w.pos)) return false;
      for (std::size_t b = a + 1; b < images.size(); ++b) {
        const auto& [p2, q2] = images[b];
        if (geom::seg_seg_intersect_2d(p, q, p2, q2)) return false;
        if (strictly_inside(p, q, q2) || strictly_inside(p2, q2, q)) return false;
      }
    }
    return true;
  }

  static bool strictly_inside(Cell p, Cell q, Cell w) {
    if (w == p || w == q) return false;
    const long cross = long(q.i - p.i) * (w.j - p.j) - long(q.j - p.j) * (w.i - p.i);
    if (cross != 0) return false;
    return std::min(p.i, q.i) <= w.i && w.i <= std::max(p.i, q.i) && std::min(p.j, q.j) <= w.j &&
           w.j <= std::max(p.j, q.j);
  }

  // Spherical triangle inequality for the completed outgoing fan of the
  // selected vertex, at every angle cached when the extension started.
  bool third_crease_ok(const GameState& s, const std::vector<std::pair<Cell, Cell>>& images) const {
    const auto& g = s.graph;
    const int v = s.selected;
    const Cell vp = g.vertex(v).pos;
    struct Dir {
      double theta;
      int crease;  // -1 for the new ones
    };
    std::vector<Dir> dirs;
    auto angle_to = [&](Cell q) {
      double t = std::atan2(double(q.j - vp.j), double(q.i - vp.i));
      return t < 0 ? t + 2 * std::numbers::pi : t;
    };
    for (int e : g.incident(v)) dirs.push_back({angle_to(g.vertex(g.other_end(e, v)).pos), e});
    for (const auto& [p, q] : images)
      if (p == vp) dirs.push_back({angle_to(q), -1});
    std::sort(dirs.begin(), dirs.end(), [](const Dir& a, const Dir& b) { return a.theta < b.theta; });
    for (const auto& rho : s.mask_rho) {
      std::vector<kin::VertexCrease> cs;
      for (const auto& d : dirs) {
        kin::VertexCrease vc{d.theta, true, 0.0};
        if (d.crease >= 0) {
          const auto& c = g.crease(d.crease);
          vc.outgoing = !c.driving && c.from == v;
          if (!vc.outgoing) vc.rho = static_cast<std::size_t>(d.crease) < rho.size() ? rho[d.crease] : 0.0;
        }
        cs.push_back(vc);
      }
      if (!kin::spherical_triangle_ok(kin::unit_angles(cs))) return false;
    }
    return true;
  }

  bool only_terminate(const GameState& s) const {
    for (const auto& v : s.graph.vertices())
      if (select_ok(s, Action::select(v.pos, 1))) return false;
    if (cfg_.allow_sources)
      for (Cell c : board_.playable_area())
        if (source_ok(s.graph, c)) return false;
    return true;
  }

  bool source_ok(const CreaseGraph& g, Cell c) const {
    if (g.vertex_at(c) >= 0 || !completable_[board_.cell_index(c)]) return false;
    for (const auto& cr : g.creases())
      if (strictly_inside(g.vertex(cr.from).pos, g.vertex(cr.to).pos, c)) return false;
    return true;
  }

  void begin_extension(GameState& s, int v) const {
    s.snapshot = s.graph;
    s.selected = v;
    s.placed = 0;
    s.phase = Phase::PlaceEdge;
    s.mask_rho.clear();
    int largest = -1;
    for (int k = 0; k < static_cast<int>(s.angles.size()); ++k)
      if (s.angles[k].alive && (largest < 0 || s.angles[k].rho > s.angles[largest].rho)) largest = k;
    std::vector<double> rhos;
    for (const auto& a : s.angles)
      if (a.alive) rhos.push_back(a.rho);
    if (largest >= 0)
      for (int m = 1; m < cfg_.sweep_steps; ++m) rhos.push_back(s.angles[largest].rho * m / cfg_.sweep_steps);
    for (double r : rhos) {
      try {
        s.mask_rho.push_back(kin::solve_dihedrals(s.graph, r));
      } catch (const FoldError&) {
        // Already excluded by the collision sweep of the previous step.
      }
    }
  }

  void place(GameState& s, Cell e) const {
    auto& g = s.graph;
    const Cell vp = g.vertex(s.selected).pos;
    for (const auto& [p, q] : crease_images(vp, e)) {
      int to = g.vertex_at(q);
      if (to < 0) to = g.add_vertex(q);
      g.add_crease(g.vertex_at(p), to);
    }
    ++s.placed;
  }

  void restore(GameState& s) const {
    s.graph = s.snapshot;
    s.phase = Phase::SelectVertex;
    s.selected = -1;
    s.placed = 0;
    s.mask_rho.clear();
  }

  // Completed graph change: check the motion, credit potentials.
  double commit(GameState& s) const {
    std::vector<AngleSlot> next = s.angles;
    evaluate_angles(s.graph, next);
    const bool any = std::any_of(next.begin(), next.end(), [](const AngleSlot& a) { return a.alive; });
    if (!any) {
      restore(s);
      s.reason = DoneReason::Rollback;
      s.reward_sum += penalty();
      return penalty();
    }
    s.angles = std::move(next);
    s.phase = Phase::SelectVertex;
    s.selected = -1;
    s.placed = 0;
    s.mask_rho.clear();
    double r = 0.0;
    if (cfg_.objective.shaped()) {
      r = -std::numeric_limits<double>::infinity();
      for (auto& a : s.angles) {
        if (!a.alive) continue;
        const double phi = cfg_.objective.potential(*a.folded);
        r = std::max(r, phi - a.phi);
        a.phi = phi;
      }
    }
    s.reward_sum += r;
    return r;
  }

  // Terminal reward: f(s_T, rho*) minus everything already paid out.
  double finish(GameState& s, DoneReason why) const {
    double best = -std::numeric_limits<double>::infinity();
    int best_k = -1;
    // Shape terminals never exceed the potential; visit angles by potential
    // and skip those that cannot beat the incumbent.
    std::vector<int> order;
    for (int k = 0; k < static_cast<int>(s.angles.size()); ++k)
      if (s.angles[k].alive && s.angles[k].folded) order.push_back(k);
    if (order.empty()) throw EnvError("no foldable angle at termination");
    const bool shaped = cfg_.objective.shaped();
    std::vector<double> bound(s.angles.size(), std::numeric_limits<double>::infinity());
    if (shaped)
      for (int k : order) bound[k] = cfg_.objective.potential(*s.angles[k].folded);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return bound[a] > bound[b]; });
    for (int k : order) {
      if (shaped && bound[k] <= best) continue;
      const double f = cfg_.objective.terminal(s.graph, *s.angles[k].folded, best);
      if (f > best) {
        best = f;
        best_k = k;
      }
    }
    s.final_value = best;
    s.best_angle = best_k;
    const double r = best - s.reward_sum;
    s.reward_sum = best;
    s.reason = why;
    return r;
  }

  EnvConfig cfg_;
  Board board_;
  std::vector<bool> completable_;
  std::optional<double> fixed_angle_;
};

}  // namespace origami::env
