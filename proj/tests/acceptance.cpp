// Acceptance suite: one PASS/FAIL line per primary criterion.
//
//   acceptance [--quick] [--only 1,5,...]
//
// --quick shrinks every budget for a fast dry run; its verdicts are not
// acceptance results. Criteria listed in kKnownShortfalls still print FAIL
// but do not change the exit status (see README, "Known shortfalls").

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "geom_oracles.hpp"
#include "kin_oracles.hpp"
#include "obj_oracle.hpp"
#include "objective_oracles.hpp"
#include "origami/io.hpp"
#include "search_oracle.hpp"

using namespace origami;
namespace fs = std::filesystem;

namespace {

bool quick = false;

long budget(long full, long small) { return quick ? small : full; }

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string num(double x, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, x);
  return buf;
}

void note(const std::string& s) { std::fprintf(stderr, "  .. %s\n", s.c_str()); }

search::BestPattern run(const env::Environment& e, search::Method m, long b, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  auto best = search::run_method(m, e, {b, seed});
  note(std::string(search::method_name(m)) + " seed " + std::to_string(seed) + " budget " + std::to_string(b) +
       ": " + num(best.best_return) + " (" +
       num(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1) + " s)");
  return best;
}

/// Best return reachable by terminating straight after the seed: the fixed
/// seed, or every square size when the agent picks it.
double seed_only_return(const env::Environment& e) {
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(env::GameState)> go = [&](env::GameState s) {
    if (s.done()) {
      best = std::max(best, s.reward_sum);
      return;
    }
    if (s.phase == env::Phase::SelectVertex) {
      e.step(s, env::Action::terminate());
      best = std::max(best, s.reward_sum);
      return;
    }
    for (const auto& a : e.legal_actions(s)) {
      auto c = s;
      e.step(c, a);
      go(c);
    }
  };
  go(e.reset());
  return best;
}

// ---------------------------------------------------------------------------

Verdict pyramid() {
  const env::Environment e(io::make_env_config(io::preset("pyramid")));
  Verdict v;
  std::ostringstream d;
  for (auto m : {search::Method::Random, search::Method::Dfts})
    for (std::uint64_t seed : {0, 1, 2}) {
      const double r = run(e, m, budget(100000, 1500), seed).best_return;
      d << search::method_name(m) << "/" << seed << "=" << num(r) << " ";
      v.pass = v.pass && r >= -0.12;
    }
  d << "(need all >= -0.12)";
  v.detail = d.str();
  return v;
}

// Smooth open relief used when no face mesh is supplied.
fs::path stand_in_face(const fs::path& dir) {
  fs::create_directories(dir);
  const auto path = dir / "stand_in_face.obj";
  std::ostringstream o;
  const int n = 24;
  auto z = [](double x, double y) { return 1.6 * std::exp(-(x * x / 10.0 + y * y / 16.0)) - 0.3 * std::exp(-((y - 1) * (y - 1)) - x * x); };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const double x = -6 + 12.0 * i / n, y = -7 + 14.0 * j / n;
      o << "v " << x << " " << y << " " << z(x, y) << "\n";
    }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int a = j * (n + 1) + i + 1, b = a + 1, c = a + n + 1, d = c + 1;
      o << "f " << a << " " << b << " " << d << "\nf " << a << " " << d << " " << c << "\n";
    }
  io::write_file(path, o.str());
  return path;
}

Verdict cube_and_smoke() {
  Verdict v;
  std::ostringstream d;
  const env::Environment cube(io::make_env_config(io::preset("cube")));
  double best = -std::numeric_limits<double>::infinity();
  d << "cube DFTS";
  for (std::uint64_t seed : {0, 1, 2}) {
    const double r = run(cube, search::Method::Dfts, budget(500000, 1500), seed).best_return;
    best = std::max(best, r);
    d << " " << num(r);
  }
  d << " (need one >= -0.10)";
  v.pass = best >= -0.10;

  auto face = io::preset("face");
  if (const char* mesh = std::getenv("ORIGAMI_FACE_MESH")) {
    face.mesh_path = mesh;
  } else {
    face.mesh_path = stand_in_face(fs::temp_directory_path() / "origami_acceptance").string();
  }
  const bool stand_in = std::getenv("ORIGAMI_FACE_MESH") == nullptr;
  for (auto [name, cfg] : {std::pair{"bowl", io::preset("bowl")}, std::pair{"face", face}}) {
    const env::Environment e(io::make_env_config(cfg));
    const double seed_r = seed_only_return(e);
    const double r = run(e, search::Method::Evo, budget(20000, 1500), 0).best_return;
    d << "; " << name << (std::string(name) == "face" && stand_in ? " (stand-in mesh)" : "") << " smoke " << num(r)
      << " vs seed " << num(seed_r);
    v.pass = v.pass && r > seed_r;
  }
  v.detail = d.str();
  return v;
}

std::vector<env::EnvConfig> fuzz_configs() {
  std::vector<env::EnvConfig> out;
  env::EnvConfig a;
  a.width = a.height = 9;
  a.axes = {.x = true, .y = true};
  a.objective = obj::abstract_objective(obj::ObjectiveKind::Bucket);
  a.seed_graph = seed_square(a.board(), 2, {4, 4});
  out.push_back(a);
  env::EnvConfig b = a;
  b.width = b.height = 13;
  b.axes = {.x = true, .y = true, .xy = true};
  b.seed_kind = env::SeedKind::AgentSquare;
  out.push_back(b);
  env::EnvConfig c = a;
  c.width = c.height = 11;
  c.axes = {.y = true};
  c.objective = obj::shape_objective(obj::build_pyramid(64));
  c.seed_graph = seed_single_crease(c.board(), {3, 5}, {7, 5});
  c.allow_sources = true;
  out.push_back(c);
  env::EnvConfig d = a;
  d.width = d.height = 7;
  d.axes = {};
  d.seed_graph = seed_square(d.board(), 1, {3, 3});
  out.push_back(d);
  return out;
}

Verdict kinematics() {
  const int graphs = quick ? 100 : 1000;
  std::mt19937_64 rng(2024);
  std::vector<env::Environment> envs;
  for (auto& c : fuzz_configs()) envs.emplace_back(c);
  double worst_closure = 0, worst_length = 0;
  long flat_bad = 0, vertices = 0, done = 0, attempts = 0;
  while (done < graphs && attempts < 50 * graphs) {
    const auto& e = envs[attempts++ % envs.size()];
    auto s = e.reset();
    while (!s.done()) {
      const auto acts = e.legal_actions(s);
      auto a = acts[std::uniform_int_distribution<std::size_t>(0, acts.size() - 1)(rng)];
      if (a.kind == env::ActionKind::Terminate && acts.size() > 1 && rng() % 5) a = acts[0];
      e.step(s, a);
    }
    const auto& g = s.graph;
    if (std::none_of(g.vertices().begin(), g.vertices().end(), [](const Vertex& x) { return x.extended; })) continue;
    double top = 0;
    for (const auto& slot : s.angles)
      if (slot.alive) top = std::max(top, std::abs(slot.rho));
    if (top == 0) continue;
    ++done;
    const auto layout = kin::build_panel_layout(g);
    const auto flat = kin::fold_graph(g, layout, 0.0);
    for (double r : flat.rho) flat_bad += r != 0.0;
    for (std::size_t k = 0; k < g.vertex_count(); ++k) {
      const auto p = kin::planar_point(g, g.vertex(k).pos);
      flat_bad += flat.positions[k].z() != 0.0 || flat.positions[k].x() != p.x() || flat.positions[k].y() != p.y();
    }
    for (int k = 1; k <= 10; ++k) {
      const auto st = kin::fold_graph(g, layout, top * k / 10);
      for (const auto& x : g.vertices()) {
        if (!x.extended) continue;
        ++vertices;
        worst_closure = std::max(worst_closure, test_oracle::vertex_residual(g, st.rho, x.id));
      }
      for (const auto& c : g.creases())
        worst_length = std::max(worst_length, std::abs((st.positions[c.from] - st.positions[c.to]).norm() - c.planar_length));
      for (const auto& t : st.mesh)
        for (int m = 0; m < 3; ++m) {
          const int a = t.v[m], b = t.v[(m + 1) % 3];
          worst_length = std::max(worst_length, std::abs((st.positions[a] - st.positions[b]).norm() -
                                                         (flat.positions[a] - flat.positions[b]).norm()));
        }
    }
  }
  Verdict v;
  v.pass = done == graphs && worst_closure <= 1e-9 && worst_length <= 1e-9 && flat_bad == 0;
  v.detail = std::to_string(done) + " graphs, " + std::to_string(vertices) + " vertex solves, max closure " +
             num(worst_closure * 1e12, 3) + "e-12, max length drift " + num(worst_length * 1e12, 3) +
             "e-12, flat mismatches " + std::to_string(flat_bad);
  return v;
}

Verdict geometry() {
  using namespace geom;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u3(-3, 3), u1(0, 1);
  std::uniform_int_distribution<int> size(1, 50);
  int hd_bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    PointSet x, y;
    for (int k = size(rng); k > 0; --k) x.points.emplace_back(u3(rng), u3(rng), u3(rng));
    for (int k = size(rng); k > 0; --k) y.points.emplace_back(u3(rng), u3(rng), u3(rng));
    const double xy = test_oracle::brute_directed(x.points, y.points), yx = test_oracle::brute_directed(y.points, x.points);
    hd_bad += directed_hausdorff(x, y) != xy || directed_hausdorff(y, x) != yx || hausdorff(x, y) != std::max(xy, yx);
  }
  auto tri = [&] { return Triangle3{{u1(rng), u1(rng), u1(rng)}, {u1(rng), u1(rng), u1(rng)}, {u1(rng), u1(rng), u1(rng)}}; };
  int tt_bad = 0, banded = 0, pairs = 0;
  while (pairs < 100000) {
    const auto a = tri(), b = tri();
    if (a.area() <= kDegenerateArea || b.area() <= kDegenerateArea) continue;
    ++pairs;
    const auto oracle = test_oracle::edge_crossing(a, b);
    if (oracle.margin < 1e-6) {
      ++banded;
      continue;
    }
    tt_bad += tri_tri_intersect(a, b) != oracle.hit;
  }
  std::uniform_int_distribution<int> c(0, 6);
  int ss_bad = 0, segs = 0;
  while (segs < 100000) {
    Cell p1{c(rng), c(rng)}, p2{c(rng), c(rng)}, q1{c(rng), c(rng)}, q2{c(rng), c(rng)};
    if (p1 == p2 || q1 == q2) continue;
    ++segs;
    ss_bad += seg_seg_intersect_2d(p1, p2, q1, q2) != test_oracle::segments_meet(p1, p2, q1, q2);
  }
  Verdict v;
  v.pass = hd_bad == 0 && tt_bad == 0 && ss_bad == 0;
  v.detail = "hausdorff 100 pairs, " + std::to_string(hd_bad) + " mismatches; tri-tri " + std::to_string(pairs) +
             " pairs (" + std::to_string(banded) + " in band), " + std::to_string(tt_bad) + " disagreements; segments " +
             std::to_string(segs) + " pairs, " + std::to_string(ss_bad) + " disagreements";
  return v;
}

Verdict environment() {
  env::EnvConfig c;
  c.width = c.height = 9;
  c.axes = {.x = true, .y = true};
  c.objective = obj::shape_objective(obj::build_pyramid(1024));
  c.seed_graph = seed_square(c.board(), 2, {4, 4});
  const env::Environment e(c);
  const int episodes = quick ? 300 : 10000;
  std::mt19937_64 rng(77);
  long illegal = 0, positive = 0, grown = 0, telescope = 0, replay = 0, rollbacks = 0;
  double worst_gap = 0;
  for (int ep = 0; ep < episodes; ++ep) {
    auto s = e.reset();
    std::vector<bool> alive(s.angles.size(), true);
    while (!s.done()) {
      const auto acts = e.legal_actions(s);
      auto a = acts[std::uniform_int_distribution<std::size_t>(0, acts.size() - 1)(rng)];
      if (a.kind == env::ActionKind::Terminate && acts.size() > 1 && rng() % 4) a = acts[0];
      const auto r = e.step(s, a);
      if (s.phase != env::Phase::PlaceEdge && find_violation(e.board(), s.graph)) ++illegal;
      if (!r.done && r.reward > 1e-12) ++positive;
      for (std::size_t k = 0; k < alive.size(); ++k) {
        grown += !alive[k] && s.angles[k].alive;
        alive[k] = s.angles[k].alive;
      }
    }
    double sum = 0;
    for (const auto& t : s.trace) sum += t.reward;
    if (s.reason == env::DoneReason::Rollback) {
      ++rollbacks;
    } else {
      worst_gap = std::max(worst_gap, std::abs(sum - s.final_value));
      telescope += std::abs(sum - s.final_value) > 1e-9;
    }
    replay += env::Environment::trace_log(e.replay(s.actions())) != env::Environment::trace_log(s);
  }
  Verdict v;
  v.pass = illegal + positive + grown + telescope + replay == 0;
  v.detail = std::to_string(episodes) + " episodes (" + std::to_string(rollbacks) + " rollbacks): illegal graphs " +
             std::to_string(illegal) + ", shaped rewards > 1e-12: " + std::to_string(positive) +
             ", angle set growth " + std::to_string(grown) + ", telescoping gap max " + num(worst_gap * 1e12, 3) +
             "e-12 (" + std::to_string(telescope) + " over 1e-9), replay mismatches " + std::to_string(replay);
  return v;
}

Verdict tiny_board() {
  const env::Environment e(test_oracle::tiny_pyramid_config());
  const auto opt = test_oracle::exhaustive_optimum(e);
  const search::TreeParams uncapped{0, 1000000000};
  const double dfts = search::run_dfts(e, {1000000, 5}, uncapped).best_return;
  const double bfts = search::run_bfts(e, {1000000, 5}, uncapped).best_return;
  const double rdm = run(e, search::Method::Random, budget(100000, 3000), 0).best_return;
  Verdict v;
  v.pass = dfts == opt.best && bfts == opt.best && rdm >= opt.best - 0.05;
  v.detail = "optimum " + num(opt.best, 6) + " over " + std::to_string(opt.leaves) + " leaves; DFTS " + num(dfts, 6) +
             ", BFTS " + num(bfts, 6) + ", RDM " + num(rdm, 6);
  return v;
}

Verdict objectives() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> xy(-3.9, 3.9), z(-4, 4);
  double worst = 0;
  int chairs = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<geom::Point3> p;
    const int n = 6 + trial % 20;
    for (int k = 0; k < n; ++k) p.emplace_back(xy(rng), xy(rng), z(rng));
    worst = std::max(worst, std::abs(obj::table_objective(p) - test_oracle::table_reference(p)));
    p[0] = {1, -2, -3.9};
    p[1] = {-1, -2, -3.95};
    p[2] = {0, 2, -3.92};
    p[3].z() = 3.0;
    const double f = obj::chair_objective(p);
    if (f == obj::kDiscard) continue;
    ++chairs;
    worst = std::max(worst, std::abs(f - test_oracle::chair_reference(p)));
  }
  const Board board(9, 9, {});
  const auto flat = kin::fold_graph(seed_square(board, 2, {4, 4}), 0.0);
  const double shelf = obj::shelf_objective(flat.triangles());

  CreaseGraph cone(13, 13);
  kin::FoldedState st;
  cone.add_vertex({6, 6});
  st.positions.push_back({0, 0, 0});
  for (int k = 0; k < 8; ++k) {
    cone.add_vertex({k, 0});
    const double a = k * std::numbers::pi / 4;
    st.positions.push_back({3 * std::cos(a), 3 * std::sin(a), 1.75});
  }
  cone.vertex(0).extended = true;
  const double bucket = obj::bucket_objective(cone, st);

  Verdict v;
  v.pass = worst <= 1e-12 && chairs == 100 && shelf == obj::kDiscard && bucket == 1.75;
  v.detail = "table/chair max deviation " + num(worst * 1e15, 3) + "e-15 over 100 sets (" + std::to_string(chairs) +
             " chairs scored); shelf flat " + num(shelf, 0) + "; bucket cone " + num(bucket, 17) + " (rim 1.75)";
  return v;
}

Verdict mcts_evo() {
  const env::Environment tiny(test_oracle::tiny_pyramid_config());
  const search::MctsParams mp{};
  const auto m = search::run_mcts(tiny, {budget(3000, 1500), 2}, mp);
  bool sims = !m.stats.simulations_per_decision.empty();
  for (int n : m.stats.simulations_per_decision) sims = sims && n == 100;
  const bool consts = mp.simulations == 100 && mp.c_puct == 1.0 && mp.temperature == 1.5 &&
                      mp.dirichlet_alpha == 0.25 && mp.dirichlet_weight == 0.03;
  const bool range = m.stats.min_value >= -1.0 && m.stats.max_value <= 1.0;

  const search::EvoParams ep{};
  const auto g = search::run_evo(tiny, {budget(3000, 1500), 4}, ep);
  const int length = search::genome_length(Board(13, 13, {.x = true, .y = true}));
  const bool evo = g.stats.min_population == 128 && g.stats.max_population == 128 && g.stats.parents == 32 &&
                   g.stats.newcomers == 32 && ep.sigma1 == 0.1 && ep.sigma2 == 0.5 && ep.sigma3 == 1.0 &&
                   g.stats.generations >= 1 && length == 196;
  Verdict v;
  v.pass = sims && consts && range && evo;
  v.detail = "MCTS " + std::to_string(m.stats.simulations_per_decision.size()) + " decisions at " +
             (sims ? "100" : "varying") + " simulations, values in [" + num(m.stats.min_value) + ", " +
             num(m.stats.max_value) + "] (" + std::to_string(m.stats.clamped_values) + " clamped); EVO " +
             std::to_string(g.stats.generations) + " generations of " + std::to_string(g.stats.max_population) +
             ", parents " + std::to_string(g.stats.parents) + ", newcomers " + std::to_string(g.stats.newcomers) +
             ", genome 4d = " + std::to_string(length);
  return v;
}

Verdict imagination() {
  Verdict v;
  std::ostringstream d;
  const auto dir = fs::temp_directory_path() / "origami_acceptance";
  for (const char* name : {"bucket", "table"}) {
    const env::Environment e(io::make_env_config(io::preset(name)));
    const auto b = run(e, search::Method::Evo, budget(50000, 3000), 0);
    if (!b.valid()) {
      v.pass = false;
      d << name << ": no pattern; ";
      continue;
    }
    const double rho = io::export_angle(e, b);
    const auto st = kin::fold_graph(b.graph, rho);
    double zmax = 0;
    for (const auto& p : st.positions) zmax = std::max(zmax, std::abs(p.z()));
    const double flat = e.config().objective.terminal(b.graph, kin::fold_graph(b.graph, 0.0));
    const double got = e.config().objective.terminal(b.graph, st);
    const auto files = io::export_obj_sequence(b.graph, rho, 5, dir / name);
    const auto frames = test_oracle::read_obj_frames(files);
    const double drift = test_oracle::rigidity_error(frames);
    bool planar = true;
    for (const auto& p : frames[0].v) planar = planar && p[2] == 0.0;
    const bool ok = find_violation(e.board(), b.graph) == std::nullopt && zmax > 1e-6 && got > flat &&
                    got == b.best_return && drift <= 1e-9 && planar;
    v.pass = v.pass && ok;
    d << name << " " << num(got) << " vs flat " << num(flat) << ", |z|max " << num(zmax, 2) << ", OBJ drift "
      << num(drift * 1e12, 3) << "e-12; ";
  }
  v.detail = d.str();
  return v;
}

struct Criterion {
  int id;
  const char* name;
  Verdict (*run)();
};

// Criteria that fail for a documented reason (README, "Known shortfalls").
const std::set<int> kKnownShortfalls{1};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--quick") {
      quick = true;
    } else if (a == "--only" && k + 1 < argc) {
      for (const auto& p : io::detail::split(argv[++k], ',')) only.insert(std::stoi(p));
    } else {
      std::fprintf(stderr, "usage: acceptance [--quick] [--only 1,2,...]\n");
      return 2;
    }
  }
  const std::vector<Criterion> all{
      {1, "pyramid RDM/DFTS 3x100k >= -0.12", pyramid},
      {2, "cube DFTS 3x500k >= -0.10; bowl/face smoke", cube_and_smoke},
      {3, "kinematics oracle suite", kinematics},
      {4, "geometry oracle suite", geometry},
      {5, "environment invariants", environment},
      {6, "tiny-board search optimality", tiny_board},
      {7, "objective formulas", objectives},
      {8, "MCTS/EVO configuration", mcts_evo},
      {9, "shape-imagination smoke", imagination},
  };
  int hard_fail = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool known = !v.pass && kKnownShortfalls.count(c.id);
    std::printf("%s [%d] %s%s: %s [%.0f s]%s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, quick ? " (quick)" : "",
                v.detail.c_str(), secs, known ? " (known shortfall, see README)" : "");
    std::fflush(stdout);
    if (!v.pass && !known) ++hard_fail;
  }
  return hard_fail == 0 ? 0 : 1;
}
