#pragma once

// Search strategies over the origami game: random play, depth-first and
// breadth-first branch-and-bound tree searches, MCTS with random rollouts,
// and the evolutionary action-value search. All share one interaction budget
// and one incumbent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "origami/env.hpp"

namespace origami::search {

using env::Action;
using env::Environment;
using env::GameState;

struct SearchBudget {
  long max_steps = 500000;
  std::uint64_t seed = 0;
};

struct SearchStats {
  long restarts = 0;
  int max_children = 0;  // most children expanded below one tree node
  bool tree_exhausted = false;
  // MCTS
  std::vector<int> simulations_per_decision;
  double min_value = std::numeric_limits<double>::infinity();
  double max_value = -std::numeric_limits<double>::infinity();
  long clamped_values = 0;
  // EVO
  long generations = 0;
  int min_population = std::numeric_limits<int>::max();
  int max_population = 0;
  int genome_length = 0;
  int parents = 0;    // per generation
  int newcomers = 0;  // per generation
};

struct BestPattern {
  double best_return = -std::numeric_limits<double>::infinity();
  std::vector<Action> actions;
  CreaseGraph graph;
  double best_rho = std::numeric_limits<double>::quiet_NaN();
  long found_at = 0;      // interactions spent when it was found
  long interactions = 0;  // total interactions spent
  long episodes = 0;
  SearchStats stats;

  bool valid() const { return std::isfinite(best_return); }
};

/// Shared budget and incumbent. Every counted step goes through here.
class Runner {
 public:
  Runner(const Environment& env, SearchBudget budget) : env_(env), budget_(budget), rng_(budget.seed) {
    // The seed pattern on its own is free: it is the score of doing nothing.
    GameState s = env_.reset();
    if (s.phase == env::Phase::SelectVertex) {
      env_.step(s, Action::terminate());
      record(s);
      best_.episodes = 0;
    }
  }

  const Environment& env() const { return env_; }
  std::mt19937_64& rng() { return rng_; }
  bool exhausted() const { return used_ >= budget_.max_steps; }
  long used() const { return used_; }
  long limit() const { return budget_.max_steps; }
  double incumbent() const { return best_.best_return; }
  SearchStats& stats() { return best_.stats; }

  env::StepResult step(GameState& s, const Action& a) {
    ++used_;
    const auto r = env_.step(s, a);
    if (r.done) record(s);
    return r;
  }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
  }

  BestPattern finish() {
    best_.interactions = used_;
    return best_;
  }

 private:
  void record(const GameState& s) {
    ++best_.episodes;
    if (s.reward_sum <= best_.best_return) return;
    best_.best_return = s.reward_sum;
    best_.actions = s.actions();
    best_.graph = s.graph;
    best_.best_rho = s.best_angle >= 0 ? s.angles[s.best_angle].rho : std::numeric_limits<double>::quiet_NaN();
    best_.found_at = used_;
  }

  const Environment& env_;
  SearchBudget budget_;
  std::mt19937_64 rng_;
  long used_ = 0;
  BestPattern best_;
};

// ---------------------------------------------------------------------------
// RDM

inline BestPattern run_random(const Environment& env, SearchBudget budget) {
  Runner run(env, budget);
  while (!run.exhausted()) {
    GameState s = env.reset();
    while (!s.done() && !run.exhausted()) run.step(s, run.pick(env.legal_actions(s)));
  }
  return run.finish();
}

// ---------------------------------------------------------------------------
// Tree searches

struct TreeParams {
  int branch_cap = 10;  // <= 0: unlimited
  long restart_every = 100000;
};

namespace detail {

inline void require_shaped(const Environment& env) {
  if (env.config().objective.kind != obj::ObjectiveKind::Shape)
    throw ConfigError("tree search pruning needs non-positive shaped rewards (shape objectives only)");
}

inline int cap_of(const TreeParams& p) { return p.branch_cap > 0 ? p.branch_cap : std::numeric_limits<int>::max(); }

// Runs sub-searches until the budget is spent. A sub-search returns true
// when it ran out of tree rather than budget.
template <class SubSearch>
void with_restarts(Runner& run, const TreeParams& p, SubSearch&& sub) {
  while (!run.exhausted()) {
    const long stop = std::min(run.limit(), run.used() + std::max(1L, p.restart_every));
    const bool exhausted_tree = sub(stop);
    if (exhausted_tree) {
      run.stats().tree_exhausted = true;
      // An uncapped tree was enumerated completely; repeating it is pointless.
      if (p.branch_cap <= 0) return;
    }
    ++run.stats().restarts;
  }
}

}  // namespace detail

inline BestPattern run_dfts(const Environment& env, SearchBudget budget, TreeParams params = {}) {
  detail::require_shaped(env);
  Runner run(env, budget);
  const int cap = detail::cap_of(params);
  struct Node {
    GameState state;
    std::vector<Action> order;
    std::size_t next = 0;
    int expanded = 0;
  };
  auto make = [&](GameState s) {
    Node n{std::move(s), {}, 0, 0};
    n.order = env.legal_actions(n.state);
    std::shuffle(n.order.begin(), n.order.end(), run.rng());
    return n;
  };
  detail::with_restarts(run, params, [&](long stop) {
    std::vector<Node> stack;
    stack.push_back(make(env.reset()));
    while (run.used() < stop) {
      if (stack.empty()) return true;
      Node& top = stack.back();
      if (top.next >= top.order.size() || top.expanded >= cap) {
        stack.pop_back();
        continue;
      }
      const Action a = top.order[top.next++];
      run.stats().max_children = std::max(run.stats().max_children, ++top.expanded);
      GameState child = top.state;
      if (run.step(child, a).done) continue;
      // Shaped rewards never rise again, so a trace already below the
      // incumbent cannot finish above it.
      if (child.reward_sum < run.incumbent()) continue;
      stack.push_back(make(std::move(child)));
    }
    return false;
  });
  return run.finish();
}

inline BestPattern run_bfts(const Environment& env, SearchBudget budget, TreeParams params = {}) {
  detail::require_shaped(env);
  Runner run(env, budget);
  const int cap = detail::cap_of(params);
  struct Node {
    GameState state;
    bool expanded = false;
    std::vector<GameState> children;  // best evaluation first
    std::size_t next = 0;
  };
  detail::with_restarts(run, params, [&](long stop) {
    std::vector<Node> stack;
    stack.push_back(Node{env.reset()});
    while (run.used() < stop) {
      if (stack.empty()) return true;
      Node& top = stack.back();
      if (!top.expanded) {
        auto acts = env.legal_actions(top.state);
        std::shuffle(acts.begin(), acts.end(), run.rng());
        if (static_cast<int>(acts.size()) > cap) acts.resize(cap);
        top.expanded = true;
        int n = 0;
        for (const auto& a : acts) {
          if (run.used() >= stop) break;
          GameState child = top.state;
          ++n;
          if (run.step(child, a).done) continue;
          if (child.reward_sum >= run.incumbent()) top.children.push_back(std::move(child));
        }
        run.stats().max_children = std::max(run.stats().max_children, n);
        std::stable_sort(top.children.begin(), top.children.end(),
                         [](const GameState& a, const GameState& b) { return a.reward_sum > b.reward_sum; });
        continue;
      }
      if (top.next >= top.children.size()) {
        stack.pop_back();
        continue;
      }
      GameState child = std::move(top.children[top.next++]);
      if (child.reward_sum < run.incumbent()) continue;
      stack.push_back(Node{std::move(child)});
    }
    return false;
  });
  return run.finish();
}

// ---------------------------------------------------------------------------
// MCTS

struct MctsParams {
  int simulations = 100;
  double c_puct = 1.0;
  double temperature = 1.5;
  double dirichlet_alpha = 0.25;
  double dirichlet_weight = 0.03;
};

/// Maps returns in [r_min, 0] onto [-1, 1]; values outside are clamped.
inline double normalize_return(double r, double r_min) { return 2.0 * r / std::abs(r_min) + 1.0; }

/// Visit-count policy (counts^(1/T), normalized). The real move is its argmax.
inline std::vector<double> visit_policy(const std::vector<int>& visits, double temperature) {
  std::vector<double> p(visits.size(), 0.0);
  const int top = visits.empty() ? 0 : *std::max_element(visits.begin(), visits.end());
  if (top == 0) return p;
  double sum = 0.0;
  for (std::size_t k = 0; k < visits.size(); ++k) sum += p[k] = std::pow(double(visits[k]) / top, 1.0 / temperature);
  for (auto& x : p) x /= sum;
  return p;
}

inline BestPattern run_mcts(const Environment& env, SearchBudget budget, MctsParams params = {}) {
  Runner run(env, budget);
  const double r_min = env.penalty();
  struct Node {
    GameState state;
    bool expanded = false;
    std::vector<Action> acts;
    std::vector<double> prior;
    std::vector<int> child;
    std::vector<int> n;
    std::vector<double> w;
    int visits = 0;
  };
  std::vector<Node> pool;
  auto& rng = run.rng();
  std::gamma_distribution<double> gamma(params.dirichlet_alpha, 1.0);

  auto expand = [&](Node& nd) {
    nd.expanded = true;
    nd.acts = env.legal_actions(nd.state);
    const std::size_t k = nd.acts.size();
    std::vector<double> noise(k);
    double gs = 0.0;
    for (auto& x : noise) gs += x = gamma(rng);
    nd.prior.assign(k, 0.0);
    double ps = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      nd.prior[a] = 1.0 / k + params.dirichlet_weight * (gs > 0 ? noise[a] / gs : 1.0 / k);
      ps += nd.prior[a];
    }
    for (auto& x : nd.prior) x /= ps;
    nd.child.assign(k, -1);
    nd.n.assign(k, 0);
    nd.w.assign(k, 0.0);
  };
  auto value_of = [&](double ret) {
    double v = normalize_return(ret, r_min);
    if (v < -1.0 || v > 1.0) {
      ++run.stats().clamped_values;
      v = std::clamp(v, -1.0, 1.0);
    }
    run.stats().min_value = std::min(run.stats().min_value, v);
    run.stats().max_value = std::max(run.stats().max_value, v);
    return v;
  };

  // One simulation from `root`; false if the budget ran out midway.
  auto simulate = [&](int root) {
    std::vector<std::pair<int, int>> path;
    int id = root;
    double value = 0.0;
    while (true) {
      if (pool[id].state.done()) {
        value = value_of(pool[id].state.reward_sum);
        break;
      }
      if (!pool[id].expanded) {
        expand(pool[id]);
        GameState roll = pool[id].state;
        while (!roll.done()) {
          if (run.exhausted()) return false;
          run.step(roll, run.pick(env.legal_actions(roll)));
        }
        value = value_of(roll.reward_sum);
        break;
      }
      Node& nd = pool[id];
      const double sq = std::sqrt(std::max(1, nd.visits));
      int best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < nd.acts.size(); ++a) {
        const double q = nd.n[a] ? nd.w[a] / nd.n[a] : 0.0;
        const double u = q + params.c_puct * nd.prior[a] * sq / (1 + nd.n[a]);
        if (u > best_score) best_score = u, best = static_cast<int>(a);
      }
      path.emplace_back(id, best);
      if (nd.child[best] < 0) {
        if (run.exhausted()) return false;
        GameState next = nd.state;
        run.step(next, nd.acts[best]);
        pool.push_back(Node{std::move(next)});
        pool[id].child[best] = static_cast<int>(pool.size()) - 1;
      }
      id = pool[id].child[best];
    }
    for (const auto& [nid, a] : path) {
      pool[nid].n[a] += 1;
      pool[nid].w[a] += value;
      pool[nid].visits += 1;
    }
    return true;
  };

  while (!run.exhausted()) {
    pool.clear();
    pool.push_back(Node{env.reset()});
    int root = 0;
    GameState real = pool[0].state;
    while (!real.done() && !run.exhausted()) {
      int sims = 0;
      for (; sims < params.simulations; ++sims)
        if (!simulate(root)) break;
      if (sims < params.simulations) break;
      run.stats().simulations_per_decision.push_back(sims);
      const Node& nd = pool[root];
      const auto pi = visit_policy(nd.n, params.temperature);
      const int a = static_cast<int>(std::max_element(pi.begin(), pi.end()) - pi.begin());
      if (run.exhausted()) break;
      run.step(real, nd.acts[a]);
      root = nd.child[a];
      if (root < 0) {
        pool.push_back(Node{real});
        root = static_cast<int>(pool.size()) - 1;
      }
    }
  }
  return run.finish();
}

// ---------------------------------------------------------------------------
// EVO

struct EvoParams {
  int population = 128;
  double parent_fraction = 0.25;
  double sigma1 = 0.1;
  double sigma2 = 0.5;
  double sigma3 = 1.0;
  // Genomes hold no entry for Terminate; it competes with this fixed value.
  double terminate_value = 0.0;
};

inline int genome_length(const Board& board) { return 4 * static_cast<int>(board.playable_area().size()); }

/// Greedy action under action values q; ties go to the lowest action index.
inline Action greedy_action(const std::vector<Action>& legal, const std::vector<double>& q, const Board& board,
                            double terminate_value) {
  int best = -1, best_index = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < static_cast<int>(legal.size()); ++k) {
    const int idx = env::action_index(legal[k], board);
    const double v = legal[k].kind == env::ActionKind::Terminate ? terminate_value : q.at(idx);
    if (best < 0 || v > best_value || (v == best_value && idx < best_index)) {
      best = k;
      best_value = v;
      best_index = idx;
    }
  }
  return legal[best];
}

inline BestPattern run_evo(const Environment& env, SearchBudget budget, EvoParams params = {}) {
  Runner run(env, budget);
  const Board& board = env.board();
  const int m = genome_length(board);
  const int parents = static_cast<int>(std::lround(params.population * params.parent_fraction));
  if (parents < 1 || 3 * parents > params.population) throw ConfigError("EVO population/parent split is inconsistent");
  run.stats().genome_length = m;
  auto& rng = run.rng();
  std::normal_distribution<double> normal(0.0, 1.0);
  auto fresh = [&] {
    std::vector<double> q(m);
    for (auto& x : q) x = normal(rng);
    return q;
  };
  auto perturbed = [&](std::vector<double> q, double sigma) {
    for (auto& x : q) x += sigma * normal(rng);
    return q;
  };

  std::vector<std::vector<double>> pop;
  for (int k = 0; k < params.population; ++k) pop.push_back(fresh());

  while (!run.exhausted()) {
    const int n = static_cast<int>(pop.size());
    run.stats().min_population = std::min(run.stats().min_population, n);
    run.stats().max_population = std::max(run.stats().max_population, n);
    std::vector<double> fitness(n, -std::numeric_limits<double>::infinity());
    std::vector<std::vector<Action>> seqs(n);
    bool complete = true;
    for (int k = 0; k < n && complete; ++k) {
      GameState s = env.reset();
      while (!s.done()) {
        if (run.exhausted()) {
          complete = false;
          break;
        }
        run.step(s, greedy_action(env.legal_actions(s), pop[k], board, params.terminate_value));
      }
      if (!complete) break;
      seqs[k] = s.actions();
      const bool dup = std::any_of(seqs.begin(), seqs.begin() + k, [&](const auto& o) { return o == seqs[k]; });
      if (!dup) fitness[k] = s.reward_sum;
    }
    if (!complete) break;
    ++run.stats().generations;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fitness[a] > fitness[b]; });
    std::vector<std::vector<double>> next;
    for (int k = 0; k < parents; ++k) next.push_back(perturbed(pop[order[k]], params.sigma1));
    for (int k = 0; k < parents; ++k) next.push_back(perturbed(next[k], params.sigma2));
    for (int k = 0; k < parents; ++k) next.push_back(perturbed(next[k], params.sigma3));
    run.stats().parents = parents;
    run.stats().newcomers = params.population - static_cast<int>(next.size());
    while (static_cast<int>(next.size()) < params.population) next.push_back(fresh());
    pop = std::move(next);
  }
  return run.finish();
}

// ---------------------------------------------------------------------------

enum class Method { Random, Dfts, Bfts, Mcts, Evo };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Random: return "RDM";
    case Method::Dfts: return "DFTS";
    case Method::Bfts: return "BFTS";
    case Method::Mcts: return "MCTS";
    case Method::Evo: return "EVO";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  std::string u;
  for (char c : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (Method m : {Method::Random, Method::Dfts, Method::Bfts, Method::Mcts, Method::Evo})
    if (u == method_name(m)) return m;
  if (u == "RANDOM") return Method::Random;
  throw ConfigError("unknown search method: " + s);
}

inline BestPattern run_method(Method m, const Environment& env, SearchBudget budget) {
  switch (m) {
    case Method::Random: return run_random(env, budget);
    case Method::Dfts: return run_dfts(env, budget);
    case Method::Bfts: return run_bfts(env, budget);
    case Method::Mcts: return run_mcts(env, budget);
    case Method::Evo: return run_evo(env, budget);
  }
  throw ConfigError("unknown search method");
}

}  // namespace origami::search
