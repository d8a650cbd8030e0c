// origami-cli: run experiments, replay action lists, convert FOLD files and
// serve the environment over a JSON-lines protocol on stdin/stdout.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <memory>

#include "origami/io.hpp"

using namespace origami;
using nlohmann::json;

namespace {

struct ConfigFlags {
  std::string file;
  io::KeyValues pairs;

  void add(CLI::App* app) {
    app->add_option("--config", file, "key = value experiment file");
    // Every flag is stored as a key = value pair so it can override the file.
    for (const char* key : {"preset", "target", "mesh", "method", "board", "symmetry", "seed-pattern", "budget", "seeds",
                            "cl-max", "rho-max", "angles", "sweep", "r-min", "samples", "out", "frames"}) {
      const std::string k = key;
      app->add_option_function<std::string>("--" + k, [this, k](const std::string& v) { pairs.emplace_back(k, v); });
    }
    app->add_flag_function("--fixed-rho", [this](std::int64_t) { pairs.emplace_back("fixed-rho", "true"); },
                           "track only the largest angle the seed admits");
    app->add_flag_function("--allow-sources", [this](std::int64_t) { pairs.emplace_back("allow-sources", "true"); },
                           "enable source actions");
  }

  io::ExperimentConfig build() const { return file.empty() ? io::build_config(pairs) : io::load_config(file, pairs); }
};

std::vector<env::Action> read_actions(const std::string& path) {
  std::vector<env::Action> out;
  std::istringstream in(io::read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    line = io::detail::trim(line);
    if (!line.empty() && line[0] != '#') out.push_back(env::Action::parse(line));
  }
  return out;
}

int cmd_run(const ConfigFlags& flags) {
  const auto cfg = flags.build();
  std::cout << io::csv_header() << "\n";
  const auto res = io::run_experiment(cfg, &std::cout);
  std::cerr << "method,runs,mean,std,best\n";
  for (const auto& s : io::summarize(res.rows))
    std::cerr << s.method << "," << s.runs << "," << io::detail::fmt_double(s.mean) << ","
              << io::detail::fmt_double(s.stddev) << "," << io::detail::fmt_double(s.best) << "\n";
  for (const auto& p : res.artifacts) std::cerr << "wrote " << p.string() << "\n";
  return 0;
}

int cmd_replay(const ConfigFlags& flags, const std::string& actions) {
  const env::Environment e(io::make_env_config(flags.build()));
  const auto s = e.replay(read_actions(actions));
  std::cout << env::Environment::trace_log(s);
  std::cerr << "return " << io::detail::fmt_double(s.reward_sum) << " (" << env::reason_name(s.reason) << ")\n";
  return 0;
}

int cmd_export(const std::string& fold, const std::string& svg, const std::string& obj_dir, int frames,
               const std::string& fold_out, bool flip) {
  const auto doc = io::import_fold(fold);
  const auto st = kin::fold_graph(doc.graph, doc.rho0);
  if (!svg.empty()) io::export_svg(doc.graph, st, svg);
  if (!obj_dir.empty()) io::export_obj_sequence(doc.graph, doc.rho0, frames, obj_dir);
  if (!fold_out.empty()) {
    auto sign = doc.sign;
    if (flip) sign = sign == io::FoldSign::ValleyPositive ? io::FoldSign::MountainPositive : io::FoldSign::ValleyPositive;
    io::export_fold(doc.graph, st, fold_out, sign);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// serve

const char* phase_name(env::Phase p) {
  switch (p) {
    case env::Phase::SeedChoice: return "seed";
    case env::Phase::SelectVertex: return "select";
    case env::Phase::PlaceEdge: return "place";
  }
  return "?";
}

/// Non-zero runs of equal values: [start, length, value] over the flat
/// row-major (i, j, k) tensor.
json encode_obs(const env::Observation& o) {
  json runs = json::array();
  const auto& d = o.data;
  for (std::size_t k = 0; k < d.size();) {
    if (d[k] == 0) {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e < d.size() && d[e] == d[k]) ++e;
    runs.push_back({k, e - k, int(d[k])});
    k = e;
  }
  return {{"shape", {o.width, o.height, o.depth}}, {"runs", runs}};
}

class Server {
 public:
  json handle(const json& req) {
    const std::string kind = req.at("kind").get<std::string>();
    if (kind == "reset") {
      io::KeyValues pairs;
      if (req.contains("config"))
        for (const auto& [k, v] : req.at("config").items())
          pairs.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
      if (!env_ || pairs != pairs_) {
        env_ = std::make_unique<env::Environment>(io::make_env_config(io::build_config(pairs)));
        pairs_ = pairs;
      }
      state_ = env_->reset();
      return snapshot();
    }
    if (!env_) throw EnvError("reset first");
    if (kind == "step") {
      const int idx = req.at("action").get<int>();
      if (idx < 0 || idx >= env::action_space_size(env_->board())) throw EnvError("action index out of range");
      const auto r = env_->step(state_, env::action_from_index(idx, env_->board()));
      auto out = snapshot();
      out["reward"] = r.reward;
      out["done"] = r.done;
      return out;
    }
    if (kind == "obs") return {{"obs", encode_obs(env_->encode_observation(state_))}};
    if (kind == "mask") return {{"mask", mask()}};
    throw EnvError("unknown request kind '" + kind + "'");
  }

 private:
  json mask() const {
    json m = json::array();
    if (!state_.done())
      for (const auto& a : env_->legal_actions(state_)) m.push_back(env::action_index(a, env_->board()));
    return m;
  }

  json snapshot() const {
    return {{"obs", encode_obs(env_->encode_observation(state_))},
            {"mask", mask()},
            {"actions", env::action_space_size(env_->board())},
            {"info",
             {{"phase", phase_name(state_.phase)},
              {"alive", state_.alive_count()},
              {"steps", state_.steps},
              {"reason", env::reason_name(state_.reason)}}}};
  }

  std::unique_ptr<env::Environment> env_;
  io::KeyValues pairs_;
  env::GameState state_;
};

int cmd_serve() {
  Server server;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (io::detail::trim(line).empty()) continue;
    json resp;
    json id = nullptr;
    try {
      const auto req = json::parse(line);
      id = req.value("id", json(nullptr));
      if (req.at("kind") == "close") {
        std::cout << json{{"id", id}, {"ok", true}}.dump() << std::endl;
        return 0;
      }
      resp = server.handle(req);
      resp["ok"] = true;
    } catch (const std::exception& e) {
      resp = {{"ok", false}, {"error", e.what()}};
    }
    resp["id"] = id;
    std::cout << resp.dump() << std::endl;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rigid origami crease pattern search"};
  app.require_subcommand(1);

  ConfigFlags run_flags, replay_flags;
  auto* run = app.add_subcommand("run", "run an experiment, write results.csv and the best pattern");
  run_flags.add(run);

  auto* replay = app.add_subcommand("replay", "replay an action list and print the trace");
  replay_flags.add(replay);
  std::string actions;
  replay->add_option("--actions", actions, "one action per line")->required();

  auto* exp = app.add_subcommand("export", "convert a FOLD file to SVG, OBJ frames or FOLD");
  std::string fold, svg, obj_dir, fold_out;
  int frames = 5;
  bool flip = false;
  exp->add_option("fold", fold, "input FOLD file")->required();
  exp->add_option("--svg", svg);
  exp->add_option("--obj-dir", obj_dir);
  exp->add_option("--frames", frames);
  exp->add_option("--fold-out", fold_out);
  exp->add_flag("--flip-sign", flip, "swap the mountain/valley convention");

  auto* presets = app.add_subcommand("presets", "print the preset configurations");
  std::string which;
  presets->add_option("name", which);

  app.add_subcommand("serve", "JSON-lines environment server on stdin/stdout");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_flags);
    if (*replay) return cmd_replay(replay_flags, actions);
    if (*exp) return cmd_export(fold, svg, obj_dir, frames, fold_out, flip);
    if (*presets) {
      for (const auto& n : io::preset_names())
        if (which.empty() || which == n) std::cout << "[" << n << "]\n" << io::config_text(io::preset(n)) << "\n";
      return 0;
    }
    if (app.got_subcommand("serve")) return cmd_serve();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
