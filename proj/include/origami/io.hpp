#pragma once

// Experiment configuration, presets, the experiment runner and the file
// exporters (FOLD, SVG, OBJ frames, CSV).

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "origami/env.hpp"
#include "origami/kinematics.hpp"
#include "origami/objectives.hpp"
#include "origami/search.hpp"

namespace origami::io {

namespace fs = std::filesystem;
using env::Environment;

// ---------------------------------------------------------------------------
// Configuration

enum class SeedSpecKind { Square, AgentSquare, SingleCrease, Chair };

struct SeedSpec {
  SeedSpecKind kind = SeedSpecKind::Square;
  int half = 1;
  std::optional<Cell> center;  // board centre when empty
  Cell p1{}, p2{};

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

struct ExperimentConfig {
  std::string preset;
  std::string target = "pyramid";  // pyramid|cube|bowl|face|mesh|bucket|shelf|table|chair
  std::string mesh_path;
  int width = 9;
  int height = 9;
  SymmetryAxes axes{};
  SeedSpec seed{};
  double cl_max = std::numeric_limits<double>::infinity();
  double rho_max = std::numbers::pi;
  int angles = 10;
  int sweep_steps = 20;
  bool fixed_rho = false;
  bool allow_sources = false;
  std::optional<double> r_min;
  int target_samples = obj::kTargetSamples;
  std::vector<search::Method> methods{search::Method::Random};
  long budget = 500000;
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir;
  int frames = 5;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

inline double to_double(const std::string& key, const std::string& v) {
  const auto l = lower(v);
  if (l == "inf" || l == "infinity") return std::numeric_limits<double>::infinity();
  if (l == "pi") return std::numbers::pi;
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

inline bool to_bool(const std::string& key, const std::string& v) {
  const auto l = lower(v);
  if (l == "1" || l == "true" || l == "yes" || l == "on") return true;
  if (l == "0" || l == "false" || l == "no" || l == "off") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

inline std::string fmt_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline SymmetryAxes parse_symmetry(const std::string& text) {
  SymmetryAxes a;
  const auto l = detail::lower(detail::trim(text));
  if (l.empty() || l == "none") return a;
  for (const auto& part : detail::split(l, ',')) {
    if (part == "x") a.x = true;
    else if (part == "y") a.y = true;
    else if (part == "xy") a.xy = true;
    else throw ConfigError("symmetry: unknown axis '" + part + "'");
  }
  return a;
}

inline std::string symmetry_text(const SymmetryAxes& a) {
  std::vector<std::string> parts;
  if (a.x) parts.push_back("x");
  if (a.y) parts.push_back("y");
  if (a.xy) parts.push_back("xy");
  if (parts.empty()) return "none";
  std::string out = parts[0];
  for (std::size_t k = 1; k < parts.size(); ++k) out += "," + parts[k];
  return out;
}

/// "square:H", "square:H@I,J", "agent-square", "crease:I1,J1,I2,J2", "chair".
inline SeedSpec parse_seed(const std::string& text) {
  const auto t = detail::lower(detail::trim(text));
  SeedSpec s;
  if (t == "agent-square") {
    s.kind = SeedSpecKind::AgentSquare;
    return s;
  }
  if (t == "chair") {
    s.kind = SeedSpecKind::Chair;
    return s;
  }
  const auto colon = t.find(':');
  const std::string head = t.substr(0, colon), rest = colon == std::string::npos ? "" : t.substr(colon + 1);
  if (head == "square" && !rest.empty()) {
    const auto at = rest.find('@');
    s.kind = SeedSpecKind::Square;
    s.half = static_cast<int>(detail::to_long("seed", rest.substr(0, at)));
    if (at != std::string::npos) {
      const auto c = detail::split(rest.substr(at + 1), ',');
      if (c.size() != 2) throw ConfigError("seed: square centre needs I,J");
      s.center = Cell{static_cast<int>(detail::to_long("seed", c[0])), static_cast<int>(detail::to_long("seed", c[1]))};
    }
    return s;
  }
  if (head == "crease") {
    const auto c = detail::split(rest, ',');
    if (c.size() != 4) throw ConfigError("seed: crease needs I1,J1,I2,J2");
    int v[4];
    for (int k = 0; k < 4; ++k) v[k] = static_cast<int>(detail::to_long("seed", c[k]));
    s.kind = SeedSpecKind::SingleCrease;
    s.p1 = {v[0], v[1]};
    s.p2 = {v[2], v[3]};
    return s;
  }
  throw ConfigError("seed: cannot parse '" + text + "'");
}

inline std::string seed_text(const SeedSpec& s) {
  switch (s.kind) {
    case SeedSpecKind::AgentSquare: return "agent-square";
    case SeedSpecKind::Chair: return "chair";
    case SeedSpecKind::SingleCrease:
      return "crease:" + std::to_string(s.p1.i) + "," + std::to_string(s.p1.j) + "," + std::to_string(s.p2.i) + "," +
             std::to_string(s.p2.j);
    case SeedSpecKind::Square: {
      std::string out = "square:" + std::to_string(s.half);
      if (s.center) out += "@" + std::to_string(s.center->i) + "," + std::to_string(s.center->j);
      return out;
    }
  }
  return "";
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"pyramid", "cube", "bowl", "face", "bucket", "shelf", "table", "chair"};
  return names;
}

/// Experiment presets. Shape targets follow the experiment settings table;
/// the furniture objectives use a 13x13 board without source actions.
inline ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  c.target = name;
  const SymmetryAxes xy_all{.x = true, .y = true, .xy = true};
  if (name == "pyramid") {
    c.width = c.height = 9;
    c.axes = {.x = true, .y = true};
    c.seed = {SeedSpecKind::Square, 2, std::nullopt, {}, {}};
  } else if (name == "cube") {
    c.width = c.height = 9;
    c.axes = {.x = true, .y = true};
    c.seed = {SeedSpecKind::Square, 1, std::nullopt, {}, {}};
  } else if (name == "bowl") {
    c.width = c.height = 25;
    c.axes = xy_all;
    c.seed.kind = SeedSpecKind::AgentSquare;
    c.cl_max = 2.9;
  } else if (name == "face") {
    c.width = c.height = 25;
    c.axes = {.y = true};
    c.seed = {SeedSpecKind::SingleCrease, 1, std::nullopt, {10, 12}, {14, 12}};
    c.cl_max = 2.9;
    c.allow_sources = true;
  } else if (name == "bucket" || name == "table") {
    c.width = c.height = 13;
    c.axes = xy_all;
    c.seed.kind = SeedSpecKind::AgentSquare;
    c.methods = {search::Method::Evo};
  } else if (name == "shelf") {
    c.width = c.height = 13;
    c.axes = {.x = true, .y = true};
    c.seed.kind = SeedSpecKind::AgentSquare;
    c.methods = {search::Method::Evo};
  } else if (name == "chair") {
    c.width = c.height = 13;
    c.axes = {.y = true};
    c.seed.kind = SeedSpecKind::Chair;
    c.fixed_rho = true;
    c.methods = {search::Method::Evo};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

inline std::vector<search::Method> parse_methods(const std::string& text) {
  std::vector<search::Method> out;
  for (const auto& m : detail::split(text, ',')) out.push_back(search::parse_method(m));
  if (out.empty()) throw ConfigError("method: empty list");
  return out;
}

/// "0,1,2" or a range "0..9" (inclusive).
inline std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& part : detail::split(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(static_cast<std::uint64_t>(detail::to_long("seeds", part)));
      continue;
    }
    const long a = detail::to_long("seeds", part.substr(0, dots)), b = detail::to_long("seeds", part.substr(dots + 2));
    if (b < a) throw ConfigError("seeds: empty range '" + part + "'");
    for (long s = a; s <= b; ++s) out.push_back(static_cast<std::uint64_t>(s));
  }
  if (out.empty()) throw ConfigError("seeds: empty list");
  return out;
}

/// Apply one key = value pair. Keys use the long flag names without dashes.
inline void apply_key(ExperimentConfig& c, std::string key, const std::string& value) {
  std::replace(key.begin(), key.end(), '_', '-');
  const auto& v = value;
  if (key == "preset") {
    const auto out = c.out_dir;
    c = preset(v);
    c.out_dir = out;
  } else if (key == "target") {
    c.target = v;
  } else if (key == "mesh") {
    c.mesh_path = v;
  } else if (key == "board") {
    const auto x = detail::lower(v).find('x');
    if (x == std::string::npos) {
      c.width = c.height = static_cast<int>(detail::to_long(key, v));
    } else {
      c.width = static_cast<int>(detail::to_long(key, v.substr(0, x)));
      c.height = static_cast<int>(detail::to_long(key, v.substr(x + 1)));
    }
  } else if (key == "symmetry") {
    c.axes = parse_symmetry(v);
  } else if (key == "seed-pattern") {
    c.seed = parse_seed(v);
  } else if (key == "cl-max") {
    c.cl_max = detail::to_double(key, v);
  } else if (key == "rho-max") {
    c.rho_max = detail::to_double(key, v);
  } else if (key == "angles") {
    c.angles = static_cast<int>(detail::to_long(key, v));
  } else if (key == "sweep") {
    c.sweep_steps = static_cast<int>(detail::to_long(key, v));
  } else if (key == "fixed-rho") {
    c.fixed_rho = detail::to_bool(key, v);
  } else if (key == "allow-sources") {
    c.allow_sources = detail::to_bool(key, v);
  } else if (key == "r-min") {
    c.r_min = detail::to_double(key, v);
  } else if (key == "samples") {
    c.target_samples = static_cast<int>(detail::to_long(key, v));
  } else if (key == "method") {
    c.methods = parse_methods(v);
  } else if (key == "budget") {
    c.budget = detail::to_long(key, v);
  } else if (key == "seeds") {
    c.seeds = parse_seeds(v);
  } else if (key == "out") {
    c.out_dir = v;
  } else if (key == "frames") {
    c.frames = static_cast<int>(detail::to_long(key, v));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Flat "key = value" lines; '#' starts a comment.
inline KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(n) + ": expected key = value");
    out.emplace_back(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return out;
}

/// A preset (the last one named anywhere) is applied first, then every other
/// pair in order. File pairs go before command-line pairs.
inline ExperimentConfig build_config(const KeyValues& pairs) {
  ExperimentConfig c;
  for (auto it = pairs.rbegin(); it != pairs.rend(); ++it)
    if (it->first == "preset") {
      c = preset(it->second);
      break;
    }
  for (const auto& [k, v] : pairs)
    if (k != "preset") apply_key(c, k, v);
  return c;
}

inline ExperimentConfig load_config(const std::string& path, const KeyValues& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  auto pairs = parse_key_values(in);
  pairs.insert(pairs.end(), overrides.begin(), overrides.end());
  return build_config(pairs);
}

inline std::string config_text(const ExperimentConfig& c) {
  std::ostringstream o;
  if (!c.preset.empty()) o << "preset = " << c.preset << "\n";
  o << "target = " << c.target << "\n";
  if (!c.mesh_path.empty()) o << "mesh = " << c.mesh_path << "\n";
  o << "board = " << c.width << "x" << c.height << "\n";
  o << "symmetry = " << symmetry_text(c.axes) << "\n";
  o << "seed-pattern = " << seed_text(c.seed) << "\n";
  o << "cl-max = " << detail::fmt_double(c.cl_max) << "\n";
  o << "rho-max = " << detail::fmt_double(c.rho_max) << "\n";
  o << "angles = " << c.angles << "\n";
  o << "sweep = " << c.sweep_steps << "\n";
  o << "fixed-rho = " << (c.fixed_rho ? "true" : "false") << "\n";
  o << "allow-sources = " << (c.allow_sources ? "true" : "false") << "\n";
  if (c.r_min) o << "r-min = " << detail::fmt_double(*c.r_min) << "\n";
  o << "samples = " << c.target_samples << "\n";
  o << "method = ";
  for (std::size_t k = 0; k < c.methods.size(); ++k) o << (k ? "," : "") << search::method_name(c.methods[k]);
  o << "\nbudget = " << c.budget << "\n";
  o << "seeds = ";
  for (std::size_t k = 0; k < c.seeds.size(); ++k) o << (k ? "," : "") << c.seeds[k];
  o << "\n";
  if (!c.out_dir.empty()) o << "out = " << c.out_dir << "\n";
  o << "frames = " << c.frames << "\n";
  return o.str();
}

inline obj::Objective make_objective(const ExperimentConfig& c) {
  const auto& t = c.target;
  if (t == "pyramid") return obj::shape_objective(obj::build_pyramid(c.target_samples));
  if (t == "cube") return obj::shape_objective(obj::build_cube(c.target_samples));
  if (t == "bowl") return obj::shape_objective(obj::build_bowl(c.target_samples));
  if (t == "face" || t == "mesh") {
    if (c.mesh_path.empty()) throw ConfigError("target '" + t + "' needs a mesh path (mesh = file.obj)");
    return obj::shape_objective(obj::load_target_mesh(c.mesh_path, c.target_samples));
  }
  if (t == "bucket") return obj::abstract_objective(obj::ObjectiveKind::Bucket);
  if (t == "shelf") return obj::abstract_objective(obj::ObjectiveKind::Shelf);
  if (t == "table") return obj::abstract_objective(obj::ObjectiveKind::Table);
  if (t == "chair") return obj::abstract_objective(obj::ObjectiveKind::Chair);
  throw ConfigError("unknown target '" + t + "'");
}

inline env::EnvConfig make_env_config(const ExperimentConfig& c) {
  env::EnvConfig e;
  e.width = c.width;
  e.height = c.height;
  e.axes = c.axes;
  e.max_crease_length = c.cl_max;
  e.objective = make_objective(c);
  e.rho0_max = c.rho_max;
  e.angle_count = c.angles;
  e.sweep_steps = c.sweep_steps;
  e.allow_sources = c.allow_sources && e.objective.shaped();
  e.fixed_rho = c.fixed_rho;
  e.r_min = c.r_min;
  const Board board = e.board();
  const Cell centre{c.width / 2, c.height / 2};
  switch (c.seed.kind) {
    case SeedSpecKind::AgentSquare: e.seed_kind = env::SeedKind::AgentSquare; break;
    case SeedSpecKind::Square: e.seed_graph = seed_square(board, c.seed.half, c.seed.center.value_or(centre)); break;
    case SeedSpecKind::SingleCrease: e.seed_graph = seed_single_crease(board, c.seed.p1, c.seed.p2); break;
    case SeedSpecKind::Chair: e.seed_graph = seed_chair(board); break;
  }
  return e;
}

// ---------------------------------------------------------------------------
// FOLD

/// Which sign of rho counts as a valley fold in exported files.
enum class FoldSign { ValleyPositive, MountainPositive };

inline char assignment(double rho, FoldSign sign) {
  if (rho == 0.0) return 'F';
  const bool valley = (rho > 0) == (sign == FoldSign::ValleyPositive);
  return valley ? 'V' : 'M';
}

inline std::string fold_text(const CreaseGraph& g, const kin::FoldedState& st, FoldSign sign = FoldSign::ValleyPositive) {
  using nlohmann::ordered_json;
  const auto layout = kin::build_panel_layout(g);
  ordered_json j;
  j["file_spec"] = 1.1;
  j["file_creator"] = "origami-cli";
  j["file_classes"] = {"singleModel"};
  j["frame_classes"] = {"creasePattern"};
  j["frame_attributes"] = {"2D"};
  j["frame_unit"] = "unit";
  ordered_json coords = ordered_json::array(), cells = ordered_json::array(), modes = ordered_json::array(),
               kinds = ordered_json::array(), extended = ordered_json::array();
  for (const auto& v : g.vertices()) {
    const auto p = kin::planar_point(g, v.pos);
    coords.push_back({p.x(), p.y()});
    cells.push_back({v.pos.i, v.pos.j});
    modes.push_back(v.mode);
    kinds.push_back(v.kind == VertexKind::Source ? "source" : "interior");
    extended.push_back(v.extended);
  }
  ordered_json edges = ordered_json::array(), assign = ordered_json::array(), angle = ordered_json::array(),
               driving = ordered_json::array();
  const double flip = sign == FoldSign::ValleyPositive ? 1.0 : -1.0;
  for (std::size_t e = 0; e < g.crease_count(); ++e) {
    const auto& c = g.crease(static_cast<int>(e));
    const double rho = e < st.rho.size() ? st.rho[e] : 0.0;
    edges.push_back({c.from, c.to});
    assign.push_back(std::string(1, assignment(rho, sign)));
    angle.push_back(flip * rho * 180.0 / std::numbers::pi);
    driving.push_back(c.driving);
  }
  ordered_json faces = ordered_json::array();
  for (const auto& p : layout.panels) faces.push_back(p.cycle);
  j["vertices_coords"] = coords;
  j["edges_vertices"] = edges;
  j["edges_assignment"] = assign;
  j["edges_foldAngle"] = angle;
  j["faces_vertices"] = faces;
  j["origami:board"] = {g.width(), g.height()};
  j["origami:sign"] = sign == FoldSign::ValleyPositive ? "valley-positive" : "mountain-positive";
  j["origami:rho0"] = st.rho0;
  j["origami:vertices_cell"] = cells;
  j["origami:vertices_mode"] = modes;
  j["origami:vertices_kind"] = kinds;
  j["origami:vertices_extended"] = extended;
  j["origami:edges_driving"] = driving;
  return j.dump(1) + "\n";
}

struct FoldDocument {
  CreaseGraph graph;
  double rho0 = 0.0;
  FoldSign sign = FoldSign::ValleyPositive;
};

inline FoldDocument parse_fold(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("FOLD: ") + e.what());
  }
  try {
    FoldDocument d;
    const auto board = j.at("origami:board");
    d.graph = CreaseGraph(board.at(0).get<int>(), board.at(1).get<int>());
    d.rho0 = j.at("origami:rho0").get<double>();
    d.sign = j.value("origami:sign", std::string("valley-positive")) == "mountain-positive" ? FoldSign::MountainPositive
                                                                                          : FoldSign::ValleyPositive;
    const auto& cells = j.at("origami:vertices_cell");
    const auto& modes = j.at("origami:vertices_mode");
    const auto& kinds = j.at("origami:vertices_kind");
    const auto& ext = j.at("origami:vertices_extended");
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const Cell c{cells[k].at(0).get<int>(), cells[k].at(1).get<int>()};
      const int v = d.graph.add_vertex(c, kinds.at(k).get<std::string>() == "source" ? VertexKind::Source
                                                                                    : VertexKind::Interior);
      d.graph.vertex(v).mode = modes.at(k).get<int>();
      d.graph.vertex(v).extended = ext.at(k).get<bool>();
    }
    const auto& edges = j.at("edges_vertices");
    const auto& driving = j.at("origami:edges_driving");
    for (std::size_t k = 0; k < edges.size(); ++k)
      d.graph.add_crease(edges[k].at(0).get<int>(), edges[k].at(1).get<int>(), driving.at(k).get<bool>());
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("FOLD: missing or malformed field: ") + e.what());
  }
}

inline void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void export_fold(const CreaseGraph& g, const kin::FoldedState& st, const fs::path& path,
                        FoldSign sign = FoldSign::ValleyPositive) {
  write_file(path, fold_text(g, st, sign));
}

inline FoldDocument import_fold(const fs::path& path) { return parse_fold(read_file(path)); }

// ---------------------------------------------------------------------------
// SVG

struct SvgOptions {
  int cell_px = 40;
  int margin_px = 20;
  bool grid = false;
};

/// Creases drawn in cell coordinates with j pointing up. Creases with
/// rho < 0 get class "mountain", all others "valley".
inline std::string svg_text(const CreaseGraph& g, const std::vector<double>& rho, SvgOptions opt = {}) {
  const int w = (g.width() - 1) * opt.cell_px + 2 * opt.margin_px;
  const int h = (g.height() - 1) * opt.cell_px + 2 * opt.margin_px;
  auto px = [&](Cell c) {
    return std::pair{opt.margin_px + c.i * opt.cell_px, opt.margin_px + (g.height() - 1 - c.j) * opt.cell_px};
  };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
    << " " << h << "\">\n";
  o << "<style>.sheet{fill:#fff;stroke:#000;stroke-width:1}.grid{stroke:#ddd;stroke-width:0.5}"
       ".mountain{stroke:#d62728;stroke-width:2}.valley{stroke:#1f77b4;stroke-width:2;stroke-dasharray:6 4}</style>\n";
  o << "<rect class=\"sheet\" x=\"" << opt.margin_px << "\" y=\"" << opt.margin_px << "\" width=\""
    << w - 2 * opt.margin_px << "\" height=\"" << h - 2 * opt.margin_px << "\"/>\n";
  if (opt.grid) {
    o << "<g class=\"grid\">\n";
    for (int i = 1; i + 1 < g.width(); ++i) {
      const auto [x0, y0] = px({i, 0});
      const auto [x1, y1] = px({i, g.height() - 1});
      o << "<path d=\"M" << x0 << " " << y0 << "V" << y1 << "\"/>\n";
      (void)x1;
    }
    for (int j = 1; j + 1 < g.height(); ++j) {
      const auto [x0, y0] = px({0, j});
      const auto [x1, y1] = px({g.width() - 1, j});
      o << "<path d=\"M" << x0 << " " << y0 << "H" << x1 << "\"/>\n";
      (void)y1;
    }
    o << "</g>\n";
  }
  for (std::size_t e = 0; e < g.crease_count(); ++e) {
    const auto& c = g.crease(static_cast<int>(e));
    const auto [x1, y1] = px(g.vertex(c.from).pos);
    const auto [x2, y2] = px(g.vertex(c.to).pos);
    const bool mountain = e < rho.size() && rho[e] < 0;
    o << "<line class=\"" << (mountain ? "mountain" : "valley") << "\" x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\""
      << x2 << "\" y2=\"" << y2 << "\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

inline void export_svg(const CreaseGraph& g, const kin::FoldedState& st, const fs::path& path, SvgOptions opt = {}) {
  write_file(path, svg_text(g, st.rho, opt));
}

// ---------------------------------------------------------------------------
// OBJ frames

inline std::string obj_text(const kin::FoldedState& st) {
  std::ostringstream o;
  o << "# rho0 " << detail::fmt_double(st.rho0) << "\n";
  char buf[96];
  for (const auto& p : st.positions) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    o << buf;
  }
  for (const auto& t : st.mesh) o << "f " << t.v[0] + 1 << " " << t.v[1] + 1 << " " << t.v[2] + 1 << "\n";
  return o.str();
}

/// Frame k folds at rho0 * k / (frames - 1), so frame 0 is flat and the last
/// frame is the requested angle.
inline std::vector<fs::path> export_obj_sequence(const CreaseGraph& g, double rho0, int frames, const fs::path& dir) {
  if (frames < 2) throw ConfigError("frames must be at least 2");
  const auto layout = kin::build_panel_layout(g);
  std::vector<fs::path> out;
  for (int k = 0; k < frames; ++k) {
    const double rho = k == frames - 1 ? rho0 : rho0 * k / (frames - 1);
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03d.obj", k);
    out.push_back(dir / name);
    write_file(out.back(), obj_text(kin::fold_graph(g, layout, rho)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Results

struct ResultRow {
  std::string method;
  std::uint64_t seed = 0;
  double best_return = 0.0;
  long interactions_to_best = 0;
  long interactions = 0;
  long episodes = 0;
  double best_rho = 0.0;
  double wall_seconds = 0.0;
};

inline std::string csv_header() {
  return "method,seed,best_return,interactions_to_best,interactions,episodes,best_rho,wall_seconds";
}

inline std::string csv_row(const ResultRow& r) {
  std::ostringstream o;
  o << r.method << "," << r.seed << "," << detail::fmt_double(r.best_return) << "," << r.interactions_to_best << ","
    << r.interactions << "," << r.episodes << "," << detail::fmt_double(r.best_rho) << "," << std::fixed
    << std::setprecision(3) << r.wall_seconds;
  return o.str();
}

struct MethodSummary {
  std::string method;
  int runs = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single run
  double best = -std::numeric_limits<double>::infinity();
};

inline std::vector<MethodSummary> summarize(const std::vector<ResultRow>& rows) {
  std::vector<MethodSummary> out;
  std::map<std::string, std::vector<double>> by;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (!by.count(r.method)) order.push_back(r.method);
    by[r.method].push_back(r.best_return);
  }
  for (const auto& m : order) {
    const auto& v = by[m];
    MethodSummary s{m, static_cast<int>(v.size())};
    for (double x : v) {
      s.mean += x / v.size();
      s.best = std::max(s.best, x);
    }
    if (v.size() > 1) {
      double ss = 0;
      for (double x : v) ss += (x - s.mean) * (x - s.mean);
      s.stddev = std::sqrt(ss / (v.size() - 1));
    }
    out.push_back(s);
  }
  return out;
}

struct ExperimentResult {
  std::vector<ResultRow> rows;
  search::BestPattern best;
  std::string best_method;
  std::vector<fs::path> artifacts;
};

/// Folding angle to export for a pattern: the best angle when known.
inline double export_angle(const Environment& e, const search::BestPattern& b) {
  if (std::isfinite(b.best_rho)) return b.best_rho;
  if (e.fixed_angle()) return *e.fixed_angle();
  return e.config().rho0_max;
}

/// Writes fold, svg, OBJ frames, the action list and the trace of a pattern.
inline std::vector<fs::path> export_pattern(const Environment& e, const search::BestPattern& b, const fs::path& dir,
                                            int frames) {
  std::vector<fs::path> out;
  const double rho = export_angle(e, b);
  const auto st = kin::fold_graph(b.graph, rho);
  out.push_back(dir / "best.fold");
  export_fold(b.graph, st, out.back());
  out.push_back(dir / "best.svg");
  export_svg(b.graph, st, out.back());
  std::string acts;
  for (const auto& a : b.actions) acts += a.str() + "\n";
  out.push_back(dir / "best_actions.txt");
  write_file(out.back(), acts);
  out.push_back(dir / "best_trace.tsv");
  write_file(out.back(), Environment::trace_log(e.replay(b.actions)));
  for (auto& p : export_obj_sequence(b.graph, rho, frames, dir / "frames")) out.push_back(std::move(p));
  return out;
}

/// Runs every (method, seed) cell in order. Rows are appended to
/// out/results.csv as they finish; the overall best pattern is exported to
/// out/ at the end.
inline ExperimentResult run_experiment(const ExperimentConfig& c, std::ostream* log = nullptr) {
  const Environment e(make_env_config(c));
  ExperimentResult res;
  std::ofstream csv;
  if (!c.out_dir.empty()) {
    fs::create_directories(c.out_dir);
    write_file(fs::path(c.out_dir) / "config.txt", config_text(c));
    const auto path = fs::path(c.out_dir) / "results.csv";
    const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
    csv.open(path, std::ios::app);
    if (!csv) throw Error("cannot write '" + path.string() + "'");
    if (fresh) csv << csv_header() << "\n" << std::flush;
  }
  for (auto m : c.methods) {
    for (auto seed : c.seeds) {
      const auto t0 = std::chrono::steady_clock::now();
      auto b = search::run_method(m, e, {c.budget, seed});
      ResultRow r;
      r.method = search::method_name(m);
      r.seed = seed;
      r.best_return = b.best_return;
      r.interactions_to_best = b.found_at;
      r.interactions = b.interactions;
      r.episodes = b.episodes;
      r.best_rho = b.best_rho;
      r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (csv.is_open()) csv << csv_row(r) << "\n" << std::flush;
      if (log) *log << csv_row(r) << "\n" << std::flush;
      res.rows.push_back(r);
      if (b.valid() && (!res.best.valid() || b.best_return > res.best.best_return)) {
        res.best = std::move(b);
        res.best_method = r.method;
      }
    }
  }
  if (!c.out_dir.empty() && res.best.valid()) res.artifacts = export_pattern(e, res.best, c.out_dir, c.frames);
  return res;
}

}  // namespace origami::io
