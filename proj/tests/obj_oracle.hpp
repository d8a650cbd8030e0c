#pragma once

// Reads OBJ frames back from disk and measures how far any triangle edge
// drifts from its length in the first frame.

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace test_oracle {

struct ObjFrame {
  std::vector<std::array<double, 3>> v;
  std::vector<std::array<int, 3>> f;  // 0-based
};

inline ObjFrame read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  ObjFrame out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      std::array<double, 3> p{};
      ls >> p[0] >> p[1] >> p[2];
      out.v.push_back(p);
    } else if (tag == "f") {
      std::array<int, 3> t{};
      ls >> t[0] >> t[1] >> t[2];
      for (int& x : t) --x;
      out.f.push_back(t);
    }
  }
  return out;
}

inline std::vector<ObjFrame> read_obj_frames(const std::vector<std::filesystem::path>& paths) {
  std::vector<ObjFrame> out;
  for (const auto& p : paths) out.push_back(read_obj(p));
  return out;
}

inline double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

/// Largest |len_k(e) - len_0(e)| over all frames and triangle edges. Returns
/// infinity when the frames do not share one vertex and face list.
inline double rigidity_error(const std::vector<ObjFrame>& frames) {
  if (frames.empty()) return 0.0;
  const auto& ref = frames[0];
  double worst = 0.0;
  for (const auto& fr : frames) {
    if (fr.v.size() != ref.v.size() || fr.f != ref.f) return INFINITY;
    for (const auto& t : ref.f)
      for (int k = 0; k < 3; ++k) {
        const int a = t[k], b = t[(k + 1) % 3];
        worst = std::max(worst, std::abs(distance(fr.v[a], fr.v[b]) - distance(ref.v[a], ref.v[b])));
      }
  }
  return worst;
}

}  // namespace test_oracle
