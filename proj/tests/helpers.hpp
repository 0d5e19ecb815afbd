#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "partpq/partpq.hpp"

namespace testutil {

using namespace partpq;

inline std::string data_path(const std::string& file) {
  return std::string(PARTPQ_DATA_DIR) + "/" + file;
}

inline const DatasetSpec& cpp_spec() {
  static const DatasetSpec spec = load_spec_file(data_path("cpp.json"));
  return spec;
}

inline const DatasetSpec& ppp_spec() {
  static const DatasetSpec spec = load_spec_file(data_path("ppp.json"));
  return spec;
}

// A compact universe exercising every class flavor: plain stuff, stuff with
// parts, things with parts, plain things, and a non-evaluated class.
inline const DatasetSpec& tiny_spec() {
  static const DatasetSpec spec = [] {
    std::vector<SceneClass> classes;
    classes.emplace_back(1, "road", Kind::Stuff);
    classes.emplace_back(2, "sky", Kind::Stuff);
    classes.emplace_back(3, "car", Kind::Things, true,
                         std::vector<PartClass>{{1, "wheel"}, {2, "chassis"}});
    classes.emplace_back(4, "person", Kind::Things, true,
                         std::vector<PartClass>{{1, "torso"}, {2, "head"}});
    classes.emplace_back(5, "bike", Kind::Things);
    classes.emplace_back(9, "lawn", Kind::Stuff, true,
                         std::vector<PartClass>{{1, "grass"}, {2, "soil"}});
    classes.emplace_back(12, "ego", Kind::Stuff, false);
    return DatasetSpec("tiny", std::move(classes), {});
  }();
  return spec;
}

inline void fill_rect(LabelMap& map, int x0, int y0, int x1, int y1, LabelTriple t) {
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) map.at(x, y) = t;
}

inline int64_t count_nonvoid(const LabelMap& map) {
  int64_t n = 0;
  for (const auto& t : map.pixels) n += !t.is_void();
  return n;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Scratch directory per test binary run.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("partpq_test_" + std::to_string(::getpid())) / name;
  std::filesystem::create_directories(dir);
  return dir;
}

// Random recipes for property-style tests: sizes 16..64, classes sampled
// from the given spec, perturbation rates in [0, hi].
inline SceneRecipe random_recipe(CounterRng& rng, const DatasetSpec& spec, double hi = 0.5) {
  SceneRecipe r;
  r.seed = rng.next_u64();
  r.width = rng.next_int(16, 64);
  r.height = rng.next_int(16, 64);
  std::vector<uint16_t> sids;
  for (const auto& c : spec.classes()) sids.push_back(c.sid);
  const int n_classes = rng.next_int(2, int(std::min<size_t>(6, sids.size())));
  for (int i = 0; i < n_classes; ++i)
    r.roster.push_back({sids[rng.next_below(sids.size())], rng.next_int(1, 3)});
  r.part_coverage = rng.next_double();
  r.perturb.boundary_jitter = rng.next_int(0, 2);
  r.perturb.class_flip = rng.next_double() * hi;
  r.perturb.part_flip = rng.next_double() * hi;
  r.perturb.void_rate = rng.next_double() * hi;
  r.perturb.instance_split = rng.next_bernoulli(0.5);
  r.perturb.instance_merge = rng.next_bernoulli(0.5);
  return r;
}

}  // namespace testutil
