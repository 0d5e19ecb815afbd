#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "partpq/codec.hpp"
#include "partpq/core.hpp"
#include "partpq/dataset_spec.hpp"
#include "partpq/merging.hpp"
#include "partpq/part_prediction.hpp"

namespace partpq {

// Counter-based deterministic generator. Draw i from seed s is
//   mix(s + (i + 1) * 0x9E3779B97F4A7C15)
// where mix is the splitmix64 finalizer, so any draw is reproducible from
// (seed, index) alone, in any language.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  uint64_t at(uint64_t index) const { return mix(seed_ + (index + 1) * 0x9E3779B97F4A7C15ull); }

  uint64_t next_u64() { return at(counter_++); }

  // Uniform in [0, n); n must be positive. Modulo keeps the sequence easy to
  // reproduce; the bias is irrelevant at these ranges.
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

  int next_int(int lo, int hi) {  // inclusive bounds
    return lo + int(next_below(uint64_t(hi - lo + 1)));
  }

  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_double() < p; }

  uint64_t counter() const { return counter_; }

 private:
  uint64_t seed_;
  uint64_t counter_ = 0;
};

struct RosterEntry {
  uint16_t sid = 0;
  int instances = 1;
};

struct Perturbation {
  int boundary_jitter = 0;      // label resampling radius in pixels
  double class_flip = 0.0;      // per-segment scene class flip rate
  double part_flip = 0.0;       // per-pixel part label flip rate
  double void_rate = 0.0;       // per-pixel full-void injection rate
  bool instance_split = false;  // split things instances at the bbox midline
  bool instance_merge = false;  // merge same-class instance pairs

  friend bool operator==(const Perturbation&, const Perturbation&) = default;
};

struct SceneRecipe {
  uint64_t seed = 1;
  int width = 32;
  int height = 32;
  std::vector<RosterEntry> roster;
  double part_coverage = 1.0;  // fraction of L^parts pixels that get a part label
  Perturbation perturb;
};

inline void validate_recipe(const SceneRecipe& r, const DatasetSpec& spec) {
  if (r.width < 4 || r.height < 4) throw EvalError("recipe dimensions must be at least 4x4");
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(r.part_coverage) || !in_unit(r.perturb.class_flip) ||
      !in_unit(r.perturb.part_flip) || !in_unit(r.perturb.void_rate))
    throw EvalError("recipe rates must lie in [0, 1]");
  if (r.perturb.boundary_jitter < 0) throw EvalError("boundary jitter must be non-negative");
  if (r.roster.empty()) throw EvalError("recipe roster is empty");
  for (const auto& e : r.roster) {
    if (!spec.find(e.sid)) throw EvalError("roster references unknown sid " + std::to_string(e.sid));
    if (e.instances < 1) throw EvalError("roster instance counts must be positive");
  }
}

inline SceneRecipe recipe_from_json(const nlohmann::json& j) {
  SceneRecipe r;
  try {
    r.seed = j.at("seed").get<uint64_t>();
    r.width = j.at("width").get<int>();
    r.height = j.at("height").get<int>();
    for (const auto& je : j.at("roster"))
      r.roster.push_back({je.at("sid").get<uint16_t>(), je.value("instances", 1)});
    r.part_coverage = j.value("part_coverage", 1.0);
    if (j.contains("perturb")) {
      const auto& jp = j.at("perturb");
      r.perturb.boundary_jitter = jp.value("boundary_jitter", 0);
      r.perturb.class_flip = jp.value("class_flip", 0.0);
      r.perturb.part_flip = jp.value("part_flip", 0.0);
      r.perturb.void_rate = jp.value("void_rate", 0.0);
      r.perturb.instance_split = jp.value("instance_split", false);
      r.perturb.instance_merge = jp.value("instance_merge", false);
    }
  } catch (const nlohmann::json::exception& e) {
    throw EvalError(std::string("malformed recipe: ") + e.what());
  }
  return r;
}

inline nlohmann::ordered_json recipe_to_json(const SceneRecipe& r) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["width"] = r.width;
  j["height"] = r.height;
  j["roster"] = nlohmann::ordered_json::array();
  for (const auto& e : r.roster) j["roster"].push_back({{"sid", e.sid}, {"instances", e.instances}});
  j["part_coverage"] = r.part_coverage;
  j["perturb"] = {{"boundary_jitter", r.perturb.boundary_jitter},
                  {"class_flip", r.perturb.class_flip},
                  {"part_flip", r.perturb.part_flip},
                  {"void_rate", r.perturb.void_rate},
                  {"instance_split", r.perturb.instance_split},
                  {"instance_merge", r.perturb.instance_merge}};
  return j;
}

namespace detail {

struct PaintRegion {
  int x0, y0, w, h;
  bool ellipse;
};

inline PaintRegion sample_region(CounterRng& rng, int width, int height) {
  PaintRegion r;
  r.w = rng.next_int(2, std::max(2, width / 2));
  r.h = rng.next_int(2, std::max(2, height / 2));
  r.x0 = rng.next_int(0, width - r.w);
  r.y0 = rng.next_int(0, height - r.h);
  r.ellipse = rng.next_bernoulli(0.5);
  return r;
}

inline bool region_contains(const PaintRegion& r, int x, int y) {
  if (x < r.x0 || y < r.y0 || x >= r.x0 + r.w || y >= r.y0 + r.h) return false;
  if (!r.ellipse) return true;
  const double cx = r.x0 + (r.w - 1) / 2.0, cy = r.y0 + (r.h - 1) / 2.0;
  const double rx = r.w / 2.0, ry = r.h / 2.0;
  const double dx = (x - cx) / rx, dy = (y - cy) / ry;
  return dx * dx + dy * dy <= 1.0;
}

// Remap a part id by positional index when a segment changes class.
inline uint16_t transfer_pid(const SceneClass& from, const SceneClass& to, uint16_t pid) {
  if (pid == kNoPart || !to.has_parts()) return kNoPart;
  const int idx = from.part_index(pid);
  if (idx < 0) return kNoPart;
  return to.parts[size_t(idx) % to.parts.size()].pid;
}

}  // namespace detail

// Paints random back-to-front rectangles/ellipses into a ground-truth map,
// then derives a prediction by applying the recipe's perturbations. The same
// recipe always produces bit-identical output.
inline std::pair<LabelMap, LabelMap> generate_scene(const SceneRecipe& recipe,
                                                    const DatasetSpec& spec) {
  validate_recipe(recipe, spec);
  CounterRng rng(recipe.seed);
  const int W = recipe.width, H = recipe.height;
  LabelMap gt(W, H);

  std::map<uint16_t, uint16_t> next_iid;
  for (const auto& entry : recipe.roster) {
    const SceneClass& cls = spec.class_at(entry.sid);
    for (int k = 0; k < entry.instances; ++k) {
      const detail::PaintRegion region = detail::sample_region(rng, W, H);
      const uint16_t iid = cls.is_things() ? next_iid[entry.sid]++ : kNoInstance;
      const size_t n_parts = cls.parts.size();
      for (int y = region.y0; y < region.y0 + region.h; ++y) {
        for (int x = region.x0; x < region.x0 + region.w; ++x) {
          if (!detail::region_contains(region, x, y)) continue;
          LabelTriple t = make_label(entry.sid);
          t.iid = iid;
          if (n_parts > 0) {
            // horizontal part bands across the painted region
            const size_t band = size_t(y - region.y0) * n_parts / region.h;
            t.pid = cls.parts[band].pid;
            if (recipe.part_coverage < 1.0 && !rng.next_bernoulli(recipe.part_coverage))
              t.pid = kNoPart;
          }
          gt.at(x, y) = t;
        }
      }
    }
  }

  LabelMap pred = gt;
  const Perturbation& pb = recipe.perturb;

  // Segment roster of the prediction, in deterministic (sid, iid) order.
  auto collect_segments = [&]() {
    std::map<std::pair<uint16_t, uint16_t>, std::vector<int32_t>> segs;
    for (int64_t i = 0; i < pred.size(); ++i) {
      const LabelTriple& t = pred.pixels[i];
      if (!t.is_void()) segs[{t.sid, t.iid}].push_back(int32_t(i));
    }
    return segs;
  };

  if (pb.instance_split) {
    for (auto& [key, pixels] : collect_segments()) {
      const SceneClass& cls = spec.class_at(key.first);
      if (!cls.is_things() || key.second == kNoInstance) continue;
      if (!rng.next_bernoulli(0.5)) continue;
      int min_x = W, max_x = 0;
      for (int32_t px : pixels) {
        min_x = std::min(min_x, int(px % W));
        max_x = std::max(max_x, int(px % W));
      }
      const int split_x = (min_x + max_x) / 2;
      const uint16_t fresh = next_iid[key.first]++;
      for (int32_t px : pixels)
        if (int(px % W) > split_x) pred.pixels[px].iid = fresh;
    }
  }

  if (pb.instance_merge) {
    auto segs = collect_segments();
    std::map<uint16_t, std::vector<uint16_t>> by_class;
    for (const auto& [key, pixels] : segs)
      if (key.second != kNoInstance) by_class[key.first].push_back(key.second);
    for (const auto& [sid, iids] : by_class) {
      for (size_t k = 0; k + 1 < iids.size(); k += 2) {
        if (!rng.next_bernoulli(0.5)) continue;
        for (int64_t i = 0; i < pred.size(); ++i)
          if (pred.pixels[i].sid == sid && pred.pixels[i].iid == iids[k + 1])
            pred.pixels[i].iid = iids[k];
      }
    }
  }

  if (pb.class_flip > 0.0) {
    std::vector<uint16_t> sids;
    for (const auto& c : spec.classes())
      if (c.evaluate) sids.push_back(c.sid);
    for (auto& [key, pixels] : collect_segments()) {
      if (!rng.next_bernoulli(pb.class_flip)) continue;
      const uint16_t new_sid = sids[rng.next_below(sids.size())];
      if (new_sid == key.first) continue;
      const SceneClass& from = spec.class_at(key.first);
      const SceneClass& to = spec.class_at(new_sid);
      const uint16_t new_iid = to.is_things()
                                   ? (key.second != kNoInstance ? key.second : next_iid[new_sid]++)
                                   : kNoInstance;
      for (int32_t px : pixels) {
        LabelTriple& t = pred.pixels[px];
        t.pid = detail::transfer_pid(from, to, t.pid);
        t.sid = new_sid;
        t.iid = new_iid;
      }
    }
  }

  if (pb.boundary_jitter > 0) {
    const int r = pb.boundary_jitter;
    LabelMap jittered(W, H);
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const int dx = rng.next_int(-r, r);
        const int dy = rng.next_int(-r, r);
        const int sx = std::clamp(x + dx, 0, W - 1);
        const int sy = std::clamp(y + dy, 0, H - 1);
        jittered.at(x, y) = pred.at(sx, sy);
      }
    }
    pred = std::move(jittered);
  }

  if (pb.part_flip > 0.0) {
    for (int64_t i = 0; i < pred.size(); ++i) {
      LabelTriple& t = pred.pixels[i];
      if (!t.has_part()) continue;
      if (!rng.next_bernoulli(pb.part_flip)) continue;
      const SceneClass& cls = spec.class_at(t.sid);
      const uint64_t pick = rng.next_below(cls.parts.size() + 1);  // parts + part-void
      t.pid = pick == cls.parts.size() ? kNoPart : cls.parts[pick].pid;
    }
  }

  if (pb.void_rate > 0.0) {
    for (auto& t : pred.pixels)
      if (rng.next_bernoulli(pb.void_rate)) t = make_void();
  }

  return {std::move(gt), std::move(pred)};
}

// --- hand-designed fixtures ---

struct Fixture {
  LabelMap gt;
  LabelMap pred;
  std::optional<LabelMap> panoptic;       // merge fixtures: panoptic input
  std::optional<PartPrediction> parts;    // merge fixtures: part input
  std::map<std::string, double> facts;    // machine-checkable expectations
};

// A compact CPP-like universe the fixtures are built against.
inline const DatasetSpec& fixture_spec() {
  static const DatasetSpec spec = [] {
    std::vector<SceneClass> classes;
    classes.push_back({7, "road", Kind::Stuff, true, {}});
    classes.push_back({23, "sky", Kind::Stuff, true, {}});
    classes.push_back(
        {24, "person", Kind::Things, true, {{1, "torso"}, {2, "head"}, {3, "arm"}, {4, "leg"}}});
    SceneClass car{26,
                   "car",
                   Kind::Things,
                   true,
                   {{1, "window"}, {2, "wheel"}, {3, "light"}, {4, "license plate"}, {5, "chassis"}}};
    classes.push_back(car);
    SceneClass bus = car;
    bus.sid = 28;
    bus.name = "bus";
    classes.push_back(bus);
    PartGrouping grouping;
    grouping.name = "vehicle9";
    const auto part_names = {"window", "wheel", "light", "license plate", "chassis"};
    uint16_t gid = 1;
    uint16_t pid = 1;
    for (const char* name : part_names) {
      grouping.groups.push_back({gid++, name, {{26, pid}, {28, pid}}});
      ++pid;
    }
    pid = 1;
    for (const char* name : {"torso", "head", "arm", "leg"})
      grouping.groups.push_back({gid++, name, {{24, pid++}}});
    return DatasetSpec("fixture", std::move(classes), {std::move(grouping)});
  }();
  return spec;
}

namespace detail {

inline void fill(LabelMap& map, int x0, int y0, int x1, int y1, LabelTriple t) {
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) map.at(x, y) = t;
}

inline Fixture fixture_exact_half_iou() {
  Fixture f;
  f.gt = LabelMap(8, 8);
  f.pred = LabelMap(8, 8);
  // road background everywhere so no pixel is void-absorbed
  fill(f.gt, 0, 0, 8, 8, make_label(7));
  fill(f.pred, 0, 0, 8, 8, make_label(7));
  for (int x = 0; x < 3; ++x) f.gt.at(x, 0) = make_label(26, 0, 2);
  for (int x = 1; x < 4; ++x) f.pred.at(x, 0) = make_label(26, 0, 2);
  f.facts["intersection"] = 2;
  f.facts["union"] = 4;
  f.facts["tp"] = 0;
  f.facts["fp"] = 1;
  f.facts["fn"] = 1;
  return f;
}

inline Fixture fixture_partless_gt() {
  Fixture f;
  f.gt = LabelMap(8, 8);
  f.pred = LabelMap(8, 8);
  fill(f.gt, 2, 2, 6, 6, make_label(26, 0));          // no part labels at all
  fill(f.pred, 2, 2, 6, 6, make_label(26, 0, 2));     // perfect mask, parts predicted
  f.facts["ignored_gt"] = 1;
  f.facts["tp"] = 0;
  f.facts["fp"] = 0;
  f.facts["fn"] = 0;
  return f;
}

inline Fixture fixture_void_heavy() {
  Fixture f;
  f.gt = LabelMap(8, 8);
  f.pred = LabelMap(8, 8);
  fill(f.gt, 0, 7, 2, 8, make_label(7));            // small road strip
  fill(f.gt, 5, 5, 8, 8, make_label(26));           // car crowd region (no instance id)
  fill(f.pred, 0, 7, 2, 8, make_label(7));          // road matched
  fill(f.pred, 2, 0, 6, 4, make_label(26, 0, 2));   // car floating on gt void
  f.facts["tp_road"] = 1;
  f.facts["fp"] = 0;  // the floating car is absorbed by void/crowd overlap
  f.facts["fn"] = 0;
  return f;
}

// Panoptic prediction identical to gt; the part model leaks person labels
// into the car's border columns. Top-down keeps those pixels (part-void);
// conservative removes them from the segment.
inline Fixture fixture_boundary_confusion() {
  const int W = 16, H = 16;
  Fixture f;
  f.gt = LabelMap(W, H);
  const auto& spec = fixture_spec();
  const SceneClass& person = spec.class_at(24);
  const SceneClass& car = spec.class_at(26);
  for (int y = 0; y < H; ++y) {
    const uint16_t person_pid = person.parts[size_t(y) * person.parts.size() / H].pid;
    const uint16_t car_pid = car.parts[size_t(y) * car.parts.size() / H].pid;
    for (int x = 0; x < 8; ++x) f.gt.at(x, y) = make_label(24, 0, person_pid);
    for (int x = 8; x < W; ++x) f.gt.at(x, y) = make_label(26, 0, car_pid);
  }
  LabelMap panoptic = f.gt;
  for (auto& t : panoptic.pixels) t.pid = kNoPart;

  PartPrediction parts = PartPrediction::ungrouped(W, H);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const LabelTriple& t = f.gt.at(x, y);
      const int64_t i = f.gt.index(x, y);
      if (x == 8 || x == 9) {  // leak: person parts over the car border
        parts.sids[i] = 24;
        parts.pids[i] = 2;
      } else {
        parts.sids[i] = t.sid;
        parts.pids[i] = t.pid;
      }
    }
  }
  f.panoptic = panoptic;
  f.parts = parts;
  f.pred = merge_topdown(panoptic, parts, spec);
  f.facts["leaked_pixels"] = 2 * H;
  return f;
}

inline Fixture fixture_grouped_pred() {
  const int W = 8, H = 8;
  Fixture f;
  f.gt = LabelMap(W, H);
  for (int y = 0; y < H; ++y) {
    const uint16_t pid = y < H / 2 ? 1 : 2;  // window above, wheel below
    for (int x = 0; x < 4; ++x) f.gt.at(x, y) = make_label(26, 0, pid);
    for (int x = 4; x < W; ++x) f.gt.at(x, y) = make_label(28, 0, pid);
  }
  LabelMap panoptic = f.gt;
  for (auto& t : panoptic.pixels) t.pid = kNoPart;
  PartPrediction parts = PartPrediction::grouped(W, H, "vehicle9");
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) parts.gids[f.gt.index(x, y)] = y < H / 2 ? 1 : 2;
  f.panoptic = panoptic;
  f.parts = parts;
  f.pred = f.gt;  // grouped prediction specializes back to the ground truth
  f.facts["distinct_gids"] = 2;
  return f;
}

}  // namespace detail

inline Fixture build_fixture(std::string_view name) {
  if (name == "exact-half-iou") return detail::fixture_exact_half_iou();
  if (name == "partless-gt") return detail::fixture_partless_gt();
  if (name == "void-heavy") return detail::fixture_void_heavy();
  if (name == "boundary-confusion") return detail::fixture_boundary_confusion();
  if (name == "grouped-pred") return detail::fixture_grouped_pred();
  throw EvalError("unknown fixture \"" + std::string(name) + "\"");
}

}  // namespace partpq
