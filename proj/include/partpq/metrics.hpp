#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "partpq/core.hpp"
#include "partpq/dataset_spec.hpp"
#include "partpq/part_prediction.hpp"
#include "partpq/segmentation.hpp"

namespace partpq {

// Which part classes enter the per-segment mean IOU: only those present in
// the matched pair (default) or the full vocabulary of the scene class, with
// absent parts scoring 0.
enum class PartUniverse { Present, All };

inline PartUniverse part_universe_from_string(std::string_view s) {
  if (s == "present") return PartUniverse::Present;
  if (s == "all") return PartUniverse::All;
  throw EvalError("unknown part universe \"" + std::string(s) + "\" (expected present|all)");
}

struct EvalOptions {
  bool require_parts = true;
  PartUniverse part_universe = PartUniverse::Present;
};

// Combinable per-class tally; finalize() turns a fold of these into metrics.
struct ClassAccumulator {
  uint16_t sid = 0;
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  double sum_iou_p = 0.0;
};

using AccumulatorMap = std::map<uint16_t, ClassAccumulator>;

inline ClassAccumulator combine(const ClassAccumulator& a, const ClassAccumulator& b) {
  if (a.sid != b.sid)
    throw EvalError("cannot combine accumulators for sid " + std::to_string(a.sid) + " and sid " +
                    std::to_string(b.sid));
  return {a.sid, a.tp + b.tp, a.fp + b.fp, a.fn + b.fn, a.sum_iou_p + b.sum_iou_p};
}

inline AccumulatorMap combine(const AccumulatorMap& a, const AccumulatorMap& b) {
  AccumulatorMap out = a;
  for (const auto& [sid, acc] : b) {
    auto [it, inserted] = out.try_emplace(sid, acc);
    if (!inserted) it->second = combine(it->second, acc);
  }
  return out;
}

// Mean multi-class part IOU over the union of a matched (gt, pred) segment
// pair. Pixels outside a segment's own mask act as a synthetic background
// class; gt part-void pixels are excluded outright; pred part-void pixels
// count as misses but never as false positives.
inline double part_iou(const Segment& g, const Segment& p, const LabelMap& gt_map,
                       const LabelMap& pred_map, const SceneClass& cls,
                       PartUniverse universe = PartUniverse::Present) {
  const size_t n_parts = cls.parts.size();
  const int bg = int(n_parts);  // dense ids: [0, n_parts) parts, n_parts = background
  std::vector<int64_t> inter(n_parts + 1, 0), uni(n_parts + 1, 0);

  size_t ia = 0, ib = 0;
  while (ia < g.pixels.size() || ib < p.pixels.size()) {
    int32_t px;
    bool in_g = false, in_p = false;
    if (ib >= p.pixels.size() || (ia < g.pixels.size() && g.pixels[ia] < p.pixels[ib])) {
      px = g.pixels[ia++];
      in_g = true;
    } else if (ia >= g.pixels.size() || p.pixels[ib] < g.pixels[ia]) {
      px = p.pixels[ib++];
      in_p = true;
    } else {
      px = g.pixels[ia++];
      ++ib;
      in_g = in_p = true;
    }
    int gl = bg;
    if (in_g) {
      const uint16_t pid = gt_map.pixels[px].pid;
      if (pid == kNoPart) continue;  // unlabeled gt part: ignore the pixel
      gl = cls.part_index(pid);
    }
    constexpr int kNone = -1;  // predicted part-void: counts toward no class
    int pl = bg;
    if (in_p) {
      const uint16_t pid = pred_map.pixels[px].pid;
      pl = pid == kNoPart ? kNone : cls.part_index(pid);
    }
    if (gl == pl) {
      ++inter[gl];
      ++uni[gl];
    } else {
      ++uni[gl];
      if (pl != kNone) ++uni[pl];
    }
  }

  double sum = 0.0;
  int count = 0;
  for (size_t c = 0; c <= n_parts; ++c) {
    if (uni[c] > 0) {
      sum += double(inter[c]) / double(uni[c]);
      ++count;
    } else if (universe == PartUniverse::All && c != size_t(bg)) {
      ++count;  // absent part contributes 0
    }
  }
  // Every union pixel ignored: no evidence either way.
  return count == 0 ? 1.0 : sum / count;
}

namespace detail {

inline AccumulatorMap accumulate(const LabelMap& gt_map, const LabelMap& pred_map,
                                 const DatasetSpec& spec, const EvalOptions& options,
                                 bool parts_aware) {
  require_same_shape(gt_map.width, gt_map.height, pred_map.width, pred_map.height, "evaluate");
  const SegmentIndex gt = extract_segments(gt_map, spec);
  const SegmentIndex pred = extract_segments(pred_map, spec);
  const MatchResult match =
      match_segments(gt, pred, spec, parts_aware ? options.require_parts : false);

  AccumulatorMap accs;
  for (const auto& [sid, cm] : match.per_class) {
    ClassAccumulator acc;
    acc.sid = sid;
    acc.tp = int64_t(cm.tp.size());
    acc.fp = int64_t(cm.fp.size());
    acc.fn = int64_t(cm.fn.size());
    const SceneClass& cls = spec.class_at(sid);
    for (const TpPair& pair : cm.tp) {
      if (parts_aware && cls.has_parts()) {
        acc.sum_iou_p += part_iou(gt.segments[pair.gt], pred.segments[pair.pred], gt_map, pred_map,
                                  cls, options.part_universe);
      } else {
        acc.sum_iou_p += pair.iou;
      }
    }
    if (acc.tp + acc.fp + acc.fn > 0) accs.emplace(sid, acc);
  }
  return accs;
}

}  // namespace detail

// One image pair -> per-class PartPQ accumulators (Part IOU for classes with
// parts, instance IOU otherwise).
inline AccumulatorMap evaluate_pair(const LabelMap& gt_map, const LabelMap& pred_map,
                                    const DatasetSpec& spec, const EvalOptions& options = {}) {
  return detail::accumulate(gt_map, pred_map, spec, options, /*parts_aware=*/true);
}

// Plain PQ: instance IOU for every class, part-less gt segments kept.
inline AccumulatorMap evaluate_pq_pair(const LabelMap& gt_map, const LabelMap& pred_map,
                                       const DatasetSpec& spec) {
  return detail::accumulate(gt_map, pred_map, spec, EvalOptions{}, /*parts_aware=*/false);
}

// --- finalized reports ---

struct ClassMetrics {
  uint16_t sid = 0;
  std::string name;
  Kind kind = Kind::Stuff;
  bool has_parts = false;
  bool defined = false;  // tp + fp + fn > 0
  int64_t tp = 0, fp = 0, fn = 0;
  double pq = 0.0, sq = 0.0, rq = 0.0;
};

struct AggregateMetrics {
  double pq = 0.0, sq = 0.0, rq = 0.0;
  int num_classes = 0;
};

// Per-class metrics plus the unweighted subset means over defined classes.
struct MetricBlock {
  std::string metric;  // "partpq" or "pq"
  std::vector<ClassMetrics> classes;
  std::map<std::string, AggregateMetrics> aggregates;  // All, P, NP, Things, Stuff
};

struct MiouEntry {
  int32_t id = 0;
  std::string name;
  bool defined = false;
  double iou = 0.0;
};

struct MiouBlock {
  std::vector<MiouEntry> classes;
  double mean = 0.0;
  int num_classes = 0;
};

struct MpaEntry {
  int32_t id = 0;
  std::string name;
  bool defined = false;
  double accuracy = 0.0;
};

struct MpaBlock {
  std::vector<MpaEntry> classes;
  double mean = 0.0;
  int num_classes = 0;
};

struct EvalReport {
  std::string spec_name;
  MetricBlock partpq;
  std::optional<MetricBlock> pq;
  std::optional<MiouBlock> miou;
  std::optional<MpaBlock> mpa;
};

inline MetricBlock finalize(const AccumulatorMap& accs, const DatasetSpec& spec,
                            std::string metric_name = "partpq") {
  MetricBlock block;
  block.metric = std::move(metric_name);
  struct Tally {
    double pq = 0, sq = 0, rq = 0;
    int n = 0;
  };
  std::map<std::string, Tally> tallies;
  for (const auto& c : spec.classes()) {
    if (!c.evaluate) continue;
    ClassMetrics m;
    m.sid = c.sid;
    m.name = c.name;
    m.kind = c.kind;
    m.has_parts = c.has_parts();
    if (auto it = accs.find(c.sid); it != accs.end()) {
      const ClassAccumulator& a = it->second;
      m.tp = a.tp;
      m.fp = a.fp;
      m.fn = a.fn;
      m.defined = a.tp + a.fp + a.fn > 0;
      const double denom = double(a.tp) + 0.5 * double(a.fp) + 0.5 * double(a.fn);
      if (m.defined) {
        m.sq = a.tp > 0 ? a.sum_iou_p / double(a.tp) : 0.0;
        m.rq = double(a.tp) / denom;
        m.pq = a.sum_iou_p / denom;
      }
    }
    if (m.defined) {
      for (const char* key : {"All", c.has_parts() ? "P" : "NP", c.is_things() ? "Things" : "Stuff"}) {
        Tally& t = tallies[key];
        t.pq += m.pq;
        t.sq += m.sq;
        t.rq += m.rq;
        ++t.n;
      }
    }
    block.classes.push_back(std::move(m));
  }
  for (const char* key : {"All", "P", "NP", "Things", "Stuff"}) {
    const Tally t = tallies.count(key) ? tallies[key] : Tally{};
    AggregateMetrics agg;
    agg.num_classes = t.n;
    if (t.n > 0) {
      agg.pq = t.pq / t.n;
      agg.sq = t.sq / t.n;
      agg.rq = t.rq / t.n;
    }
    block.aggregates[key] = agg;
  }
  return block;
}

// --- pixel-level metrics ---

inline IdMap scene_labels(const LabelMap& map) {
  IdMap out(map.width, map.height);
  for (int64_t i = 0; i < map.size(); ++i) out.labels[i] = map.pixels[i].sid;
  return out;
}

// Projects an ungrouped part prediction to scene-level labels. A group id
// has many possible scene classes, so grouped inputs are rejected.
inline IdMap scene_from_parts(const PartPrediction& parts, const DatasetSpec& spec) {
  if (parts.mode == PartLabelMode::Grouped)
    throw EvalError("ambiguous scene class: a grouped part label maps to several scene classes; "
                    "use an ungrouped model");
  IdMap out(parts.width, parts.height);
  for (int64_t i = 0; i < parts.size(); ++i) {
    const uint16_t sid = parts.sids[i];
    if (sid != 0 && !spec.find(sid))
      throw EvalError("part prediction references unknown sid " + std::to_string(sid));
    out.labels[i] = sid;  // part-void within a known class keeps the class
  }
  return out;
}

// Standard confusion-matrix mIOU. gt-void (0) pixels are excluded; classes
// absent from both maps are excluded from the mean.
inline MiouBlock semantic_miou(const IdMap& gt, const IdMap& pred,
                               const std::vector<std::pair<int32_t, std::string>>& universe) {
  require_same_shape(gt.width, gt.height, pred.width, pred.height, "semantic_miou");
  std::map<int32_t, size_t> dense;
  for (const auto& [id, name] : universe) dense.emplace(id, dense.size());
  const size_t k = dense.size();
  std::vector<int64_t> gt_count(k, 0), pred_count(k, 0), inter(k, 0);
  for (int64_t i = 0; i < gt.size(); ++i) {
    const int32_t gl = gt.labels[i];
    if (gl == 0) continue;
    const auto git = dense.find(gl);
    const auto pit = dense.find(pred.labels[i]);
    if (git != dense.end()) ++gt_count[git->second];
    if (pit != dense.end()) ++pred_count[pit->second];
    if (git != dense.end() && git == pit) ++inter[git->second];
  }
  MiouBlock block;
  double sum = 0.0;
  for (const auto& [id, name] : universe) {
    const size_t c = dense.at(id);
    MiouEntry e;
    e.id = id;
    e.name = name;
    const int64_t u = gt_count[c] + pred_count[c] - inter[c];
    e.defined = gt_count[c] + pred_count[c] > 0;
    if (e.defined) {
      e.iou = u > 0 ? double(inter[c]) / double(u) : 0.0;
      sum += e.iou;
      ++block.num_classes;
    }
    block.classes.push_back(std::move(e));
  }
  block.mean = block.num_classes > 0 ? sum / block.num_classes : 0.0;
  return block;
}

// Recall-style per-class pixel accuracy: correct / gt pixels, averaged over
// classes that appear in the ground truth.
inline MpaBlock mean_pixel_accuracy(const IdMap& gt, const IdMap& pred,
                                    const std::vector<std::pair<int32_t, std::string>>& subset) {
  require_same_shape(gt.width, gt.height, pred.width, pred.height, "mean_pixel_accuracy");
  std::map<int32_t, size_t> dense;
  for (const auto& [id, name] : subset) dense.emplace(id, dense.size());
  std::vector<int64_t> gt_count(dense.size(), 0), correct(dense.size(), 0);
  for (int64_t i = 0; i < gt.size(); ++i) {
    const auto git = dense.find(gt.labels[i]);
    if (git == dense.end()) continue;
    ++gt_count[git->second];
    if (pred.labels[i] == gt.labels[i]) ++correct[git->second];
  }
  MpaBlock block;
  double sum = 0.0;
  for (const auto& [id, name] : subset) {
    const size_t c = dense.at(id);
    MpaEntry e;
    e.id = id;
    e.name = name;
    e.defined = gt_count[c] > 0;
    if (e.defined) {
      e.accuracy = double(correct[c]) / double(gt_count[c]);
      sum += e.accuracy;
      ++block.num_classes;
    }
    block.classes.push_back(std::move(e));
  }
  block.mean = block.num_classes > 0 ? sum / block.num_classes : 0.0;
  return block;
}

// --- Semantic Information Gain ---

struct SigEntry {
  uint16_t sid = 0;
  std::string name;
  bool has_parts = false;
  bool defined = false;  // method B made at least one error on this class
  double sig = 0.0;      // percentage in [0, 100]
};

struct SigReport {
  std::string spec_name;
  std::vector<SigEntry> classes;
  bool msig_defined = false;
  double msig = 0.0;  // mean over defined classes in L^parts
};

// Per class: of the pixels method B got wrong, the percentage method A got
// right. Undefined where B is perfect.
inline SigReport sig(const IdMap& pred_a, const IdMap& pred_b, const IdMap& gt,
                     const DatasetSpec& spec) {
  require_same_shape(pred_a.width, pred_a.height, gt.width, gt.height, "sig");
  require_same_shape(pred_b.width, pred_b.height, gt.width, gt.height, "sig");
  const uint16_t max_sid = spec.max_sid();
  std::vector<int64_t> wrong_b(size_t(max_sid) + 1, 0), recovered(size_t(max_sid) + 1, 0);
  for (int64_t i = 0; i < gt.size(); ++i) {
    const int32_t gl = gt.labels[i];
    if (gl <= 0 || gl > max_sid || !spec.find(uint16_t(gl))) continue;
    if (pred_b.labels[i] == gl) continue;
    ++wrong_b[gl];
    if (pred_a.labels[i] == gl) ++recovered[gl];
  }
  SigReport report;
  report.spec_name = spec.name();
  double sum = 0.0;
  int n = 0;
  for (const auto& c : spec.classes()) {
    if (!c.evaluate) continue;
    SigEntry e;
    e.sid = c.sid;
    e.name = c.name;
    e.has_parts = c.has_parts();
    e.defined = wrong_b[c.sid] > 0;
    if (e.defined) e.sig = 100.0 * double(recovered[c.sid]) / double(wrong_b[c.sid]);
    if (e.defined && e.has_parts) {
      sum += e.sig;
      ++n;
    }
    report.classes.push_back(std::move(e));
  }
  if (n > 0) {
    report.msig_defined = true;
    report.msig = sum / n;
  }
  return report;
}

}  // namespace partpq
