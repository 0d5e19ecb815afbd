#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "partpq/core.hpp"
#include "partpq/dataset_spec.hpp"
#include "partpq/metrics.hpp"

namespace partpq {

// Naive O(pairs x pixels) re-implementation of the PartPQ pipeline, used as
// the differential-testing oracle. It deliberately avoids the fast path's
// segment index and sparse overlap table: segments are discovered and
// measured by rescanning the full image for every candidate pair, and part
// IOUs by rescanning per part class. Only the public type definitions are
// shared with the fast path.
namespace reference {

struct RefOptions {
  bool parts_aware = true;  // false = plain PQ
  bool require_parts = true;
  PartUniverse part_universe = PartUniverse::Present;
};

namespace detail {

using SegKey = std::pair<uint16_t, uint16_t>;  // (sid, iid); stuff uses kNoInstance

inline bool pixel_in_segment(const LabelTriple& t, const SegKey& key, const DatasetSpec& spec) {
  if (t.is_void() || t.sid != key.first) return false;
  const SceneClass& cls = spec.class_at(t.sid);
  if (!cls.evaluate) return false;
  if (cls.is_stuff()) return key.second == kNoInstance;
  return t.has_instance() && t.iid == key.second;
}

inline bool pixel_ignored(const LabelTriple& t, const DatasetSpec& spec) {
  if (t.is_void()) return true;
  const SceneClass& cls = spec.class_at(t.sid);
  if (!cls.evaluate) return true;
  return cls.is_things() && !t.has_instance();  // crowd
}

inline std::set<SegKey> list_segments(const LabelMap& map, const DatasetSpec& spec) {
  std::set<SegKey> keys;
  for (const auto& t : map.pixels) {
    if (pixel_ignored(t, spec)) continue;
    const SceneClass& cls = spec.class_at(t.sid);
    keys.insert({t.sid, cls.is_stuff() ? kNoInstance : t.iid});
  }
  return keys;
}

inline bool segment_has_part_labels(const LabelMap& map, const SegKey& key,
                                    const DatasetSpec& spec) {
  for (const auto& t : map.pixels)
    if (pixel_in_segment(t, key, spec) && t.has_part()) return true;
  return false;
}

// Mask IOU with ignored gt pixels removed from the prediction.
inline double pair_iou(const LabelMap& gt, const LabelMap& pred, const SegKey& g, const SegKey& p,
                       const DatasetSpec& spec) {
  int64_t inter = 0, g_area = 0, p_area = 0;
  for (int64_t i = 0; i < gt.size(); ++i) {
    const bool in_g = pixel_in_segment(gt.pixels[i], g, spec);
    const bool in_p =
        pixel_in_segment(pred.pixels[i], p, spec) && !pixel_ignored(gt.pixels[i], spec);
    g_area += in_g;
    p_area += in_p;
    inter += in_g && in_p;
  }
  const int64_t uni = g_area + p_area - inter;
  return uni <= 0 ? 0.0 : double(inter) / double(uni);
}

inline double pair_part_iou(const LabelMap& gt, const LabelMap& pred, const SegKey& g,
                            const SegKey& p, const DatasetSpec& spec, PartUniverse universe) {
  const SceneClass& cls = spec.class_at(g.first);
  double sum = 0.0;
  int count = 0;
  // class -1 stands for the synthetic background
  for (int c = -1; c < int(cls.parts.size()); ++c) {
    const uint16_t pid = c < 0 ? kNoPart : cls.parts[size_t(c)].pid;
    int64_t inter = 0, uni = 0;
    for (int64_t i = 0; i < gt.size(); ++i) {
      const bool in_g = pixel_in_segment(gt.pixels[i], g, spec);
      const bool in_p = pixel_in_segment(pred.pixels[i], p, spec);
      if (!in_g && !in_p) continue;
      if (in_g && gt.pixels[i].pid == kNoPart) continue;  // unlabeled gt part: ignored
      bool gt_is_c, pred_is_c;
      if (c < 0) {
        gt_is_c = !in_g;
        pred_is_c = !in_p;
      } else {
        gt_is_c = in_g && gt.pixels[i].pid == pid;
        // predicted part-void matches no class, background included
        pred_is_c = in_p && pred.pixels[i].pid == pid;
      }
      if (gt_is_c && pred_is_c)
        ++inter, ++uni;
      else if (gt_is_c || pred_is_c)
        ++uni;
    }
    if (uni > 0) {
      sum += double(inter) / double(uni);
      ++count;
    } else if (universe == PartUniverse::All && c >= 0) {
      ++count;
    }
  }
  return count == 0 ? 1.0 : sum / count;
}

}  // namespace detail

inline AccumulatorMap accumulate(const LabelMap& gt, const LabelMap& pred, const DatasetSpec& spec,
                                 const RefOptions& options = {}) {
  require_same_shape(gt.width, gt.height, pred.width, pred.height, "reference_evaluate");
  const auto gt_keys = detail::list_segments(gt, spec);
  const auto pred_keys = detail::list_segments(pred, spec);

  std::set<detail::SegKey> ignored_gt;
  if (options.parts_aware && options.require_parts) {
    for (const auto& g : gt_keys)
      if (spec.class_at(g.first).has_parts() && !detail::segment_has_part_labels(gt, g, spec))
        ignored_gt.insert(g);
  }

  std::map<detail::SegKey, detail::SegKey> matched_gt;  // gt -> pred
  std::set<detail::SegKey> matched_pred, dropped_pred;
  std::map<std::pair<detail::SegKey, detail::SegKey>, double> tp_iou;
  for (const auto& g : gt_keys) {
    for (const auto& p : pred_keys) {
      if (g.first != p.first) continue;
      const double iou = detail::pair_iou(gt, pred, g, p, spec);
      if (iou <= 0.5) continue;
      if (ignored_gt.count(g)) {
        dropped_pred.insert(p);
      } else {
        matched_gt.emplace(g, p);
        matched_pred.insert(p);
        tp_iou[{g, p}] = iou;
      }
    }
  }

  AccumulatorMap accs;
  auto acc_for = [&](uint16_t sid) -> ClassAccumulator& {
    auto [it, inserted] = accs.try_emplace(sid);
    if (inserted) it->second.sid = sid;
    return it->second;
  };

  for (const auto& [g, p] : matched_gt) {
    ClassAccumulator& acc = acc_for(g.first);
    ++acc.tp;
    const SceneClass& cls = spec.class_at(g.first);
    if (options.parts_aware && cls.has_parts())
      acc.sum_iou_p += detail::pair_part_iou(gt, pred, g, p, spec, options.part_universe);
    else
      acc.sum_iou_p += tp_iou.at({g, p});
  }
  for (const auto& g : gt_keys)
    if (!matched_gt.count(g) && !ignored_gt.count(g)) ++acc_for(g.first).fn;
  for (const auto& p : pred_keys) {
    if (matched_pred.count(p) || dropped_pred.count(p)) continue;
    int64_t area = 0, on_ignore = 0;
    for (int64_t i = 0; i < pred.size(); ++i) {
      if (!detail::pixel_in_segment(pred.pixels[i], p, spec)) continue;
      ++area;
      on_ignore += detail::pixel_ignored(gt.pixels[i], spec);
    }
    if (2 * on_ignore <= area) ++acc_for(p.first).fp;
  }
  for (auto it = accs.begin(); it != accs.end();) {
    if (it->second.tp + it->second.fp + it->second.fn == 0)
      it = accs.erase(it);
    else
      ++it;
  }
  return accs;
}

// Independent finalization: same formulas, separate arithmetic.
inline MetricBlock finalize(const AccumulatorMap& accs, const DatasetSpec& spec,
                            const std::string& metric_name) {
  MetricBlock block;
  block.metric = metric_name;
  for (const auto& c : spec.classes()) {
    if (!c.evaluate) continue;
    ClassMetrics m;
    m.sid = c.sid;
    m.name = c.name;
    m.kind = c.kind;
    m.has_parts = c.has_parts();
    auto it = accs.find(c.sid);
    if (it != accs.end()) {
      m.tp = it->second.tp;
      m.fp = it->second.fp;
      m.fn = it->second.fn;
      m.defined = true;
      const double denom =
          double(m.tp) + 0.5 * double(m.fp) + 0.5 * double(m.fn);
      m.sq = m.tp > 0 ? it->second.sum_iou_p / double(m.tp) : 0.0;
      m.rq = double(m.tp) / denom;
      m.pq = it->second.sum_iou_p / denom;
    }
    block.classes.push_back(std::move(m));
  }
  for (const char* key : {"All", "P", "NP", "Things", "Stuff"}) {
    AggregateMetrics agg;
    for (const auto& m : block.classes) {
      if (!m.defined) continue;
      const bool in = std::string_view(key) == "All" ||
                      (std::string_view(key) == "P" && m.has_parts) ||
                      (std::string_view(key) == "NP" && !m.has_parts) ||
                      (std::string_view(key) == "Things" && m.kind == Kind::Things) ||
                      (std::string_view(key) == "Stuff" && m.kind == Kind::Stuff);
      if (!in) continue;
      agg.pq += m.pq;
      agg.sq += m.sq;
      agg.rq += m.rq;
      ++agg.num_classes;
    }
    if (agg.num_classes > 0) {
      agg.pq /= agg.num_classes;
      agg.sq /= agg.num_classes;
      agg.rq /= agg.num_classes;
    }
    block.aggregates[key] = agg;
  }
  return block;
}

}  // namespace reference

// The oracle: evaluates one image pair naively and finalizes independently.
inline EvalReport reference_evaluate(const LabelMap& gt, const LabelMap& pred,
                                     const DatasetSpec& spec,
                                     const reference::RefOptions& options = {}) {
  EvalReport report;
  report.spec_name = spec.name();
  report.partpq = reference::finalize(reference::accumulate(gt, pred, spec, options), spec,
                                      options.parts_aware ? "partpq" : "pq");
  return report;
}

}  // namespace partpq
