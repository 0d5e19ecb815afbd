#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "partpq/core.hpp"
#include "partpq/dataset_spec.hpp"
#include "partpq/flat_table.hpp"

namespace partpq {

// All pixels sharing one (sid, iid); need not be connected. Stuff classes
// yield at most one segment per image (iid = kNoInstance).
struct Segment {
  uint16_t sid = 0;
  uint16_t iid = kNoInstance;
  std::vector<int32_t> pixels;  // raster order
  bool has_part_labels = false;

  int64_t area() const { return int64_t(pixels.size()); }
};

// Segments of one map plus the pixels excluded from evaluation (void, crowd
// regions, classes with evaluate = false).
struct SegmentIndex {
  std::vector<Segment> segments;
  std::vector<int32_t> seg_of_pixel;  // -1 where no segment
  std::vector<bool> ignore_mask;      // true on void/crowd/non-evaluated pixels
  int64_t ignore_count = 0;
};

inline SegmentIndex extract_segments(const LabelMap& map, const DatasetSpec& spec) {
  SegmentIndex out;
  const int64_t n = map.size();
  out.seg_of_pixel.assign(n, -1);
  out.ignore_mask.assign(n, false);

  // uid-keyed because (sid, iid) pairs fit in 32 bits only after packing;
  // key = sid << 16 | instance-slot (kNoInstance for stuff).
  detail::FlatTable table(256);
  std::vector<int64_t> areas;
  std::vector<uint64_t> keys;
  std::vector<bool> any_part;

  for (int64_t i = 0; i < n; ++i) {
    const LabelTriple& t = map.pixels[i];
    if (t.is_void()) {
      out.ignore_mask[i] = true;
      ++out.ignore_count;
      continue;
    }
    const SceneClass& c = spec.class_at(t.sid);
    if (!c.evaluate) {
      out.ignore_mask[i] = true;
      ++out.ignore_count;
      continue;
    }
    uint16_t iid = t.iid;
    if (c.is_things()) {
      if (!t.has_instance()) {  // crowd region: ignore, no segment
        out.ignore_mask[i] = true;
        ++out.ignore_count;
        continue;
      }
    } else {
      iid = kNoInstance;  // one segment per stuff class
    }
    const uint64_t key = (uint64_t(t.sid) << 16) | iid;
    uint32_t& slot = table.slot(key);
    if (slot == 0) {
      keys.push_back(key);
      areas.push_back(0);
      any_part.push_back(false);
      slot = uint32_t(keys.size());  // 1-based to keep 0 as "new"
    }
    const uint32_t idx = slot - 1;
    out.seg_of_pixel[i] = int32_t(idx);
    ++areas[idx];
    if (t.has_part()) any_part[idx] = true;
  }

  out.segments.resize(keys.size());
  for (size_t s = 0; s < keys.size(); ++s) {
    out.segments[s].sid = uint16_t(keys[s] >> 16);
    out.segments[s].iid = uint16_t(keys[s] & 0xFFFF);
    out.segments[s].has_part_labels = any_part[s];
    out.segments[s].pixels.reserve(size_t(areas[s]));
  }
  for (int64_t i = 0; i < n; ++i) {
    const int32_t s = out.seg_of_pixel[i];
    if (s >= 0) out.segments[s].pixels.push_back(int32_t(i));
  }
  return out;
}

// |A∩B| / |A∪B| with ignored pixels removed from the predicted segment
// before both terms. Returns 0 when the union empties out.
inline double instance_iou(const Segment& gt, const Segment& pred,
                           const std::vector<bool>& ignore_mask) {
  int64_t inter = 0;
  int64_t pred_kept = 0;
  size_t ia = 0, ib = 0;
  while (ib < pred.pixels.size()) {
    const int32_t pb = pred.pixels[ib];
    if (!ignore_mask.empty() && ignore_mask[pb]) {
      ++ib;
      continue;
    }
    ++pred_kept;
    while (ia < gt.pixels.size() && gt.pixels[ia] < pb) ++ia;
    if (ia < gt.pixels.size() && gt.pixels[ia] == pb) ++inter;
    ++ib;
  }
  const int64_t uni = gt.area() + pred_kept - inter;
  return uni <= 0 ? 0.0 : double(inter) / double(uni);
}

struct TpPair {
  int32_t gt = -1;    // index into the gt SegmentIndex
  int32_t pred = -1;  // index into the pred SegmentIndex
  double iou = 0.0;
};

struct ClassMatch {
  uint16_t sid = 0;
  std::vector<TpPair> tp;
  std::vector<int32_t> fp;            // unmatched pred segments
  std::vector<int32_t> fn;            // unmatched gt segments
  std::vector<int32_t> ignored_gt;    // part-less gt segments dropped from evaluation
  std::vector<int32_t> ignored_pred;  // preds matched to an ignored gt
  std::vector<int32_t> absorbed_pred; // preds with > 1/2 of their area on ignore pixels
};

struct MatchResult {
  std::map<uint16_t, ClassMatch> per_class;

  ClassMatch& at(uint16_t sid) {
    auto [it, inserted] = per_class.try_emplace(sid);
    if (inserted) it->second.sid = sid;
    return it->second;
  }
};

// TP/FP/FN matching at strict IOU > 0.5 with the PQ void conventions: the gt
// ignore set (void + crowd + non-evaluated) is removed from predictions, and
// an unmatched prediction mostly covered by it is absorbed rather than
// counted as a false positive. With require_parts, gt segments of L^parts
// classes that carry no part labels are excluded, together with any
// prediction matched to them.
inline MatchResult match_segments(const SegmentIndex& gt, const SegmentIndex& pred,
                                  const DatasetSpec& spec, bool require_parts) {
  const size_t n_gt = gt.segments.size();
  const size_t n_pred = pred.segments.size();

  // One pass over pixels: sparse (gt segment, pred segment) overlap counts.
  // Slot 0 on the gt side stands for the ignore set.
  detail::FlatTable joint(std::max<size_t>(256, (n_gt + n_pred) * 4));
  const int64_t n = int64_t(gt.seg_of_pixel.size());
  for (int64_t i = 0; i < n; ++i) {
    const int32_t p = pred.seg_of_pixel[i];
    if (p < 0) continue;
    const int32_t g = gt.ignore_mask[i] ? -1 : gt.seg_of_pixel[i];
    ++joint.slot((uint64_t(uint32_t(g + 1)) << 32) | uint32_t(p + 1));
  }

  std::vector<int64_t> pred_ignore_overlap(n_pred, 0);
  struct Overlap {
    uint32_t g, p;
    int64_t count;
  };
  std::vector<Overlap> overlaps;
  overlaps.reserve(joint.size());
  joint.for_each([&](uint64_t key, uint32_t count) {
    const uint32_t gk = uint32_t(key >> 32);
    const uint32_t pk = uint32_t(key & 0xFFFFFFFF);
    if (gk == 0)
      pred_ignore_overlap[pk - 1] += count;
    else
      overlaps.push_back({gk - 1, pk - 1, count});
  });
  // Deterministic order regardless of hash table layout.
  std::sort(overlaps.begin(), overlaps.end(), [](const Overlap& a, const Overlap& b) {
    return a.g != b.g ? a.g < b.g : a.p < b.p;
  });

  MatchResult result;
  for (const auto& seg : gt.segments) result.at(seg.sid);
  for (const auto& seg : pred.segments) result.at(seg.sid);

  std::vector<int8_t> gt_state(n_gt, 0);    // 0 free, 1 matched, 2 ignored-matched
  std::vector<int8_t> pred_state(n_pred, 0);
  std::vector<bool> gt_is_ignored(n_gt, false);
  if (require_parts) {
    for (size_t g = 0; g < n_gt; ++g) {
      const SceneClass& c = spec.class_at(gt.segments[g].sid);
      if (c.has_parts() && !gt.segments[g].has_part_labels) gt_is_ignored[g] = true;
    }
  }

  for (const auto& o : overlaps) {
    const Segment& gs = gt.segments[o.g];
    const Segment& ps = pred.segments[o.p];
    if (gs.sid != ps.sid) continue;
    const int64_t pred_eff = ps.area() - pred_ignore_overlap[o.p];
    const int64_t uni = gs.area() + pred_eff - o.count;
    if (uni <= 0 || 2 * o.count <= uni) continue;  // strict IOU > 0.5
    if (gt_state[o.g] != 0 || pred_state[o.p] != 0)
      throw std::logic_error("segment matched twice at IOU > 0.5");
    if (gt_is_ignored[o.g]) {
      gt_state[o.g] = 2;
      pred_state[o.p] = 2;
      result.at(gs.sid).ignored_pred.push_back(int32_t(o.p));
    } else {
      gt_state[o.g] = 1;
      pred_state[o.p] = 1;
      result.at(gs.sid).tp.push_back({int32_t(o.g), int32_t(o.p), double(o.count) / double(uni)});
    }
  }

  for (size_t g = 0; g < n_gt; ++g) {
    if (gt_is_ignored[g])
      result.at(gt.segments[g].sid).ignored_gt.push_back(int32_t(g));
    else if (gt_state[g] == 0)
      result.at(gt.segments[g].sid).fn.push_back(int32_t(g));
  }
  for (size_t p = 0; p < n_pred; ++p) {
    if (pred_state[p] != 0) continue;
    auto& cm = result.at(pred.segments[p].sid);
    if (2 * pred_ignore_overlap[p] > pred.segments[p].area())
      cm.absorbed_pred.push_back(int32_t(p));
    else
      cm.fp.push_back(int32_t(p));
  }
  return result;
}

}  // namespace partpq
