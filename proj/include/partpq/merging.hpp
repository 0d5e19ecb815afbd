#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "partpq/core.hpp"
#include "partpq/dataset_spec.hpp"
#include "partpq/part_prediction.hpp"

namespace partpq {

namespace detail {

// (gid, sid) -> pid specialization table. A group with two parts of the same
// scene class cannot be specialized and is rejected.
inline std::unordered_map<uint32_t, uint16_t> build_specialization(const PartGrouping& grouping) {
  std::unordered_map<uint32_t, uint16_t> table;
  for (const auto& group : grouping.groups) {
    for (const auto& [sid, pid] : group.members) {
      const uint32_t key = uint32_t(group.gid) << 16 | sid;
      if (!table.emplace(key, pid).second)
        throw EvalError("grouping \"" + grouping.name + "\": gid " + std::to_string(group.gid) +
                        " has two members for sid " + std::to_string(sid) +
                        " and cannot be specialized");
    }
  }
  return table;
}

enum class MergeStrategy { TopDown, Conservative };

inline LabelMap merge(const LabelMap& panoptic, const PartPrediction& parts,
                      const DatasetSpec& spec, MergeStrategy strategy) {
  require_same_shape(panoptic.width, panoptic.height, parts.width, parts.height, "merge");
  const PartGrouping* grouping = nullptr;
  std::unordered_map<uint32_t, uint16_t> specialize;
  if (parts.mode == PartLabelMode::Grouped) {
    grouping = spec.grouping(parts.grouping);
    if (!grouping)
      throw EvalError("part prediction references unknown grouping \"" + parts.grouping + "\"");
    specialize = build_specialization(*grouping);
  }

  LabelMap out(panoptic.width, panoptic.height);
  for (int64_t i = 0; i < panoptic.size(); ++i) {
    const LabelTriple pan = panoptic.pixels[i];
    out.pixels[i] = pan;
    if (pan.is_void()) continue;
    const SceneClass& cls = spec.class_at(pan.sid);
    if (!cls.has_parts()) continue;
    // Crowd pixels of a things class cannot carry a part label.
    if (cls.is_things() && !pan.has_instance()) continue;

    // Resolve the part prediction against the segment's scene class.
    uint16_t pid = kNoPart;
    bool incompatible = false;
    if (parts.mode == PartLabelMode::Ungrouped) {
      const uint16_t psid = parts.sids[i];
      if (psid == 0) {
        // background: the part model asserts no part here
      } else if (psid == pan.sid) {
        const uint16_t ppid = parts.pids[i];
        pid = (ppid != kNoPart && cls.part_index(ppid) >= 0) ? ppid : kNoPart;
      } else {
        incompatible = true;
      }
    } else {
      const uint16_t gid = parts.gids[i];
      if (gid != 0) {
        auto it = specialize.find(uint32_t(gid) << 16 | pan.sid);
        if (it != specialize.end())
          pid = it->second;
        else
          incompatible = true;
      }
    }

    if (incompatible && strategy == MergeStrategy::Conservative) {
      out.pixels[i] = make_void();  // the pixel leaves its panoptic segment
    } else {
      out.pixels[i].pid = pid;
    }
  }
  return out;
}

}  // namespace detail

// §-style top-down merge: the panoptic prediction wins; part predictions
// incompatible with the segment's scene class become part-void.
inline LabelMap merge_topdown(const LabelMap& panoptic, const PartPrediction& parts,
                              const DatasetSpec& spec) {
  return detail::merge(panoptic, parts, spec, detail::MergeStrategy::TopDown);
}

// Conservative merge: panoptic and part predictions must agree on the scene
// class; where they conflict the pixel is voided at both levels.
inline LabelMap merge_conservative(const LabelMap& panoptic, const PartPrediction& parts,
                                   const DatasetSpec& spec) {
  return detail::merge(panoptic, parts, spec, detail::MergeStrategy::Conservative);
}

enum class RemapDirection { Group, IdentityCheck };

// Replaces each ungrouped (sid, pid) with its group id, or verifies the
// grouping is the identity and passes the input through unchanged.
inline PartPrediction remap_parts(const PartPrediction& input, const PartGrouping& grouping,
                                  RemapDirection direction = RemapDirection::Group) {
  if (input.mode != PartLabelMode::Ungrouped)
    throw EvalError("remap_parts expects an ungrouped part prediction");
  if (direction == RemapDirection::IdentityCheck) {
    if (!grouping.is_identity())
      throw EvalError("grouping \"" + grouping.name + "\" is not an identity grouping");
    return input;
  }
  PartPrediction out = PartPrediction::grouped(input.width, input.height, grouping.name);
  for (int64_t i = 0; i < input.size(); ++i) {
    const uint16_t sid = input.sids[i];
    const uint16_t pid = input.pids[i];
    if (sid == 0 || pid == kNoPart) continue;  // background / part-void stays 0
    const int gid = grouping.gid_for(sid, pid);
    if (gid < 0)
      throw EvalError("grouping \"" + grouping.name + "\" has no group for (sid " +
                      std::to_string(sid) + ", pid " + std::to_string(pid) + ")");
    out.gids[i] = uint16_t(gid);
  }
  return out;
}

}  // namespace partpq
