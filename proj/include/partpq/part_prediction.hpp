#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "partpq/core.hpp"

namespace partpq {

enum class PartLabelMode { Ungrouped, Grouped };

// A part-segmentation prediction: per pixel either an ungrouped (sid, pid)
// pair, or a group id under a named PartGrouping. 0 is background/void in
// every plane.
struct PartPrediction {
  int width = 0;
  int height = 0;
  PartLabelMode mode = PartLabelMode::Ungrouped;
  std::vector<uint16_t> sids;  // ungrouped only
  std::vector<uint16_t> pids;  // ungrouped only
  std::vector<uint16_t> gids;  // grouped only
  std::string grouping;        // grouped only: name of the active PartGrouping

  int64_t size() const { return int64_t(width) * height; }

  static PartPrediction ungrouped(int w, int h) {
    PartPrediction p;
    p.width = w;
    p.height = h;
    p.mode = PartLabelMode::Ungrouped;
    p.sids.assign(size_t(w) * h, 0);
    p.pids.assign(size_t(w) * h, 0);
    return p;
  }

  static PartPrediction grouped(int w, int h, std::string grouping_name) {
    PartPrediction p;
    p.width = w;
    p.height = h;
    p.mode = PartLabelMode::Grouped;
    p.gids.assign(size_t(w) * h, 0);
    p.grouping = std::move(grouping_name);
    return p;
  }

  friend bool operator==(const PartPrediction&, const PartPrediction&) = default;
};

}  // namespace partpq
