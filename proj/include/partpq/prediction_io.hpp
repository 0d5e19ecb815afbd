#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "partpq/core.hpp"
#include "partpq/part_prediction.hpp"
#include "partpq/png_io.hpp"

namespace partpq {

// On-disk part predictions: ungrouped maps are two 16-bit planes
// <stem>_sem.png / <stem>_part.png (0 = background/void), grouped maps a
// single <stem>_gid.png. The grouping itself comes from the dataset spec.

inline std::vector<std::string> write_part_prediction(const PartPrediction& parts,
                                                      const std::string& stem) {
  if (parts.mode == PartLabelMode::Ungrouped) {
    GrayImage16 sem(parts.width, parts.height), part(parts.width, parts.height);
    for (int64_t i = 0; i < parts.size(); ++i) {
      sem.samples[i] = parts.sids[i];
      part.samples[i] = parts.pids[i];
    }
    const std::string sem_path = stem + "_sem.png";
    const std::string part_path = stem + "_part.png";
    write_png16(sem_path, sem);
    write_png16(part_path, part);
    return {sem_path, part_path};
  }
  GrayImage16 gid(parts.width, parts.height);
  for (int64_t i = 0; i < parts.size(); ++i) gid.samples[i] = parts.gids[i];
  const std::string gid_path = stem + "_gid.png";
  write_png16(gid_path, gid);
  return {gid_path};
}

inline bool part_prediction_is_grouped(const std::string& stem) {
  return std::filesystem::exists(stem + "_gid.png");
}

inline PartPrediction read_part_prediction(const std::string& stem,
                                           const std::string& grouping_name = {}) {
  if (part_prediction_is_grouped(stem)) {
    if (grouping_name.empty())
      throw IoError(stem + ": grouped part prediction requires a grouping name");
    GrayImage16 gid = read_png16(stem + "_gid.png");
    PartPrediction parts = PartPrediction::grouped(gid.width, gid.height, grouping_name);
    for (int64_t i = 0; i < parts.size(); ++i) parts.gids[i] = gid.samples[i];
    return parts;
  }
  GrayImage16 sem = read_png16(stem + "_sem.png");
  GrayImage16 part = read_png16(stem + "_part.png");
  if (sem.width != part.width || sem.height != part.height)
    throw IoError(stem + ": part plane " + std::to_string(part.width) + "x" +
                  std::to_string(part.height) + " does not match semantic plane " +
                  std::to_string(sem.width) + "x" + std::to_string(sem.height));
  PartPrediction parts = PartPrediction::ungrouped(sem.width, sem.height);
  for (int64_t i = 0; i < parts.size(); ++i) {
    parts.sids[i] = sem.samples[i] == kPlanarNone ? 0 : sem.samples[i];
    parts.pids[i] = part.samples[i] == kPlanarNone ? 0 : part.samples[i];
  }
  return parts;
}

}  // namespace partpq
