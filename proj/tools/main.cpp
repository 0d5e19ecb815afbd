#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "partpq/partpq.hpp"

namespace fs = std::filesystem;
using namespace partpq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// PARTPQ_LOG: quiet|error|warn|info|debug (or 0..4). Default warn.
int log_level() {
  static const int level = [] {
    const char* env = std::getenv("PARTPQ_LOG");
    if (!env) return 2;
    const std::string v(env);
    if (v == "quiet" || v == "0") return 0;
    if (v == "error" || v == "1") return 1;
    if (v == "warn" || v == "2") return 2;
    if (v == "info" || v == "3") return 3;
    if (v == "debug" || v == "4") return 4;
    return 2;
  }();
  return level;
}

void log_line(int level, const std::string& msg) {
  if (level <= log_level()) std::cerr << "[partpq] " << msg << "\n";
}

// --- directory pairing by file stem ---

std::string stem_of(const fs::path& p, MapFormat format) {
  const std::string name = p.filename().string();
  if (format == MapFormat::Planar) {
    if (name.ends_with("_sem.png")) return name.substr(0, name.size() - 8);
    return {};
  }
  if (name.ends_with(".png")) return name.substr(0, name.size() - 4);
  if (name.ends_with(".u32")) return name.substr(0, name.size() - 4);
  return {};
}

std::vector<std::string> list_stems(const fs::path& dir, MapFormat format) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::set<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string s = stem_of(entry.path(), format);
    if (!s.empty()) stems.insert(s);
  }
  return {stems.begin(), stems.end()};
}

std::vector<std::string> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest " + path + ": " + e.what());
  }
  if (!j.is_array()) throw IoError("manifest must be a JSON array of stems: " + path);
  std::vector<std::string> stems;
  for (const auto& s : j) stems.push_back(s.get<std::string>());
  std::sort(stems.begin(), stems.end());
  return stems;
}

// Stems must pair 1:1; unpaired stems are listed exhaustively.
std::vector<std::string> pair_stems(const fs::path& a_dir, const fs::path& b_dir, MapFormat format,
                                    const std::string& a_name, const std::string& b_name,
                                    const std::string& manifest) {
  if (!manifest.empty()) return load_manifest(manifest);
  const auto a = list_stems(a_dir, format);
  const auto b = list_stems(b_dir, format);
  std::vector<std::string> only_a, only_b, both;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  if (!only_a.empty() || !only_b.empty()) {
    std::ostringstream os;
    os << "unpaired stems between " << a_name << " and " << b_name << ":";
    for (const auto& s : only_a) os << "\n  only in " << a_name << ": " << s;
    for (const auto& s : only_b) os << "\n  only in " << b_name << ": " << s;
    throw IoError(os.str());
  }
  if (both.empty()) throw IoError("no paired stems found in " + a_dir.string());
  return both;
}

fs::path map_path(const fs::path& dir, const std::string& stem, MapFormat format) {
  return dir / (format == MapFormat::Planar ? stem : stem + ".png");
}

int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

// --- printed tables ---

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%6.1f", v * 100.0);
  return buf;
}

void print_metric_table(const MetricBlock& block, bool per_class) {
  std::printf("%-22s %7s %7s %7s %7s %7s %7s\n", block.metric == "pq" ? "class [PQ]" : "class",
              "PartPQ", "PartSQ", "PartRQ", "TP", "FP", "FN");
  if (per_class) {
    for (const auto& m : block.classes) {
      if (!m.defined) continue;
      std::printf("%-22s %s %s %s %7lld %7lld %7lld\n", m.name.c_str(), pct(m.pq).c_str(),
                  pct(m.sq).c_str(), pct(m.rq).c_str(), (long long)m.tp, (long long)m.fp,
                  (long long)m.fn);
    }
  }
  const std::vector<std::pair<const char*, const char*>> rows = {
      {"All", "All"}, {"P", "Parts"}, {"NP", "No parts"}, {"Things", "Things"}, {"Stuff", "Stuff"}};
  for (const auto& [key, label] : rows) {
    const auto& agg = block.aggregates.at(key);
    std::string name = std::string(label) + " (" + std::to_string(agg.num_classes) + ")";
    std::printf("%-22s %s %s %s\n", name.c_str(), pct(agg.pq).c_str(), pct(agg.sq).c_str(),
                pct(agg.rq).c_str());
  }
}

// --- subcommand configs ---

struct EvalConfig {
  std::string spec_path, gt_dir, pred_dir, output, manifest;
  std::string format = "packed";
  std::string part_universe = "present";
  int workers = default_workers();
  bool per_class = false;
  bool with_miou = false;
};

EvalReport run_directory_eval(const EvalConfig& cfg, bool partpq_metric) {
  const DatasetSpec spec = load_spec_file(cfg.spec_path);
  const MapFormat format = map_format_from_string(cfg.format);
  const auto stems =
      pair_stems(cfg.gt_dir, cfg.pred_dir, format, "ground truth", "prediction", cfg.manifest);
  log_line(3, "evaluating " + std::to_string(stems.size()) + " image pairs with " +
                  std::to_string(cfg.workers) + " workers");

  EvalOptions options;
  options.part_universe = part_universe_from_string(cfg.part_universe);

  std::vector<AccumulatorMap> part_accs(stems.size());
  std::vector<AccumulatorMap> pq_accs(stems.size());
  std::vector<std::pair<IdMap, IdMap>> scene_planes(cfg.with_miou ? stems.size() : 0);
  parallel_for(int64_t(stems.size()), cfg.workers, [&](int64_t i) {
    const LabelMap gt = read_label_map(map_path(cfg.gt_dir, stems[i], format).string(), format, spec);
    const LabelMap pred =
        read_label_map(map_path(cfg.pred_dir, stems[i], format).string(), format, spec);
    const auto violations = validate_map(gt, spec);
    if (!violations.empty())
      throw IoError(stems[i] + ": invalid ground truth, e.g. " + to_string(violations.front()));
    const auto pred_violations = validate_map(pred, spec);
    if (!pred_violations.empty())
      throw IoError(stems[i] + ": invalid prediction, e.g. " + to_string(pred_violations.front()));
    if (partpq_metric) part_accs[i] = evaluate_pair(gt, pred, spec, options);
    pq_accs[i] = evaluate_pq_pair(gt, pred, spec);
    if (cfg.with_miou) scene_planes[i] = {scene_labels(gt), scene_labels(pred)};
  });

  EvalReport report;
  report.spec_name = spec.name();
  if (partpq_metric) {
    report.partpq = finalize(fold_tree(part_accs), spec, "partpq");
    report.pq = finalize(fold_tree(pq_accs), spec, "pq");
  } else {
    report.partpq = finalize(fold_tree(pq_accs), spec, "pq");
  }
  if (cfg.with_miou) {
    std::vector<std::pair<int32_t, std::string>> universe;
    for (const auto& c : spec.classes())
      if (c.evaluate) universe.emplace_back(c.sid, c.name);
    // per-image planes concatenated: mIOU is defined over the whole corpus
    IdMap gt_all, pred_all;
    gt_all.width = pred_all.width = 1;
    for (auto& [g, p] : scene_planes) {
      gt_all.labels.insert(gt_all.labels.end(), g.labels.begin(), g.labels.end());
      pred_all.labels.insert(pred_all.labels.end(), p.labels.begin(), p.labels.end());
    }
    gt_all.height = int(gt_all.labels.size());
    pred_all.height = int(pred_all.labels.size());
    report.miou = semantic_miou(gt_all, pred_all, universe);
  }
  return report;
}

int cmd_evaluate(const EvalConfig& cfg, bool partpq_metric) {
  const EvalReport report = run_directory_eval(cfg, partpq_metric);
  print_metric_table(report.partpq, cfg.per_class);
  if (report.miou) std::printf("%-22s %s\n", "mIOU", pct(report.miou->mean).c_str());
  if (!cfg.output.empty()) {
    write_report(report, cfg.output, report_format_from_path(cfg.output));
    log_line(3, "report written to " + cfg.output);
  }
  return kExitOk;
}

struct MergeConfig {
  std::string spec_path, panoptic_dir, parts_dir, output_dir, grouping;
  std::string strategy = "topdown";
  std::string format = "packed";
  int workers = default_workers();
};

int cmd_merge(const MergeConfig& cfg) {
  const DatasetSpec spec = load_spec_file(cfg.spec_path);
  const MapFormat format = map_format_from_string(cfg.format);
  if (cfg.strategy != "topdown" && cfg.strategy != "conservative")
    throw UsageError("unknown strategy \"" + cfg.strategy + "\" (expected topdown|conservative)");
  if (!fs::is_directory(cfg.parts_dir)) throw IoError("not a directory: " + cfg.parts_dir);

  std::set<std::string> part_stems;
  for (const auto& entry : fs::directory_iterator(cfg.parts_dir)) {
    const std::string name = entry.path().filename().string();
    for (const char* suffix : {"_sem.png", "_part.png", "_gid.png"})
      if (name.ends_with(suffix)) part_stems.insert(name.substr(0, name.size() - strlen(suffix)));
  }
  const auto pan_stems = list_stems(cfg.panoptic_dir, format);
  std::vector<std::string> stems;
  std::set_intersection(pan_stems.begin(), pan_stems.end(), part_stems.begin(), part_stems.end(),
                        std::back_inserter(stems));
  if (stems.size() != pan_stems.size() || stems.size() != part_stems.size()) {
    std::ostringstream os;
    os << "unpaired stems between panoptic and parts directories";
    for (const auto& s : pan_stems)
      if (!part_stems.count(s)) os << "\n  only panoptic: " << s;
    for (const auto& s : part_stems)
      if (!std::binary_search(pan_stems.begin(), pan_stems.end(), s)) os << "\n  only parts: " << s;
    throw IoError(os.str());
  }

  fs::create_directories(cfg.output_dir);
  parallel_for(int64_t(stems.size()), cfg.workers, [&](int64_t i) {
    const std::string& stem = stems[i];
    const LabelMap panoptic =
        read_label_map(map_path(cfg.panoptic_dir, stem, format).string(), format, spec);
    const std::string part_stem = (fs::path(cfg.parts_dir) / stem).string();
    if (part_prediction_is_grouped(part_stem) && cfg.grouping.empty())
      throw IoError(stem + ": grouped parts supplied without --grouping");
    const PartPrediction parts = read_part_prediction(part_stem, cfg.grouping);
    const LabelMap merged = cfg.strategy == "topdown" ? merge_topdown(panoptic, parts, spec)
                                                      : merge_conservative(panoptic, parts, spec);
    write_label_map(merged, map_path(cfg.output_dir, stem, format).string(), format);
  });
  log_line(3, "merged " + std::to_string(stems.size()) + " maps into " + cfg.output_dir);
  return kExitOk;
}

struct RemapConfig {
  std::string spec_path, input_dir, output_dir, grouping;
};

int cmd_remap(const RemapConfig& cfg) {
  const DatasetSpec spec = load_spec_file(cfg.spec_path);
  const PartGrouping* grouping = spec.grouping(cfg.grouping);
  if (!grouping) throw IoError("spec has no grouping named \"" + cfg.grouping + "\"");
  if (!fs::is_directory(cfg.input_dir)) throw IoError("not a directory: " + cfg.input_dir);
  fs::create_directories(cfg.output_dir);
  std::set<std::string> stems;
  for (const auto& entry : fs::directory_iterator(cfg.input_dir)) {
    const std::string name = entry.path().filename().string();
    for (const char* suffix : {"_sem.png", "_part.png"})
      if (name.ends_with(suffix)) stems.insert(name.substr(0, name.size() - strlen(suffix)));
  }
  if (stems.empty()) throw IoError("no ungrouped part predictions in " + cfg.input_dir);
  for (const auto& stem : stems) {
    const std::string in_stem = (fs::path(cfg.input_dir) / stem).string();
    if (grouping->is_identity()) {
      // identity remap is byte-identity on the input files
      for (const char* suffix : {"_sem.png", "_part.png"})
        fs::copy_file(in_stem + suffix, (fs::path(cfg.output_dir) / (stem + suffix)).string(),
                      fs::copy_options::overwrite_existing);
      continue;
    }
    const PartPrediction parts = read_part_prediction(in_stem);
    const PartPrediction grouped = remap_parts(parts, *grouping);
    write_part_prediction(grouped, (fs::path(cfg.output_dir) / stem).string());
  }
  log_line(3, "remapped " + std::to_string(stems.size()) + " predictions");
  return kExitOk;
}

struct SigConfig {
  std::string spec_path, a_dir, b_dir, gt_dir, output;
  std::string format = "packed";
};

IdMap read_scene_plane(const fs::path& dir, const std::string& stem, MapFormat format,
                       const DatasetSpec& spec) {
  const std::string part_stem = (dir / stem).string();
  if (part_prediction_is_grouped(part_stem))
    throw IoError(stem + ": grouped part predictions are ambiguous at scene level; "
                         "use an ungrouped model");
  if (fs::exists(part_stem + "_sem.png") && !fs::exists(part_stem + "_inst.png"))
    return scene_from_parts(read_part_prediction(part_stem), spec);
  return scene_labels(read_label_map(map_path(dir, stem, format).string(), format, spec));
}

int cmd_sig(const SigConfig& cfg) {
  const DatasetSpec spec = load_spec_file(cfg.spec_path);
  const MapFormat format = map_format_from_string(cfg.format);
  const auto stems = pair_stems(cfg.a_dir, cfg.gt_dir, format, "method A", "ground truth", "");

  // Per-class SIG needs the full corpus; concatenate the planes.
  IdMap a_all, b_all, gt_all;
  a_all.width = b_all.width = gt_all.width = 1;
  for (const auto& stem : stems) {
    const IdMap a = read_scene_plane(cfg.a_dir, stem, format, spec);
    const IdMap b = read_scene_plane(cfg.b_dir, stem, format, spec);
    const IdMap gt = scene_labels(read_label_map(map_path(cfg.gt_dir, stem, format).string(),
                                                 format, spec));
    require_same_shape(a.width * a.height, 1, gt.width * gt.height, 1, stem.c_str());
    require_same_shape(b.width * b.height, 1, gt.width * gt.height, 1, stem.c_str());
    a_all.labels.insert(a_all.labels.end(), a.labels.begin(), a.labels.end());
    b_all.labels.insert(b_all.labels.end(), b.labels.begin(), b.labels.end());
    gt_all.labels.insert(gt_all.labels.end(), gt.labels.begin(), gt.labels.end());
  }
  a_all.height = b_all.height = gt_all.height = int(gt_all.labels.size());

  const SigReport a_to_b = sig(a_all, b_all, gt_all, spec);
  const SigReport b_to_a = sig(b_all, a_all, gt_all, spec);
  std::vector<std::pair<int32_t, std::string>> parts_subset;
  for (const auto& c : spec.classes())
    if (c.evaluate && c.has_parts()) parts_subset.emplace_back(c.sid, c.name);
  const MpaBlock mpa_a = mean_pixel_accuracy(gt_all, a_all, parts_subset);
  const MpaBlock mpa_b = mean_pixel_accuracy(gt_all, b_all, parts_subset);
  const MiouBlock miou_a = semantic_miou(gt_all, a_all, parts_subset);
  const MiouBlock miou_b = semantic_miou(gt_all, b_all, parts_subset);

  nlohmann::ordered_json j = sig_report_to_json(a_to_b);
  j["msig_b_to_a"] = b_to_a.msig_defined ? nlohmann::ordered_json(b_to_a.msig)
                                         : nlohmann::ordered_json(nullptr);
  j["method_a"] = {{"mpa", mpa_a.mean}, {"miou", miou_a.mean}};
  j["method_b"] = {{"mpa", mpa_b.mean}, {"miou", miou_b.mean}};

  std::printf("%-22s %7s %7s\n", "", "A", "B");
  std::printf("%-22s %s %s\n", "mPA (parts classes)", pct(mpa_a.mean).c_str(),
              pct(mpa_b.mean).c_str());
  std::printf("%-22s %s %s\n", "mIOU (parts classes)", pct(miou_a.mean).c_str(),
              pct(miou_b.mean).c_str());
  if (a_to_b.msig_defined) std::printf("%-22s %6.1f\n", "mSIG A->B", a_to_b.msig);
  if (b_to_a.msig_defined) std::printf("%-22s %6.1f\n", "mSIG B->A", b_to_a.msig);
  if (!cfg.output.empty()) write_sig_report(j, cfg.output);
  return kExitOk;
}

struct ValidateConfig {
  std::string spec_path, input;
  std::string format = "packed";
};

int cmd_validate(const ValidateConfig& cfg) {
  const DatasetSpec spec = load_spec_file(cfg.spec_path);
  const MapFormat format = map_format_from_string(cfg.format);
  std::vector<std::string> stems;
  fs::path dir;
  if (fs::is_directory(cfg.input)) {
    dir = cfg.input;
    stems = list_stems(dir, format);
  } else {
    dir = fs::path(cfg.input).parent_path();
    stems = {stem_of(fs::path(cfg.input), format)};
    if (stems.front().empty()) throw IoError("not a label-map file: " + cfg.input);
  }
  int64_t total = 0;
  for (const auto& stem : stems) {
    try {
      const LabelMap map = read_label_map(map_path(dir, stem, format).string(), format, spec);
      const auto violations = validate_map(map, spec);
      total += int64_t(violations.size());
      if (violations.empty()) {
        std::printf("%s: ok\n", stem.c_str());
      } else {
        std::printf("%s: %zu violations\n", stem.c_str(), violations.size());
        for (size_t i = 0; i < violations.size() && i < 20; ++i)
          std::printf("  %s\n", to_string(violations[i]).c_str());
        if (violations.size() > 20)
          std::printf("  ... %zu more\n", violations.size() - 20);
      }
    } catch (const IoError& e) {
      ++total;
      std::printf("%s: unreadable (%s)\n", stem.c_str(), e.what());
    }
  }
  return total == 0 ? kExitOk : kExitData;
}

struct SynthConfig {
  std::string spec_path, recipe_path, output_dir;
  std::string roster = "24:2,26:2,7:1";
  uint64_t seed = 1;
  int width = 64, height = 64, count = 1;
  double part_coverage = 1.0, class_flip = 0.0, part_flip = 0.0, void_rate = 0.0;
  int jitter = 0;
  bool split = false, merge = false;
};

SceneRecipe recipe_from_flags(const SynthConfig& cfg) {
  SceneRecipe r;
  r.seed = cfg.seed;
  r.width = cfg.width;
  r.height = cfg.height;
  std::stringstream ss(cfg.roster);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    RosterEntry e;
    e.sid = uint16_t(std::stoi(item.substr(0, colon)));
    e.instances = colon == std::string::npos ? 1 : std::stoi(item.substr(colon + 1));
    r.roster.push_back(e);
  }
  r.part_coverage = cfg.part_coverage;
  r.perturb = {cfg.jitter, cfg.class_flip, cfg.part_flip, cfg.void_rate, cfg.split, cfg.merge};
  return r;
}

int cmd_synth(const SynthConfig& cfg) {
  const DatasetSpec spec = load_spec_file(cfg.spec_path);
  SceneRecipe recipe;
  if (!cfg.recipe_path.empty()) {
    std::ifstream in(cfg.recipe_path);
    if (!in) throw IoError("cannot open recipe: " + cfg.recipe_path);
    nlohmann::json j;
    in >> j;
    recipe = recipe_from_json(j);
  } else {
    recipe = recipe_from_flags(cfg);
  }
  validate_recipe(recipe, spec);
  fs::create_directories(fs::path(cfg.output_dir) / "gt");
  fs::create_directories(fs::path(cfg.output_dir) / "pred");
  for (int i = 0; i < cfg.count; ++i) {
    SceneRecipe r = recipe;
    r.seed = recipe.seed + uint64_t(i);
    const auto [gt, pred] = generate_scene(r, spec);
    char stem[32];
    std::snprintf(stem, sizeof(stem), "scene_%06d", i);
    write_label_map(gt, (fs::path(cfg.output_dir) / "gt" / stem).string(), MapFormat::Planar);
    write_label_map(pred, (fs::path(cfg.output_dir) / "pred" / stem).string(), MapFormat::Planar);
  }
  std::ofstream out(fs::path(cfg.output_dir) / "recipe.json");
  out << recipe_to_json(recipe).dump(2) << "\n";
  log_line(3, "wrote " + std::to_string(cfg.count) + " scene pairs to " + cfg.output_dir);
  return kExitOk;
}

struct ColorizeConfig {
  std::string spec_path, input, output;
  std::string format = "packed";
};

int cmd_colorize(const ColorizeConfig& cfg) {
  const DatasetSpec spec = load_spec_file(cfg.spec_path);
  const MapFormat format = map_format_from_string(cfg.format);
  if (fs::is_directory(cfg.input)) {
    fs::create_directories(cfg.output);
    for (const auto& stem : list_stems(cfg.input, format)) {
      const LabelMap map = read_label_map(map_path(cfg.input, stem, format).string(), format, spec);
      write_colorized(map, (fs::path(cfg.output) / (stem + ".png")).string());
    }
  } else {
    const LabelMap map = read_label_map(cfg.input, format, spec);
    write_colorized(map, cfg.output);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Part-aware panoptic segmentation metrics and tools"};
  app.require_subcommand(1);

  EvalConfig eval_cfg;
  auto add_eval_flags = [&](CLI::App* sub, EvalConfig& cfg) {
    sub->add_option("--spec", cfg.spec_path, "dataset spec JSON")->required();
    sub->add_option("--gt", cfg.gt_dir, "ground-truth directory")->required();
    sub->add_option("--pred", cfg.pred_dir, "prediction directory")->required();
    sub->add_option("--format", cfg.format, "packed|planar");
    sub->add_option("--workers", cfg.workers, "worker threads");
    sub->add_option("--output", cfg.output, "report path (.json or .csv)");
    sub->add_option("--manifest", cfg.manifest, "JSON list of stems to evaluate");
    sub->add_flag("--per-class", cfg.per_class, "print per-class rows");
  };
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "PartPQ over paired directories");
  add_eval_flags(eval_cmd, eval_cfg);
  eval_cmd->add_option("--part-universe", eval_cfg.part_universe,
                       "part classes entering the per-segment mean: present|all");
  eval_cmd->add_flag("--miou", eval_cfg.with_miou, "include a scene-level mIOU block");

  EvalConfig pq_cfg;
  CLI::App* pq_cmd = app.add_subcommand("pq", "plain panoptic quality over paired directories");
  add_eval_flags(pq_cmd, pq_cfg);

  MergeConfig merge_cfg;
  CLI::App* merge_cmd = app.add_subcommand("merge", "merge panoptic and part predictions");
  merge_cmd->add_option("--spec", merge_cfg.spec_path, "dataset spec JSON")->required();
  merge_cmd->add_option("--panoptic", merge_cfg.panoptic_dir, "panoptic maps")->required();
  merge_cmd->add_option("--parts", merge_cfg.parts_dir, "part predictions")->required();
  merge_cmd->add_option("--strategy", merge_cfg.strategy, "topdown|conservative")
      ->check(CLI::IsMember({"topdown", "conservative"}));
  merge_cmd->add_option("--grouping", merge_cfg.grouping, "grouping for grouped part inputs");
  merge_cmd->add_option("--format", merge_cfg.format, "packed|planar");
  merge_cmd->add_option("--workers", merge_cfg.workers, "worker threads");
  merge_cmd->add_option("--output", merge_cfg.output_dir, "output directory")->required();

  RemapConfig remap_cfg;
  CLI::App* remap_cmd = app.add_subcommand("remap", "apply a part grouping to predictions");
  remap_cmd->add_option("--spec", remap_cfg.spec_path, "dataset spec JSON")->required();
  remap_cmd->add_option("--grouping", remap_cfg.grouping, "grouping name")->required();
  remap_cmd->add_option("--input", remap_cfg.input_dir, "ungrouped predictions")->required();
  remap_cmd->add_option("--output", remap_cfg.output_dir, "output directory")->required();

  SigConfig sig_cfg;
  CLI::App* sig_cmd = app.add_subcommand("sig", "semantic information gain between two methods");
  sig_cmd->add_option("--spec", sig_cfg.spec_path, "dataset spec JSON")->required();
  sig_cmd->add_option("--pred-a", sig_cfg.a_dir, "method A predictions")->required();
  sig_cmd->add_option("--pred-b", sig_cfg.b_dir, "method B predictions")->required();
  sig_cmd->add_option("--gt", sig_cfg.gt_dir, "ground-truth label maps")->required();
  sig_cmd->add_option("--format", sig_cfg.format, "packed|planar");
  sig_cmd->add_option("--output", sig_cfg.output, "report path (.json)");

  ValidateConfig validate_cfg;
  CLI::App* validate_cmd = app.add_subcommand("validate", "check label maps against the spec");
  validate_cmd->add_option("--spec", validate_cfg.spec_path, "dataset spec JSON")->required();
  validate_cmd->add_option("--input", validate_cfg.input, "label map file or directory")
      ->required();
  validate_cmd->add_option("--format", validate_cfg.format, "packed|planar");

  SynthConfig synth_cfg;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate synthetic gt/pred scene pairs");
  synth_cmd->add_option("--spec", synth_cfg.spec_path, "dataset spec JSON")->required();
  synth_cmd->add_option("--recipe", synth_cfg.recipe_path, "scene recipe JSON");
  synth_cmd->add_option("--output", synth_cfg.output_dir, "output directory")->required();
  synth_cmd->add_option("--count", synth_cfg.count, "number of scene pairs");
  synth_cmd->add_option("--seed", synth_cfg.seed, "base seed");
  synth_cmd->add_option("--width", synth_cfg.width, "scene width");
  synth_cmd->add_option("--height", synth_cfg.height, "scene height");
  synth_cmd->add_option("--roster", synth_cfg.roster, "sid:count,... painted back to front");
  synth_cmd->add_option("--part-coverage", synth_cfg.part_coverage, "part label coverage [0,1]");
  synth_cmd->add_option("--jitter", synth_cfg.jitter, "boundary jitter radius");
  synth_cmd->add_option("--class-flip", synth_cfg.class_flip, "per-segment class flip rate");
  synth_cmd->add_option("--part-flip", synth_cfg.part_flip, "per-pixel part flip rate");
  synth_cmd->add_option("--void-rate", synth_cfg.void_rate, "per-pixel void injection rate");
  synth_cmd->add_flag("--split", synth_cfg.split, "split some instances");
  synth_cmd->add_flag("--merge-instances", synth_cfg.merge, "merge some instance pairs");

  ColorizeConfig colorize_cfg;
  CLI::App* colorize_cmd = app.add_subcommand("colorize", "render label maps to RGB");
  colorize_cmd->add_option("--spec", colorize_cfg.spec_path, "dataset spec JSON")->required();
  colorize_cmd->add_option("--input", colorize_cfg.input, "label map file or directory")
      ->required();
  colorize_cmd->add_option("--output", colorize_cfg.output, "PNG file or directory")->required();
  colorize_cmd->add_option("--format", colorize_cfg.format, "packed|planar");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints help / error text
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (eval_cmd->parsed()) return cmd_evaluate(eval_cfg, true);
    if (pq_cmd->parsed()) return cmd_evaluate(pq_cfg, false);
    if (merge_cmd->parsed()) return cmd_merge(merge_cfg);
    if (remap_cmd->parsed()) return cmd_remap(remap_cfg);
    if (sig_cmd->parsed()) return cmd_sig(sig_cfg);
    if (validate_cmd->parsed()) return cmd_validate(validate_cfg);
    if (synth_cmd->parsed()) return cmd_synth(synth_cfg);
    if (colorize_cmd->parsed()) return cmd_colorize(colorize_cfg);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
