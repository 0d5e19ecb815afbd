#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace partpq;
using testutil::cpp_spec;
using testutil::fill_rect;
using testutil::tiny_spec;

namespace {

// gt: one car over pixels 0..7 (wheel on 0-1, chassis on 2-7);
// pred: car over 0-5 and 8-9 (wheel on 0, chassis elsewhere).
struct HandCase {
  LabelMap gt{8, 2}, pred{8, 2};
  Segment g, p;
  HandCase() {
    for (int x = 0; x < 8; ++x) gt.at(x, 0) = make_label(26, 0, x < 2 ? 2 : 5);
    for (int x = 0; x < 6; ++x) pred.at(x, 0) = make_label(26, 0, x < 1 ? 2 : 5);
    pred.at(0, 1) = make_label(26, 0, 5);
    pred.at(1, 1) = make_label(26, 0, 5);
    g.sid = p.sid = 26;
    g.iid = p.iid = 0;
    for (int x = 0; x < 8; ++x) g.pixels.push_back(x);
    for (int x = 0; x < 6; ++x) p.pixels.push_back(x);
    p.pixels.push_back(8);
    p.pixels.push_back(9);
    g.has_part_labels = p.has_part_labels = true;
  }
};

}  // namespace

TEST_CASE("part_iou on the two-part hand case", "[metrics]") {
  const HandCase h;
  const SceneClass& car = cpp_spec().class_at(26);
  // wheel 1/2, chassis 4/9, background 0/4
  CHECK(part_iou(h.g, h.p, h.gt, h.pred, car) == Catch::Approx(17.0 / 54.0).epsilon(1e-12));
}

TEST_CASE("part_iou degenerate cases", "[metrics]") {
  const SceneClass& car = cpp_spec().class_at(26);
  LabelMap gt(8, 1), pred(8, 1);
  Segment g, p;
  g.sid = p.sid = 26;
  g.iid = p.iid = 0;
  for (int x = 0; x < 8; ++x) {
    gt.at(x, 0) = make_label(26, 0, 2);
    g.pixels.push_back(x);
    p.pixels.push_back(x);
  }
  SECTION("identical masks and labels score 1") {
    pred = gt;
    CHECK(part_iou(g, p, gt, pred, car) == 1.0);
  }
  SECTION("pred all part-void scores 0: misses, not false positives") {
    for (int x = 0; x < 8; ++x) pred.at(x, 0) = make_label(26, 0);
    CHECK(part_iou(g, p, gt, pred, car) == 0.0);
  }
  SECTION("asymmetric by design once part-void is involved") {
    for (int x = 0; x < 8; ++x) pred.at(x, 0) = make_label(26, 0);
    const double forward = part_iou(g, p, gt, pred, car);
    // reversed: every gt pixel is part-void, hence ignored
    const double backward = part_iou(p, g, pred, gt, car);
    CHECK(forward == 0.0);
    CHECK(backward == 1.0);
  }
}

TEST_CASE("part universe option: present vs all", "[metrics]") {
  const SceneClass& car = cpp_spec().class_at(26);
  LabelMap gt(10, 1), pred(10, 1);
  Segment g, p;
  g.sid = p.sid = 26;
  g.iid = p.iid = 0;
  for (int x = 0; x < 10; ++x) {
    gt.at(x, 0) = make_label(26, 0, x < 5 ? 2 : 5);  // wheel + chassis only
    g.pixels.push_back(x);
    p.pixels.push_back(x);
  }
  pred = gt;
  CHECK(part_iou(g, p, gt, pred, car, PartUniverse::Present) == 1.0);
  // window, light, license plate are absent and count as 0 under "all"
  CHECK(part_iou(g, p, gt, pred, car, PartUniverse::All) == Catch::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("evaluate_pair on a constructed single-class scene", "[metrics]") {
  LabelMap gt(16, 4), pred(16, 4);
  fill_rect(gt, 0, 0, 16, 4, make_label(7));  // road background
  fill_rect(pred, 0, 0, 16, 4, make_label(7));
  // tp pair: identical mask, 8 of 10 wheel pixels predicted, 2 part-void
  for (int x = 0; x < 10; ++x) {
    gt.at(x, 0) = make_label(26, 0, 2);
    pred.at(x, 0) = make_label(26, 0, x < 8 ? 2 : 0);
  }
  // false positive: a second car on road pixels
  fill_rect(pred, 2, 2, 6, 3, make_label(26, 1, 2));

  const AccumulatorMap accs = evaluate_pair(gt, pred, cpp_spec());
  const ClassAccumulator& car = accs.at(26);
  CHECK(car.tp == 1);
  CHECK(car.fp == 1);
  CHECK(car.fn == 0);
  CHECK(car.sum_iou_p == Catch::Approx(0.8).epsilon(1e-12));

  const MetricBlock block = finalize(accs, cpp_spec());
  const auto car_row = std::find_if(block.classes.begin(), block.classes.end(),
                                    [](const ClassMetrics& m) { return m.sid == 26; });
  REQUIRE(car_row != block.classes.end());
  CHECK(car_row->pq == Catch::Approx(0.8 / 1.5).epsilon(1e-12));
  CHECK(car_row->sq == Catch::Approx(0.8).epsilon(1e-12));
  CHECK(car_row->rq == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("perfect prediction scores 1 on every defined class", "[metrics]") {
  CounterRng rng(31);
  SceneRecipe recipe = testutil::random_recipe(rng, tiny_spec(), 0.0);
  recipe.part_coverage = 1.0;
  recipe.perturb = {};
  const auto [gt, pred] = generate_scene(recipe, tiny_spec());
  const MetricBlock block = finalize(evaluate_pair(gt, pred, tiny_spec()), tiny_spec());
  int defined = 0;
  for (const auto& m : block.classes) {
    if (!m.defined) continue;
    ++defined;
    CHECK(m.pq == 1.0);
    CHECK(m.fp == 0);
    CHECK(m.fn == 0);
  }
  CHECK(defined > 0);
}

TEST_CASE("combine is a commutative monoid with a zero", "[metrics]") {
  const ClassAccumulator a{26, 3, 1, 2, 2.25};
  const ClassAccumulator b{26, 1, 0, 4, 0.75};
  const ClassAccumulator zero{26, 0, 0, 0, 0.0};
  const ClassAccumulator ab = combine(a, b);
  CHECK(ab.tp == 4);
  CHECK(ab.fp == 1);
  CHECK(ab.fn == 6);
  CHECK(ab.sum_iou_p == 3.0);
  const ClassAccumulator ba = combine(b, a);
  CHECK(ab.tp == ba.tp);
  CHECK(ab.sum_iou_p == ba.sum_iou_p);
  const ClassAccumulator az = combine(a, zero);
  CHECK(az.tp == a.tp);
  CHECK(az.sum_iou_p == a.sum_iou_p);
  CHECK_THROWS_AS(combine(a, ClassAccumulator{27, 0, 0, 0, 0.0}), EvalError);
}

TEST_CASE("per-image accumulators fold to the dataset totals", "[metrics]") {
  CounterRng rng(77);
  std::vector<AccumulatorMap> per_image;
  AccumulatorMap sequential;
  for (int i = 0; i < 10; ++i) {
    const SceneRecipe recipe = testutil::random_recipe(rng, tiny_spec());
    const auto [gt, pred] = generate_scene(recipe, tiny_spec());
    per_image.push_back(evaluate_pair(gt, pred, tiny_spec()));
    sequential = combine(sequential, per_image.back());
  }
  const AccumulatorMap folded = fold_tree(per_image);
  REQUIRE(folded.size() == sequential.size());
  for (const auto& [sid, acc] : folded) {
    const ClassAccumulator& other = sequential.at(sid);
    CHECK(acc.tp == other.tp);
    CHECK(acc.fp == other.fp);
    CHECK(acc.fn == other.fn);
    CHECK(acc.sum_iou_p == Catch::Approx(other.sum_iou_p).margin(1e-9));
  }
}

TEST_CASE("finalize marks empty classes undefined and excludes them", "[metrics]") {
  AccumulatorMap accs;
  accs.emplace(26, ClassAccumulator{26, 1, 0, 0, 1.0});
  const MetricBlock block = finalize(accs, cpp_spec());
  for (const auto& m : block.classes) {
    if (m.sid == 26) {
      CHECK(m.defined);
    } else {
      CHECK_FALSE(m.defined);
    }
  }
  CHECK(block.aggregates.at("All").num_classes == 1);
  CHECK(block.aggregates.at("All").pq == 1.0);
  CHECK(block.aggregates.at("P").num_classes == 1);
  CHECK(block.aggregates.at("NP").num_classes == 0);
}

TEST_CASE("with no part classes, PartPQ and PQ coincide exactly", "[metrics]") {
  std::vector<SceneClass> classes;
  classes.emplace_back(1, "road", Kind::Stuff);
  classes.emplace_back(2, "sky", Kind::Stuff);
  classes.emplace_back(3, "car", Kind::Things);
  const DatasetSpec spec("no-parts", std::move(classes), {});
  CounterRng rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    const SceneRecipe recipe = testutil::random_recipe(rng, spec);
    const auto [gt, pred] = generate_scene(recipe, spec);
    const MetricBlock a = finalize(evaluate_pair(gt, pred, spec), spec);
    const MetricBlock b = finalize(evaluate_pq_pair(gt, pred, spec), spec, "pq");
    REQUIRE(a.classes.size() == b.classes.size());
    for (size_t i = 0; i < a.classes.size(); ++i) {
      CHECK(a.classes[i].pq == b.classes[i].pq);
      CHECK(a.classes[i].sq == b.classes[i].sq);
      CHECK(a.classes[i].rq == b.classes[i].rq);
      CHECK(a.classes[i].tp == b.classes[i].tp);
    }
  }
}

TEST_CASE("semantic_miou from the confusion matrix", "[metrics]") {
  const std::vector<std::pair<int32_t, std::string>> universe = {{1, "A"}, {2, "B"}, {3, "C"}};
  SECTION("identical maps") {
    IdMap m(2, 2);
    m.labels = {1, 1, 2, 2};
    const MiouBlock block = semantic_miou(m, m, universe);
    CHECK(block.mean == 1.0);
    CHECK(block.num_classes == 2);  // C absent from both: excluded
  }
  SECTION("disjoint single-class maps") {
    IdMap gt(2, 1), pred(2, 1);
    gt.labels = {1, 1};
    pred.labels = {2, 2};
    CHECK(semantic_miou(gt, pred, universe).mean == 0.0);
  }
  SECTION("hand confusion case") {
    IdMap gt(2, 2), pred(2, 2);
    gt.labels = {1, 1, 2, 2};
    pred.labels = {1, 2, 2, 2};
    // IOU(A) = 1/2, IOU(B) = 2/3
    CHECK(semantic_miou(gt, pred, universe).mean == Catch::Approx(7.0 / 12.0).epsilon(1e-12));
  }
  SECTION("gt void pixels are excluded") {
    IdMap gt(2, 2), pred(2, 2);
    gt.labels = {1, 1, 0, 0};
    pred.labels = {1, 1, 2, 2};  // predictions on void cost nothing
    const MiouBlock block = semantic_miou(gt, pred, universe);
    CHECK(block.mean == 1.0);
    CHECK(block.num_classes == 1);
  }
}

TEST_CASE("mean pixel accuracy is recall-style per class", "[metrics]") {
  const std::vector<std::pair<int32_t, std::string>> subset = {{1, "A"}, {2, "B"}};
  IdMap gt(10, 1), pred(10, 1);
  gt.labels = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  pred.labels = {1, 1, 1, 1, 1, 1, 1, 2, 2, 2};
  const MpaBlock block = mean_pixel_accuracy(gt, pred, subset);
  CHECK(block.classes[0].accuracy == Catch::Approx(0.7).epsilon(1e-12));
  CHECK_FALSE(block.classes[1].defined);  // B absent from gt: excluded
  CHECK(block.num_classes == 1);
  CHECK(block.mean == Catch::Approx(0.7).epsilon(1e-12));

  const MpaBlock perfect = mean_pixel_accuracy(gt, gt, subset);
  CHECK(perfect.mean == 1.0);
}

TEST_CASE("SIG measures errors of B recovered by A", "[metrics]") {
  const DatasetSpec& spec = tiny_spec();
  IdMap gt(20, 1), a(20, 1), b(20, 1);
  // 10 car (sid 3) pixels wrong in B, A correct on 4 of them
  for (int i = 0; i < 20; ++i) gt.labels[i] = 3;
  for (int i = 0; i < 20; ++i) b.labels[i] = i < 10 ? 1 : 3;
  for (int i = 0; i < 20; ++i) a.labels[i] = i < 4 ? 3 : (i < 10 ? 2 : 3);
  const SigReport report = sig(a, b, gt, spec);
  const auto car = std::find_if(report.classes.begin(), report.classes.end(),
                                [](const SigEntry& e) { return e.sid == 3; });
  REQUIRE(car != report.classes.end());
  CHECK(car->defined);
  CHECK(car->sig == 40.0);
  CHECK(report.msig_defined);
  CHECK(report.msig == 40.0);  // only car is defined among L^parts classes

  SECTION("a method gains nothing over itself") {
    const SigReport self = sig(b, b, gt, spec);
    for (const auto& e : self.classes)
      if (e.defined) CHECK(e.sig == 0.0);
  }
  SECTION("perfect B leaves SIG undefined") {
    const SigReport none = sig(a, gt, gt, spec);
    for (const auto& e : none.classes) CHECK_FALSE(e.defined);
    CHECK_FALSE(none.msig_defined);
  }
}

TEST_CASE("scene_from_parts projects ungrouped labels to scene ids", "[metrics]") {
  const DatasetSpec& spec = cpp_spec();
  PartPrediction parts = PartPrediction::ungrouped(3, 1);
  parts.sids = {24, 26, 26};
  parts.pids = {2, 2, 0};  // person-head, car-wheel, car part-void
  const IdMap scene = scene_from_parts(parts, spec);
  CHECK(scene.labels == std::vector<int32_t>{24, 26, 26});

  PartPrediction grouped = PartPrediction::grouped(2, 1, "cpp9");
  grouped.gids = {6, 6};
  CHECK_THROWS_WITH(scene_from_parts(grouped, spec),
                    Catch::Matchers::ContainsSubstring("ambiguous scene class"));
}

TEST_CASE("PartPQ decomposes into PartSQ times PartRQ", "[metrics]") {
  CounterRng rng(55);
  for (int trial = 0; trial < 40; ++trial) {
    const SceneRecipe recipe = testutil::random_recipe(rng, tiny_spec());
    const auto [gt, pred] = generate_scene(recipe, tiny_spec());
    const MetricBlock block = finalize(evaluate_pair(gt, pred, tiny_spec()), tiny_spec());
    for (const auto& m : block.classes) {
      if (m.tp > 0) CHECK(std::abs(m.pq - m.sq * m.rq) < 1e-12);
      CHECK(m.pq >= 0.0);
      CHECK(m.pq <= 1.0);
      CHECK(m.sq >= 0.0);
      CHECK(m.sq <= 1.0);
      CHECK(m.rq >= 0.0);
      CHECK(m.rq <= 1.0);
    }
  }
}

TEST_CASE("evaluation rejects mismatched dimensions", "[metrics]") {
  LabelMap a(8, 8), b(8, 4);
  CHECK_THROWS_AS(evaluate_pair(a, b, tiny_spec()), EvalError);
  IdMap x(4, 4), y(2, 2);
  CHECK_THROWS_AS(semantic_miou(x, y, {{1, "A"}}), EvalError);
  CHECK_THROWS_AS(sig(x, x, y, tiny_spec()), EvalError);
}
