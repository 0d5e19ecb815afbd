#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace partpq;
using testutil::cpp_spec;
using testutil::tiny_spec;

TEST_CASE("the counter rng reproduces draws from (seed, index)", "[harness]") {
  CounterRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.at(7) == b.at(7));
  CHECK(CounterRng(42).at(0) == a.at(0));
  CHECK(CounterRng(43).at(0) != a.at(0));
  CounterRng c(1);
  for (int i = 0; i < 1000; ++i) {
    const double d = c.next_double();
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
  }
}

TEST_CASE("generate_scene is deterministic in the recipe", "[harness]") {
  SceneRecipe recipe;
  recipe.seed = 99;
  recipe.width = 48;
  recipe.height = 32;
  recipe.roster = {{1, 1}, {3, 3}, {4, 2}, {9, 1}};
  recipe.part_coverage = 0.8;
  recipe.perturb = {1, 0.2, 0.2, 0.05, true, true};
  const auto [gt1, pred1] = generate_scene(recipe, tiny_spec());
  const auto [gt2, pred2] = generate_scene(recipe, tiny_spec());
  CHECK(gt1 == gt2);
  CHECK(pred1 == pred2);

  const auto dir = testutil::temp_dir("determinism");
  write_label_map(gt1, (dir / "a").string(), MapFormat::Planar);
  write_label_map(gt2, (dir / "b").string(), MapFormat::Planar);
  CHECK(testutil::slurp((dir / "a_sem.png").string()) ==
        testutil::slurp((dir / "b_sem.png").string()));

  SceneRecipe other = recipe;
  other.seed = 100;
  CHECK(generate_scene(other, tiny_spec()).first != gt1);
}

TEST_CASE("zero perturbation reproduces the ground truth", "[harness]") {
  SceneRecipe recipe;
  recipe.seed = 7;
  recipe.roster = {{3, 2}, {1, 1}, {9, 1}};
  recipe.part_coverage = 0.5;
  const auto [gt, pred] = generate_scene(recipe, tiny_spec());
  CHECK(gt == pred);
}

TEST_CASE("generated scenes always validate", "[harness]") {
  CounterRng rng(2025);
  for (int trial = 0; trial < 200; ++trial) {
    const SceneRecipe recipe = testutil::random_recipe(rng, tiny_spec());
    const auto [gt, pred] = generate_scene(recipe, tiny_spec());
    CHECK(validate_map(gt, tiny_spec()).empty());
    CHECK(validate_map(pred, tiny_spec()).empty());
  }
}

TEST_CASE("recipes validate their inputs", "[harness]") {
  SceneRecipe recipe;
  recipe.roster = {{200, 1}};
  CHECK_THROWS_WITH(validate_recipe(recipe, tiny_spec()),
                    Catch::Matchers::ContainsSubstring("unknown sid 200"));
  recipe.roster = {{3, 1}};
  recipe.width = 2;
  CHECK_THROWS_AS(validate_recipe(recipe, tiny_spec()), EvalError);
  recipe.width = 32;
  recipe.perturb.void_rate = 1.5;
  CHECK_THROWS_AS(validate_recipe(recipe, tiny_spec()), EvalError);
}

TEST_CASE("recipes round-trip through JSON", "[harness]") {
  SceneRecipe recipe;
  recipe.seed = 12345;
  recipe.width = 40;
  recipe.height = 24;
  recipe.roster = {{3, 2}, {1, 1}};
  recipe.part_coverage = 0.75;
  recipe.perturb = {2, 0.1, 0.3, 0.02, true, false};
  const SceneRecipe back = recipe_from_json(recipe_to_json(recipe));
  CHECK(back.seed == recipe.seed);
  CHECK(back.width == recipe.width);
  CHECK(back.height == recipe.height);
  CHECK(back.roster.size() == recipe.roster.size());
  CHECK(back.part_coverage == recipe.part_coverage);
  CHECK(back.perturb == recipe.perturb);
}

TEST_CASE("fixture: exact-half-iou produces no match", "[harness]") {
  const Fixture f = build_fixture("exact-half-iou");
  const DatasetSpec& spec = fixture_spec();
  const MatchResult match = match_segments(extract_segments(f.gt, spec),
                                           extract_segments(f.pred, spec), spec, true);
  const ClassMatch& cm = match.per_class.at(26);
  CHECK(cm.tp.size() == size_t(f.facts.at("tp")));
  CHECK(cm.fp.size() == size_t(f.facts.at("fp")));
  CHECK(cm.fn.size() == size_t(f.facts.at("fn")));
}

TEST_CASE("fixture: partless-gt is ignored during evaluation", "[harness]") {
  const Fixture f = build_fixture("partless-gt");
  const DatasetSpec& spec = fixture_spec();
  const MatchResult match = match_segments(extract_segments(f.gt, spec),
                                           extract_segments(f.pred, spec), spec, true);
  const ClassMatch& cm = match.per_class.at(26);
  CHECK(cm.ignored_gt.size() == size_t(f.facts.at("ignored_gt")));
  CHECK(cm.tp.size() == size_t(f.facts.at("tp")));
  CHECK(cm.fp.size() == size_t(f.facts.at("fp")));
  CHECK(cm.fn.size() == size_t(f.facts.at("fn")));
}

TEST_CASE("fixture: void-heavy absorbs the floating prediction", "[harness]") {
  const Fixture f = build_fixture("void-heavy");
  const DatasetSpec& spec = fixture_spec();
  const AccumulatorMap accs = evaluate_pair(f.gt, f.pred, spec);
  int64_t total_fp = 0, total_fn = 0;
  for (const auto& [sid, acc] : accs) {
    total_fp += acc.fp;
    total_fn += acc.fn;
  }
  CHECK(total_fp == int64_t(f.facts.at("fp")));
  CHECK(total_fn == int64_t(f.facts.at("fn")));
  CHECK(accs.at(7).tp == int64_t(f.facts.at("tp_road")));
}

TEST_CASE("fixture: grouped-pred specializes to the ground truth", "[harness]") {
  const Fixture f = build_fixture("grouped-pred");
  const DatasetSpec& spec = fixture_spec();
  REQUIRE(f.panoptic.has_value());
  REQUIRE(f.parts.has_value());
  CHECK(merge_topdown(*f.panoptic, *f.parts, spec) == f.gt);
  std::set<uint16_t> gids;
  for (uint16_t g : f.parts->gids)
    if (g != 0) gids.insert(g);
  CHECK(gids.size() == size_t(f.facts.at("distinct_gids")));
  CHECK_THROWS_AS(build_fixture("no-such-fixture"), EvalError);
}

TEST_CASE("reference evaluator sanity: perfect and degenerate inputs", "[harness]") {
  CounterRng rng(606);
  SceneRecipe recipe = testutil::random_recipe(rng, tiny_spec(), 0.0);
  recipe.part_coverage = 1.0;
  const auto [gt, pred] = generate_scene(recipe, tiny_spec());
  const EvalReport perfect = reference_evaluate(gt, pred, tiny_spec());
  for (const auto& m : perfect.partpq.classes)
    if (m.defined) CHECK(m.pq == 1.0);

  // with no part classes anywhere, the oracle's PQ mode agrees with its
  // parts mode
  std::vector<SceneClass> classes;
  classes.emplace_back(1, "road", Kind::Stuff);
  classes.emplace_back(3, "car", Kind::Things);
  const DatasetSpec flat("flat", std::move(classes), {});
  SceneRecipe flat_recipe;
  flat_recipe.seed = 5;
  flat_recipe.roster = {{1, 1}, {3, 2}};
  flat_recipe.perturb.boundary_jitter = 1;
  const auto [fgt, fpred] = generate_scene(flat_recipe, flat);
  reference::RefOptions pq_mode;
  pq_mode.parts_aware = false;
  const EvalReport a = reference_evaluate(fgt, fpred, flat);
  const EvalReport b = reference_evaluate(fgt, fpred, flat, pq_mode);
  REQUIRE(a.partpq.classes.size() == b.partpq.classes.size());
  for (size_t i = 0; i < a.partpq.classes.size(); ++i)
    CHECK(a.partpq.classes[i].pq == b.partpq.classes[i].pq);
}
