#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "feb/eval.hpp"

using namespace feb;

namespace {

// Tiny linearly separable problem over one numeric property.
struct Separable {
  KnowledgeBase kb;
  TrainingSet examples;
  std::string target = "Tgt";

  explicit Separable(int n_pos = 8, int n_neg = 10) {
    kb.declare_class(target);
    kb.declare_data_property("s", Literal::Type::Real, true);
    int idx = 0;
    for (int i = 0; i < n_pos; ++i, ++idx) {
      const std::string ind = "p" + std::to_string(i);
      kb.add_instance(ind, Concept::atom(target));
      kb.add_value(ind, "s", Literal::real(idx));
      examples.positives.insert(ind);
    }
    for (int i = 0; i < n_neg; ++i, ++idx) {
      const std::string ind = "n" + std::to_string(i);
      kb.add_value(ind, "s", Literal::real(100 + idx));
      examples.non_positives.insert(ind);
    }
  }
};

MetricsRecord metrics_of(std::map<std::string, double> preds,
                         std::set<std::string> pos, std::set<std::string> neg) {
  return metrics(preds, pos, neg);
}

} // namespace

TEST_CASE("metrics of a perfect crisp classifier") {
  const MetricsRecord m =
      metrics_of({{"a", 1.0}, {"b", 1.0}, {"c", 0.0}}, {"a", "b"}, {"c"});
  CHECK(m.precision_f == 1.0);
  CHECK(m.recall_f == 1.0);
  CHECK(m.f1_f == 1.0);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);
  CHECK(m.ff1f1 == 1.0);
  CHECK(m.mse == 0.0);
}

TEST_CASE("metrics hand oracle on fuzzy degrees") {
  const MetricsRecord m =
      metrics_of({{"a", 0.5}, {"b", 1.0}, {"c", 0.2}}, {"a", "b"}, {"c"});
  CHECK(m.tp_f == Catch::Approx(1.5));
  CHECK(m.fp_f == Catch::Approx(0.2));
  CHECK(m.tnp_f == Catch::Approx(0.8));
  CHECK(m.fnp_f == Catch::Approx(0.5));
  CHECK(m.recall_f == Catch::Approx(0.75));
  CHECK(m.precision_f == Catch::Approx(1.5 / 1.7));
  CHECK(m.tp == 2.0);
  CHECK(m.fp == 1.0);
  // MSE with the t-transform: ((0.5-1)^2 + (1-1)^2 + (0.2-(-1))^2) / 3
  CHECK(m.mse == Catch::Approx((0.25 + 0.0 + 1.44) / 3.0));
  CHECK(m.ff1f1 == Catch::Approx(m.f1_f * m.f1));
}

TEST_CASE("untransformed MSE variant") {
  std::map<std::string, double> preds{{"a", 0.5}, {"c", 0.0}};
  const MetricsRecord m = metrics(preds, {"a"}, {"c"}, /*mse_untransformed=*/true);
  // ((0.5-1)^2 + (0-(-1))^2) / 2
  CHECK(m.mse == Catch::Approx((0.25 + 1.0) / 2.0));
}

TEST_CASE("fF1F1 is the product of the F1 scores") {
  MetricsRecord m;
  m.f1_f = 0.8;
  m.f1 = 0.9;
  m.ff1f1 = m.f1_f * m.f1;
  CHECK(m.ff1f1 == Catch::Approx(0.72));
}

TEST_CASE("undefined precision is reported as zero with a flag") {
  const MetricsRecord m = metrics_of({{"a", 0.0}, {"b", 0.0}}, {"a"}, {"b"});
  CHECK(m.precision == 0.0);
  CHECK(m.precision_undefined);
  CHECK(m.f1 == 0.0);
  CHECK_FALSE(m.recall_undefined);
  CHECK_THROWS_AS(metrics({}, {}, {}), InputError); // empty test set
}

TEST_CASE("metric identities on random prediction vectors") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::map<std::string, double> preds;
    std::set<std::string> pos, neg;
    const int n = 2 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      const std::string ind = "x" + std::to_string(i);
      const bool positive = rng() % 2 == 0;
      (positive ? pos : neg).insert(ind);
      const bool crisp = trial % 2 == 0; // alternate crisp and fuzzy vectors
      preds[ind] = crisp ? static_cast<double>(rng() % 2)
                         : static_cast<double>(rng() % 1000) / 1000.0;
    }
    if (pos.empty() || neg.empty()) continue;
    const MetricsRecord m = metrics(preds, pos, neg);
    CHECK(m.tnp_f + m.fp_f == Catch::Approx(static_cast<double>(neg.size())).margin(1e-12));
    CHECK(m.tp_f + m.fnp_f == Catch::Approx(static_cast<double>(pos.size())).margin(1e-12));
    if (m.precision + m.recall > 0)
      CHECK(m.f1 ==
            Catch::Approx(2 * m.precision * m.recall / (m.precision + m.recall)).margin(1e-12));
    if (trial % 2 == 0) { // crisp degrees: fuzzy and crisp measures coincide
      CHECK(m.tp_f == m.tp);
      CHECK(m.fp_f == m.fp);
      CHECK(m.f1_f == m.f1);
    }
  }
}

TEST_CASE("macro average of identical records is the record") {
  const MetricsRecord m =
      metrics_of({{"a", 0.5}, {"b", 1.0}, {"c", 0.2}}, {"a", "b"}, {"c"});
  const MetricsRecord avg = macro_average({m, m, m});
  CHECK(avg.tp_f == Catch::Approx(m.tp_f));
  CHECK(avg.f1_f == Catch::Approx(m.f1_f));
  CHECK(avg.mse == Catch::Approx(m.mse));
  CHECK(avg.ff1f1 == Catch::Approx(m.ff1f1));
}

TEST_CASE("stratified folds balance positives") {
  TrainingSet e;
  for (int i = 0; i < 6; ++i) e.positives.insert("p" + std::to_string(i));
  for (int i = 0; i < 4; ++i) e.non_positives.insert("n" + std::to_string(i));
  const auto folds = stratified_kfold(e, 5, 7);
  REQUIRE(folds.size() == 5);
  std::set<std::string> all;
  for (const auto& f : folds) {
    CHECK(f.positives.size() >= 1);
    CHECK(f.positives.size() <= 2);
    for (const auto& a : f.individuals()) CHECK(all.insert(a).second); // partition
  }
  CHECK(all.size() == 10);
}

TEST_CASE("single fold mode returns the whole example set") {
  TrainingSet e;
  e.positives = {"p"};
  e.non_positives = {"n"};
  const auto folds = stratified_kfold(e, 1, 0);
  REQUIRE(folds.size() == 1);
  CHECK(folds[0].positives == e.positives);
  CHECK(folds[0].non_positives == e.non_positives);
}

TEST_CASE("folds are deterministic for a fixed seed") {
  TrainingSet e;
  for (int i = 0; i < 9; ++i) e.positives.insert("p" + std::to_string(i));
  for (int i = 0; i < 9; ++i) e.non_positives.insert("n" + std::to_string(i));
  const auto a = stratified_kfold(e, 3, 123);
  const auto b = stratified_kfold(e, 3, 123);
  const auto c = stratified_kfold(e, 3, 124);
  for (int f = 0; f < 3; ++f) {
    CHECK(a[f].positives == b[f].positives);
    CHECK(a[f].non_positives == b[f].non_positives);
  }
  bool any_difference = false;
  for (int f = 0; f < 3; ++f)
    any_difference = any_difference || a[f].positives != c[f].positives;
  CHECK(any_difference);
}

TEST_CASE("too few positives for the fold count") {
  TrainingSet e;
  e.positives = {"p1", "p2"};
  e.non_positives = {"n1"};
  CHECK_THROWS_AS(stratified_kfold(e, 3, 0), InputError);
}

TEST_CASE("strip_for_fold removes test individuals and target assertions") {
  KnowledgeBase kb;
  kb.declare_class("T");
  kb.declare_class("A");
  kb.declare_object_property("r");
  kb.declare_data_property("s", Literal::Type::Real, false);
  kb.add_instance("a", Concept::atom("T"));
  kb.add_instance("a", Concept::atom("A"));
  kb.add_instance("c", Concept::conj({Concept::atom("T"), Concept::atom("A")}));
  kb.add_related("a", "r", "b");
  kb.add_related("c", "r", "d");
  kb.add_value("a", "s", Literal::real(1));

  const KnowledgeBase snapshot = kb;
  const KnowledgeBase stripped = strip_for_fold(kb, "T", {"a"});
  CHECK(kb == snapshot); // source untouched

  // assertions mentioning `a` are gone, (c,r,d) kept
  for (const auto& ra : stripped.role_assertions) {
    CHECK(ra.subject != "a");
    CHECK(ra.object != "a");
  }
  CHECK(stripped.role_assertions.size() == 1);
  CHECK(stripped.data_assertions.empty());
  // c keeps only its non-target conjunct
  const Closure cl = complete(stripped);
  CHECK(cl.has_atom("c", "A"));
  CHECK_FALSE(cl.has_atom("c", "T"));

  // empty test set removes only target assertions
  const KnowledgeBase only_target = strip_for_fold(kb, "T", {});
  const Closure cl2 = complete(only_target);
  CHECK(cl2.has_atom("a", "A"));
  CHECK_FALSE(cl2.has_atom("a", "T"));
  CHECK_FALSE(cl2.has_atom("c", "T"));
  CHECK(only_target.role_assertions.size() == 2);
}

TEST_CASE("crossval sweeps the grid and selects by fF1F1") {
  const Separable problem;
  GridConfig grid;
  grid.methods = {FuzzificationConfig::Method::Uniform};
  grid.fold_count = 4;
  grid.seed = 3;
  grid.iterations = 3;
  LearnParams base;
  base.eta = 1.0;
  RefinementContext bounds;
  bounds.max_depth = 1;
  bounds.max_conjuncts = 3;

  const EvalReport report = crossval(problem.kb, problem.target, problem.examples, grid, base,
                                     bounds);
  CHECK(report.cells.size() == 12); // 4 thetas x 3 partition counts
  const CellResult& winner = report.winning_cell();
  CHECK(winner.aggregate.f1 == Catch::Approx(1.0)); // trivially separable
  // tie-break: every cell scores 1.0 here, so the lowest theta and fewest
  // partitions win
  CHECK(winner.theta == Catch::Approx(0.34));
  CHECK(winner.partitions == 3);
}

TEST_CASE("single-fold crossval reproduces training-set metrics") {
  const Separable problem;
  GridConfig grid;
  grid.methods = {FuzzificationConfig::Method::Uniform};
  grid.thetas = {0.34};
  grid.partition_counts = {3};
  grid.fold_count = 1;
  LearnParams base;
  RefinementContext bounds;

  const EvalReport report = crossval(problem.kb, problem.target, problem.examples, grid, base,
                                     bounds);
  REQUIRE(report.cells.size() == 1);
  REQUIRE(report.cells[0].fold_metrics.size() == 1);
  // train == test, separable: the single fold must be perfect
  CHECK(report.cells[0].aggregate.f1 == Catch::Approx(1.0));
}

TEST_CASE("a fold that cannot learn scores zero coverage instead of crashing") {
  KnowledgeBase kb;
  kb.declare_class("Tgt");
  kb.declare_class("Shared");
  TrainingSet e;
  for (int i = 0; i < 6; ++i) {
    const std::string ind = "x" + std::to_string(i);
    kb.add_instance(ind, Concept::atom("Shared"));
    if (i < 3)
      e.positives.insert(ind);
    else
      e.non_positives.insert(ind);
  }
  GridConfig grid;
  grid.methods = {FuzzificationConfig::Method::Uniform};
  grid.thetas = {1.0}; // unattainable: positives and non-positives are identical
  grid.partition_counts = {3};
  grid.fold_count = 3;
  LearnParams base;
  base.eta = 0.0;
  RefinementContext bounds;

  const EvalReport report = crossval(kb, "Tgt", e, grid, base, bounds);
  REQUIRE(report.cells.size() == 1);
  for (const auto& failure : report.cells[0].fold_failures) CHECK_FALSE(failure.empty());
  CHECK(report.cells[0].aggregate.tp_f == 0.0);
  CHECK(report.cells[0].aggregate.recall == 0.0);
}

TEST_CASE("grid validation") {
  GridConfig grid;
  grid.thetas.clear();
  CHECK_THROWS_AS(grid.validate(), InputError);
  grid = GridConfig{};
  grid.partition_counts = {4};
  CHECK_THROWS_AS(grid.validate(), InputError);
  grid = GridConfig{};
  grid.fold_count = 0;
  CHECK_THROWS_AS(grid.validate(), InputError);
}
