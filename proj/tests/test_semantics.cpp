#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "feb/semantics.hpp"
#include "oracles.hpp"

using namespace feb;

namespace {

// Hotel micro-KB with a price fuzzified so that Fair(79) = 0.5.
struct HotelFixture {
  KnowledgeBase kb;
  Closure cl;
  DatatypePredicate fair = DatatypePredicate::triangular(64, 94, 124, "Price_Fair");

  HotelFixture() {
    kb.declare_class("Hotel");
    kb.declare_class("Accommodation");
    kb.declare_class("GoodHotel");
    kb.declare_data_property("hasPrice", Literal::Type::Real, true);
    kb.add_gci(Concept::atom("Hotel"), "Accommodation");
    kb.add_instance("Hotel_010", Concept::atom("Hotel"));
    kb.add_value("Hotel_010", "hasPrice", Literal::real(79));
    cl = complete(kb);
  }

  Concept body() const {
    return Concept::conj(
        {Concept::atom("Accommodation"), Concept::some_data("hasPrice", fair)});
  }
};

Concept random_body(std::mt19937_64& rng, const std::vector<std::string>& atoms, int depth = 2) {
  switch (rng() % (depth > 0 ? 3 : 1)) {
    case 1: {
      std::vector<Concept> conjuncts;
      const int n = 2 + static_cast<int>(rng() % 2);
      for (int i = 0; i < n; ++i) conjuncts.push_back(random_body(rng, atoms, depth - 1));
      return canonicalize(Concept::conj(std::move(conjuncts)));
    }
    case 2:
      return Concept::some("r0", random_body(rng, atoms, depth - 1));
    default:
      return Concept::atom(atoms[rng() % atoms.size()]);
  }
}

} // namespace

TEST_CASE("worked price example evaluates to 0.5") {
  const HotelFixture fx;
  CHECK(eval_membership(fx.fair, 79.0) == Catch::Approx(0.5));
  CHECK(concept_degree(fx.kb, fx.cl, "Hotel_010", fx.body()) == Catch::Approx(0.5));
  CHECK(concept_degree(fx.kb, fx.cl, "Hotel_010", Concept::top()) == 1.0);
  CHECK(concept_degree(fx.kb, fx.cl, "Hotel_010", Concept::bottom()) == 0.0);
}

TEST_CASE("negated atoms complement the atom degree") {
  const HotelFixture fx;
  CHECK(concept_degree(fx.kb, fx.cl, "Hotel_010", Concept::neg_atom("Hotel")) == 0.0);
  CHECK(concept_degree(fx.kb, fx.cl, "Hotel_010", Concept::neg_atom("GoodHotel")) == 1.0);
}

TEST_CASE("weighted sums clamp into [0,1]") {
  KnowledgeBase kb;
  for (const char* n : {"WL1", "WL2", "WL3"}) kb.declare_class(n);
  for (const char* n : {"WL1", "WL2", "WL3"}) kb.add_instance("x", Concept::atom(n));
  kb.add_instance("y", Concept::atom("WL1"));
  const Closure cl = complete(kb);
  const Concept sum =
      Concept::weighted_sum({{1.199, "WL1"}, {0.544, "WL2"}, {0.272, "WL3"}});
  CHECK(concept_degree(kb, cl, "x", sum) == 1.0); // 2.015 clamps to 1
  CHECK(concept_degree(kb, cl, "y", sum) == 1.0); // 1.199 clamps to 1
  const Concept negsum = Concept::weighted_sum({{-0.5, "WL1"}});
  CHECK(concept_degree(kb, cl, "y", negsum) == 0.0);
  const Concept half = Concept::weighted_sum({{0.5, "WL1"}, {0.5, "WL2"}});
  CHECK(concept_degree(kb, cl, "y", half) == Catch::Approx(0.5));
}

TEST_CASE("undeclared names are input errors") {
  const HotelFixture fx;
  CHECK_THROWS_AS(concept_degree(fx.kb, fx.cl, "Hotel_010", Concept::atom("Nope")), InputError);
  CHECK_THROWS_AS(
      concept_degree(fx.kb, fx.cl, "Hotel_010", Concept::some("nope", Concept::top())),
      InputError);
}

TEST_CASE("hypothesis prediction for rule lists") {
  const HotelFixture fx;
  Hypothesis h;
  h.kind = Hypothesis::Kind::Foil;
  h.target = "GoodHotel";
  h.rules.push_back({fx.body(), 0.56});
  CHECK(bed_hypothesis(fx.kb, fx.cl, h, "Hotel_010") == Catch::Approx(0.28));

  // max aggregation over several rules, asserted against direct computation
  h.rules.push_back({Concept::atom("Hotel"), 0.4});
  h.rules.push_back({Concept::atom("GoodHotel"), 0.9});
  double direct = 0.0;
  for (const auto& rule : h.rules)
    direct = std::max(direct, rule.degree * concept_degree(fx.kb, fx.cl, "Hotel_010", rule.body));
  CHECK(bed_hypothesis(fx.kb, fx.cl, h, "Hotel_010") == direct);
  CHECK(direct == Catch::Approx(0.4)); // Hotel rule dominates 0.56 * 0.5

  Hypothesis empty;
  empty.kind = Hypothesis::Kind::Foil;
  CHECK(bed_hypothesis(fx.kb, fx.cl, empty, "Hotel_010") == 0.0);
}

TEST_CASE("hypothesis prediction for ensembles") {
  KnowledgeBase kb;
  kb.declare_class("A");
  kb.declare_class("B");
  kb.add_instance("x", Concept::atom("A"));
  const Closure cl = complete(kb);

  Hypothesis h;
  h.kind = Hypothesis::Kind::Boost;
  h.target = "T";
  h.weak_learners.push_back({"WL1", {Concept::atom("A")}});
  h.weak_learners.push_back({"WL2", {Concept::atom("B")}});
  h.alphas = {0.5, 0.5};
  CHECK(bed_hypothesis(kb, cl, h, "x") == Catch::Approx(0.5)); // degrees (1, 0)

  Hypothesis empty;
  empty.kind = Hypothesis::Kind::Boost;
  CHECK(bed_hypothesis(kb, cl, empty, "x") == 0.0);
}

TEST_CASE("cardinality sums degrees") {
  const HotelFixture fx;
  KnowledgeBase kb = fx.kb;
  kb.add_instance("Hotel_020", Concept::atom("Hotel"));
  kb.add_value("Hotel_020", "hasPrice", Literal::real(64 + 0.28 * 30)); // Fair = 0.28
  kb.add_instance("a", Concept::top());
  kb.add_instance("b", Concept::top());
  kb.add_instance("c", Concept::top());
  const Closure cl = complete(kb);
  const std::vector<std::string> both = {"Hotel_010", "Hotel_020"};

  CHECK(cardinality(kb, cl, Concept::top(), {"Hotel_010", "Hotel_020", "a", "b", "c"}) == 5.0);
  CHECK(cardinality(kb, cl, fx.body(), {}) == 0.0);
  CHECK(cardinality(kb, cl, fx.body(), both) == Catch::Approx(0.78));

  WeightDistribution uniform{{"Hotel_010", 0.5}, {"Hotel_020", 0.5}};
  CHECK(weighted_cardinality(kb, cl, fx.body(), both, uniform) ==
        Catch::Approx(cardinality(kb, cl, fx.body(), both) / 2.0));
  WeightDistribution point{{"Hotel_010", 1.0}};
  CHECK(weighted_cardinality(kb, cl, fx.body(), both, point) == Catch::Approx(0.5));

  CHECK_THROWS_AS(cardinality(kb, cl, fx.body(), {"unknown"}), InputError);
  WeightDistribution negative{{"Hotel_010", -0.1}};
  CHECK_THROWS_AS(weighted_cardinality(kb, cl, fx.body(), both, negative), InputError);
}

TEST_CASE("weighted cardinality hand oracle") {
  KnowledgeBase kb;
  kb.declare_class("A");
  kb.declare_data_property("s", Literal::Type::Real, false);
  kb.add_instance("x", Concept::atom("A"));
  kb.add_instance("y", Concept::atom("A"));
  kb.add_value("x", "s", Literal::real(2.5)); // membership 1.0 under tri(0,2.5,5)
  kb.add_value("y", "s", Literal::real(1));   // membership 0.4
  const Closure cl = complete(kb);
  const Concept c = Concept::some_data("s", DatatypePredicate::triangular(0, 2.5, 5));
  // degrees (1.0, 0.4) with weights (0.25, 0.75) -> 0.55
  WeightDistribution w{{"x", 0.25}, {"y", 0.75}};
  CHECK(weighted_cardinality(kb, cl, c, {"x", "y"}, w) == Catch::Approx(0.55));
}

TEST_CASE("crisp cardinality ceilings degrees") {
  KnowledgeBase kb;
  kb.declare_data_property("s", Literal::Type::Real, false);
  kb.add_value("x", "s", Literal::real(0.01));
  kb.add_value("y", "s", Literal::real(-1)); // membership 0
  kb.add_value("z", "s", Literal::real(1));
  const Closure cl = complete(kb);
  const Concept c = Concept::some_data("s", DatatypePredicate::right_shoulder(0, 1));
  // degrees: 0.01, 0, 1 -> crisp 2 (any positive degree counts 1)
  CHECK(cardinality(kb, cl, c, {"x", "y", "z"}) == Catch::Approx(1.01));
  CHECK(crisp_cardinality(kb, cl, c, {"x", "y", "z"}) == 2.0);
  const Concept never = Concept::some_data("s", DatatypePredicate::right_shoulder(5, 6));
  CHECK(crisp_cardinality(kb, cl, never, {"x", "y", "z"}) == 0.0);

  // weighted crisp variant ceilings before weighting
  WeightDistribution w{{"x", 0.2}, {"y", 0.3}, {"z", 0.5}};
  CHECK(crisp_weighted_cardinality(kb, cl, c, {"x", "y", "z"}, w) == Catch::Approx(0.7));
  CHECK(weighted_cardinality(kb, cl, c, {"x", "y", "z"}, w) == Catch::Approx(0.502));
}

TEST_CASE("confidence degrees") {
  KnowledgeBase kb;
  kb.declare_class("C");
  kb.declare_class("D");
  for (const char* ind : {"a", "b", "c", "d"}) kb.add_instance(ind, Concept::atom("C"));
  kb.add_instance("a", Concept::atom("D"));
  const Closure cl = complete(kb);
  const std::vector<std::string> all = {"a", "b", "c", "d"};

  auto same = confidence(kb, cl, Concept::atom("C"), Concept::atom("C"), all);
  REQUIRE(same.has_value());
  CHECK(*same == Catch::Approx(1.0));

  // body covers 4 individuals crisply, head holds for 1
  auto quarter = confidence(kb, cl, Concept::atom("C"), Concept::atom("D"), all);
  REQUIRE(quarter.has_value());
  CHECK(*quarter == Catch::Approx(0.25));

  WeightDistribution uniform;
  for (const auto& a : all) uniform[a] = 0.25;
  auto weighted =
      weighted_confidence(kb, cl, Concept::atom("C"), Concept::atom("D"), all, uniform);
  REQUIRE(weighted.has_value());
  CHECK(*weighted == Catch::Approx(*quarter));

  // zero denominator is signaled, never NaN
  KnowledgeBase kb2 = kb;
  kb2.declare_class("Empty");
  const Closure cl2 = complete(kb2);
  CHECK_FALSE(confidence(kb2, cl2, Concept::atom("Empty"), Concept::atom("D"), all).has_value());
}

TEST_CASE("degree bounds and conjunction identity over random inputs") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 60; ++trial) {
    KnowledgeBase kb = oracles::random_kb(rng);
    if (!kb.object_properties.count("r0")) kb.declare_object_property("r0");
    const std::vector<std::string> atoms(kb.concept_names.begin(), kb.concept_names.end());
    const Closure cl = complete(kb);
    for (int i = 0; i < 8; ++i) {
      const Concept c = random_body(rng, atoms);
      const Concept d = random_body(rng, atoms);
      for (const auto& a : kb.individuals) {
        const double dc = concept_degree(kb, cl, a, c);
        const double dd = concept_degree(kb, cl, a, d);
        CHECK(dc >= 0.0);
        CHECK(dc <= 1.0);
        const double dboth = concept_degree(kb, cl, a, Concept::conj({c, d}));
        CHECK(dboth == std::min(dc, dd)); // min semantics, exact equality
      }
    }
  }
}

TEST_CASE("crisp equals fuzzy cardinality on crisp concepts") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    KnowledgeBase kb = oracles::random_kb(rng);
    if (!kb.object_properties.count("r0")) kb.declare_object_property("r0");
    const std::vector<std::string> atoms(kb.concept_names.begin(), kb.concept_names.end());
    const Closure cl = complete(kb);
    const std::vector<std::string> inds(kb.individuals.begin(), kb.individuals.end());
    const Concept c = random_body(rng, atoms);
    CHECK(cardinality(kb, cl, c, inds) == crisp_cardinality(kb, cl, c, inds));
  }
}

TEST_CASE("degree cache matches direct evaluation") {
  const HotelFixture fx;
  DegreeCache cache(fx.kb, fx.cl, {"Hotel_010"});
  const auto& cached = cache.degrees(fx.body());
  REQUIRE(cached.size() == 1);
  CHECK(cached[0] == concept_degree(fx.kb, fx.cl, "Hotel_010", fx.body()));
  CHECK(&cache.degrees(fx.body()) == &cached); // second lookup hits the cache
}
