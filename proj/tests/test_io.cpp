#include <catch2/catch_amalgamated.hpp>

#include "feb/io.hpp"
#include "oracles.hpp"

using namespace feb;

namespace {

const char* kHotelKbText = R"(# city micro-ontology
class Hotel
class Accommodation
class GoodHotel
class 24h_Reception
objprop hasAmenity
dataprop hasPrice real functional
dataprop wifi bool

gci Hotel Accommodation
instance Hotel_010 Hotel and (hasAmenity some 24h_Reception) and (hasPrice = 79)
related Hotel_010 hasAmenity Hotel_010
value Hotel_010 hasPrice 79
value Hotel_010 wifi true
)";

} // namespace

TEST_CASE("parse_kb reads the line format") {
  const KnowledgeBase kb = io::parse_kb(kHotelKbText);
  CHECK(kb.concept_names.size() == 4);
  CHECK(kb.is_object_property("hasAmenity"));
  CHECK(kb.is_numeric_data_property("hasPrice"));
  CHECK(kb.is_boolean_data_property("wifi"));
  CHECK(kb.functional_data_properties.count("hasPrice") == 1);
  REQUIRE(kb.tbox.size() == 1);
  CHECK(kb.tbox[0].body == Concept::atom("Hotel"));
  CHECK(kb.tbox[0].head == "Accommodation");
  CHECK(kb.individuals == std::set<std::string>{"Hotel_010"});
  REQUIRE(kb.concept_assertions.size() == 1);
  CHECK(kb.concept_assertions[0].expr.is(ConceptKind::And));
}

TEST_CASE("empty file parses to an empty KB") {
  const KnowledgeBase kb = io::parse_kb("");
  CHECK(kb.concept_names.empty());
  CHECK(kb.individuals.empty());
}

TEST_CASE("kb round-trips through serialize and parse") {
  const KnowledgeBase kb = io::parse_kb(kHotelKbText);
  CHECK(io::parse_kb(io::serialize_kb(kb)) == kb);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const KnowledgeBase random = oracles::random_kb(rng);
    CHECK(io::parse_kb(io::serialize_kb(random)) == random);
  }
}

TEST_CASE("range axioms survive the round trip") {
  KnowledgeBase kb;
  kb.declare_class("class");
  kb.declare_class("A");
  kb.declare_data_property("s", Literal::Type::Real, true);
  kb.declare_object_property("r");
  kb.add_range_axiom("class", "s", "real");
  kb.add_range_axiom("A", "r", "class");
  const std::string text = io::serialize_kb(kb);
  CHECK(text.find("gci class (s some real)") != std::string::npos);
  CHECK(io::parse_kb(text) == kb);
}

TEST_CASE("parse errors carry line numbers and distinct messages") {
  CHECK_THROWS_WITH(io::parse_kb("bogus directive\n"),
                    Catch::Matchers::ContainsSubstring("line 1") &&
                        Catch::Matchers::ContainsSubstring("unknown directive"));
  CHECK_THROWS_WITH(io::parse_kb("class A\n\ninstance x Nope\n"),
                    Catch::Matchers::ContainsSubstring("line 3") &&
                        Catch::Matchers::ContainsSubstring("undeclared"));
  CHECK_THROWS_WITH(io::parse_kb("class A\ngci A\n"),
                    Catch::Matchers::ContainsSubstring("head"));
  CHECK_THROWS_AS(io::parse_kb("dataprop s real\nclass A\ngci (s = 1) A\n"), ParseError);
}

TEST_CASE("examples files round-trip") {
  TrainingSet e;
  e.positives = {"a", "b"};
  e.non_positives = {"c"};
  const std::string text = io::serialize_examples(e);
  const TrainingSet parsed = io::parse_examples(text);
  CHECK(parsed.positives == e.positives);
  CHECK(parsed.non_positives == e.non_positives);
  CHECK_THROWS_AS(io::parse_examples("maybe x\n"), ParseError);
}

TEST_CASE("convert_table reproduces the tabular axiom scheme") {
  const std::vector<io::TableColumn> schema = {
      {"sepal_length", Literal::Type::Real},
      {"sepal_width", Literal::Type::Real},
      {"petal_length", Literal::Type::Real},
      {"petal_width", Literal::Type::Real},
  };
  const std::vector<std::vector<std::string>> rows = {
      {"5.1", "3.5", "1.4", "0.2", "Iris-setosa"},
      {"7.0", "3.2", "4.7", "1.4", "Iris-versicolor"},
      {"6.3", "3.3", "6.0", "2.5", "Iris-virginica"},
  };
  const io::ConvertedTable out = io::convert_table(rows, schema);

  // class count = |targets| + 1, one inclusion per target
  CHECK(out.targets ==
        std::vector<std::string>{"Iris-setosa", "Iris-versicolor", "Iris-virginica"});
  CHECK(out.kb.concept_names.size() == out.targets.size() + 1);
  REQUIRE(out.kb.tbox.size() == 3);
  for (const auto& gci : out.kb.tbox) CHECK(gci.head == "class");

  // one range axiom per attribute, every property functional
  CHECK(out.kb.range_axioms.size() == 4);
  CHECK(out.kb.functional_data_properties.size() == 4);

  // row 1: one target assertion + 4 data assertions
  CHECK(out.kb.concept_assertions[0].individual == "a1");
  CHECK(out.kb.concept_assertions[0].expr == Concept::atom("Iris-setosa"));
  CHECK(out.kb.data_assertions[0].individual == "a1");
  CHECK(out.kb.data_assertions[0].property == "sepal_length");
  CHECK(out.kb.data_assertions[0].value.number == 5.1);

  // example seeds: one-vs-rest per target
  CHECK(out.example_seeds.at("Iris-setosa").positives == std::set<std::string>{"a1"});
  CHECK(out.example_seeds.at("Iris-setosa").non_positives ==
        std::set<std::string>{"a2", "a3"});

  // per row: exactly one target assertion and one data assertion per attribute
  CHECK(out.kb.concept_assertions.size() == rows.size());
  CHECK(out.kb.data_assertions.size() == rows.size() * schema.size());
  CHECK(out.row_individuals.size() == rows.size());
}

TEST_CASE("convert_csv infers column types") {
  const std::string csv = "height,adult,label\n1.7,true,Yes\n1.2,false,No\n";
  const io::ConvertedTable out = io::convert_csv(csv);
  CHECK(out.kb.is_numeric_data_property("height"));
  CHECK(out.kb.is_boolean_data_property("adult"));
  CHECK(out.targets == std::vector<std::string>{"Yes", "No"});

  CHECK_THROWS_AS(io::convert_csv("a,label\n"), InputError);       // no rows
  CHECK_THROWS_AS(io::convert_csv("a,label\nx,Yes\n1,No\n"), InputError); // mixed types
  CHECK_THROWS_AS(io::convert_csv("a,label\n1\n"), InputError);    // arity mismatch
}

TEST_CASE("hypothesis serialization matches the listing layout") {
  Hypothesis h;
  h.kind = Hypothesis::Kind::Boost;
  h.target = "2";
  const auto vvl = DatatypePredicate::left_shoulder(2.66, 3.64, "ColorIntensity_VVL");
  const auto alcohol_vvl = DatatypePredicate::left_shoulder(11.81, 12.29, "Alcohol_VVL");
  h.weak_learners.push_back(
      {"WL1", {canonicalize(Concept::conj({Concept::some_data("Alcohol", alcohol_vvl),
                                           Concept::some_data("ColorIntensity", vvl)}))}});
  h.weak_learners.push_back({"WL2", {Concept::some_data("Alcohol", alcohol_vvl)}});
  h.weak_learners.push_back({"WL3", {Concept::some_data("ColorIntensity", vvl)}});
  h.alphas = {1.199, 0.544, 0.272};

  const std::string text = io::serialize_hypothesis(h, "C-Means");
  CHECK(text.find("(ColorIntensity some ColorIntensity_VVL) SubClassOf WL3\n") !=
        std::string::npos);
  CHECK(text.find("1.199 * WL1 + 0.544 * WL2 + 0.272 * WL3 SubClassOf 2\n") !=
        std::string::npos);
  CHECK(text.find("# Fuzzy datatypes (C-Means)\n") != std::string::npos);
  CHECK(text.find("Alcohol_VVL left-shoulder 11.81 12.29\n") != std::string::npos);
  CHECK(text.find("# Weak Learner WL1\n") != std::string::npos);
  CHECK(text.find("# Real Adaboost aggregation\n") != std::string::npos);
}

TEST_CASE("hypothesis round-trip preserves predictions bit-for-bit") {
  // build a KB and an ensemble with awkward floating point values
  KnowledgeBase kb;
  kb.declare_class("A");
  kb.declare_data_property("s", Literal::Type::Real, true);
  kb.declare_data_property("b", Literal::Type::Bool, false);
  for (int i = 0; i < 7; ++i) {
    const std::string ind = "x" + std::to_string(i);
    kb.add_value(ind, "s", Literal::real(0.1 + static_cast<double>(i) / 3.0));
    kb.add_value(ind, "b", Literal::of_bool(i % 2 == 0));
    if (i % 3 == 0) kb.add_instance(ind, Concept::atom("A"));
  }
  const Closure cl = complete(kb);

  Hypothesis h;
  h.kind = Hypothesis::Kind::Boost;
  h.target = "Tgt";
  const auto low = DatatypePredicate::left_shoulder(0.1, 1.0 / 3.0 + 0.1, "s_L");
  const auto mid = DatatypePredicate::triangular(0.1, 1.1, 7.0 / 3.0, "s_F");
  h.weak_learners.push_back(
      {"WL1", {Concept::some_data("s", low),
               canonicalize(Concept::conj(
                   {Concept::atom("A"), Concept::some_data(
                                            "b", DatatypePredicate::equals(
                                                     Literal::of_bool(true)))}))}});
  h.weak_learners.push_back({"WL2", {Concept::some_data("s", mid)}});
  h.alphas = {0.5537821282374639, -0.12345678901234567};

  const std::string text = io::serialize_hypothesis(h, "Uniform");
  const Hypothesis parsed = io::parse_hypothesis(text);
  REQUIRE(parsed.kind == Hypothesis::Kind::Boost);
  CHECK(parsed.target == h.target);
  REQUIRE(parsed.weak_learners.size() == 2);
  for (const auto& a : kb.individuals) {
    const double original = bed_hypothesis(kb, cl, h, a);
    const double roundtrip = bed_hypothesis(kb, cl, parsed, a);
    CHECK(original == roundtrip); // exact
  }
  // serialization is stable
  CHECK(io::serialize_hypothesis(parsed, "Uniform") == text);
}

TEST_CASE("foil hypothesis round-trips with degrees") {
  KnowledgeBase kb;
  kb.declare_class("Accommodation");
  kb.declare_data_property("hasPrice", Literal::Type::Real, true);
  kb.add_instance("h1", Concept::atom("Accommodation"));
  kb.add_value("h1", "hasPrice", Literal::real(79));
  const Closure cl = complete(kb);

  Hypothesis h;
  h.kind = Hypothesis::Kind::Foil;
  h.target = "GoodHotel";
  const auto fair = DatatypePredicate::triangular(64, 94, 124, "hasPrice_F");
  h.rules.push_back({canonicalize(Concept::conj({Concept::atom("Accommodation"),
                                                 Concept::some_data("hasPrice", fair)})),
                     0.5600000000000001});

  const std::string text = io::serialize_hypothesis(h, "Uniform");
  CHECK(text.find("SubClassOf GoodHotel degree 0.5600") != std::string::npos);
  const Hypothesis parsed = io::parse_hypothesis(text);
  REQUIRE(parsed.kind == Hypothesis::Kind::Foil);
  REQUIRE(parsed.rules.size() == 1);
  CHECK(parsed.rules[0].degree == h.rules[0].degree); // exact via the machine block
  CHECK(bed_hypothesis(kb, cl, parsed, "h1") == bed_hypothesis(kb, cl, h, "h1"));
}

TEST_CASE("an empty ensemble round-trips and predicts zero") {
  Hypothesis h;
  h.kind = Hypothesis::Kind::Boost;
  h.target = "Tgt";
  const std::string text = io::serialize_hypothesis(h, "Uniform");
  CHECK(text.find("0.000 SubClassOf Tgt") != std::string::npos);
  const Hypothesis parsed = io::parse_hypothesis(text);
  CHECK(parsed.kind == Hypothesis::Kind::Boost);
  CHECK(parsed.target == "Tgt");
  CHECK(parsed.empty());
}

TEST_CASE("report serialization is stable and carries the winner") {
  EvalReport report;
  report.target = "Tgt";
  report.fold_count = 2;
  report.seed = 9;
  CellResult cell;
  cell.method = FuzzificationConfig::Method::Uniform;
  cell.theta = 0.34;
  cell.partitions = 3;
  MetricsRecord m;
  m.tp_f = 1.5;
  m.f1 = 0.9;
  m.ff1f1 = 0.81;
  cell.fold_metrics = {m, m};
  cell.fold_failures = {"", ""};
  cell.aggregate = macro_average(cell.fold_metrics);
  report.cells.push_back(cell);
  report.winner = 0;

  const std::string table = io::serialize_report_table(report);
  CHECK(table.find("fF1F1") != std::string::npos);
  CHECK(table.find("<- selected") != std::string::npos);

  const std::string machine = io::serialize_report_machine(report);
  CHECK(machine.find("record method=uniform theta=0.34 partitions=3 fold=0") !=
        std::string::npos);
  CHECK(machine.find("aggregate method=uniform theta=0.34 partitions=3") != std::string::npos);
  CHECK(machine.find("winner method=uniform theta=0.34 partitions=3") != std::string::npos);
  CHECK(io::serialize_report_machine(report) == machine);
}
