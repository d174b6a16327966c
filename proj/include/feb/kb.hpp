#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "feb/concept.hpp"
#include "feb/error.hpp"

namespace feb {

/// Rule-shaped inclusion axiom: body subsumed by an atomic head, to a degree.
/// Input knowledge bases are crisp (degree 1 everywhere); degrees below 1
/// only appear in learned rules.
struct Gci {
  Concept body;
  std::string head;
  double degree = 1.0;
};

/// TBox axiom with an existential right-hand side, e.g. a data-property
/// range axiom `class [= (s some real)`. Kept for round-tripping; it does
/// not create anonymous successors during instance checking.
struct ExistentialRangeAxiom {
  std::string body_atom;
  std::string property;
  bool data = false;
  std::string filler; // atom name, or type keyword (real|int|bool) when data
};

struct ConceptAssertion {
  std::string individual;
  Concept expr;
};

struct RoleAssertion {
  std::string subject;
  std::string role;
  std::string object;
};

struct DataAssertion {
  std::string individual;
  std::string property;
  Literal value;
};

/// A crisp EL(D) knowledge base: declarations, TBox and ABox.
/// Treated as immutable once loaded; all reasoning operations take it const.
class KnowledgeBase {
 public:
  std::set<std::string> concept_names;
  std::set<std::string> object_properties;
  std::map<std::string, Literal::Type> data_properties; // name -> declared value type
  std::set<std::string> functional_data_properties;

  std::vector<Gci> tbox;
  std::vector<ExistentialRangeAxiom> range_axioms;
  std::vector<ConceptAssertion> concept_assertions;
  std::vector<RoleAssertion> role_assertions;
  std::vector<DataAssertion> data_assertions;

  std::set<std::string> individuals; // Ind_K: individuals occurring in the ABox

  bool is_class(const std::string& n) const { return concept_names.count(n) > 0; }
  bool is_object_property(const std::string& n) const { return object_properties.count(n) > 0; }
  bool is_data_property(const std::string& n) const { return data_properties.count(n) > 0; }
  bool is_numeric_data_property(const std::string& n) const {
    auto it = data_properties.find(n);
    return it != data_properties.end() && it->second != Literal::Type::Bool;
  }
  bool is_boolean_data_property(const std::string& n) const {
    auto it = data_properties.find(n);
    return it != data_properties.end() && it->second == Literal::Type::Bool;
  }
  bool is_declared(const std::string& n) const {
    return is_class(n) || is_object_property(n) || is_data_property(n);
  }

  void declare_class(const std::string& name) {
    check_fresh_or_same(name, concept_names.count(name));
    concept_names.insert(name);
  }
  void declare_object_property(const std::string& name) {
    check_fresh_or_same(name, object_properties.count(name));
    object_properties.insert(name);
  }
  void declare_data_property(const std::string& name, Literal::Type type, bool functional) {
    check_fresh_or_same(name, data_properties.count(name));
    data_properties[name] = type;
    if (functional) functional_data_properties.insert(name);
  }

  void add_gci(Concept body, std::string head, double degree = 1.0) {
    if (degree <= 0.0 || degree > 1.0) throw InputError("axiom degree must be in (0,1]");
    if (!is_class(head)) throw InputError("undeclared concept name: " + head);
    Concept canonical = canonicalize(body);
    validate_tbox_body(canonical);
    tbox.push_back({std::move(canonical), std::move(head), degree});
  }

  void add_range_axiom(const std::string& body_atom, const std::string& property,
                       const std::string& filler) {
    if (!is_class(body_atom)) throw InputError("undeclared concept name: " + body_atom);
    ExistentialRangeAxiom ax;
    ax.body_atom = body_atom;
    ax.property = property;
    if (is_object_property(property)) {
      if (!is_class(filler)) throw InputError("undeclared concept name: " + filler);
      ax.data = false;
    } else if (is_data_property(property)) {
      if (filler != "real" && filler != "int" && filler != "bool")
        throw InputError("data range filler must be a type keyword: " + filler);
      ax.data = true;
    } else {
      throw InputError("undeclared property: " + property);
    }
    ax.filler = filler;
    range_axioms.push_back(std::move(ax));
  }

  void add_instance(const std::string& individual, Concept c) {
    Concept canonical = canonicalize(c);
    validate_assertion_concept(canonical);
    individuals.insert(individual);
    concept_assertions.push_back({individual, std::move(canonical)});
  }

  void add_related(const std::string& subject, const std::string& role,
                   const std::string& object) {
    if (!is_object_property(role)) throw InputError("undeclared object property: " + role);
    individuals.insert(subject);
    individuals.insert(object);
    role_assertions.push_back({subject, role, object});
  }

  void add_value(const std::string& individual, const std::string& property, Literal value) {
    auto it = data_properties.find(property);
    if (it == data_properties.end()) throw InputError("undeclared data property: " + property);
    const bool want_bool = it->second == Literal::Type::Bool;
    if (want_bool != (value.type == Literal::Type::Bool))
      throw InputError("value type does not match the declaration of " + property);
    individuals.insert(individual);
    data_assertions.push_back({individual, property, value});
  }

  friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
    auto gci_eq = [](const Gci& x, const Gci& y) {
      return x.body == y.body && x.head == y.head && x.degree == y.degree;
    };
    auto range_eq = [](const ExistentialRangeAxiom& x, const ExistentialRangeAxiom& y) {
      return x.body_atom == y.body_atom && x.property == y.property && x.data == y.data &&
             x.filler == y.filler;
    };
    auto ca_eq = [](const ConceptAssertion& x, const ConceptAssertion& y) {
      return x.individual == y.individual && x.expr == y.expr;
    };
    auto ra_eq = [](const RoleAssertion& x, const RoleAssertion& y) {
      return x.subject == y.subject && x.role == y.role && x.object == y.object;
    };
    auto da_eq = [](const DataAssertion& x, const DataAssertion& y) {
      return x.individual == y.individual && x.property == y.property && x.value == y.value;
    };
    return a.concept_names == b.concept_names && a.object_properties == b.object_properties &&
           a.data_properties == b.data_properties &&
           a.functional_data_properties == b.functional_data_properties &&
           std::equal(a.tbox.begin(), a.tbox.end(), b.tbox.begin(), b.tbox.end(), gci_eq) &&
           std::equal(a.range_axioms.begin(), a.range_axioms.end(), b.range_axioms.begin(),
                      b.range_axioms.end(), range_eq) &&
           std::equal(a.concept_assertions.begin(), a.concept_assertions.end(),
                      b.concept_assertions.begin(), b.concept_assertions.end(), ca_eq) &&
           std::equal(a.role_assertions.begin(), a.role_assertions.end(),
                      b.role_assertions.begin(), b.role_assertions.end(), ra_eq) &&
           std::equal(a.data_assertions.begin(), a.data_assertions.end(),
                      b.data_assertions.begin(), b.data_assertions.end(), da_eq) &&
           a.individuals == b.individuals;
  }

 private:
  void check_fresh_or_same(const std::string& name, bool already_this_kind) const {
    if (already_this_kind) return; // redeclaration of the same kind is harmless
    if (is_declared(name)) throw InputError("name already declared with a different kind: " + name);
  }

  // Input TBox bodies: EL over atoms, conjunction and object existentials.
  void validate_tbox_body(const Concept& c) const {
    switch (c.kind) {
      case ConceptKind::Top:
        return;
      case ConceptKind::Atom:
        if (!is_class(c.name)) throw InputError("undeclared concept name: " + c.name);
        return;
      case ConceptKind::And:
        for (const auto& child : c.children) validate_tbox_body(child);
        return;
      case ConceptKind::ExistsObject:
        if (!is_object_property(c.name))
          throw InputError("undeclared object property: " + c.name);
        validate_tbox_body(c.filler());
        return;
      default:
        throw InputError("TBox axiom outside the supported fragment (bodies are built from "
                         "atoms, 'and' and object 'some'; complex bodies are normalized "
                         "internally): " + to_string(c));
    }
  }

  // ABox concepts: crisp EL(D); additionally allows data equality fillers.
  void validate_assertion_concept(const Concept& c) const {
    switch (c.kind) {
      case ConceptKind::Top:
        return;
      case ConceptKind::Atom:
        if (!is_class(c.name)) throw InputError("undeclared concept name: " + c.name);
        return;
      case ConceptKind::And:
        for (const auto& child : c.children) validate_assertion_concept(child);
        return;
      case ConceptKind::ExistsObject:
        if (!is_object_property(c.name))
          throw InputError("undeclared object property: " + c.name);
        validate_assertion_concept(c.filler());
        return;
      case ConceptKind::ExistsData: {
        auto it = data_properties.find(c.name);
        if (it == data_properties.end())
          throw InputError("undeclared data property: " + c.name);
        if (c.predicate.shape != DatatypePredicate::Shape::Equals)
          throw InputError("fuzzy datatype predicates are not allowed in assertions "
                           "(the input knowledge base is crisp)");
        const bool want_bool = it->second == Literal::Type::Bool;
        if (want_bool != (c.predicate.value.type == Literal::Type::Bool))
          throw InputError("value type does not match the declaration of " + c.name);
        return;
      }
      default:
        throw InputError("assertion concept outside the crisp EL(D) fragment: " + to_string(c));
    }
  }
};

}  // namespace feb
