#pragma once

#include <algorithm>
#include <charconv>
#include <string>
#include <utility>
#include <vector>

#include "feb/fuzzy.hpp"

namespace feb {

enum class ConceptKind { Top, Bottom, Atom, NegAtom, And, ExistsObject, ExistsData, WeightedSum };

struct WeightedTerm {
  double weight = 0.0; // nonzero
  std::string atom;
};

/// Recursive concept expression. Learned rule bodies use only
/// Top / Atom / And / ExistsObject / ExistsData; NegAtom and WeightedSum
/// appear in targets and ensemble heads.
struct Concept {
  ConceptKind kind = ConceptKind::Top;
  std::string name;                 // Atom/NegAtom name, role or data property
  std::vector<Concept> children;    // And conjuncts; ExistsObject filler (exactly one)
  DatatypePredicate predicate;      // ExistsData only
  std::vector<WeightedTerm> terms;  // WeightedSum only

  static Concept top() { return {}; }
  static Concept bottom() {
    Concept c;
    c.kind = ConceptKind::Bottom;
    return c;
  }
  static Concept atom(std::string name) {
    Concept c;
    c.kind = ConceptKind::Atom;
    c.name = std::move(name);
    return c;
  }
  static Concept neg_atom(std::string name) {
    Concept c;
    c.kind = ConceptKind::NegAtom;
    c.name = std::move(name);
    return c;
  }
  static Concept conj(std::vector<Concept> conjuncts) {
    Concept c;
    c.kind = ConceptKind::And;
    c.children = std::move(conjuncts);
    return c;
  }
  static Concept some(std::string role, Concept filler) {
    Concept c;
    c.kind = ConceptKind::ExistsObject;
    c.name = std::move(role);
    c.children.push_back(std::move(filler));
    return c;
  }
  static Concept some_data(std::string property, DatatypePredicate d) {
    Concept c;
    c.kind = ConceptKind::ExistsData;
    c.name = std::move(property);
    c.predicate = std::move(d);
    return c;
  }
  static Concept weighted_sum(std::vector<WeightedTerm> terms) {
    Concept c;
    c.kind = ConceptKind::WeightedSum;
    c.terms = std::move(terms);
    return c;
  }

  bool is(ConceptKind k) const { return kind == k; }
  const Concept& filler() const { return children.front(); }
};

/// Total order used for canonical sorting: Top < Bottom < Atom < NegAtom <
/// ExistsObject < ExistsData < WeightedSum, then lexicographic.
inline int compare(const Concept& a, const Concept& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
  switch (a.kind) {
    case ConceptKind::ExistsData:
      if (a.predicate == b.predicate) return 0;
      return a.predicate < b.predicate ? -1 : 1;
    case ConceptKind::WeightedSum: {
      const std::size_t n = std::min(a.terms.size(), b.terms.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (int c = a.terms[i].atom.compare(b.terms[i].atom); c != 0) return c < 0 ? -1 : 1;
        if (a.terms[i].weight != b.terms[i].weight)
          return a.terms[i].weight < b.terms[i].weight ? -1 : 1;
      }
      if (a.terms.size() != b.terms.size()) return a.terms.size() < b.terms.size() ? -1 : 1;
      return 0;
    }
    default: {
      const std::size_t n = std::min(a.children.size(), b.children.size());
      for (std::size_t i = 0; i < n; ++i)
        if (int c = compare(a.children[i], b.children[i]); c != 0) return c;
      if (a.children.size() != b.children.size())
        return a.children.size() < b.children.size() ? -1 : 1;
      return 0;
    }
  }
}

inline bool operator==(const Concept& a, const Concept& b) { return compare(a, b) == 0; }
inline bool operator!=(const Concept& a, const Concept& b) { return compare(a, b) != 0; }
inline bool concept_less(const Concept& a, const Concept& b) { return compare(a, b) < 0; }

/// Canonical form: conjunctions flattened, Top conjuncts dropped, conjuncts
/// deduplicated and sorted; single-conjunct conjunctions unwrapped.
/// Idempotent.
inline Concept canonicalize(const Concept& c) {
  switch (c.kind) {
    case ConceptKind::And: {
      std::vector<Concept> flat;
      for (const auto& child : c.children) {
        Concept cc = canonicalize(child);
        if (cc.is(ConceptKind::Top)) continue;
        if (cc.is(ConceptKind::And))
          flat.insert(flat.end(), std::make_move_iterator(cc.children.begin()),
                      std::make_move_iterator(cc.children.end()));
        else
          flat.push_back(std::move(cc));
      }
      std::sort(flat.begin(), flat.end(), concept_less);
      flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
      if (flat.empty()) return Concept::top();
      if (flat.size() == 1) return std::move(flat.front());
      return Concept::conj(std::move(flat));
    }
    case ConceptKind::ExistsObject:
      return Concept::some(c.name, canonicalize(c.filler()));
    default:
      return c;
  }
}

namespace detail {
inline std::string format_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}
} // namespace detail

inline std::string to_string(const Literal& v) {
  if (v.type == Literal::Type::Bool) return v.boolean ? "true" : "false";
  return detail::format_number(v.number);
}

/// Renders a concept in the surface syntax: `A and (r some C) and (s = 79)`.
/// Fuzzy datatype predicates print by label: `(s some Price_Fair)`.
inline std::string to_string(const Concept& c, bool parenthesize_and = false) {
  switch (c.kind) {
    case ConceptKind::Top: return "top";
    case ConceptKind::Bottom: return "bottom";
    case ConceptKind::Atom: return c.name;
    case ConceptKind::NegAtom: return "(not " + c.name + ")";
    case ConceptKind::And: {
      std::string out;
      for (std::size_t i = 0; i < c.children.size(); ++i) {
        if (i) out += " and ";
        out += to_string(c.children[i]);
      }
      return parenthesize_and ? "(" + out + ")" : out;
    }
    case ConceptKind::ExistsObject:
      return "(" + c.name + " some " + to_string(c.filler(), /*parenthesize_and=*/true) + ")";
    case ConceptKind::ExistsData:
      if (c.predicate.shape == DatatypePredicate::Shape::Equals)
        return "(" + c.name + " = " + to_string(c.predicate.value) + ")";
      return "(" + c.name + " some " + c.predicate.label + ")";
    case ConceptKind::WeightedSum: {
      std::string out;
      for (std::size_t i = 0; i < c.terms.size(); ++i) {
        if (i) out += " + ";
        out += detail::format_number(c.terms[i].weight) + " * " + c.terms[i].atom;
      }
      return out;
    }
  }
  return {};
}

/// Maximal nesting of existential restrictions: top has depth 0, exists
/// (object or data) adds one level, conjunction takes the max of its parts.
inline int existential_depth(const Concept& c) {
  switch (c.kind) {
    case ConceptKind::ExistsObject: return 1 + existential_depth(c.filler());
    case ConceptKind::ExistsData: return 1;
    case ConceptKind::And: {
      int d = 0;
      for (const auto& child : c.children) d = std::max(d, existential_depth(child));
      return d;
    }
    default: return 0;
  }
}

/// Number of conjuncts of the outermost conjunction (1 for non-conjunctions).
inline std::size_t conjunct_count(const Concept& c) {
  return c.is(ConceptKind::And) ? c.children.size() : 1;
}

}  // namespace feb
