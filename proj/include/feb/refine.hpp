#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "feb/closure.hpp"
#include "feb/fuzzify.hpp"
#include "feb/kb.hpp"

namespace feb {

/// Immutable context for the downward refinement operator: vocabulary,
/// fuzzified datatype candidates and the search bounds.
struct RefinementContext {
  const KnowledgeBase* kb = nullptr;
  const Closure* closure = nullptr;
  std::map<std::string, std::vector<DatatypePredicate>> fuzzy_datatypes; // numeric prop -> predicates
  int max_depth = 1;     // maximal existential nesting
  int max_conjuncts = 5; // per conjunction level

  void validate() const {
    if (max_depth < 1 || max_conjuncts < 1) throw InputError("search bounds must be >= 1");
    for (const auto& [prop, preds] : fuzzy_datatypes)
      if (!kb || !kb->is_numeric_data_property(prop))
        throw InputError("fuzzy datatypes attached to an undeclared numeric property: " + prop);
  }
};

inline RefinementContext make_refinement_context(
    const KnowledgeBase& kb, const Closure& cl,
    const std::map<std::string, std::vector<FuzzyDatatype>>& datatypes, int max_depth,
    int max_conjuncts) {
  RefinementContext ctx;
  ctx.kb = &kb;
  ctx.closure = &cl;
  ctx.max_depth = max_depth;
  ctx.max_conjuncts = max_conjuncts;
  for (const auto& [prop, list] : datatypes) {
    auto& preds = ctx.fuzzy_datatypes[prop];
    for (const auto& fd : list) preds.push_back(fd.predicate);
  }
  ctx.validate();
  return ctx;
}

namespace detail {

inline bool conjunct_counts_ok(const Concept& c, int max_conjuncts) {
  switch (c.kind) {
    case ConceptKind::And:
      if (static_cast<int>(c.children.size()) > max_conjuncts) return false;
      for (const auto& child : c.children)
        if (!conjunct_counts_ok(child, max_conjuncts)) return false;
      return true;
    case ConceptKind::ExistsObject:
      return conjunct_counts_ok(c.filler(), max_conjuncts);
    default:
      return true;
  }
}

inline bool within_bounds(const Concept& c, const RefinementContext& ctx) {
  return existential_depth(c) <= ctx.max_depth && conjunct_counts_ok(c, ctx.max_conjuncts);
}

/// Raw Table-style productions, before canonicalization and bound checks.
inline void produce(const Concept& c, const RefinementContext& ctx, std::vector<Concept>& out);

inline void produce_top(const RefinementContext& ctx, std::vector<Concept>& out) {
  const KnowledgeBase& kb = *ctx.kb;
  for (const auto& atom : kb.concept_names) out.push_back(Concept::atom(atom));
  for (const auto& role : kb.object_properties)
    out.push_back(Concept::some(role, Concept::top()));
  for (const auto& [prop, preds] : ctx.fuzzy_datatypes)
    for (const auto& pred : preds) out.push_back(Concept::some_data(prop, pred));
  for (const auto& [prop, type] : kb.data_properties)
    if (type == Literal::Type::Bool) {
      out.push_back(Concept::some_data(prop, DatatypePredicate::equals(Literal::of_bool(true))));
      out.push_back(Concept::some_data(prop, DatatypePredicate::equals(Literal::of_bool(false))));
    }
}

inline void produce(const Concept& c, const RefinementContext& ctx, std::vector<Concept>& out) {
  switch (c.kind) {
    case ConceptKind::Top:
      produce_top(ctx, out);
      return;
    case ConceptKind::Atom: {
      for (const auto& sub : ctx.closure->strict_sub_atoms(c.name))
        out.push_back(Concept::atom(sub));
      std::vector<Concept> extensions;
      produce_top(ctx, extensions);
      for (auto& ext : extensions) out.push_back(Concept::conj({c, std::move(ext)}));
      return;
    }
    case ConceptKind::ExistsObject: {
      std::vector<Concept> filler_refinements;
      produce(c.filler(), ctx, filler_refinements);
      for (auto& d : filler_refinements) out.push_back(Concept::some(c.name, std::move(d)));
      std::vector<Concept> extensions;
      produce_top(ctx, extensions);
      for (auto& ext : extensions) out.push_back(Concept::conj({c, std::move(ext)}));
      return;
    }
    case ConceptKind::ExistsData: {
      std::vector<Concept> extensions;
      produce_top(ctx, extensions);
      for (auto& ext : extensions) out.push_back(Concept::conj({c, std::move(ext)}));
      return;
    }
    case ConceptKind::And: {
      for (std::size_t i = 0; i < c.children.size(); ++i) {
        std::vector<Concept> child_refinements;
        produce(c.children[i], ctx, child_refinements);
        for (auto& r : child_refinements) {
          std::vector<Concept> conjuncts(c.children);
          conjuncts[i] = std::move(r);
          out.push_back(Concept::conj(std::move(conjuncts)));
        }
      }
      return;
    }
    default:
      return; // Top-free leaves (Bottom, NegAtom, WeightedSum) are not refined
  }
}

}  // namespace detail

/// Downward refinement: all strictly more specific candidates of `c`,
/// canonical, within bounds, deduplicated and in stable canonical order.
inline std::vector<Concept> refine(const Concept& c, const RefinementContext& ctx) {
  std::vector<Concept> raw;
  detail::produce(c, ctx, raw);
  std::vector<Concept> out;
  out.reserve(raw.size());
  for (const auto& cand : raw) {
    Concept canon = canonicalize(cand);
    if (canon == c) continue; // e.g. duplicate conjunct collapsed away
    if (!detail::within_bounds(canon, ctx)) continue;
    out.push_back(std::move(canon));
  }
  std::sort(out.begin(), out.end(), concept_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Search-scoped variant: drops candidates already generated earlier in the
/// same search and records the new ones in `seen` (keys are canonical
/// serializations).
inline std::vector<Concept> refine(const Concept& c, const RefinementContext& ctx,
                                   std::set<std::string>& seen) {
  std::vector<Concept> all = refine(c, ctx);
  std::vector<Concept> fresh;
  fresh.reserve(all.size());
  for (auto& cand : all)
    if (seen.insert(to_string(cand)).second) fresh.push_back(std::move(cand));
  return fresh;
}

}  // namespace feb
