#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "feb/closure.hpp"
#include "feb/kb.hpp"

namespace feb {

/// Weight distribution over a set of individuals (weights >= 0, sum 1).
using WeightDistribution = std::map<std::string, double>;

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

/// Truth degree of concept `c` at a (named or anonymous) individual, under
/// min/max fuzzy semantics over the structural closure. Successor and value
/// sets are finite, so existentials use max rather than sup.
inline double concept_degree(const KnowledgeBase& kb, const Closure& cl,
                             const std::string& individual, const Concept& c) {
  switch (c.kind) {
    case ConceptKind::Top:
      return 1.0;
    case ConceptKind::Bottom:
      return 0.0;
    case ConceptKind::Atom:
      if (cl.has_atom(individual, c.name)) return 1.0;
      if (!kb.is_class(c.name)) throw InputError("undeclared concept name: " + c.name);
      return 0.0;
    case ConceptKind::NegAtom:
      return 1.0 - concept_degree(kb, cl, individual, Concept::atom(c.name));
    case ConceptKind::And: {
      double d = 1.0;
      for (const auto& child : c.children) {
        d = std::min(d, concept_degree(kb, cl, individual, child));
        if (d == 0.0) break;
      }
      return d;
    }
    case ConceptKind::ExistsObject: {
      if (!kb.is_object_property(c.name))
        throw InputError("undeclared object property: " + c.name);
      double best = 0.0;
      for (const auto& succ : cl.successors(individual, c.name)) {
        best = std::max(best, concept_degree(kb, cl, succ, c.filler()));
        if (best == 1.0) break;
      }
      return best;
    }
    case ConceptKind::ExistsData: {
      if (!kb.is_data_property(c.name))
        throw InputError("undeclared data property: " + c.name);
      const auto* vals = cl.values(individual, c.name);
      if (!vals) return 0.0;
      double best = 0.0;
      for (const auto& v : *vals) best = std::max(best, eval_membership(c.predicate, v));
      return best;
    }
    case ConceptKind::WeightedSum: {
      double sum = 0.0;
      for (const auto& t : c.terms)
        sum += t.weight * concept_degree(kb, cl, individual, Concept::atom(t.atom));
      return clamp01(sum);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Hypotheses

struct WeakLearnerBlock {
  std::string name;            // fresh atom, e.g. "WL1"
  std::vector<Concept> bodies; // degree-1 rules body [= target
};

struct FoilRule {
  Concept body;
  double degree = 1.0; // confidence of body [= target, in (0,1]
};

/// A learned classifier: either a boosted ensemble (weighted sum of weak
/// learners, each a set of degree-1 rules) or a flat rule list with
/// confidence degrees (max aggregation).
struct Hypothesis {
  enum class Kind { Boost, Foil };

  Kind kind = Kind::Boost;
  std::string target;
  std::vector<WeakLearnerBlock> weak_learners; // Boost
  std::vector<double> alphas;                  // Boost, aligned with weak_learners
  std::vector<FoilRule> rules;                 // Foil

  bool empty() const {
    return kind == Kind::Boost ? weak_learners.empty() : rules.empty();
  }
};

/// Value of one weak learner at an individual: max over its rule bodies.
inline double weak_learner_degree(const KnowledgeBase& kb, const Closure& cl,
                                  const WeakLearnerBlock& wl, const std::string& individual) {
  double best = 0.0;
  for (const auto& body : wl.bodies)
    best = std::max(best, concept_degree(kb, cl, individual, body));
  return best;
}

/// Prediction degree of the hypothesis at an individual.
/// Boost: weighted-sum semantics over the weak-learner values (clamped);
/// Foil: max over rules of degree * body degree. Empty hypotheses predict 0.
inline double bed_hypothesis(const KnowledgeBase& kb, const Closure& cl, const Hypothesis& h,
                             const std::string& individual) {
  if (h.kind == Hypothesis::Kind::Boost) {
    double sum = 0.0;
    for (std::size_t i = 0; i < h.weak_learners.size(); ++i)
      sum += h.alphas[i] * weak_learner_degree(kb, cl, h.weak_learners[i], individual);
    return clamp01(sum);
  }
  double best = 0.0;
  for (const auto& rule : h.rules)
    best = std::max(best, rule.degree * concept_degree(kb, cl, individual, rule.body));
  return best;
}

// ---------------------------------------------------------------------------
// Cardinalities and confidence degrees

namespace detail {
template <typename Range>
inline void check_individuals(const KnowledgeBase& kb, const Range& individuals) {
  for (const auto& a : individuals)
    if (!kb.individuals.count(a))
      throw InputError("individual not in the knowledge base: " + a);
}
} // namespace detail

/// |C| over I: sum of truth degrees.
inline double cardinality(const KnowledgeBase& kb, const Closure& cl, const Concept& c,
                          const std::vector<std::string>& individuals) {
  detail::check_individuals(kb, individuals);
  double sum = 0.0;
  for (const auto& a : individuals) sum += concept_degree(kb, cl, a, c);
  return sum;
}

/// Weighted cardinality: sum of w_a * degree. Weights must be nonnegative;
/// individuals without an entry weigh 0.
inline double weighted_cardinality(const KnowledgeBase& kb, const Closure& cl, const Concept& c,
                                   const std::vector<std::string>& individuals,
                                   const WeightDistribution& w) {
  detail::check_individuals(kb, individuals);
  double sum = 0.0;
  for (const auto& a : individuals) {
    auto it = w.find(a);
    if (it == w.end()) continue;
    if (it->second < 0.0) throw InputError("negative weight for individual " + a);
    sum += it->second * concept_degree(kb, cl, a, c);
  }
  return sum;
}

/// Crisp variants: each degree replaced by its ceiling (any positive degree
/// counts as 1).
inline double crisp_cardinality(const KnowledgeBase& kb, const Closure& cl, const Concept& c,
                                const std::vector<std::string>& individuals) {
  detail::check_individuals(kb, individuals);
  double sum = 0.0;
  for (const auto& a : individuals) sum += concept_degree(kb, cl, a, c) > 0.0 ? 1.0 : 0.0;
  return sum;
}

inline double crisp_weighted_cardinality(const KnowledgeBase& kb, const Closure& cl,
                                         const Concept& c,
                                         const std::vector<std::string>& individuals,
                                         const WeightDistribution& w) {
  detail::check_individuals(kb, individuals);
  double sum = 0.0;
  for (const auto& a : individuals) {
    auto it = w.find(a);
    if (it == w.end()) continue;
    if (it->second < 0.0) throw InputError("negative weight for individual " + a);
    sum += it->second * (concept_degree(kb, cl, a, c) > 0.0 ? 1.0 : 0.0);
  }
  return sum;
}

/// Confidence degree cf(body [= head, I) = |body n head| / |body|.
/// nullopt when the body has cardinality 0 (undefined, candidate unusable).
inline std::optional<double> confidence(const KnowledgeBase& kb, const Closure& cl,
                                        const Concept& body, const Concept& head,
                                        const std::vector<std::string>& individuals) {
  const double den = cardinality(kb, cl, body, individuals);
  if (den <= 0.0) return std::nullopt;
  const Concept both = canonicalize(Concept::conj({body, head}));
  return cardinality(kb, cl, both, individuals) / den;
}

inline std::optional<double> weighted_confidence(const KnowledgeBase& kb, const Closure& cl,
                                                 const Concept& body, const Concept& head,
                                                 const std::vector<std::string>& individuals,
                                                 const WeightDistribution& w) {
  const double den = weighted_cardinality(kb, cl, body, individuals, w);
  if (den <= 0.0) return std::nullopt;
  const Concept both = canonicalize(Concept::conj({body, head}));
  return weighted_cardinality(kb, cl, both, individuals, w) / den;
}

// ---------------------------------------------------------------------------

/// Memoizes per-concept degree vectors over a fixed individual order.
/// Refinement search rescoring revisits the same bodies with different
/// weights, so caching degrees (which only depend on the closure) removes
/// nearly all repeated evaluation.
class DegreeCache {
 public:
  DegreeCache(const KnowledgeBase& kb, const Closure& cl, std::vector<std::string> individuals)
      : kb_(&kb), cl_(&cl), individuals_(std::move(individuals)) {}

  const std::vector<std::string>& individuals() const { return individuals_; }

  const std::vector<double>& degrees(const Concept& c) {
    const std::string key = to_string(c);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
    auto vec = std::make_shared<std::vector<double>>();
    vec->reserve(individuals_.size());
    for (const auto& a : individuals_) vec->push_back(concept_degree(*kb_, *cl_, a, c));
    return *cache_.emplace(key, std::move(vec)).first->second;
  }

 private:
  const KnowledgeBase* kb_;
  const Closure* cl_;
  std::vector<std::string> individuals_;
  std::map<std::string, std::shared_ptr<const std::vector<double>>> cache_;
};

}  // namespace feb
