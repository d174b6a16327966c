#pragma once

#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "feb/kb.hpp"

namespace feb {

/// TBox axiom in completion normal form.
struct NormalizedGci {
  enum class Kind { TopSub, AtomSub, ConjSub, ExistsSub };
  Kind kind = Kind::AtomSub;
  std::string a1;   // AtomSub/ConjSub/ExistsSub (filler atom)
  std::string a2;   // ConjSub second conjunct
  std::string role; // ExistsSub
  std::string head;
};

/// Deductive closure of a crisp KB under the completion rules
///   (R1) A in cl(x), A [= B            => B in cl(x)
///   (R2) A1, A2 in cl(x), A1 n A2 [= B => B in cl(x)
///   (R3) (x,r,y), A in cl(y), Er.A [= B => B in cl(x)
/// computed on the normalized TBox. Existential assertions introduce
/// anonymous successor individuals; right-hand existential axioms do not.
/// The approximation is sound but not complete for full EL entailment.
class Closure {
 public:
  // individual (named or anonymous) -> entailed atoms (including normalization auxiliaries)
  std::map<std::string, std::set<std::string>> instance_atoms;
  // declared atom -> entailed super-atoms (reflexive)
  std::map<std::string, std::set<std::string>> atom_supers;
  // individual -> role -> successors
  std::map<std::string, std::map<std::string, std::set<std::string>>> role_successors;
  // individual -> data property -> asserted values
  std::map<std::string, std::map<std::string, std::vector<Literal>>> data_values;

  static const std::set<std::string>& empty_atom_set() {
    static const std::set<std::string> empty;
    return empty;
  }

  const std::set<std::string>& atoms(const std::string& individual) const {
    auto it = instance_atoms.find(individual);
    return it == instance_atoms.end() ? empty_atom_set() : it->second;
  }
  bool has_atom(const std::string& individual, const std::string& atom) const {
    return atoms(individual).count(atom) > 0;
  }
  const std::set<std::string>& successors(const std::string& individual,
                                          const std::string& role) const {
    auto it = role_successors.find(individual);
    if (it == role_successors.end()) return empty_atom_set();
    auto jt = it->second.find(role);
    return jt == it->second.end() ? empty_atom_set() : jt->second;
  }
  const std::vector<Literal>* values(const std::string& individual,
                                     const std::string& property) const {
    auto it = data_values.find(individual);
    if (it == data_values.end()) return nullptr;
    auto jt = it->second.find(property);
    return jt == it->second.end() ? nullptr : &jt->second;
  }

  /// True iff the TBox entails sub [= super (over declared concept names).
  bool subsumes(const std::string& super, const std::string& sub) const {
    auto it = atom_supers.find(sub);
    return it != atom_supers.end() && it->second.count(super) > 0;
  }

  /// Declared atoms strictly below `atom` in the subsumption order.
  std::vector<std::string> strict_sub_atoms(const std::string& atom) const {
    std::vector<std::string> out;
    for (const auto& [sub, supers] : atom_supers)
      if (sub != atom && supers.count(atom)) out.push_back(sub);
    return out;
  }

  friend bool operator==(const Closure& a, const Closure& b) {
    auto values_eq = [](const Closure& x, const Closure& y) {
      if (x.data_values.size() != y.data_values.size()) return false;
      for (const auto& [ind, props] : x.data_values) {
        auto it = y.data_values.find(ind);
        if (it == y.data_values.end() || it->second.size() != props.size()) return false;
        for (const auto& [prop, vals] : props) {
          auto jt = it->second.find(prop);
          if (jt == it->second.end() || !(jt->second == vals)) return false;
        }
      }
      return true;
    };
    return a.instance_atoms == b.instance_atoms && a.atom_supers == b.atom_supers &&
           a.role_successors == b.role_successors && values_eq(a, b) && values_eq(b, a);
  }
};

namespace detail {

class FreshNames {
 public:
  explicit FreshNames(std::set<std::string> taken) : taken_(std::move(taken)) {}

  std::string make(const std::string& prefix) {
    std::string name;
    do {
      name = prefix + std::to_string(++counter_);
    } while (taken_.count(name));
    taken_.insert(name);
    return name;
  }

 private:
  std::set<std::string> taken_;
  unsigned long counter_ = 0;
};

inline std::set<std::string> all_kb_names(const KnowledgeBase& kb) {
  std::set<std::string> names(kb.concept_names);
  names.insert(kb.object_properties.begin(), kb.object_properties.end());
  for (const auto& [p, t] : kb.data_properties) names.insert(p);
  names.insert(kb.individuals.begin(), kb.individuals.end());
  return names;
}

/// Rewrites the TBox into completion normal form, introducing auxiliary
/// atoms for non-atomic subexpressions (standard EL normalization).
class TboxNormalizer {
 public:
  explicit TboxNormalizer(const KnowledgeBase& kb) : fresh_(all_kb_names(kb)) {}

  std::vector<NormalizedGci> run(const std::vector<Gci>& tbox) {
    std::vector<NormalizedGci> out;
    for (const auto& gci : tbox) emit(gci.body, gci.head, out);
    return out;
  }

  const std::set<std::string>& aux_atoms() const { return aux_; }

 private:
  void emit(const Concept& body, const std::string& head, std::vector<NormalizedGci>& out) {
    switch (body.kind) {
      case ConceptKind::Top:
        out.push_back({NormalizedGci::Kind::TopSub, "", "", "", head});
        return;
      case ConceptKind::Atom:
        out.push_back({NormalizedGci::Kind::AtomSub, body.name, "", "", head});
        return;
      case ConceptKind::ExistsObject: {
        std::string filler = atomize(body.filler(), out);
        out.push_back({NormalizedGci::Kind::ExistsSub, filler, "", body.name, head});
        return;
      }
      case ConceptKind::And: {
        std::vector<std::string> atoms;
        for (const auto& child : body.children) atoms.push_back(atomize(child, out));
        if (atoms.empty()) {
          out.push_back({NormalizedGci::Kind::TopSub, "", "", "", head});
        } else if (atoms.size() == 1) {
          out.push_back({NormalizedGci::Kind::AtomSub, atoms[0], "", "", head});
        } else {
          std::string acc = atoms[0];
          for (std::size_t i = 1; i + 1 < atoms.size(); ++i) {
            std::string aux = make_aux();
            out.push_back({NormalizedGci::Kind::ConjSub, acc, atoms[i], "", aux});
            acc = aux;
          }
          out.push_back({NormalizedGci::Kind::ConjSub, acc, atoms.back(), "", head});
        }
        return;
      }
      default:
        throw InputError("TBox body outside the EL fragment: " + to_string(body));
    }
  }

  std::string atomize(const Concept& c, std::vector<NormalizedGci>& out) {
    if (c.is(ConceptKind::Atom)) return c.name;
    std::string aux = make_aux();
    emit(c, aux, out);
    return aux;
  }

  std::string make_aux() {
    std::string aux = fresh_.make("_x");
    aux_.insert(aux);
    return aux;
  }

  FreshNames fresh_;
  std::set<std::string> aux_;
};

}  // namespace detail

/// Computes the deductive closure of `kb`. Deterministic and idempotent:
/// running the completion rules on the result adds nothing.
inline Closure complete(const KnowledgeBase& kb) {
  Closure cl;
  detail::FreshNames anon(detail::all_kb_names(kb));

  // Base facts. Complex concept assertions are decomposed structurally;
  // existential assertions get a fresh anonymous successor each.
  for (const auto& a : kb.individuals) cl.instance_atoms[a]; // ensure entry
  std::vector<std::pair<std::string, std::string>> pending;  // (individual, atom)

  auto assert_concept = [&](auto&& self, const std::string& ind, const Concept& c) -> void {
    switch (c.kind) {
      case ConceptKind::Top:
        cl.instance_atoms[ind];
        return;
      case ConceptKind::Atom:
        pending.emplace_back(ind, c.name);
        return;
      case ConceptKind::And:
        for (const auto& child : c.children) self(self, ind, child);
        return;
      case ConceptKind::ExistsObject: {
        std::string succ = anon.make("_i");
        cl.role_successors[ind][c.name].insert(succ);
        cl.instance_atoms[succ];
        self(self, succ, c.filler());
        return;
      }
      case ConceptKind::ExistsData:
        cl.data_values[ind][c.name].push_back(c.predicate.value);
        return;
      default:
        throw InputError("assertion concept outside the crisp fragment: " + to_string(c));
    }
  };
  for (const auto& ca : kb.concept_assertions) assert_concept(assert_concept, ca.individual, ca.expr);
  for (const auto& ra : kb.role_assertions) cl.role_successors[ra.subject][ra.role].insert(ra.object);
  for (const auto& da : kb.data_assertions) cl.data_values[da.individual][da.property].push_back(da.value);

  // Rule indexes keyed by the triggering atom.
  detail::TboxNormalizer normalizer(kb);
  const std::vector<NormalizedGci> rules = normalizer.run(kb.tbox);
  std::map<std::string, std::vector<std::string>> atom_rules;                        // A -> heads
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> conj_rules; // A -> (partner, head)
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> exists_rules; // filler -> (role, head)
  std::vector<std::string> top_heads;
  for (const auto& r : rules) {
    switch (r.kind) {
      case NormalizedGci::Kind::TopSub: top_heads.push_back(r.head); break;
      case NormalizedGci::Kind::AtomSub: atom_rules[r.a1].push_back(r.head); break;
      case NormalizedGci::Kind::ConjSub:
        conj_rules[r.a1].emplace_back(r.a2, r.head);
        conj_rules[r.a2].emplace_back(r.a1, r.head);
        break;
      case NormalizedGci::Kind::ExistsSub: exists_rules[r.a1].emplace_back(r.role, r.head); break;
    }
  }

  // Inverse role index; role facts are static (rules only derive atoms).
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> predecessors;
  for (const auto& [ind, per_role] : cl.role_successors)
    for (const auto& [role, succs] : per_role)
      for (const auto& succ : succs) predecessors[succ].emplace_back(ind, role);

  std::deque<std::pair<std::string, std::string>> queue;
  auto add_fact = [&](const std::string& ind, const std::string& atom) {
    if (cl.instance_atoms[ind].insert(atom).second) queue.emplace_back(ind, atom);
  };
  for (const auto& [ind, atom] : pending) add_fact(ind, atom);
  for (const auto& [ind, atoms] : cl.instance_atoms)
    for (const auto& h : top_heads) add_fact(ind, h);

  while (!queue.empty()) {
    auto [ind, atom] = queue.front();
    queue.pop_front();
    if (auto it = atom_rules.find(atom); it != atom_rules.end())
      for (const auto& head : it->second) add_fact(ind, head);
    if (auto it = conj_rules.find(atom); it != conj_rules.end())
      for (const auto& [partner, head] : it->second)
        if (cl.has_atom(ind, partner)) add_fact(ind, head);
    if (auto it = exists_rules.find(atom); it != exists_rules.end())
      for (const auto& [role, head] : it->second)
        if (auto pt = predecessors.find(ind); pt != predecessors.end())
          for (const auto& [pred, prole] : pt->second)
            if (prole == role) add_fact(pred, head);
  }

  // Atom-level subsumption: saturate each declared atom's prototype under
  // R1/R2 (R3 cannot fire without role facts).
  for (const auto& atom : kb.concept_names) {
    std::set<std::string> supers{atom};
    for (const auto& h : top_heads) supers.insert(h);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& r : rules) {
        bool fires = false;
        if (r.kind == NormalizedGci::Kind::AtomSub)
          fires = supers.count(r.a1) > 0;
        else if (r.kind == NormalizedGci::Kind::ConjSub)
          fires = supers.count(r.a1) > 0 && supers.count(r.a2) > 0;
        if (fires && supers.insert(r.head).second) changed = true;
      }
    }
    // Expose declared names only; auxiliaries are an encoding detail.
    std::set<std::string> declared;
    for (const auto& s : supers)
      if (kb.is_class(s)) declared.insert(s);
    cl.atom_supers[atom] = std::move(declared);
  }

  // Normalization auxiliaries stay internal to the saturation.
  if (!normalizer.aux_atoms().empty())
    for (auto& [ind, atoms] : cl.instance_atoms)
      for (auto it = atoms.begin(); it != atoms.end();)
        it = normalizer.aux_atoms().count(*it) ? atoms.erase(it) : std::next(it);

  return cl;
}

}  // namespace feb
