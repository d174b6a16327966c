#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "feb/refine.hpp"
#include "feb/semantics.hpp"

namespace feb {

/// Labeled examples: positives (label 1) and non-positives (label 0),
/// disjoint subsets of Ind_K. The KB itself must not already entail the
/// target for any example (targets are stripped before training).
struct TrainingSet {
  std::set<std::string> positives;
  std::set<std::string> non_positives;

  std::vector<std::string> individuals() const {
    std::vector<std::string> all(positives.begin(), positives.end());
    all.insert(all.end(), non_positives.begin(), non_positives.end());
    std::sort(all.begin(), all.end());
    return all;
  }

  bool is_positive(const std::string& a) const { return positives.count(a) > 0; }

  void validate(const KnowledgeBase& kb) const {
    if (positives.empty()) throw InputError("training set has no positive examples");
    for (const auto& a : positives)
      if (non_positives.count(a))
        throw InputError("example labeled both positive and non-positive: " + a);
    for (const auto& a : individuals())
      if (!kb.individuals.count(a))
        throw InputError("example individual not in the knowledge base: " + a);
  }

  /// Checks the open-world assumption on examples: after target stripping
  /// the KB must not entail the target for any of them.
  void check_target_unknown(const KnowledgeBase& kb, const Closure& cl,
                            const std::string& target) const {
    for (const auto& a : individuals())
      if (cl.has_atom(a, target))
        throw InputError("knowledge base already entails the target for example " + a +
                         "; target assertions must be stripped before learning");
  }
};

struct LearnParams {
  double theta = 0.34; // confidence threshold
  double eta = 1.0;    // tolerated non-positive crisp coverage fraction
  int iterations = 10; // boosting rounds n
  int backtrack_k = 0; // top-k backtracking stack size, 0 = off
  bool error_magnitude = false; // use |h| instead of h in the weak error

  void validate() const {
    if (theta < 0.0 || theta > 1.0) throw InputError("theta must be in [0,1]");
    if (eta < 0.0 || eta > 1.0) throw InputError("eta must be in [0,1]");
    if (iterations < 1) throw InputError("iterations must be >= 1");
    if (backtrack_k < 0) throw InputError("backtrack-k must be >= 0");
  }
};

/// t: [0,1] -> {-1} u (0,1]. Maps a prediction degree into the signed range
/// required by real-valued boosting.
inline double transform_t(double x) { return x == 0.0 ? -1.0 : x; }

/// 1 iff the signs of prediction h and label l disagree.
inline int disagreement_delta(double h, double l) { return h * l < 0.0 ? 1 : 0; }

/// Information-theoretic gain of moving from a body with confidence cf_old
/// to a refinement with confidence cf_new, scaled by the weighted positive
/// mass p the refinement retains. Positive iff the confidence increases.
inline double gain_value(double p, double cf_new, double cf_old) {
  return p * (std::log2(cf_new) - std::log2(cf_old));
}

/// Weak-hypothesis error w.r.t. a distribution: sum of w * delta(h,l) * h.
/// The literal formula is signed, so uncovered positives (h = -1) contribute
/// negatively; `magnitude` substitutes |h| instead.
inline double weak_error(const std::vector<double>& h_values, const std::vector<double>& labels,
                         const std::vector<double>& weights, bool magnitude = false) {
  double err = 0.0;
  for (std::size_t i = 0; i < h_values.size(); ++i)
    if (disagreement_delta(h_values[i], labels[i]))
      err += weights[i] * (magnitude ? std::abs(h_values[i]) : h_values[i]);
  return err;
}

namespace detail {

/// Shared, index-aligned view of one learning problem: degrees are cached
/// per body over the fixed example order.
struct ExampleView {
  std::vector<std::string> individuals; // sorted Ind_E
  std::vector<char> positive;           // aligned with individuals
  std::vector<double> labels;           // +1 / -1

  static ExampleView make(const TrainingSet& examples) {
    ExampleView v;
    v.individuals = examples.individuals();
    v.positive.reserve(v.individuals.size());
    v.labels.reserve(v.individuals.size());
    for (const auto& a : v.individuals) {
      const bool pos = examples.is_positive(a);
      v.positive.push_back(pos ? 1 : 0);
      v.labels.push_back(pos ? 1.0 : -1.0);
    }
    return v;
  }

  std::size_t size() const { return individuals.size(); }

  std::vector<double> weights_from(const WeightDistribution& w) const {
    std::vector<double> out;
    out.reserve(size());
    for (const auto& a : individuals) {
      auto it = w.find(a);
      const double wa = it == w.end() ? 0.0 : it->second;
      if (wa < 0.0) throw InputError("negative weight for individual " + a);
      out.push_back(wa);
    }
    return out;
  }
};

/// Weighted confidence of body [= target with the numerator restricted to
/// the positives still to be covered (guides the search towards them).
inline std::optional<double> weighted_cf_pos(const std::vector<double>& degrees,
                                             const std::vector<double>& weights,
                                             const std::vector<char>& in_pos) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    const double wd = weights[i] * degrees[i];
    den += wd;
    if (in_pos[i]) num += wd;
  }
  if (den <= 0.0) return std::nullopt;
  return num / den;
}

/// Plain confidence of body [= target over all examples, reading the target
/// degree off the labels (the KB itself never entails the target here).
inline std::optional<double> plain_cf(const std::vector<double>& degrees,
                                      const std::vector<char>& positive) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    den += degrees[i];
    if (positive[i]) num += degrees[i];
  }
  if (den <= 0.0) return std::nullopt;
  return num / den;
}

/// Fraction of non-positives crisply covered by the body.
inline double crisp_negative_coverage(const std::vector<double>& degrees,
                                      const std::vector<char>& positive) {
  std::size_t covered = 0, negatives = 0;
  for (std::size_t i = 0; i < degrees.size(); ++i)
    if (!positive[i]) {
      ++negatives;
      if (degrees[i] > 0.0) ++covered;
    }
  return negatives == 0 ? 0.0 : static_cast<double>(covered) / negatives;
}

/// Ranked stack of fallback refinements for optional backtracking.
class BacktrackStack {
 public:
  explicit BacktrackStack(int capacity) : capacity_(capacity) {}

  void offer(const Concept& c, double cf) {
    if (capacity_ <= 0) return;
    entries_.push_back({cf, c});
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const Entry& a, const Entry& b) { return a.cf > b.cf; });
    if (entries_.size() > static_cast<std::size_t>(capacity_)) entries_.resize(capacity_);
  }

  std::optional<Concept> pop() {
    if (entries_.empty()) return std::nullopt;
    Concept top = std::move(entries_.front().concept_);
    entries_.erase(entries_.begin());
    return top;
  }

 private:
  struct Entry {
    double cf;
    Concept concept_;
  };
  int capacity_;
  std::vector<Entry> entries_;
};

}  // namespace detail

/// Greedy gain-guided search for one rule body C with C [= target.
/// Starting from top, repeatedly applies the refinement operator and moves
/// to the best-gain candidate whose confidence strictly increases. When no
/// candidate improves, the current body is returned iff its confidence
/// reaches theta and its crisp non-positive coverage stays within eta;
/// otherwise (after optional backtracking) nothing is returned.
inline std::optional<Concept> learn_one_axiom(const TrainingSet& examples,
                                              const WeightDistribution& w,
                                              const std::set<std::string>& pos_to_cover,
                                              const LearnParams& params,
                                              const RefinementContext& ctx, DegreeCache& cache) {
  const detail::ExampleView view = detail::ExampleView::make(examples);
  const std::vector<double> weights = view.weights_from(w);
  std::vector<char> in_pos(view.size(), 0);
  for (std::size_t i = 0; i < view.size(); ++i)
    if (pos_to_cover.count(view.individuals[i])) in_pos[i] = 1;

  std::set<std::string> seen; // canonical forms generated in this search
  detail::BacktrackStack backtrack(params.backtrack_k);

  Concept current = Concept::top();
  seen.insert(to_string(current));

  while (true) {
    const std::vector<double>& cur_degrees = cache.degrees(current);
    const std::optional<double> cur_cf = detail::weighted_cf_pos(cur_degrees, weights, in_pos);

    const Concept* best = nullptr;
    double max_gain = 0.0;
    std::vector<Concept> candidates = refine(current, ctx, seen);
    std::vector<std::pair<Concept, double>> scored; // for backtracking
    for (const auto& cand : candidates) {
      const std::vector<double>& deg = cache.degrees(cand);
      const std::optional<double> cf = detail::weighted_cf_pos(deg, weights, in_pos);
      if (!cf) continue; // undefined confidence disqualifies the candidate
      if (params.backtrack_k > 0) scored.emplace_back(cand, *cf);
      if (!cur_cf || *cf <= *cur_cf) continue;
      double p = 0.0; // weighted mass of still-to-cover positives kept by the refinement
      for (std::size_t i = 0; i < view.size(); ++i)
        if (in_pos[i]) p += weights[i] * std::min(deg[i], cur_degrees[i]);
      const double gain = *cur_cf > 0.0 ? gain_value(p, *cf, *cur_cf) : 0.0;
      if (gain > max_gain) {
        max_gain = gain;
        best = &cand;
      }
    }

    for (auto& [cand, cf] : scored)
      if (!best || !(cand == *best)) backtrack.offer(cand, cf);
    if (best) {
      current = *best;
      continue;
    }

    // No improvement: accept if the stop conditions hold, else backtrack.
    const std::optional<double> cf_stop = detail::plain_cf(cur_degrees, view.positive);
    const double neg_cov = detail::crisp_negative_coverage(cur_degrees, view.positive);
    if (cf_stop && *cf_stop >= params.theta && neg_cov <= params.eta) return current;
    if (auto popped = backtrack.pop()) {
      current = std::move(*popped);
      continue;
    }
    return std::nullopt;
  }
}

/// Sequential covering weak learner: accumulates axioms until every positive
/// is covered, nothing new can be learned, or the learned axiom repeats.
inline std::vector<Concept> wfoildl(const TrainingSet& examples, const WeightDistribution& w,
                                    const LearnParams& params, const RefinementContext& ctx,
                                    DegreeCache& cache) {
  std::vector<Concept> bodies;
  std::set<std::string> pos(examples.positives);
  while (!pos.empty()) {
    std::optional<Concept> body = learn_one_axiom(examples, w, pos, params, ctx, cache);
    if (!body) break;
    if (std::any_of(bodies.begin(), bodies.end(),
                    [&](const Concept& b) { return b == *body; }))
      break; // axiom already learned
    bodies.push_back(*body);
    const std::vector<double>& deg = cache.degrees(*body);
    const auto& individuals = cache.individuals();
    for (std::size_t i = 0; i < individuals.size(); ++i)
      if (deg[i] > 0.0) pos.erase(individuals[i]);
  }
  return bodies;
}

/// One boosting round's bookkeeping, exposed for inspection and testing.
struct BoostRound {
  std::vector<Concept> bodies;
  std::vector<double> h_values; // t-transformed per-example values
  double error = 0.0;
  double h_star = 0.0;
  double mu = 0.0; // clamped normalized margin
  double alpha = 0.0;
  std::vector<double> weights_after; // renormalized
};

namespace detail {

constexpr double kMuClamp = 1.0 - 1e-6;

/// Margin, leveraging weight and weight update for one round, given the
/// t-transformed weak-hypothesis values. The update is self-normalizing for
/// unclamped margins; renormalization keeps it an exact distribution when
/// the clamp engages.
inline void compute_round(BoostRound& round, const std::vector<double>& labels,
                          const std::vector<double>& weights) {
  const std::vector<double>& h = round.h_values;
  round.h_star = 0.0;
  for (double v : h) round.h_star = std::max(round.h_star, std::abs(v));
  double mu = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) mu += weights[i] * labels[i] * h[i];
  mu /= round.h_star;
  round.mu = std::clamp(mu, -kMuClamp, kMuClamp);
  round.alpha = 1.0 / (2.0 * round.h_star) * std::log((1.0 + round.mu) / (1.0 - round.mu));
  round.weights_after.resize(h.size());
  double total = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    round.weights_after[i] = weights[i] *
        (1.0 - round.mu * labels[i] * h[i] / round.h_star) / (1.0 - round.mu * round.mu);
    total += round.weights_after[i];
  }
  for (double& wi : round.weights_after) wi /= total;
}

inline std::string fresh_weak_learner_name(const KnowledgeBase& kb, std::size_t index) {
  std::string base = "WL" + std::to_string(index);
  std::string name = base;
  const std::set<std::string> taken = all_kb_names(kb);
  for (unsigned suffix = 2; taken.count(name); ++suffix)
    name = base + "_" + std::to_string(suffix);
  return name;
}

}  // namespace detail

/// Real-valued boosting over the sequential-covering weak learner. Returns
/// the ensemble hypothesis; rounds stop early when the weak error reaches
/// 0.5 or the weak learner comes back empty.
inline Hypothesis boost(const KnowledgeBase& kb, const std::string& target,
                        const TrainingSet& examples, const LearnParams& params,
                        const RefinementContext& ctx, DegreeCache& cache,
                        std::vector<BoostRound>* trace = nullptr) {
  params.validate();
  examples.validate(kb);
  const detail::ExampleView view = detail::ExampleView::make(examples);
  const std::size_t n = view.size();

  Hypothesis h;
  h.kind = Hypothesis::Kind::Boost;
  h.target = target;

  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  for (int round_index = 1; round_index <= params.iterations; ++round_index) {
    WeightDistribution w;
    for (std::size_t i = 0; i < n; ++i) w[view.individuals[i]] = weights[i];

    BoostRound round;
    round.bodies = wfoildl(examples, w, params, ctx, cache);
    if (round.bodies.empty()) {
      if (round_index == 1)
        throw LearnError("weak learner produced no axioms in the first round (target '" +
                         target + "', " + std::to_string(examples.positives.size()) +
                         " positives, " + std::to_string(examples.non_positives.size()) +
                         " non-positives, theta=" + std::to_string(params.theta) +
                         ", eta=" + std::to_string(params.eta) + ")");
      break; // keep the rounds accumulated so far
    }

    round.h_values.assign(n, 0.0);
    for (const auto& body : round.bodies) {
      const std::vector<double>& deg = cache.degrees(body);
      for (std::size_t i = 0; i < n; ++i) round.h_values[i] = std::max(round.h_values[i], deg[i]);
    }
    for (double& v : round.h_values) v = transform_t(v);

    round.error = weak_error(round.h_values, view.labels, weights, params.error_magnitude);
    if (round.error >= 0.5) {
      if (trace) trace->push_back(round);
      break; // weak hypothesis no better than chance
    }

    detail::compute_round(round, view.labels, weights);
    weights = round.weights_after;

    WeakLearnerBlock block;
    block.name = detail::fresh_weak_learner_name(kb, h.weak_learners.size() + 1);
    block.bodies = round.bodies;
    h.weak_learners.push_back(std::move(block));
    h.alphas.push_back(round.alpha);
    if (trace) trace->push_back(round);
  }

  return h;
}

/// Baseline rule learner: iterates the single-axiom search with covered
/// positives zeroed out of the distribution, attaching each rule's
/// confidence over the examples as its degree.
inline Hypothesis foil_dl(const KnowledgeBase& kb, const std::string& target,
                          const TrainingSet& examples, const LearnParams& params,
                          const RefinementContext& ctx, DegreeCache& cache) {
  params.validate();
  examples.validate(kb);
  const detail::ExampleView view = detail::ExampleView::make(examples);

  Hypothesis h;
  h.kind = Hypothesis::Kind::Foil;
  h.target = target;

  std::set<std::string> covered;
  std::set<std::string> pos(examples.positives);
  while (!pos.empty()) {
    WeightDistribution w;
    const std::size_t active = view.size() - covered.size();
    for (const auto& a : view.individuals)
      w[a] = covered.count(a) ? 0.0 : 1.0 / static_cast<double>(active);

    std::optional<Concept> body = learn_one_axiom(examples, w, pos, params, ctx, cache);
    if (!body) break;
    if (std::any_of(h.rules.begin(), h.rules.end(),
                    [&](const FoilRule& r) { return r.body == *body; }))
      break;

    const std::vector<double>& deg = cache.degrees(*body);
    const std::optional<double> degree = detail::plain_cf(deg, view.positive);
    if (!degree || *degree <= 0.0) break; // rule covers no positive mass
    h.rules.push_back({*body, *degree});

    for (std::size_t i = 0; i < view.size(); ++i)
      if (view.positive[i] && deg[i] > 0.0) {
        covered.insert(view.individuals[i]);
        pos.erase(view.individuals[i]);
      }
  }

  if (h.rules.empty())
    throw LearnError("rule learner produced no axioms (target '" + target + "', " +
                     std::to_string(examples.positives.size()) + " positives, " +
                     std::to_string(examples.non_positives.size()) + " non-positives)");
  return h;
}

}  // namespace feb
