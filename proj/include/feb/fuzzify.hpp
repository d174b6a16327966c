#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "feb/closure.hpp"
#include "feb/kb.hpp"

namespace feb {

struct FuzzificationConfig {
  enum class Method { Uniform, CMeans };

  Method method = Method::Uniform;
  int partitions = 3;            // 3, 5 or 7
  double cmeans_fuzzifier = 2.0; // m
  double cmeans_epsilon = 0.05;  // max centroid displacement
  int cmeans_max_iter = 100;
  unsigned long rng_seed = 0; // reserved for tie perturbation

  void validate() const {
    if (partitions != 3 && partitions != 5 && partitions != 7)
      throw InputError("partition count must be 3, 5 or 7");
    if (cmeans_fuzzifier <= 1.0) throw InputError("c-means fuzzifier m must be > 1");
    if (cmeans_epsilon <= 0.0) throw InputError("c-means epsilon must be > 0");
    if (cmeans_max_iter < 1) throw InputError("c-means max iterations must be >= 1");
  }
};

inline const char* to_string(FuzzificationConfig::Method m) {
  return m == FuzzificationConfig::Method::Uniform ? "uniform" : "cmeans";
}

/// One named fuzzy set over a numeric data property.
struct FuzzyDatatype {
  std::string data_property;
  DatatypePredicate predicate;
  std::string label; // e.g. "Alcohol_VVL"
};

/// All asserted values of a numeric data property across the named
/// individuals, sorted ascending with duplicates kept. Empty when nothing
/// is asserted (the property is then skipped by the learner).
inline std::vector<double> collect_values(const KnowledgeBase& kb, const Closure& cl,
                                          const std::string& property) {
  if (!kb.is_numeric_data_property(property))
    throw InputError("not a numeric data property: " + property);
  std::vector<double> out;
  for (const auto& a : kb.individuals)
    if (const auto* vals = cl.values(a, property))
      for (const auto& v : *vals) out.push_back(v.number);
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

inline const std::vector<std::string>& linguistic_tags(int k) {
  static const std::vector<std::string> tags3 = {"L", "F", "H"};
  static const std::vector<std::string> tags5 = {"VL", "L", "F", "H", "VH"};
  static const std::vector<std::string> tags7 = {"VVL", "VL", "L", "F", "H", "VH", "VVH"};
  switch (k) {
    case 3: return tags3;
    case 5: return tags5;
    default: return tags7;
  }
}

/// Shoulders at the extremes, triangles around the interior centers.
inline std::vector<FuzzyDatatype> predicates_from_centers(const std::string& property,
                                                          const std::vector<double>& c) {
  const std::size_t k = c.size();
  const auto& tags = linguistic_tags(static_cast<int>(k));
  std::vector<FuzzyDatatype> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::string label =
        property + "_" + (i < tags.size() ? tags[i] : "P" + std::to_string(i + 1));
    DatatypePredicate pred;
    if (i == 0)
      pred = DatatypePredicate::left_shoulder(c[0], c[1], label);
    else if (i + 1 == k)
      pred = DatatypePredicate::right_shoulder(c[k - 2], c[k - 1], label);
    else
      pred = DatatypePredicate::triangular(c[i - 1], c[i], c[i + 1], label);
    out.push_back({property, std::move(pred), label});
  }
  return out;
}

/// Keeps centers strictly increasing by nudging collided ones upward.
inline void separate_centers(std::vector<double>& c, double range) {
  const double bump = 1e-9 * (range > 0.0 ? range : 1.0);
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i] - c[i - 1] < 1e-12) c[i] = c[i - 1] + bump;
}

}  // namespace detail

/// Equal-width partition into k fuzzy sets over [min,max]; the memberships
/// of the resulting family sum to 1 at every point of the range.
/// nullopt when the value domain is empty or degenerate (min == max).
inline std::optional<std::vector<FuzzyDatatype>> uniform_partition(
    const std::string& property, const std::vector<double>& values, int k) {
  if (k < 2) throw InputError("uniform partition needs at least 2 fuzzy sets");
  if (values.empty()) return std::nullopt;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (lo == hi) return std::nullopt;
  std::vector<double> centers(k);
  const double step = (hi - lo) / (k - 1);
  for (int i = 0; i < k; ++i) centers[i] = lo + step * i;
  centers.back() = hi; // exact endpoint
  return detail::predicates_from_centers(property, centers);
}

/// One run of fuzzy c-means on a 1-D value multiset.
struct FcmResult {
  std::vector<double> centroids;                 // sorted ascending
  std::vector<std::vector<double>> memberships;  // [value index][cluster], rows sum to 1
  std::vector<double> objective_history;         // J after each iteration
  int iterations = 0;
  bool converged = false;
};

/// Fuzzy c-means, deterministic: centroids seeded at evenly spaced
/// quantiles, alternating membership/centroid updates until the largest
/// centroid displacement drops below epsilon or max_iter is reached
/// (the last iterate is accepted either way).
inline FcmResult fcm_cluster(const std::vector<double>& values, int k, double m = 2.0,
                             double epsilon = 0.05, int max_iter = 100) {
  if (values.empty()) throw InputError("c-means requires a nonempty value set");
  if (k < 1) throw InputError("c-means requires k >= 1");
  if (m <= 1.0) throw InputError("c-means fuzzifier m must be > 1");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const double range = sorted.back() - sorted.front();
  const std::size_t n = sorted.size();

  FcmResult res;
  res.centroids.resize(k);
  for (int j = 0; j < k; ++j) {
    const std::size_t idx = k == 1 ? (n - 1) / 2 : (j * (n - 1)) / (k - 1);
    res.centroids[j] = sorted[idx];
  }
  detail::separate_centers(res.centroids, range);

  const double exponent = 2.0 / (m - 1.0);
  res.memberships.assign(n, std::vector<double>(k, 0.0));

  for (int iter = 0; iter < max_iter; ++iter) {
    // Membership update; points coinciding with a centroid split their
    // membership equally among the coincident centroids.
    for (std::size_t i = 0; i < n; ++i) {
      auto& u = res.memberships[i];
      std::vector<int> exact;
      for (int j = 0; j < k; ++j)
        if (sorted[i] == res.centroids[j]) exact.push_back(j);
      if (!exact.empty()) {
        std::fill(u.begin(), u.end(), 0.0);
        for (int j : exact) u[j] = 1.0 / exact.size();
        continue;
      }
      for (int j = 0; j < k; ++j) {
        const double dj = std::abs(sorted[i] - res.centroids[j]);
        double denom = 0.0;
        for (int l = 0; l < k; ++l)
          denom += std::pow(dj / std::abs(sorted[i] - res.centroids[l]), exponent);
        u[j] = 1.0 / denom;
      }
    }

    // Centroid update.
    double max_shift = 0.0;
    for (int j = 0; j < k; ++j) {
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double um = std::pow(res.memberships[i][j], m);
        num += um * sorted[i];
        den += um;
      }
      if (den > 0.0) {
        const double next = num / den;
        max_shift = std::max(max_shift, std::abs(next - res.centroids[j]));
        res.centroids[j] = next;
      }
    }

    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) {
        const double d = sorted[i] - res.centroids[j];
        objective += std::pow(res.memberships[i][j], m) * d * d;
      }
    res.objective_history.push_back(objective);
    res.iterations = iter + 1;
    if (max_shift < epsilon) {
      res.converged = true;
      break;
    }
  }

  std::sort(res.centroids.begin(), res.centroids.end());
  detail::separate_centers(res.centroids, range);
  return res;
}

/// C-means-based partition: cluster the value multiset, then build the
/// usual shoulder/triangle family around the sorted centroids.
/// nullopt when there are fewer distinct values than clusters.
inline std::optional<std::vector<FuzzyDatatype>> cmeans_partition(
    const std::string& property, const std::vector<double>& values, int k,
    const FuzzificationConfig& config) {
  if (values.empty()) return std::nullopt;
  std::vector<double> distinct(values);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (static_cast<int>(distinct.size()) < k) return std::nullopt;
  FcmResult fcm = fcm_cluster(values, k, config.cmeans_fuzzifier, config.cmeans_epsilon,
                              config.cmeans_max_iter);
  return detail::predicates_from_centers(property, fcm.centroids);
}

/// Candidate fuzzy datatypes for every numeric data property of the KB.
/// Properties with no values or a degenerate domain are skipped.
inline std::map<std::string, std::vector<FuzzyDatatype>> build_fuzzy_datatypes(
    const KnowledgeBase& kb, const Closure& cl, const FuzzificationConfig& config) {
  config.validate();
  std::map<std::string, std::vector<FuzzyDatatype>> out;
  for (const auto& [prop, type] : kb.data_properties) {
    if (type == Literal::Type::Bool) continue; // booleans are handled by refinement directly
    const std::vector<double> values = collect_values(kb, cl, prop);
    std::optional<std::vector<FuzzyDatatype>> built =
        config.method == FuzzificationConfig::Method::Uniform
            ? uniform_partition(prop, values, config.partitions)
            : cmeans_partition(prop, values, config.partitions, config);
    if (built) out.emplace(prop, std::move(*built));
  }
  return out;
}

}  // namespace feb
