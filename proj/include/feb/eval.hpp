#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "feb/learn.hpp"

namespace feb {

/// The effectiveness measures, fuzzy and crisp, for one evaluation.
/// Undefined precision/recall (zero denominator) is reported as 0 with the
/// corresponding flag set, which keeps aggregation total.
struct MetricsRecord {
  double tp_f = 0, fp_f = 0, tnp_f = 0, fnp_f = 0;
  double precision_f = 0, recall_f = 0, f1_f = 0;
  double tp = 0, fp = 0, tnp = 0, fnp = 0;
  double precision = 0, recall = 0, f1 = 0;
  double mse = 0;
  double ff1f1 = 0;
  bool precision_f_undefined = false, precision_undefined = false;
  bool recall_f_undefined = false, recall_undefined = false;
};

namespace detail {
inline double harmonic_f1(double p, double r) {
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}
} // namespace detail

/// Computes the metric record from per-example prediction degrees.
/// `mse_untransformed` scores predictions in [0,1] directly against the
/// +1/-1 labels instead of t-transforming them first.
inline MetricsRecord metrics(const std::map<std::string, double>& predictions,
                             const std::set<std::string>& positives,
                             const std::set<std::string>& non_positives,
                             bool mse_untransformed = false) {
  if (positives.empty() && non_positives.empty()) throw InputError("empty test set");
  auto degree_of = [&](const std::string& a) {
    auto it = predictions.find(a);
    if (it == predictions.end()) throw InputError("missing prediction for individual " + a);
    return it->second;
  };

  MetricsRecord m;
  double sum_all_f = 0.0, sum_all_crisp = 0.0, se = 0.0;
  for (const auto& a : positives) {
    const double d = degree_of(a);
    m.tp_f += d;
    m.tp += d > 0.0 ? 1.0 : 0.0;
    sum_all_f += d;
    sum_all_crisp += d > 0.0 ? 1.0 : 0.0;
    const double pred = mse_untransformed ? d : transform_t(d);
    se += (pred - 1.0) * (pred - 1.0);
  }
  for (const auto& a : non_positives) {
    const double d = degree_of(a);
    m.fp_f += d;
    m.fp += d > 0.0 ? 1.0 : 0.0;
    sum_all_f += d;
    sum_all_crisp += d > 0.0 ? 1.0 : 0.0;
    const double pred = mse_untransformed ? d : transform_t(d);
    se += (pred + 1.0) * (pred + 1.0);
  }
  const double npos = static_cast<double>(positives.size());
  const double nneg = static_cast<double>(non_positives.size());
  m.tnp_f = nneg - m.fp_f;
  m.fnp_f = npos - m.tp_f;
  m.tnp = nneg - m.fp;
  m.fnp = npos - m.tp;

  if (sum_all_f > 0.0) m.precision_f = m.tp_f / sum_all_f; else m.precision_f_undefined = true;
  if (npos > 0.0) m.recall_f = m.tp_f / npos; else m.recall_f_undefined = true;
  if (sum_all_crisp > 0.0) m.precision = m.tp / sum_all_crisp; else m.precision_undefined = true;
  if (npos > 0.0) m.recall = m.tp / npos; else m.recall_undefined = true;
  m.f1_f = detail::harmonic_f1(m.precision_f, m.recall_f);
  m.f1 = detail::harmonic_f1(m.precision, m.recall);
  m.mse = se / (npos + nneg);
  m.ff1f1 = m.f1_f * m.f1;
  return m;
}

/// Field-wise mean of per-fold records (macro average); undefined flags are
/// carried over if any fold raised them.
inline MetricsRecord macro_average(const std::vector<MetricsRecord>& folds) {
  MetricsRecord avg;
  if (folds.empty()) return avg;
  const double n = static_cast<double>(folds.size());
  for (const auto& f : folds) {
    avg.tp_f += f.tp_f; avg.fp_f += f.fp_f; avg.tnp_f += f.tnp_f; avg.fnp_f += f.fnp_f;
    avg.precision_f += f.precision_f; avg.recall_f += f.recall_f; avg.f1_f += f.f1_f;
    avg.tp += f.tp; avg.fp += f.fp; avg.tnp += f.tnp; avg.fnp += f.fnp;
    avg.precision += f.precision; avg.recall += f.recall; avg.f1 += f.f1;
    avg.mse += f.mse; avg.ff1f1 += f.ff1f1;
    avg.precision_f_undefined |= f.precision_f_undefined;
    avg.precision_undefined |= f.precision_undefined;
    avg.recall_f_undefined |= f.recall_f_undefined;
    avg.recall_undefined |= f.recall_undefined;
  }
  avg.tp_f /= n; avg.fp_f /= n; avg.tnp_f /= n; avg.fnp_f /= n;
  avg.precision_f /= n; avg.recall_f /= n; avg.f1_f /= n;
  avg.tp /= n; avg.fp /= n; avg.tnp /= n; avg.fnp /= n;
  avg.precision /= n; avg.recall /= n; avg.f1 /= n;
  avg.mse /= n; avg.ff1f1 /= n;
  return avg;
}

/// Stratified folds: positives and non-positives are shuffled separately
/// (seeded Fisher-Yates) and dealt round-robin, so every fold keeps roughly
/// the class proportions and holds at least one positive. k = 1 yields the
/// train-equals-test mode: the single fold is the whole example set.
inline std::vector<TrainingSet> stratified_kfold(const TrainingSet& examples, int k,
                                                 unsigned long seed) {
  if (k < 1) throw InputError("fold count must be >= 1");
  if (k == 1) return {examples};
  if (examples.positives.size() < static_cast<std::size_t>(k))
    throw InputError("fewer positive examples than folds");

  std::mt19937_64 rng(seed);
  auto shuffled = [&rng](const std::set<std::string>& s) {
    std::vector<std::string> v(s.begin(), s.end());
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[rng() % i]);
    return v;
  };

  std::vector<TrainingSet> folds(k);
  const std::vector<std::string> pos = shuffled(examples.positives);
  const std::vector<std::string> neg = shuffled(examples.non_positives);
  for (std::size_t i = 0; i < pos.size(); ++i) folds[i % k].positives.insert(pos[i]);
  for (std::size_t i = 0; i < neg.size(); ++i) folds[i % k].non_positives.insert(neg[i]);
  return folds;
}

/// Derived KB for one fold: drops every assertion mentioning a test
/// individual and every target assertion (for all individuals; labels live
/// in the example set). The source KB is untouched.
inline KnowledgeBase strip_for_fold(const KnowledgeBase& kb, const std::string& target,
                                    const std::set<std::string>& test_individuals) {
  KnowledgeBase out;
  out.concept_names = kb.concept_names;
  out.object_properties = kb.object_properties;
  out.data_properties = kb.data_properties;
  out.functional_data_properties = kb.functional_data_properties;
  out.tbox = kb.tbox;
  out.range_axioms = kb.range_axioms;

  // Removes target conjuncts from an assertion concept; nullopt when the
  // whole assertion was a target assertion.
  auto strip_target = [&](auto&& self, const Concept& c) -> std::optional<Concept> {
    switch (c.kind) {
      case ConceptKind::Atom:
        if (c.name == target) return std::nullopt;
        return c;
      case ConceptKind::And: {
        std::vector<Concept> kept;
        for (const auto& child : c.children)
          if (auto k = self(self, child)) kept.push_back(std::move(*k));
        if (kept.empty()) return std::nullopt;
        if (kept.size() == 1) return std::move(kept.front());
        return Concept::conj(std::move(kept));
      }
      default:
        return c; // target atoms cannot occur under existentials in our inputs
    }
  };

  for (const auto& ca : kb.concept_assertions) {
    if (test_individuals.count(ca.individual)) continue;
    if (auto stripped = strip_target(strip_target, ca.expr))
      out.add_instance(ca.individual, std::move(*stripped));
  }
  for (const auto& ra : kb.role_assertions) {
    if (test_individuals.count(ra.subject) || test_individuals.count(ra.object)) continue;
    out.add_related(ra.subject, ra.role, ra.object);
  }
  for (const auto& da : kb.data_assertions) {
    if (test_individuals.count(da.individual)) continue;
    out.add_value(da.individual, da.property, da.value);
  }
  return out;
}

struct GridConfig {
  enum class Algorithm { Boost, Foil };

  std::vector<double> thetas = {0.34, 0.64, 0.94, 1.0};
  std::vector<int> partition_counts = {3, 5, 7};
  std::vector<FuzzificationConfig::Method> methods = {FuzzificationConfig::Method::Uniform,
                                                      FuzzificationConfig::Method::CMeans};
  int fold_count = 5;
  unsigned long seed = 0;
  Algorithm algorithm = Algorithm::Boost;
  int iterations = 10;
  bool fuzzify_on_full_data = false; // fit fuzzy sets once instead of per training fold
  bool mse_untransformed = false;

  void validate() const {
    if (thetas.empty() || partition_counts.empty() || methods.empty())
      throw InputError("grid lists must be nonempty");
    if (fold_count < 1) throw InputError("fold count must be >= 1");
    if (iterations < 1) throw InputError("iterations must be >= 1");
    for (int p : partition_counts)
      if (p != 3 && p != 5 && p != 7) throw InputError("partition count must be 3, 5 or 7");
    for (double t : thetas)
      if (t < 0.0 || t > 1.0) throw InputError("theta must be in [0,1]");
  }
};

inline const char* to_string(GridConfig::Algorithm a) {
  return a == GridConfig::Algorithm::Boost ? "boost" : "foil";
}

/// One grid cell's outcome across all folds.
struct CellResult {
  FuzzificationConfig::Method method = FuzzificationConfig::Method::Uniform;
  double theta = 0.0;
  int partitions = 0;
  std::vector<MetricsRecord> fold_metrics;
  MetricsRecord aggregate;
  std::vector<std::string> fold_failures; // reason per failed fold, empty entries otherwise
};

struct EvalReport {
  std::vector<CellResult> cells;
  std::size_t winner = 0; // index into cells
  int fold_count = 1;
  unsigned long seed = 0;
  GridConfig::Algorithm algorithm = GridConfig::Algorithm::Boost;
  std::string target;

  const CellResult& winning_cell() const { return cells.at(winner); }
};

/// Worker cap for fold/grid parallelism: FEB_THREADS, 0 or unset = auto.
inline unsigned worker_count() {
  if (const char* env = std::getenv("FEB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

namespace detail {

template <typename Fn>
inline void parallel_for(std::size_t count, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct FoldData {
  TrainingSet test;          // held-out examples
  TrainingSet train;         // remaining examples
  KnowledgeBase train_kb;    // stripped of test individuals and all target assertions
  Closure train_closure;
};

} // namespace detail

/// Full cross-validated grid sweep. For every (method, theta, partitions)
/// cell: per fold, fuzzy datatypes are fit on the training KB, a hypothesis
/// is trained and then scored on the held-out examples against the closure
/// that still contains their non-target assertions. The winner maximizes
/// fF1F1 with ties broken by lowest theta, then fewest partitions, then
/// method order.
inline EvalReport crossval(const KnowledgeBase& kb, const std::string& target,
                           const TrainingSet& examples, const GridConfig& grid,
                           const LearnParams& base_params, const RefinementContext& bounds) {
  grid.validate();
  base_params.validate();
  examples.validate(kb);
  if (!kb.is_class(target)) throw InputError("undeclared target concept: " + target);

  const std::vector<TrainingSet> folds = stratified_kfold(examples, grid.fold_count, grid.seed);
  const int k = static_cast<int>(folds.size());

  // Evaluation closure: target labels hidden, everything else visible.
  const KnowledgeBase eval_kb = strip_for_fold(kb, target, {});
  const Closure eval_closure = complete(eval_kb);
  examples.check_target_unknown(eval_kb, eval_closure, target);

  std::vector<detail::FoldData> fold_data(k);
  for (int f = 0; f < k; ++f) {
    auto& fd = fold_data[f];
    fd.test = folds[f];
    if (k == 1) {
      fd.train = examples; // train-equals-test mode
      fd.train_kb = eval_kb;
      fd.train_closure = eval_closure;
    } else {
      for (int g = 0; g < k; ++g) {
        if (g == f) continue;
        fd.train.positives.insert(folds[g].positives.begin(), folds[g].positives.end());
        fd.train.non_positives.insert(folds[g].non_positives.begin(),
                                      folds[g].non_positives.end());
      }
      std::set<std::string> test_individuals(fd.test.positives);
      test_individuals.insert(fd.test.non_positives.begin(), fd.test.non_positives.end());
      fd.train_kb = strip_for_fold(kb, target, test_individuals);
      fd.train_closure = complete(fd.train_kb);
    }
  }

  EvalReport report;
  report.fold_count = k;
  report.seed = grid.seed;
  report.algorithm = grid.algorithm;
  report.target = target;
  for (auto method : grid.methods)
    for (double theta : grid.thetas)
      for (int partitions : grid.partition_counts) {
        CellResult cell;
        cell.method = method;
        cell.theta = theta;
        cell.partitions = partitions;
        cell.fold_metrics.resize(k);
        cell.fold_failures.resize(k);
        report.cells.push_back(std::move(cell));
      }

  detail::parallel_for(report.cells.size(), [&](std::size_t ci) {
    CellResult& cell = report.cells[ci];
    FuzzificationConfig fuzz;
    fuzz.method = cell.method;
    fuzz.partitions = cell.partitions;
    LearnParams params = base_params;
    params.theta = cell.theta;
    params.iterations = grid.iterations;

    for (int f = 0; f < k; ++f) {
      const detail::FoldData& fd = fold_data[f];
      std::map<std::string, double> predictions;
      try {
        const auto datatypes = grid.fuzzify_on_full_data
                                   ? build_fuzzy_datatypes(eval_kb, eval_closure, fuzz)
                                   : build_fuzzy_datatypes(fd.train_kb, fd.train_closure, fuzz);
        RefinementContext ctx = make_refinement_context(fd.train_kb, fd.train_closure, datatypes,
                                                        bounds.max_depth, bounds.max_conjuncts);
        DegreeCache cache(fd.train_kb, fd.train_closure, fd.train.individuals());
        const Hypothesis h =
            grid.algorithm == GridConfig::Algorithm::Boost
                ? boost(fd.train_kb, target, fd.train, params, ctx, cache)
                : foil_dl(fd.train_kb, target, fd.train, params, ctx, cache);
        for (const auto& a : fd.test.individuals())
          predictions[a] = bed_hypothesis(eval_kb, eval_closure, h, a);
      } catch (const Error& e) {
        // A fold that fails to learn scores as zero coverage.
        cell.fold_failures[f] = e.what();
        predictions.clear();
        for (const auto& a : fd.test.individuals()) predictions[a] = 0.0;
      }
      cell.fold_metrics[f] =
          metrics(predictions, fd.test.positives, fd.test.non_positives, grid.mse_untransformed);
    }
    cell.aggregate = macro_average(cell.fold_metrics);
  });

  report.winner = 0;
  for (std::size_t i = 1; i < report.cells.size(); ++i) {
    const CellResult& a = report.cells[i];
    const CellResult& b = report.cells[report.winner];
    const bool better =
        a.aggregate.ff1f1 > b.aggregate.ff1f1 ||
        (a.aggregate.ff1f1 == b.aggregate.ff1f1 &&
         (a.theta < b.theta || (a.theta == b.theta && a.partitions < b.partitions)));
    if (better) report.winner = i;
  }
  return report;
}

}  // namespace feb
