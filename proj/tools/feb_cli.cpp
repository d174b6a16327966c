// Command-line front end: tabular conversion, fuzzification, learning,
// cross-validated grid search and prediction over the library's text formats.

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "feb/feb.hpp"

namespace {

feb::FuzzificationConfig::Method parse_method(const std::string& name) {
  if (name == "uniform") return feb::FuzzificationConfig::Method::Uniform;
  if (name == "cmeans") return feb::FuzzificationConfig::Method::CMeans;
  throw feb::InputError("unknown fuzzification method: " + name + " (expected uniform|cmeans)");
}

feb::GridConfig::Algorithm parse_algorithm(const std::string& name) {
  if (name == "boost") return feb::GridConfig::Algorithm::Boost;
  if (name == "foil") return feb::GridConfig::Algorithm::Foil;
  throw feb::InputError("unknown algorithm: " + name + " (expected boost|foil)");
}

std::string method_label(feb::FuzzificationConfig::Method m) {
  return m == feb::FuzzificationConfig::Method::Uniform ? "Uniform" : "C-Means";
}

// Options shared by the learning subcommands; one run's full configuration.
struct RunConfig {
  std::string kb_path, examples_path, target, out_path;
  std::string method = "uniform";
  std::string algorithm = "boost";
  double theta = 0.34;
  double eta = 1.0;
  int depth = 1;
  int conjuncts = 5;
  int iterations = 10;
  int partitions = 3;
  int backtrack_k = 0;
  unsigned long seed = 0;
  bool error_magnitude = false;
};

// Flags meaningful to both `learn` and `crossval`.
void add_common_flags(CLI::App& cmd, RunConfig& opt) {
  cmd.add_option("--kb", opt.kb_path, "knowledge base file")->required();
  cmd.add_option("--examples", opt.examples_path, "pos/neg examples file")->required();
  cmd.add_option("--target", opt.target, "target concept name")->required();
  cmd.add_option("--eta", opt.eta, "tolerated non-positive coverage fraction in [0,1]");
  cmd.add_option("--depth", opt.depth, "maximal existential nesting depth");
  cmd.add_option("--conjuncts", opt.conjuncts, "maximal conjuncts per conjunction");
  cmd.add_option("--iterations", opt.iterations, "boosting rounds");
  cmd.add_option("--algorithm", opt.algorithm, "boost|foil");
  cmd.add_option("--seed", opt.seed, "random seed");
  cmd.add_option("--backtrack-k", opt.backtrack_k, "top-k backtracking stack size (0 = off)");
  cmd.add_flag("--error-magnitude", opt.error_magnitude,
               "use |h| instead of h in the weak error");
}

// Single-run flags; `crossval` sweeps these over its grid instead.
void add_single_run_flags(CLI::App& cmd, RunConfig& opt) {
  cmd.add_option("--theta", opt.theta, "confidence threshold in [0,1]");
  cmd.add_option("--method", opt.method, "fuzzification method: uniform|cmeans");
  cmd.add_option("--partitions", opt.partitions, "fuzzy sets per numeric property: 3|5|7");
}

feb::Hypothesis run_single_learn(const feb::KnowledgeBase& kb, const feb::TrainingSet& examples,
                                 const RunConfig& opt) {
  if (!kb.is_class(opt.target))
    throw feb::InputError("undeclared target concept: " + opt.target);
  const feb::KnowledgeBase train_kb = feb::strip_for_fold(kb, opt.target, {});
  const feb::Closure closure = feb::complete(train_kb);
  examples.validate(train_kb);
  examples.check_target_unknown(train_kb, closure, opt.target);

  feb::FuzzificationConfig fuzz;
  fuzz.method = parse_method(opt.method);
  fuzz.partitions = opt.partitions;
  fuzz.rng_seed = opt.seed;
  const auto datatypes = feb::build_fuzzy_datatypes(train_kb, closure, fuzz);
  const feb::RefinementContext ctx =
      feb::make_refinement_context(train_kb, closure, datatypes, opt.depth, opt.conjuncts);

  feb::LearnParams params;
  params.theta = opt.theta;
  params.eta = opt.eta;
  params.iterations = opt.iterations;
  params.backtrack_k = opt.backtrack_k;
  params.error_magnitude = opt.error_magnitude;

  feb::DegreeCache cache(train_kb, closure, examples.individuals());
  return parse_algorithm(opt.algorithm) == feb::GridConfig::Algorithm::Boost
             ? feb::boost(train_kb, opt.target, examples, params, ctx, cache)
             : feb::foil_dl(train_kb, opt.target, examples, params, ctx, cache);
}

int cmd_convert(const std::string& csv_path, const std::string& kb_out,
                const std::string& examples_prefix) {
  const feb::io::ConvertedTable converted = feb::io::convert_csv(feb::io::read_file(csv_path));
  feb::io::write_file(kb_out, feb::io::serialize_kb(converted.kb));
  std::cout << "wrote " << kb_out << " (" << converted.row_individuals.size() << " individuals, "
            << converted.targets.size() << " target classes)\n";
  if (!examples_prefix.empty()) {
    for (const auto& target : converted.targets) {
      const std::string path = examples_prefix + "." + target + ".ex";
      feb::io::write_file(path, feb::io::serialize_examples(converted.example_seeds.at(target)));
      std::cout << "wrote " << path << "\n";
    }
  }
  return 0;
}

int cmd_fuzzify(const std::string& kb_path, const std::string& method, int partitions,
                const std::string& property, const std::string& out_path) {
  const feb::KnowledgeBase kb = feb::io::parse_kb(feb::io::read_file(kb_path));
  const feb::Closure closure = feb::complete(kb);
  feb::FuzzificationConfig fuzz;
  fuzz.method = parse_method(method);
  fuzz.partitions = partitions;
  const auto datatypes = feb::build_fuzzy_datatypes(kb, closure, fuzz);
  std::string out = "# Fuzzy datatypes (" + method_label(fuzz.method) + ")\n";
  for (const auto& [prop, list] : datatypes) {
    if (!property.empty() && prop != property) continue;
    out += feb::io::serialize_datatypes(list);
  }
  if (!property.empty() && !datatypes.count(property))
    throw feb::InputError("no fuzzy datatypes for property '" + property +
                          "' (missing, boolean, or degenerate domain)");
  if (out_path.empty())
    std::cout << out;
  else
    feb::io::write_file(out_path, out);
  return 0;
}

int cmd_learn(const RunConfig& opt) {
  const feb::KnowledgeBase kb = feb::io::parse_kb(feb::io::read_file(opt.kb_path));
  const feb::TrainingSet examples = feb::io::parse_examples(feb::io::read_file(opt.examples_path));
  const feb::Hypothesis h = run_single_learn(kb, examples, opt);
  const std::string text = feb::io::serialize_hypothesis(h, method_label(parse_method(opt.method)));
  if (opt.out_path.empty())
    std::cout << text;
  else
    feb::io::write_file(opt.out_path, text);
  return 0;
}

int cmd_crossval(const RunConfig& opt, const std::vector<double>& thetas,
                 const std::vector<int>& partition_counts,
                 const std::vector<std::string>& methods, int folds, const std::string& out_prefix,
                 bool fuzzify_on_full_data, bool mse_untransformed) {
  const feb::KnowledgeBase kb = feb::io::parse_kb(feb::io::read_file(opt.kb_path));
  const feb::TrainingSet examples = feb::io::parse_examples(feb::io::read_file(opt.examples_path));

  feb::GridConfig grid;
  if (!thetas.empty()) grid.thetas = thetas;
  if (!partition_counts.empty()) grid.partition_counts = partition_counts;
  if (!methods.empty()) {
    grid.methods.clear();
    for (const auto& m : methods) grid.methods.push_back(parse_method(m));
  }
  grid.fold_count = folds;
  grid.seed = opt.seed;
  grid.algorithm = parse_algorithm(opt.algorithm);
  grid.iterations = opt.iterations;
  grid.fuzzify_on_full_data = fuzzify_on_full_data;
  grid.mse_untransformed = mse_untransformed;

  feb::LearnParams base;
  base.eta = opt.eta;
  base.backtrack_k = opt.backtrack_k;
  base.error_magnitude = opt.error_magnitude;

  feb::RefinementContext bounds;
  bounds.max_depth = opt.depth;
  bounds.max_conjuncts = opt.conjuncts;

  const feb::EvalReport report = feb::crossval(kb, opt.target, examples, grid, base, bounds);
  const std::string table = feb::io::serialize_report_table(report);
  std::cout << table;

  if (!out_prefix.empty()) {
    feb::io::write_file(out_prefix + ".txt", table);
    feb::io::write_file(out_prefix + ".dat", feb::io::serialize_report_machine(report));

    // Refit the winning configuration on the full example set.
    const feb::CellResult& winner = report.winning_cell();
    RunConfig refit = opt;
    refit.theta = winner.theta;
    refit.partitions = winner.partitions;
    refit.method = feb::to_string(winner.method);
    try {
      const feb::Hypothesis h = run_single_learn(kb, examples, refit);
      feb::io::write_file(out_prefix + ".hyp",
                          feb::io::serialize_hypothesis(h, method_label(winner.method)));
    } catch (const feb::LearnError& e) {
      feb::io::write_file(out_prefix + ".hyp",
                          std::string("# learning failed on the full example set: ") + e.what() +
                              "\n");
    }
    std::cout << "wrote " << out_prefix << ".txt, " << out_prefix << ".dat, " << out_prefix
              << ".hyp\n";
  }
  return 0;
}

int cmd_predict(const std::string& kb_path, const std::string& hypothesis_path,
                const std::vector<std::string>& individuals, const std::string& examples_path) {
  const feb::KnowledgeBase kb = feb::io::parse_kb(feb::io::read_file(kb_path));
  const feb::Hypothesis h = feb::io::parse_hypothesis(feb::io::read_file(hypothesis_path));
  const feb::Closure closure = feb::complete(kb);

  std::vector<std::string> subjects = individuals;
  if (!examples_path.empty()) {
    const feb::TrainingSet e = feb::io::parse_examples(feb::io::read_file(examples_path));
    for (const auto& a : e.individuals()) subjects.push_back(a);
  }
  if (subjects.empty()) subjects.assign(kb.individuals.begin(), kb.individuals.end());

  for (const auto& a : subjects) {
    if (!kb.individuals.count(a))
      throw feb::InputError("individual not in the knowledge base: " + a);
    // bed over KB + hypothesis: an asserted target dominates.
    double degree = feb::bed_hypothesis(kb, closure, h, a);
    if (!h.target.empty() && kb.is_class(h.target) && closure.has_atom(a, h.target))
      degree = 1.0;
    std::cout << a << " " << feb::io::detail::fixed(degree, 4) << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"feb: induces weighted fuzzy concept-inclusion rules from crisp EL knowledge "
               "bases"};
  app.require_subcommand(1);

  // convert
  auto* convert = app.add_subcommand("convert", "convert a CSV table into a knowledge base");
  std::string csv_path, kb_out, examples_prefix;
  convert->add_option("csv", csv_path, "input CSV (header row; last column = target class)")
      ->required();
  convert->add_option("kb", kb_out, "output knowledge base file")->required();
  convert->add_option("--examples-prefix", examples_prefix,
                      "also write <prefix>.<target>.ex example files");

  // fuzzify
  auto* fuzzify = app.add_subcommand("fuzzify", "print the fuzzy datatype listing for a KB");
  std::string fz_kb, fz_method = "uniform", fz_property, fz_out;
  int fz_partitions = 3;
  fuzzify->add_option("--kb", fz_kb, "knowledge base file")->required();
  fuzzify->add_option("--method", fz_method, "uniform|cmeans");
  fuzzify->add_option("--partitions", fz_partitions, "3|5|7");
  fuzzify->add_option("--property", fz_property, "restrict to one data property");
  fuzzify->add_option("--out", fz_out, "write to file instead of stdout");

  // learn
  auto* learn = app.add_subcommand("learn", "learn a hypothesis for a target concept");
  RunConfig learn_opt;
  add_common_flags(*learn, learn_opt);
  add_single_run_flags(*learn, learn_opt);
  learn->add_option("--out", learn_opt.out_path, "hypothesis output file (default stdout)");

  // crossval
  auto* crossval = app.add_subcommand("crossval",
                                      "stratified k-fold cross-validated grid sweep");
  RunConfig cv_opt;
  add_common_flags(*crossval, cv_opt);
  std::vector<double> cv_thetas;
  std::vector<int> cv_partitions;
  std::vector<std::string> cv_methods;
  std::string cv_out;
  int cv_folds = 5;
  bool cv_full_fuzzify = false, cv_mse_untransformed = false;
  crossval->add_option("--folds", cv_folds, "fold count (1 = train-equals-test)");
  crossval->add_option("--thetas", cv_thetas, "grid of confidence thresholds")
      ->delimiter(',');
  crossval->add_option("--partitions-list", cv_partitions, "grid of partition counts")
      ->delimiter(',');
  crossval->add_option("--methods", cv_methods, "grid of fuzzification methods")
      ->delimiter(',');
  crossval->add_option("--out", cv_out, "output prefix (<p>.txt, <p>.dat, <p>.hyp)");
  crossval->add_flag("--fuzzify-on-full-data", cv_full_fuzzify,
                     "fit fuzzy sets once on the full data instead of per training fold");
  crossval->add_flag("--mse-untransformed", cv_mse_untransformed,
                     "score MSE on raw degrees instead of t-transformed values");

  // predict
  auto* predict = app.add_subcommand("predict", "evaluate a hypothesis on individuals");
  std::string pr_kb, pr_hyp, pr_examples;
  std::vector<std::string> pr_individuals;
  predict->add_option("--kb", pr_kb, "knowledge base file")->required();
  predict->add_option("--hypothesis", pr_hyp, "hypothesis file")->required();
  predict->add_option("--individuals", pr_individuals, "individuals to score")->delimiter(',');
  predict->add_option("--examples", pr_examples, "score the individuals of an examples file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (convert->parsed()) return cmd_convert(csv_path, kb_out, examples_prefix);
    if (fuzzify->parsed())
      return cmd_fuzzify(fz_kb, fz_method, fz_partitions, fz_property, fz_out);
    if (learn->parsed()) return cmd_learn(learn_opt);
    if (crossval->parsed())
      return cmd_crossval(cv_opt, cv_thetas, cv_partitions, cv_methods, cv_folds, cv_out,
                          cv_full_fuzzify, cv_mse_untransformed);
    if (predict->parsed()) return cmd_predict(pr_kb, pr_hyp, pr_individuals, pr_examples);
  } catch (const feb::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const feb::LearnError& e) {
    std::cerr << "learning failed: " << e.what() << "\n";
    return 3;
  } catch (const feb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
