// normprobe command-line interface.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "normprobe/app.hpp"
#include "normprobe/error.hpp"
#include "oracles.hpp"

namespace {

using normprobe::app::Command;
using normprobe::app::RunConfig;

int run_selftest() {
  const auto results = normprobe::oracle::run_oracle_suite();
  int failed = 0;
  for (const auto& r : results) {
    std::cout << (r.passed ? "[PASS]" : "[FAIL]") << " criterion " << r.id << ": " << r.name << " -- " << r.detail
              << '\n';
    if (!r.passed) ++failed;
  }
  std::cout << results.size() - static_cast<std::size_t>(failed) << '/' << results.size() << " passed\n";
  return failed == 0 ? 0 : 1;
}

void print_report(const normprobe::app::RunReport& report) {
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& p : report.outputs) std::cout << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Probe word embeddings for semantic-norm features"};
  cli.set_version_flag("--version", normprobe::kVersion);
  cli.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
  cli.require_subcommand(1);

  RunConfig config;
  std::vector<std::string> embeddings, feature_fit;
  std::string data_dir, norms, schema, exclusions, ic, frequencies, wordnet, out = config.output_dir.string();
  bool keep_parenthesized = false, keep_multiword = false, no_intercept = false, no_cache = false;

  cli.add_option("--data-dir", data_dir, "Base directory for relative input paths")->envname("NORMPROBE_DATA_DIR");
  cli.add_option("--embedding", embeddings, "Embedding file, as name=path or path (repeatable)");
  cli.add_option("--embedding-format", config.embedding_format, "auto, plain or header")->capture_default_str();
  cli.add_option("--norms", norms, "Norm CSV");
  cli.add_option("--schema", schema, "Norm schema file (key=value)");
  cli.add_option("--exclusions", exclusions, "Concepts to drop, one per line");
  cli.add_option("--ic", ic, "Information-content table");
  cli.add_option("--frequencies", frequencies, "Word frequency table");
  cli.add_option("--wordnet", wordnet, "WordNet directory holding index.noun and data.noun");
  cli.add_option("--feature-fit", feature_fit, "Precomputed feature CSV, as name=path (repeatable)");
  cli.add_option("--lambda-grid", config.lambda_grid, "Regularization values to search");
  cli.add_option("--min-concepts", config.min_concepts, "Minimum positives per feature")->capture_default_str();
  cli.add_flag("--keep-parenthesized", keep_parenthesized, "Keep disambiguated names such as tank_(army)");
  cli.add_flag("--keep-multiword", keep_multiword, "Keep names with spaces or underscores");
  cli.add_flag("--no-intercept", no_intercept, "Fit probes without an intercept");
  cli.add_option("--f1-mode", config.f1_mode, "in-sample or loo")->capture_default_str();
  cli.add_option("--lsa-k", config.lsa_k, "LSA rank (0 = automatic)")->capture_default_str();
  cli.add_option("--seed", config.seed, "Bootstrap seed")->capture_default_str();
  cli.add_option("--resamples", config.resamples, "Bootstrap resamples")->capture_default_str();
  cli.add_option("--level", config.level, "Confidence level")->capture_default_str();
  cli.add_option("--threads", config.threads, "Worker threads")->capture_default_str();
  cli.add_flag("--no-cache", no_cache, "Recompute probes even when cached");
  cli.add_option("--out", out, "Output directory")->capture_default_str();

  auto* featfit = cli.add_subcommand("featfit", "Per-feature probe fit and category comparison")->fallthrough();
  auto* compare = cli.add_subcommand("compare", "Scatter and regression of two feature-fit CSVs")->fallthrough();
  std::string compare_a, compare_b;
  compare->add_option("--a", compare_a, "First feature CSV")->required();
  compare->add_option("--b", compare_b, "Second feature CSV")->required();
  auto* conceptview = cli.add_subcommand("conceptview", "Concept-level correlations and F-test")->fallthrough();
  conceptview->add_flag("--write-matrices", config.write_matrices, "Write similarity matrices as CSV");
  auto* domains = cli.add_subcommand("domains", "Cluster concepts into domains")->fallthrough();
  domains->add_option("--alpha", config.alpha, "Weight of the feature-fit term")->capture_default_str();
  domains->add_option("--alpha-sweep", config.alpha_sweep, "Cluster once per alpha value");
  domains->add_option("--domains", config.domains, "Number of domains")->capture_default_str();
  domains->add_option("--representation", config.representation, "Embedding whose feature fit is used");
  auto* selftest = cli.add_subcommand("selftest", "Run the built-in oracle checks");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (selftest->parsed()) return run_selftest();

  try {
    config.data_dir = data_dir;
    for (const auto& e : embeddings) config.embeddings.push_back(normprobe::app::parse_named_path(e));
    for (const auto& f : feature_fit) config.feature_fit.push_back(normprobe::app::parse_named_path(f));
    config.norms = norms;
    config.schema = schema;
    config.exclusions = exclusions;
    config.ic_table = ic;
    config.frequencies = frequencies;
    config.wordnet = wordnet;
    config.compare_a = compare_a;
    config.compare_b = compare_b;
    config.drop_parenthesized = !keep_parenthesized;
    config.drop_multiword = !keep_multiword;
    config.intercept = !no_intercept;
    config.use_cache = !no_cache;
    config.output_dir = out;

    Command command = Command::featfit;
    if (compare->parsed()) command = Command::compare;
    if (conceptview->parsed()) command = Command::conceptview;
    if (domains->parsed()) command = Command::domains;
    (void)featfit;
    const RunConfig valid = normprobe::app::validate(config, command);

    switch (command) {
      case Command::featfit: print_report(normprobe::app::cmd_featfit(valid)); break;
      case Command::compare: print_report(normprobe::app::cmd_compare(valid)); break;
      case Command::conceptview: print_report(normprobe::app::cmd_conceptview(valid)); break;
      case Command::domains: print_report(normprobe::app::cmd_domains(valid)); break;
    }
    return 0;
  } catch (const normprobe::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
