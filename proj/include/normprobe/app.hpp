#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "normprobe/conceptview.hpp"
#include "normprobe/domains.hpp"
#include "normprobe/featfit.hpp"
#include "normprobe/ingest.hpp"

namespace normprobe {

inline constexpr const char* kVersion = "0.1.0";

namespace app {

struct NamedPath {
  std::string name;
  std::filesystem::path path;
};

/// `name=path`, or a bare path named after its file stem.
NamedPath parse_named_path(const std::string& text);

struct RunConfig {
  std::filesystem::path data_dir;  // base for relative paths
  std::vector<NamedPath> embeddings;
  std::string embedding_format = "auto";
  std::filesystem::path norms;
  std::filesystem::path schema;
  std::filesystem::path exclusions;
  std::filesystem::path ic_table;
  std::filesystem::path frequencies;
  std::filesystem::path wordnet;
  std::vector<NamedPath> feature_fit;  // precomputed per-representation feature CSVs
  std::filesystem::path compare_a;
  std::filesystem::path compare_b;

  std::vector<double> lambda_grid;  // empty = default grid
  std::size_t min_concepts = 5;
  bool drop_parenthesized = true;
  bool drop_multiword = true;
  int lsa_k = 0;  // 0 = smallest k with 90% squared singular mass, capped at 300
  double alpha = 1.0;
  std::vector<double> alpha_sweep;
  std::size_t domains = 40;
  std::string representation;  // embedding whose feature fit drives `domains`
  std::uint64_t seed = 1;
  int resamples = 10000;
  double level = 0.95;
  bool intercept = true;
  std::string f1_mode = "in-sample";
  unsigned threads = 1;
  bool write_matrices = false;
  bool use_cache = true;
  std::filesystem::path output_dir = "normprobe-out";
};

/// Resolves relative paths against `data_dir` and checks that every path the
/// command needs exists. Throws ConfigError.
enum class Command { featfit, compare, conceptview, domains };
RunConfig validate(RunConfig config, Command command);

/// Stable hash of every output-affecting field.
std::string config_hash(const RunConfig& config);

ProbeConfig probe_config(const RunConfig& config);

/// Outcome of a command: written files and non-fatal warnings.
struct RunReport {
  std::vector<std::filesystem::path> outputs;
  std::vector<std::string> warnings;
};

RunReport cmd_featfit(const RunConfig& config);
RunReport cmd_compare(const RunConfig& config);
RunReport cmd_conceptview(const RunConfig& config);
RunReport cmd_domains(const RunConfig& config);

// Feature CSV round trip, shared by `compare` and the cache.
void write_feature_csv(const std::filesystem::path& path, const std::vector<FeatureFitRecord>& records);
std::vector<FeatureFitRecord> read_feature_csv(const std::filesystem::path& path);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace app
}  // namespace normprobe
