#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "normprobe/numerics/logistic.hpp"

namespace normprobe {

/// ASCII lower-casing; bytes outside ASCII are left untouched.
std::string casefold(std::string_view word);

// ---------------------------------------------------------------------------
// Embeddings

enum class EmbeddingFormat { plain_text, header_text, automatic };

/// Word -> dense vector map with a fixed dimension. Lookup prefers an exact
/// match and falls back to the first case-folded match in file order.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(Eigen::Index dimension);

  Eigen::Index dimension() const { return dimension_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  /// Adds a record; returns false (and keeps the existing vector) on a duplicate word.
  bool insert(std::string word, const Eigen::Ref<const Vector<double>>& values);

  std::optional<std::size_t> find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }

  Eigen::Map<const Vector<double>> row(std::size_t index) const;
  /// Vector for `word`; throws LookupError when absent.
  Eigen::Map<const Vector<double>> at(std::string_view word) const;

  /// Stacks the vectors of `words` into a |words| x dimension matrix.
  Matrix<double> matrix_for(const std::vector<std::string>& words) const;

 private:
  Eigen::Index dimension_;
  std::vector<std::string> words_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> exact_;
  std::unordered_map<std::string, std::size_t> folded_;
};

struct EmbeddingParseReport {
  std::size_t lines = 0;
  std::size_t records = 0;
  std::size_t duplicates = 0;
  std::size_t filtered_out = 0;
  std::vector<std::string> duplicate_words;  // first few, for logging
};

struct ParsedEmbeddings {
  EmbeddingTable table;
  EmbeddingParseReport report;
};

/// Optional vocabulary restriction applied while parsing. Holds case-folded
/// words; records whose case-folded word is absent are skipped unparsed.
using VocabularyFilter = std::unordered_set<std::string>;

ParsedEmbeddings parse_embeddings(std::istream& in, EmbeddingFormat format,
                                  const VocabularyFilter* keep = nullptr);
ParsedEmbeddings parse_embedding_file(const std::filesystem::path& path, EmbeddingFormat format,
                                      const VocabularyFilter* keep = nullptr);

/// Plain-text serialization, six decimals per component.
void write_embeddings(std::ostream& out, const EmbeddingTable& table);

// ---------------------------------------------------------------------------
// Semantic norms

/// Column mapping for a delimited norm export.
struct NormSchema {
  std::string concept_column = "concept";
  std::string feature_column = "feature";
  std::string category_column = "category";
  std::string count_column = "count";
  char delimiter = ',';
  /// Raw category label -> canonical label. Unmapped labels are normalized
  /// by lower-casing and turning spaces/underscores into '-'.
  std::map<std::string, std::string> category_map;
};

/// Reads `key=value` lines: concept, feature, category, count, delimiter
/// (`comma`, `tab`, or a single character) and `category.<raw>=<canonical>`.
NormSchema load_norm_schema(const std::filesystem::path& path);
NormSchema parse_norm_schema(std::istream& in);

std::string normalize_category(std::string_view raw);

class NormDataset {
 public:
  /// Adds a production count; repeated (concept, feature) rows accumulate.
  void add(const std::string& concept_name, const std::string& feature, const std::string& category,
           long count);
  /// Registers a concept without features.
  void add_concept(const std::string& concept_name);

  std::vector<std::string> concepts() const;
  std::vector<std::string> features() const;
  const std::string& category(const std::string& feature) const;
  const std::map<std::pair<std::string, std::string>, long>& pairs() const { return pairs_; }

  std::size_t concept_count() const { return concept_features_.size(); }
  std::size_t feature_count() const { return categories_.size(); }

  /// Features and production-count total listed for a concept.
  std::size_t features_of(const std::string& concept_name) const;
  long total_reports(const std::string& concept_name) const;

  double mean_concepts_per_feature() const;
  double mean_features_per_concept() const;

  std::size_t merged_rows() const { return merged_rows_; }

 private:
  std::map<std::string, std::size_t> concept_features_;
  std::map<std::string, long> concept_reports_;
  std::map<std::string, std::string> categories_;
  std::map<std::pair<std::string, std::string>, long> pairs_;
  std::size_t merged_rows_ = 0;
};

NormDataset parse_norms(std::istream& in, const NormSchema& schema);
NormDataset parse_norm_file(const std::filesystem::path& path, const NormSchema& schema);

/// Splits one delimited record, honoring double-quoted fields.
std::vector<std::string> split_delimited(std::string_view line, char delimiter);

// ---------------------------------------------------------------------------
// Alignment

/// Binary concept x feature matrix in canonical (lexicographic) order.
struct LabelMatrix {
  std::vector<std::string> concepts;
  std::vector<std::string> features;
  std::vector<std::string> categories;  // parallel to `features`
  Matrix<double> Y;                     // entries 0/1

  Vector<double> column(std::size_t feature) const { return Y.col(static_cast<Eigen::Index>(feature)); }
  std::size_t positives(std::size_t feature) const;
  /// Back to a norm dataset with unit counts (used to re-apply alignment).
  NormDataset to_norms() const;
};

struct AlignmentPolicy {
  std::vector<std::string> exclusions;
  bool drop_parenthesized = true;  // disambiguated names such as tank_(army)
  bool drop_multiword = true;      // names with a space or underscore
  std::size_t min_concepts = 5;
};

struct AlignmentReport {
  std::vector<std::string> excluded;
  std::vector<std::string> missing_vectors;
  std::size_t features_dropped = 0;
};

struct Alignment {
  LabelMatrix labels;
  AlignmentReport report;
};

using EmbeddingRefs = std::vector<std::reference_wrapper<const EmbeddingTable>>;

Alignment filter_and_align(const NormDataset& norms, const EmbeddingRefs& embeddings,
                           const AlignmentPolicy& policy = {});

/// One concept name per line; blank lines and `#` comments ignored.
std::vector<std::string> load_exclusions(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Key/value tables

/// String -> nonnegative value map read from `<key> <value>` lines.
class ValueTable {
 public:
  void set(std::string key, double value);
  /// Adds to an existing value (or inserts).
  void accumulate(std::string key, double value);
  std::optional<double> find(std::string_view key) const;
  std::size_t size() const { return values_.size(); }

 private:
  std::unordered_map<std::string, double> values_;
};

/// Canonical synset id: `<8-digit offset>n` for numeric ids such as `2084071n`,
/// `n02084071`, or `02084071`; other ids are returned unchanged.
std::string canonical_synset_id(std::string_view id);

/// Information content per synset; keys pass through `canonical_synset_id`.
/// Accepts `<synset> <ic>` lines, or a WordNet::Similarity count file
/// (first line `wnver::...`), whose counts are turned into -log(count / root).
ValueTable load_ic_table(const std::filesystem::path& path);
ValueTable parse_ic_table(std::istream& in);

/// Corpus counts keyed by case-folded word; case variants are summed.
ValueTable load_frequency_table(const std::filesystem::path& path);
ValueTable parse_frequency_table(std::istream& in);

/// Count used for log-frequency: the table value, floored at 1 (absent words too).
double frequency_or_floor(const ValueTable& table, std::string_view word);

}  // namespace normprobe
