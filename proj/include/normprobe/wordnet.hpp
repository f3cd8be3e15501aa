#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace normprobe {

/// Noun hypernym hierarchy with a word -> senses index. Synsets are addressed
/// by string id (WordNet synsets use `canonical_synset_id`).
class Taxonomy {
 public:
  using SynsetIndex = std::size_t;

  SynsetIndex add_synset(const std::string& id);
  void add_hypernym(const std::string& child, const std::string& parent);
  /// Appends a sense for `word` (case-folded, spaces as underscores).
  void add_sense(std::string_view word, const std::string& synset);

  bool contains_word(std::string_view word) const;
  /// Synsets of `word` in sense order; empty when absent.
  const std::vector<SynsetIndex>& senses(std::string_view word) const;
  std::size_t sense_count(std::string_view word) const { return senses(word).size(); }

  const std::string& id(SynsetIndex s) const { return ids_[s]; }
  const std::vector<SynsetIndex>& hypernyms(SynsetIndex s) const { return parents_[s]; }
  std::size_t synset_count() const { return ids_.size(); }

  /// The synset and every hypernym ancestor, sorted ascending.
  std::vector<SynsetIndex> ancestors(SynsetIndex s) const;

  /// Lookup key used for words: case-folded, spaces replaced by underscores.
  static std::string word_key(std::string_view word);

 private:
  std::vector<std::string> ids_;
  std::vector<std::vector<SynsetIndex>> parents_;
  std::unordered_map<std::string, SynsetIndex> by_id_;
  std::unordered_map<std::string, std::vector<SynsetIndex>> senses_;
};

/// Reads `index.noun` and `data.noun` from a WordNet database directory (or
/// its `dict/` subdirectory). Hypernym and instance-hypernym pointers form the
/// hierarchy.
Taxonomy load_wordnet(const std::filesystem::path& root);
Taxonomy parse_wordnet(std::istream& index_noun, std::istream& data_noun);

}  // namespace normprobe
