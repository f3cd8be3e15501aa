#include "normprobe/wordnet.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "normprobe/error.hpp"
#include "normprobe/ingest.hpp"

namespace normprobe {

std::string Taxonomy::word_key(std::string_view word) {
  std::string key = casefold(word);
  std::replace(key.begin(), key.end(), ' ', '_');
  return key;
}

Taxonomy::SynsetIndex Taxonomy::add_synset(const std::string& id) {
  const auto [it, inserted] = by_id_.try_emplace(id, ids_.size());
  if (inserted) {
    ids_.push_back(id);
    parents_.emplace_back();
  }
  return it->second;
}

void Taxonomy::add_hypernym(const std::string& child, const std::string& parent) {
  const SynsetIndex c = add_synset(child);
  const SynsetIndex p = add_synset(parent);
  if (c == p) throw ArgumentError("synset '" + child + "' cannot be its own hypernym");
  auto& list = parents_[c];
  if (std::find(list.begin(), list.end(), p) == list.end()) list.push_back(p);
}

void Taxonomy::add_sense(std::string_view word, const std::string& synset) {
  const SynsetIndex s = add_synset(synset);
  auto& list = senses_[word_key(word)];
  if (std::find(list.begin(), list.end(), s) == list.end()) list.push_back(s);
}

bool Taxonomy::contains_word(std::string_view word) const { return senses_.contains(word_key(word)); }

const std::vector<Taxonomy::SynsetIndex>& Taxonomy::senses(std::string_view word) const {
  static const std::vector<SynsetIndex> none;
  const auto it = senses_.find(word_key(word));
  return it == senses_.end() ? none : it->second;
}

std::vector<Taxonomy::SynsetIndex> Taxonomy::ancestors(SynsetIndex s) const {
  std::vector<SynsetIndex> out;
  std::vector<SynsetIndex> stack{s};
  std::vector<bool> seen(ids_.size(), false);
  while (!stack.empty()) {
    const SynsetIndex cur = stack.back();
    stack.pop_back();
    if (seen[cur]) continue;
    seen[cur] = true;
    out.push_back(cur);
    for (const SynsetIndex p : parents_[cur]) stack.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

bool is_license_line(const std::string& line) { return line.empty() || line.front() == ' '; }

}  // namespace

Taxonomy parse_wordnet(std::istream& index_noun, std::istream& data_noun) {
  Taxonomy taxonomy;
  std::string line;
  std::size_t line_no = 0;

  // data.noun: offset lex_filenum ss_type w_cnt (word lex_id)* p_cnt (ptr offset pos st)* ... | gloss
  while (std::getline(data_noun, line)) {
    ++line_no;
    if (is_license_line(line)) continue;
    std::istringstream in(line.substr(0, line.find('|')));
    std::string offset, lex_filenum, ss_type, w_cnt_hex;
    if (!(in >> offset >> lex_filenum >> ss_type >> w_cnt_hex)) throw ParseError("data.noun: truncated synset", line_no);
    const std::string id = canonical_synset_id(offset);
    taxonomy.add_synset(id);
    const int words = std::stoi(w_cnt_hex, nullptr, 16);
    std::string word, lex_id;
    for (int w = 0; w < words; ++w)
      if (!(in >> word >> lex_id)) throw ParseError("data.noun: truncated word list", line_no);
    int pointers = 0;
    if (!(in >> pointers)) throw ParseError("data.noun: missing pointer count", line_no);
    for (int p = 0; p < pointers; ++p) {
      std::string symbol, target, pos, source_target;
      if (!(in >> symbol >> target >> pos >> source_target)) throw ParseError("data.noun: truncated pointer", line_no);
      if ((symbol == "@" || symbol == "@i") && pos == "n") taxonomy.add_hypernym(id, canonical_synset_id(target));
    }
  }

  // index.noun: lemma pos synset_cnt p_cnt ptr_symbol* sense_cnt tagsense_cnt offset*
  line_no = 0;
  while (std::getline(index_noun, line)) {
    ++line_no;
    if (is_license_line(line)) continue;
    std::istringstream in(line);
    std::string lemma, pos;
    int synsets = 0, pointer_kinds = 0;
    if (!(in >> lemma >> pos >> synsets >> pointer_kinds)) throw ParseError("index.noun: truncated entry", line_no);
    std::string skip;
    for (int p = 0; p < pointer_kinds; ++p) in >> skip;
    int sense_cnt = 0, tagsense_cnt = 0;
    if (!(in >> sense_cnt >> tagsense_cnt)) throw ParseError("index.noun: missing sense counts", line_no);
    for (int s = 0; s < synsets; ++s) {
      std::string offset;
      if (!(in >> offset)) throw ParseError("index.noun: missing synset offset", line_no);
      taxonomy.add_sense(lemma, canonical_synset_id(offset));
    }
  }
  return taxonomy;
}

Taxonomy load_wordnet(const std::filesystem::path& root) {
  std::filesystem::path dir = root;
  if (!std::filesystem::exists(dir / "index.noun") && std::filesystem::exists(dir / "dict" / "index.noun"))
    dir /= "dict";
  std::ifstream index(dir / "index.noun");
  std::ifstream data(dir / "data.noun");
  if (!index || !data) throw ConfigError("WordNet database files index.noun/data.noun not found under " + root.string());
  return parse_wordnet(index, data);
}

}  // namespace normprobe
