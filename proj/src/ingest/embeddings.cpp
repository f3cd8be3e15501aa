#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "normprobe/error.hpp"
#include "normprobe/ingest.hpp"

namespace normprobe {

std::string casefold(std::string_view word) {
  std::string out(word);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

EmbeddingTable::EmbeddingTable(Eigen::Index dimension) : dimension_(dimension) {
  if (dimension < 1) throw ArgumentError("embedding dimension must be positive");
}

bool EmbeddingTable::insert(std::string word, const Eigen::Ref<const Vector<double>>& values) {
  if (values.size() != dimension_)
    throw ArgumentError("vector for '" + word + "' has " + std::to_string(values.size()) +
                        " components, expected " + std::to_string(dimension_));
  if (!values.allFinite()) throw NumericError("vector for '" + word + "' has non-finite components");
  if (exact_.contains(word)) return false;
  const std::size_t index = words_.size();
  exact_.emplace(word, index);
  folded_.try_emplace(casefold(word), index);
  values_.insert(values_.end(), values.data(), values.data() + dimension_);
  words_.push_back(std::move(word));
  return true;
}

std::optional<std::size_t> EmbeddingTable::find(std::string_view word) const {
  if (auto it = exact_.find(std::string(word)); it != exact_.end()) return it->second;
  if (auto it = folded_.find(casefold(word)); it != folded_.end()) return it->second;
  return std::nullopt;
}

Eigen::Map<const Vector<double>> EmbeddingTable::row(std::size_t index) const {
  return Eigen::Map<const Vector<double>>(values_.data() + index * static_cast<std::size_t>(dimension_),
                                          dimension_);
}

Eigen::Map<const Vector<double>> EmbeddingTable::at(std::string_view word) const {
  const auto index = find(word);
  if (!index) throw LookupError("no embedding for '" + std::string(word) + "'");
  return row(*index);
}

Matrix<double> EmbeddingTable::matrix_for(const std::vector<std::string>& words) const {
  Matrix<double> X(static_cast<Eigen::Index>(words.size()), dimension_);
  for (std::size_t i = 0; i < words.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = at(words[i]).transpose();
  return X;
}

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

bool parse_unsigned(std::string_view token, long long& out) {
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size() && out >= 0;
}

double parse_component(std::string_view token, std::size_t line_no) {
  double value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value))
    throw ParseError("non-numeric component '" + std::string(token) + "'", line_no);
  return value;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

ParsedEmbeddings parse_embeddings(std::istream& in, EmbeddingFormat format, const VocabularyFilter* keep) {
  std::string line;
  std::size_t line_no = 0;
  EmbeddingParseReport report;

  std::optional<Eigen::Index> dimension;
  std::optional<long long> declared_count;
  std::optional<EmbeddingTable> table;
  std::size_t seen_records = 0;

  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;

    if (seen_records == 0 && !declared_count && format != EmbeddingFormat::plain_text) {
      long long count = 0, dim = 0;
      const bool header = tokens.size() == 2 && parse_unsigned(tokens[0], count) && parse_unsigned(tokens[1], dim);
      if (header) {
        if (dim < 1) throw ParseError("header declares a non-positive dimension", line_no);
        declared_count = count;
        dimension = static_cast<Eigen::Index>(dim);
        table.emplace(*dimension);
        continue;
      }
      if (format == EmbeddingFormat::header_text)
        throw ParseError("expected '<count> <dimension>' header", line_no);
    }

    ++seen_records;
    const std::string_view word = tokens.front();
    if (keep && !keep->contains(casefold(word))) {
      ++report.filtered_out;
      continue;
    }

    const auto components = static_cast<Eigen::Index>(tokens.size() - 1);
    if (!dimension) {
      if (components < 1) throw ParseError("record has no vector components", line_no);
      dimension = components;
      table.emplace(*dimension);
    }
    if (components != *dimension)
      throw ParseError("dimensionality mismatch: " + std::to_string(components) + " components, expected " +
                           std::to_string(*dimension),
                       line_no);

    Vector<double> values(*dimension);
    for (Eigen::Index k = 0; k < *dimension; ++k)
      values(k) = parse_component(tokens[static_cast<std::size_t>(k) + 1], line_no);
    if (table->insert(std::string(word), values)) {
      ++report.records;
    } else {
      ++report.duplicates;
      if (report.duplicate_words.size() < 20) report.duplicate_words.emplace_back(word);
    }
  }
  report.lines = line_no;

  if (line_no == 0 || (!table && seen_records == 0)) throw ParseError("empty embedding file");
  if (declared_count && static_cast<long long>(seen_records) != *declared_count)
    throw ParseError("header declares " + std::to_string(*declared_count) + " records, found " +
                     std::to_string(seen_records));
  if (!table) throw ParseError("no records matched the vocabulary filter");
  return ParsedEmbeddings{std::move(*table), std::move(report)};
}

ParsedEmbeddings parse_embedding_file(const std::filesystem::path& path, EmbeddingFormat format,
                                      const VocabularyFilter* keep) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open embedding file " + path.string());
  try {
    return parse_embeddings(in, format, keep);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
  std::ostringstream buffer;
  buffer << std::fixed << std::setprecision(6);
  for (std::size_t i = 0; i < table.size(); ++i) {
    buffer << table.words()[i];
    const auto v = table.row(i);
    for (Eigen::Index k = 0; k < v.size(); ++k) buffer << ' ' << v(k);
    buffer << '\n';
  }
  out << buffer.str();
}

}  // namespace normprobe
