#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "normprobe/error.hpp"
#include "normprobe/ingest.hpp"

namespace normprobe {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

char parse_delimiter(const std::string& value) {
  if (value == "comma" || value == ",") return ',';
  if (value == "tab" || value == "\\t") return '\t';
  if (value == "semicolon") return ';';
  if (value.size() == 1) return value[0];
  throw ConfigError("unrecognized delimiter '" + value + "'");
}

}  // namespace

std::vector<std::string> split_delimited(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

NormSchema parse_norm_schema(std::istream& in) {
  NormSchema schema;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("schema line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key == "concept") schema.concept_column = value;
    else if (key == "feature") schema.feature_column = value;
    else if (key == "category") schema.category_column = value;
    else if (key == "count") schema.count_column = value;
    else if (key == "delimiter") schema.delimiter = parse_delimiter(value);
    else if (key.starts_with("category.")) schema.category_map[key.substr(9)] = value;
    else throw ConfigError("schema line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  return schema;
}

NormSchema load_norm_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema file " + path.string());
  return parse_norm_schema(in);
}

std::string normalize_category(std::string_view raw) {
  std::string out = casefold(trim(raw));
  for (auto& c : out)
    if (c == ' ' || c == '_') c = '-';
  return out;
}

void NormDataset::add(const std::string& concept_name, const std::string& feature, const std::string& category,
                      long count) {
  if (count <= 0) throw ArgumentError("production count for (" + concept_name + ", " + feature + ") must be positive");
  if (auto it = categories_.find(feature); it != categories_.end()) {
    if (it->second != category)
      throw ArgumentError("feature '" + feature + "' has conflicting categories '" + it->second + "' and '" +
                          category + "'");
  } else {
    categories_.emplace(feature, category);
  }
  add_concept(concept_name);
  auto [pair_it, inserted] = pairs_.try_emplace({concept_name, feature}, 0);
  if (inserted) ++concept_features_[concept_name];
  else ++merged_rows_;
  pair_it->second += count;
  concept_reports_[concept_name] += count;
}

void NormDataset::add_concept(const std::string& concept_name) {
  concept_features_.try_emplace(concept_name, 0);
  concept_reports_.try_emplace(concept_name, 0);
}

std::vector<std::string> NormDataset::concepts() const {
  std::vector<std::string> out;
  out.reserve(concept_features_.size());
  for (const auto& [name, _] : concept_features_) out.push_back(name);
  return out;
}

std::vector<std::string> NormDataset::features() const {
  std::vector<std::string> out;
  out.reserve(categories_.size());
  for (const auto& [name, _] : categories_) out.push_back(name);
  return out;
}

const std::string& NormDataset::category(const std::string& feature) const {
  const auto it = categories_.find(feature);
  if (it == categories_.end()) throw LookupError("unknown feature '" + feature + "'");
  return it->second;
}

std::size_t NormDataset::features_of(const std::string& concept_name) const {
  const auto it = concept_features_.find(concept_name);
  if (it == concept_features_.end()) throw LookupError("unknown concept '" + concept_name + "'");
  return it->second;
}

long NormDataset::total_reports(const std::string& concept_name) const {
  const auto it = concept_reports_.find(concept_name);
  if (it == concept_reports_.end()) throw LookupError("unknown concept '" + concept_name + "'");
  return it->second;
}

double NormDataset::mean_concepts_per_feature() const {
  return categories_.empty() ? 0.0 : static_cast<double>(pairs_.size()) / static_cast<double>(categories_.size());
}

double NormDataset::mean_features_per_concept() const {
  return concept_features_.empty() ? 0.0
                                   : static_cast<double>(pairs_.size()) / static_cast<double>(concept_features_.size());
}

NormDataset parse_norms(std::istream& in, const NormSchema& schema) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_delimited(line, schema.delimiter);
      break;
    }
  }
  if (header.empty()) throw ParseError("norm file has no header row");
  for (auto& h : header) h = trim(h);

  auto column = [&](const std::string& name, const char* role) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError(std::string("norm file has no '") + name + "' column for role " + role);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t concept_col = column(schema.concept_column, "concept");
  const std::size_t feature_col = column(schema.feature_column, "feature");
  const std::size_t category_col = column(schema.category_column, "category");
  const std::size_t count_col = column(schema.count_column, "count");
  const std::size_t needed = std::max({concept_col, feature_col, category_col, count_col}) + 1;

  NormDataset dataset;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_delimited(line, schema.delimiter);
    if (fields.size() < needed)
      throw ParseError("expected at least " + std::to_string(needed) + " fields, found " + std::to_string(fields.size()),
                       line_no);
    const std::string concept_name = trim(fields[concept_col]);
    const std::string feature = trim(fields[feature_col]);
    const std::string raw_category = trim(fields[category_col]);
    const std::string count_text = trim(fields[count_col]);
    if (concept_name.empty() || feature.empty()) throw ParseError("empty concept or feature", line_no);

    long count = 0;
    const auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
    if (ec != std::errc() || ptr != count_text.data() + count_text.size())
      throw ParseError("non-integer production count '" + count_text + "'", line_no);
    if (count <= 0) throw ParseError("production count must be positive, got " + count_text, line_no);

    const auto mapped = schema.category_map.find(raw_category);
    const std::string category =
        mapped != schema.category_map.end() ? mapped->second : normalize_category(raw_category);
    try {
      dataset.add(concept_name, feature, category, count);
    } catch (const ArgumentError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return dataset;
}

NormDataset parse_norm_file(const std::filesystem::path& path, const NormSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open norm file " + path.string());
  return parse_norms(in, schema);
}

}  // namespace normprobe
