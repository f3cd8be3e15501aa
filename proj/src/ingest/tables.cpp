#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "normprobe/error.hpp"
#include "normprobe/ingest.hpp"

namespace normprobe {

void ValueTable::set(std::string key, double value) {
  if (!(value >= 0) || !std::isfinite(value)) throw ArgumentError("table value for '" + key + "' must be finite and >= 0");
  values_[std::move(key)] = value;
}

void ValueTable::accumulate(std::string key, double value) {
  if (!(value >= 0) || !std::isfinite(value)) throw ArgumentError("table value for '" + key + "' must be finite and >= 0");
  values_[std::move(key)] += value;
}

std::optional<double> ValueTable::find(std::string_view key) const {
  const auto it = values_.find(std::string(key));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string canonical_synset_id(std::string_view id) {
  std::string_view digits = id;
  if (!digits.empty() && digits.front() == 'n') digits.remove_prefix(1);
  else if (!digits.empty() && digits.back() == 'n') digits.remove_suffix(1);
  if (digits.empty() || digits.size() > 8) return std::string(id);
  unsigned long offset = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), offset);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::string(id);
  std::string out = std::to_string(offset);
  return std::string(8 - out.size(), '0') + out + "n";
}

namespace {

template <typename KeyFn>
ValueTable parse_value_table(std::istream& in, KeyFn key_of, bool sum_duplicates) {
  ValueTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string key, value_text, extra;
    if (!(fields >> key)) continue;
    if (key.front() == '#') continue;
    if (!(fields >> value_text)) throw ParseError("missing value for '" + key + "'", line_no);
    if (fields >> extra) throw ParseError("unexpected trailing field '" + extra + "'", line_no);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc() || ptr != value_text.data() + value_text.size() || !std::isfinite(value))
      throw ParseError("non-numeric value '" + value_text + "'", line_no);
    if (value < 0) throw ParseError("negative value " + value_text + " for '" + key + "'", line_no);
    if (sum_duplicates) table.accumulate(key_of(key), value);
    else table.set(key_of(key), value);
  }
  return table;
}

std::ifstream open_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open table " + path.string());
  return in;
}

}  // namespace

namespace {

// WordNet::Similarity count file: a `wnver::<hash>` line, then
// `<offset><pos> <count> [ROOT]`. Counts become -log(count / root count).
ValueTable parse_ic_counts(std::istream& in) {
  std::map<std::string, double> counts;
  double root_total = 0;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string key, value_text, marker;
    if (!(fields >> key)) continue;
    if (key.back() != 'n') continue;  // verb hierarchies are not used
    if (!(fields >> value_text)) throw ParseError("missing count for '" + key + "'", line_no);
    double count = 0;
    const auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), count);
    if (ec != std::errc() || ptr != value_text.data() + value_text.size() || !std::isfinite(count))
      throw ParseError("non-numeric count '" + value_text + "'", line_no);
    if (count < 0) throw ParseError("negative count " + value_text + " for '" + key + "'", line_no);
    if (fields >> marker && marker == "ROOT") root_total += count;
    counts[canonical_synset_id(key)] = count;
  }
  if (!(root_total > 0)) throw ParseError("count-format IC table has no positive ROOT entry");
  ValueTable table;
  for (const auto& [key, count] : counts)
    if (count > 0) table.set(key, std::max(0.0, -std::log(count / root_total)));
  return table;
}

}  // namespace

ValueTable parse_ic_table(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (buffer.str().rfind("wnver::", 0) == 0) {
    std::string header;
    std::getline(buffer, header);
    return parse_ic_counts(buffer);
  }
  return parse_value_table(buffer, [](const std::string& k) { return canonical_synset_id(k); }, false);
}

ValueTable load_ic_table(const std::filesystem::path& path) {
  auto in = open_table(path);
  return parse_ic_table(in);
}

ValueTable parse_frequency_table(std::istream& in) {
  return parse_value_table(in, [](const std::string& k) { return casefold(k); }, true);
}

ValueTable load_frequency_table(const std::filesystem::path& path) {
  auto in = open_table(path);
  return parse_frequency_table(in);
}

double frequency_or_floor(const ValueTable& table, std::string_view word) {
  return std::max(1.0, table.find(casefold(word)).value_or(1.0));
}

}  // namespace normprobe
