#include <algorithm>
#include <fstream>
#include <set>

#include "normprobe/error.hpp"
#include "normprobe/ingest.hpp"

namespace normprobe {

std::size_t LabelMatrix::positives(std::size_t feature) const {
  return static_cast<std::size_t>(Y.col(static_cast<Eigen::Index>(feature)).sum() + 0.5);
}

NormDataset LabelMatrix::to_norms() const {
  NormDataset out;
  for (const auto& c : concepts) out.add_concept(c);
  for (Eigen::Index f = 0; f < Y.cols(); ++f)
    for (Eigen::Index c = 0; c < Y.rows(); ++c)
      if (Y(c, f) != 0) out.add(concepts[static_cast<std::size_t>(c)], features[static_cast<std::size_t>(f)],
                                categories[static_cast<std::size_t>(f)], 1);
  return out;
}

namespace {

bool is_parenthesized(const std::string& name) { return name.find('(') != std::string::npos; }

bool is_multiword(const std::string& name) {
  return name.find(' ') != std::string::npos || name.find('_') != std::string::npos;
}

}  // namespace

Alignment filter_and_align(const NormDataset& norms, const EmbeddingRefs& embeddings, const AlignmentPolicy& policy) {
  std::set<std::string> excluded;
  for (const auto& e : policy.exclusions) excluded.insert(casefold(e));

  Alignment result;
  std::vector<std::string> kept;
  for (const auto& concept_name : norms.concepts()) {
    if (excluded.contains(casefold(concept_name)) || (policy.drop_parenthesized && is_parenthesized(concept_name)) ||
        (policy.drop_multiword && is_multiword(concept_name))) {
      result.report.excluded.push_back(concept_name);
      continue;
    }
    const bool everywhere = std::all_of(embeddings.begin(), embeddings.end(),
                                        [&](const EmbeddingTable& t) { return t.contains(concept_name); });
    if (!everywhere) {
      result.report.missing_vectors.push_back(concept_name);
      continue;
    }
    kept.push_back(concept_name);
  }
  if (kept.empty()) throw LookupError("no norm concept survives exclusion and embedding lookup");

  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < kept.size(); ++i) row_of.emplace(kept[i], i);

  std::map<std::string, std::vector<std::size_t>> rows_by_feature;
  for (const auto& [key, count] : norms.pairs()) {
    const auto it = row_of.find(key.first);
    if (it != row_of.end()) rows_by_feature[key.second].push_back(it->second);
  }

  LabelMatrix& labels = result.labels;
  labels.concepts = kept;
  std::vector<const std::vector<std::size_t>*> columns;
  for (const auto& feature : norms.features()) {
    const auto it = rows_by_feature.find(feature);
    if (it == rows_by_feature.end() || it->second.size() < policy.min_concepts) {
      ++result.report.features_dropped;
      continue;
    }
    labels.features.push_back(feature);
    labels.categories.push_back(norms.category(feature));
    columns.push_back(&it->second);
  }

  labels.Y = Matrix<double>::Zero(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t f = 0; f < columns.size(); ++f)
    for (const std::size_t r : *columns[f]) labels.Y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) = 1;
  return result;
}

std::vector<std::string> load_exclusions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open exclusion list " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(begin, end - begin + 1));
  }
  return out;
}

}  // namespace normprobe
