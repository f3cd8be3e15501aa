#include "normprobe/conceptview.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "normprobe/error.hpp"

namespace normprobe {

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::embedding_cosine: return "embedding-cosine";
    case Metric::norms_lsa_cosine: return "norms-lsa-cosine";
    case Metric::wordnet_resnik: return "wordnet-resnik";
  }
  return "unknown";
}

std::size_t DistanceMatrix::index_of(std::string_view concept_name) const {
  const auto it = std::find(concepts.begin(), concepts.end(), concept_name);
  if (it == concepts.end()) throw LookupError("concept '" + std::string(concept_name) + "' not in matrix");
  return static_cast<std::size_t>(it - concepts.begin());
}

Matrix<double> lsa_concept_vectors(const Matrix<double>& Y, Eigen::Index k) {
  const auto svd = truncated_svd(Y, k);
  return svd.left * svd.singular_values.asDiagonal();
}

Eigen::Index default_lsa_rank(const Matrix<double>& Y, double mass, Eigen::Index cap) {
  const Vector<double> s = singular_values(Y);
  const Eigen::Index limit = std::min<Eigen::Index>(cap, s.size());
  if (limit < 1) throw ArgumentError("default_lsa_rank: empty label matrix");
  const double total = s.squaredNorm();
  if (total == 0) return 1;
  double kept = 0;
  for (Eigen::Index k = 0; k < limit; ++k) {
    kept += s(k) * s(k);
    if (kept >= mass * total) return k + 1;
  }
  return limit;
}

DistanceMatrix cosine_matrix(const std::vector<std::string>& concepts, const Matrix<double>& vectors, Metric metric) {
  if (static_cast<Eigen::Index>(concepts.size()) != vectors.rows())
    throw ArgumentError("cosine_matrix: concept count does not match vector rows");
  Matrix<double> unit = vectors;
  std::vector<std::string> zero;
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    const double norm = unit.row(i).norm();
    if (norm == 0) zero.push_back(concepts[static_cast<std::size_t>(i)]);
    else unit.row(i) /= norm;
  }
  if (!zero.empty()) {
    std::string list;
    for (const auto& c : zero) list += (list.empty() ? "" : ", ") + c;
    throw NumericError("cosine_matrix: zero vectors for " + list);
  }
  DistanceMatrix out;
  out.metric = metric;
  out.concepts = concepts;
  out.values = unit * unit.transpose();
  out.values = ((out.values + out.values.transpose()) / 2).cwiseMax(-1.0).cwiseMin(1.0);
  out.values.diagonal().setOnes();
  return out;
}

namespace {

struct ResnikIndex {
  std::vector<double> ic;  // per synset, NaN when absent

  ResnikIndex(const Taxonomy& taxonomy, const ValueTable& table) : ic(taxonomy.synset_count()) {
    for (std::size_t s = 0; s < ic.size(); ++s)
      ic[s] = table.find(taxonomy.id(s)).value_or(std::numeric_limits<double>::quiet_NaN());
  }

  static std::vector<std::size_t> word_ancestors(std::string_view word, const Taxonomy& taxonomy) {
    const auto& senses = taxonomy.senses(word);
    if (senses.empty()) throw LookupError("word '" + std::string(word) + "' has no noun synset in the taxonomy");
    std::vector<std::size_t> all;
    for (const auto s : senses) {
      const auto anc = taxonomy.ancestors(s);
      all.insert(all.end(), anc.begin(), anc.end());
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
  }

  double similarity(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) const {
    double best = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) ++ia;
      else if (*ib < *ia) ++ib;
      else {
        if (!std::isnan(ic[*ia])) best = std::max(best, ic[*ia]);
        ++ia;
        ++ib;
      }
    }
    return best;
  }
};

}  // namespace

double resnik_sim(std::string_view word_a, std::string_view word_b, const Taxonomy& taxonomy,
                  const ValueTable& ic_table) {
  const ResnikIndex index(taxonomy, ic_table);
  return index.similarity(ResnikIndex::word_ancestors(word_a, taxonomy), ResnikIndex::word_ancestors(word_b, taxonomy));
}

DistanceMatrix resnik_matrix(const std::vector<std::string>& concepts, const Taxonomy& taxonomy,
                             const ValueTable& ic_table, unsigned threads) {
  std::vector<std::string> missing;
  for (const auto& c : concepts)
    if (taxonomy.senses(c).empty()) missing.push_back(c);
  if (!missing.empty()) {
    std::string list;
    for (const auto& c : missing) list += (list.empty() ? "" : ", ") + c;
    throw LookupError("resnik_matrix: no noun synsets for " + list);
  }

  const ResnikIndex index(taxonomy, ic_table);
  std::vector<std::vector<std::size_t>> ancestors;
  ancestors.reserve(concepts.size());
  for (const auto& c : concepts) ancestors.push_back(ResnikIndex::word_ancestors(c, taxonomy));

  const auto n = static_cast<Eigen::Index>(concepts.size());
  DistanceMatrix out;
  out.metric = Metric::wordnet_resnik;
  out.concepts = concepts;
  out.values = Matrix<double>::Zero(n, n);

  std::atomic<Eigen::Index> next{0};
  auto work = [&] {
    for (Eigen::Index i = next++; i < n; i = next++)
      for (Eigen::Index j = i; j < n; ++j)
        out.values(i, j) = index.similarity(ancestors[static_cast<std::size_t>(i)], ancestors[static_cast<std::size_t>(j)]);
  };
  const unsigned workers = std::max(1u, threads);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  out.values.triangularView<Eigen::StrictlyLower>() = out.values.transpose();
  return out;
}

double concept_correlation(const DistanceMatrix& a, const DistanceMatrix& b, std::size_t concept_index) {
  if (a.concepts != b.concepts) throw ArgumentError("concept_correlation: matrices use different concept orders");
  const auto n = a.values.rows();
  const auto i = static_cast<Eigen::Index>(concept_index);
  if (i < 0 || i >= n) throw ArgumentError("concept_correlation: concept index out of range");
  Vector<double> ra(n - 1), rb(n - 1);
  for (Eigen::Index j = 0, k = 0; j < n; ++j) {
    if (j == i) continue;
    ra(k) = a.values(i, j);
    rb(k) = b.values(i, j);
    ++k;
  }
  return pearson(ra, rb);
}

std::optional<double> concept_median_ff(const LabelMatrix& labels, const std::vector<FeatureFitRecord>& records,
                                        std::size_t concept_row) {
  std::map<std::string, double> score;
  for (const auto& r : records) score.emplace(r.feature, r.f1);
  std::vector<double> values;
  const auto row = static_cast<Eigen::Index>(concept_row);
  for (Eigen::Index f = 0; f < labels.Y.cols(); ++f) {
    if (labels.Y(row, f) == 0) continue;
    if (auto it = score.find(labels.features[static_cast<std::size_t>(f)]); it != score.end())
      values.push_back(it->second);
  }
  if (values.empty()) return std::nullopt;
  return median(values);
}

ProfileBuild build_profiles(const ProfileInputs& in) {
  if (!in.embedding || !in.norms || !in.taxonomy || !in.labels || !in.feature_fit || !in.norm_data ||
      !in.frequencies || !in.wordnet)
    throw ArgumentError("build_profiles: every input must be supplied");
  const auto& concepts = in.embedding->concepts;
  if (in.norms->concepts != concepts || in.taxonomy->concepts != concepts)
    throw ArgumentError("build_profiles: distance matrices use different concept orders");

  std::map<std::string, std::size_t> label_row;
  for (std::size_t r = 0; r < in.labels->concepts.size(); ++r) label_row.emplace(in.labels->concepts[r], r);
  ProfileBuild build;
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    const std::string& name = concepts[i];
    ConceptProfile p;
    p.concept_name = name;
    try {
      p.m_norms = concept_correlation(*in.embedding, *in.norms, i);
      p.m_taxonomy = concept_correlation(*in.embedding, *in.taxonomy, i);
    } catch (const NumericError&) {
      build.dropped.push_back(name);
      continue;
    }
    const auto row = label_row.find(name);
    const auto ff = row == label_row.end() ? std::nullopt : concept_median_ff(*in.labels, *in.feature_fit, row->second);
    const std::size_t senses = in.wordnet->sense_count(name);
    std::size_t features = 0;
    long reports = 0;
    try {
      features = in.norm_data->features_of(name);
      reports = in.norm_data->total_reports(name);
    } catch (const LookupError&) {
    }
    if (!ff || senses == 0 || features == 0 || reports <= 0) {
      build.dropped.push_back(name);
      continue;
    }
    p.median_ff = *ff;
    p.log_frequency = std::log(frequency_or_floor(*in.frequencies, name));
    p.log_feature_count = std::log(static_cast<double>(features));
    p.log_total_reports = std::log(static_cast<double>(reports));
    p.sense_count = static_cast<double>(senses);
    build.profiles.push_back(std::move(p));
  }
  return build;
}

ProfileStatistics profile_statistics(const std::vector<ConceptProfile>& profiles) {
  if (profiles.size() < 10) throw ArgumentError("profile_statistics: need at least 10 profiles");
  const auto n = static_cast<Eigen::Index>(profiles.size());
  Vector<double> m_norms(n), m_tax(n), ff(n);
  Matrix<double> base(n, 4), extra(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = profiles[static_cast<std::size_t>(i)];
    m_norms(i) = p.m_norms;
    m_tax(i) = p.m_taxonomy;
    ff(i) = p.median_ff;
    base.row(i) << p.log_frequency, p.log_feature_count, p.log_total_reports, p.sense_count;
    extra(i, 0) = p.m_norms;
  }
  ProfileStatistics stats;
  stats.profiles = profiles.size();
  stats.r_norms_taxonomy = pearson(m_norms, m_tax);
  stats.r_norms_feature_fit = pearson(m_norms, ff);
  stats.f_test = nested_f_test(ff, base, extra);
  return stats;
}

}  // namespace normprobe
