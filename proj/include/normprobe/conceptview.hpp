#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "normprobe/featfit.hpp"
#include "normprobe/ingest.hpp"
#include "normprobe/numerics.hpp"
#include "normprobe/wordnet.hpp"

namespace normprobe {

enum class Metric { embedding_cosine, norms_lsa_cosine, wordnet_resnik };

std::string_view metric_name(Metric metric);

/// Symmetric concept x concept similarity matrix in canonical concept order.
struct DistanceMatrix {
  Metric metric = Metric::embedding_cosine;
  std::vector<std::string> concepts;
  Matrix<double> values;

  std::size_t index_of(std::string_view concept_name) const;
};

// ---------------------------------------------------------------------------
// LSA

/// Rows of U_k diag(s_k) from the truncated SVD of the label matrix.
Matrix<double> lsa_concept_vectors(const Matrix<double>& Y, Eigen::Index k);

/// Smallest k keeping at least `mass` of the squared singular values, at most `cap`.
Eigen::Index default_lsa_rank(const Matrix<double>& Y, double mass = 0.9, Eigen::Index cap = 300);

// ---------------------------------------------------------------------------
// Pairwise matrices

/// Cosine similarity between the rows of `vectors` (one row per concept).
DistanceMatrix cosine_matrix(const std::vector<std::string>& concepts, const Matrix<double>& vectors, Metric metric);

/// Resnik similarity: the largest information content over ancestors shared by
/// any noun sense of each word. Ancestors without an IC entry are ignored.
double resnik_sim(std::string_view word_a, std::string_view word_b, const Taxonomy& taxonomy,
                  const ValueTable& ic_table);

DistanceMatrix resnik_matrix(const std::vector<std::string>& concepts, const Taxonomy& taxonomy,
                             const ValueTable& ic_table, unsigned threads = 1);

/// Pearson correlation of one concept's rows in two matrices, self-entry removed.
double concept_correlation(const DistanceMatrix& a, const DistanceMatrix& b, std::size_t concept_index);

// ---------------------------------------------------------------------------
// Profiles

struct ConceptProfile {
  std::string concept_name;
  double m_norms = 0;
  double m_taxonomy = 0;
  double median_ff = 0;  // percent
  double log_frequency = 0;
  double log_feature_count = 0;
  double log_total_reports = 0;
  double sense_count = 0;
};

struct ProfileInputs {
  const DistanceMatrix* embedding = nullptr;
  const DistanceMatrix* norms = nullptr;
  const DistanceMatrix* taxonomy = nullptr;
  const LabelMatrix* labels = nullptr;
  const std::vector<FeatureFitRecord>* feature_fit = nullptr;
  const NormDataset* norm_data = nullptr;
  const ValueTable* frequencies = nullptr;
  const Taxonomy* wordnet = nullptr;
};

struct ProfileBuild {
  std::vector<ConceptProfile> profiles;  // canonical concept order
  std::vector<std::string> dropped;      // concepts lacking a covariate or a defined m value
};

/// Median feature fit of the concept's features in `labels` (rows match `labels.concepts`).
std::optional<double> concept_median_ff(const LabelMatrix& labels, const std::vector<FeatureFitRecord>& records,
                                        std::size_t concept_row);

ProfileBuild build_profiles(const ProfileInputs& inputs);

struct ProfileStatistics {
  std::size_t profiles = 0;
  double r_norms_taxonomy = 0;
  double r_norms_feature_fit = 0;
  FTestResult f_test;  // median_ff ~ baseline  vs  baseline + m_norms
};

ProfileStatistics profile_statistics(const std::vector<ConceptProfile>& profiles);

}  // namespace normprobe
