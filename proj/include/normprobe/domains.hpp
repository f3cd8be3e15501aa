#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "normprobe/numerics/logistic.hpp"

namespace normprobe {

/// ||lsa_i - lsa_j||_2 + alpha (ff_i - ff_j)^2, with feature fit on [0, 1].
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar concept_distance(const Eigen::MatrixBase<DerivedA>& lsa_i,
                                           const Eigen::MatrixBase<DerivedB>& lsa_j, double ff_i, double ff_j,
                                           double alpha) {
  if (!(alpha >= 0)) throw ArgumentError("concept_distance: alpha must be >= 0");
  if (lsa_i.size() != lsa_j.size()) throw ArgumentError("concept_distance: LSA dimension mismatch");
  const double gap = ff_i - ff_j;
  return (lsa_i - lsa_j).norm() + alpha * gap * gap;
}

/// Full dissimilarity matrix; `median_ff` in percent, normalized internally.
Matrix<double> dissimilarity_matrix(const Matrix<double>& lsa_vectors, const Vector<double>& median_ff, double alpha);

struct DomainClustering {
  double alpha = 0;
  std::size_t domains = 0;
  std::vector<std::string> concepts;  // lexicographic
  std::vector<int> assignment;        // parallel to `concepts`, ids 0..domains-1
};

/// Average-linkage agglomeration down to `domains` clusters. Concepts are put
/// in lexicographic order first; ties between equal merge distances go to the
/// pair whose smallest members sort first, so the result does not depend on
/// input order. Domain ids follow each cluster's smallest member.
DomainClustering agglomerate(const std::vector<std::string>& concepts, const Matrix<double>& lsa_vectors,
                             const Vector<double>& median_ff, double alpha, std::size_t domains = 40);

struct DomainSummary {
  int id = 0;
  std::vector<std::string> members;  // lexicographic
  double median_ff = 0;              // percent
  std::size_t size() const { return members.size(); }
};

/// `median_ff` is parallel to `clustering.concepts`.
std::vector<DomainSummary> domain_summary(const DomainClustering& clustering, const Vector<double>& median_ff);

/// Pooled within-domain variance of feature fit over its total variance.
double within_domain_variance_ratio(const DomainClustering& clustering, const Vector<double>& median_ff);

}  // namespace normprobe
