#include "normprobe/domains.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "normprobe/error.hpp"
#include "normprobe/numerics/stats.hpp"

namespace normprobe {

Matrix<double> dissimilarity_matrix(const Matrix<double>& lsa_vectors, const Vector<double>& median_ff, double alpha) {
  if (!(alpha >= 0)) throw ArgumentError("dissimilarity_matrix: alpha must be >= 0");
  if (median_ff.size() != lsa_vectors.rows()) throw ArgumentError("dissimilarity_matrix: feature-fit count mismatch");
  const Eigen::Index n = lsa_vectors.rows();
  const Vector<double> ff = median_ff / 100.0;
  Matrix<double> d = Matrix<double>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      d(i, j) = d(j, i) = concept_distance(lsa_vectors.row(i), lsa_vectors.row(j), ff(i), ff(j), alpha);
  return d;
}

DomainClustering agglomerate(const std::vector<std::string>& concepts, const Matrix<double>& lsa_vectors,
                             const Vector<double>& median_ff, double alpha, std::size_t domains) {
  const std::size_t n = concepts.size();
  if (domains < 1) throw ArgumentError("agglomerate: need at least one domain");
  if (domains > n) throw ArgumentError("agglomerate: more domains than concepts");
  if (static_cast<std::size_t>(lsa_vectors.rows()) != n || static_cast<std::size_t>(median_ff.size()) != n)
    throw ArgumentError("agglomerate: inputs disagree on the number of concepts");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return concepts[a] < concepts[b]; });
  for (std::size_t i = 1; i < n; ++i)
    if (concepts[order[i]] == concepts[order[i - 1]]) throw ArgumentError("agglomerate: duplicate concept " + concepts[order[i]]);

  Matrix<double> lsa(static_cast<Eigen::Index>(n), lsa_vectors.cols());
  Vector<double> ff(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    lsa.row(static_cast<Eigen::Index>(i)) = lsa_vectors.row(static_cast<Eigen::Index>(order[i]));
    ff(static_cast<Eigen::Index>(i)) = median_ff(static_cast<Eigen::Index>(order[i]));
  }
  Matrix<double> dist = dissimilarity_matrix(lsa, ff, alpha);

  // Cluster c is identified by its smallest (lexicographically first) member,
  // which is also its row in `dist`.
  std::vector<bool> active(n, true);
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);

  for (std::size_t clusters = n; clusters > domains; --clusters) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        // Strict < with ascending (i, j) scan keeps the lexicographically first pair on ties.
        const double d = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n) throw NumericError("agglomerate: no finite merge distance");
    // Lance-Williams update for average linkage.
    const double wi = static_cast<double>(size[bi]), wj = static_cast<double>(size[bj]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const auto K = static_cast<Eigen::Index>(k);
      const double merged = (wi * dist(static_cast<Eigen::Index>(bi), K) + wj * dist(static_cast<Eigen::Index>(bj), K)) / (wi + wj);
      dist(static_cast<Eigen::Index>(bi), K) = dist(K, static_cast<Eigen::Index>(bi)) = merged;
    }
    size[bi] += size[bj];
    active[bj] = false;
    parent[bj] = bi;
  }

  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  std::map<std::size_t, int> id_of_root;
  DomainClustering out;
  out.alpha = alpha;
  out.domains = domains;
  out.concepts.resize(n);
  out.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [it, inserted] = id_of_root.try_emplace(root(i), static_cast<int>(id_of_root.size()));
    out.concepts[i] = concepts[order[i]];
    out.assignment[i] = it->second;
  }
  return out;
}

std::vector<DomainSummary> domain_summary(const DomainClustering& clustering, const Vector<double>& median_ff) {
  if (static_cast<std::size_t>(median_ff.size()) != clustering.concepts.size())
    throw ArgumentError("domain_summary: feature-fit count mismatch");
  std::vector<DomainSummary> out(clustering.domains);
  std::vector<std::vector<double>> scores(clustering.domains);
  for (std::size_t i = 0; i < clustering.concepts.size(); ++i) {
    const auto id = static_cast<std::size_t>(clustering.assignment[i]);
    out[id].id = static_cast<int>(id);
    out[id].members.push_back(clustering.concepts[i]);
    scores[id].push_back(median_ff(static_cast<Eigen::Index>(i)));
  }
  for (std::size_t d = 0; d < out.size(); ++d) {
    std::sort(out[d].members.begin(), out[d].members.end());
    out[d].median_ff = median(scores[d]);
  }
  return out;
}

double within_domain_variance_ratio(const DomainClustering& clustering, const Vector<double>& median_ff) {
  const double mean = median_ff.mean();
  const double total = (median_ff.array() - mean).square().sum();
  if (total == 0) return 0;
  std::vector<double> sum(clustering.domains, 0), sq(clustering.domains, 0);
  std::vector<std::size_t> count(clustering.domains, 0);
  for (std::size_t i = 0; i < clustering.concepts.size(); ++i) {
    const auto d = static_cast<std::size_t>(clustering.assignment[i]);
    const double v = median_ff(static_cast<Eigen::Index>(i));
    sum[d] += v;
    sq[d] += v * v;
    ++count[d];
  }
  double within = 0;
  for (std::size_t d = 0; d < count.size(); ++d)
    if (count[d] > 0) within += sq[d] - sum[d] * sum[d] / static_cast<double>(count[d]);
  return within / total;
}

}  // namespace normprobe
