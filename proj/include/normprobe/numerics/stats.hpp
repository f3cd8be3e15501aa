#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "normprobe/error.hpp"

namespace normprobe {

/// Pearson correlation: cosine similarity of the mean-centered arguments.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar pearson(const Eigen::MatrixBase<DerivedA>& u,
                                  const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  if (u.size() != v.size()) throw ArgumentError("pearson: length mismatch");
  if (u.size() < 2) throw ArgumentError("pearson: need at least two observations");
  const auto cu = (u.array() - u.mean()).matrix().eval();
  const auto cv = (v.array() - v.mean()).matrix().eval();
  const Scalar nu = cu.squaredNorm();
  const Scalar nv = cv.squaredNorm();
  if (nu == 0 || nv == 0) throw NumericError("pearson: correlation undefined for a constant vector");
  return std::clamp(cu.dot(cv) / std::sqrt(nu * nv), Scalar(-1), Scalar(1));
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_sim(const Eigen::MatrixBase<DerivedA>& u,
                                     const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  if (u.size() != v.size()) throw ArgumentError("cosine_sim: length mismatch");
  const Scalar nu = u.squaredNorm();
  const Scalar nv = v.squaredNorm();
  if (nu == 0 || nv == 0) throw NumericError("cosine_sim: zero vector");
  return std::clamp(u.dot(v) / std::sqrt(nu * nv), Scalar(-1), Scalar(1));
}

/// F1 of the positive class, in [0, 1]. Zero when there are no true positives.
template <typename DerivedP, typename DerivedG>
double binary_f1(const Eigen::DenseBase<DerivedP>& predicted, const Eigen::DenseBase<DerivedG>& gold) {
  if (predicted.size() != gold.size()) throw ArgumentError("binary_f1: length mismatch");
  long tp = 0, fp = 0, fn = 0;
  for (Eigen::Index i = 0; i < gold.size(); ++i) {
    const bool p = predicted(i) != 0;
    const bool g = gold(i) != 0;
    tp += p && g;
    fp += p && !g;
    fn += !p && g;
  }
  if (tp + fn == 0) throw NumericError("binary_f1: gold labels have no positives");
  if (tp == 0) return 0.0;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

/// Median; the mean of the two middle values for even sizes.
template <typename Scalar>
Scalar median(std::span<const Scalar> sample) {
  if (sample.empty()) throw ArgumentError("median: empty sample");
  std::vector<Scalar> v(sample.begin(), sample.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2 == 1) return v[mid];
  const Scalar upper = v[mid];
  const Scalar lower = *std::max_element(v.begin(), v.begin() + mid);
  return (lower + upper) / 2;
}

template <typename Scalar>
Scalar median(const std::vector<Scalar>& sample) {
  return median(std::span<const Scalar>(sample));
}

/// Linear-interpolated quantile of an ascending-sorted sample, q in [0, 1].
template <typename Scalar>
Scalar sorted_quantile(std::span<const Scalar> sorted, double q) {
  if (sorted.empty()) throw ArgumentError("quantile: empty sample");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + static_cast<Scalar>(frac) * (sorted[hi] - sorted[lo]);
}

/// Ordinary least-squares line b ~ intercept + slope * a.
struct LineFit {
  double slope = 0;
  double intercept = 0;
};

template <typename DerivedA, typename DerivedB>
LineFit least_squares_line(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size() || a.size() < 2) throw ArgumentError("least_squares_line: need >= 2 paired points");
  const auto ca = (a.array() - a.mean()).matrix().eval();
  const auto cb = (b.array() - b.mean()).matrix().eval();
  const double sxx = ca.squaredNorm();
  if (sxx == 0) throw NumericError("least_squares_line: constant regressor");
  LineFit fit;
  fit.slope = ca.dot(cb) / sxx;
  fit.intercept = b.mean() - fit.slope * a.mean();
  return fit;
}

}  // namespace normprobe
