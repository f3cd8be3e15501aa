#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "normprobe/error.hpp"
#include "normprobe/numerics/logistic.hpp"

namespace normprobe {

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int max_iter = 10000;
  constexpr double eps = 1e-16;
  constexpr double tiny = 1e-300;
  const double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1, d = 1 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < eps) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0 && b > 0)) throw ArgumentError("incomplete beta: a and b must be positive");
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1) / (a + b + 2)) return std::exp(log_front) * detail::beta_continued_fraction(a, b, x) / a;
  return 1 - std::exp(log_front) * detail::beta_continued_fraction(b, a, 1 - x) / b;
}

/// Upper tail P(F > f) of the F(d1, d2) distribution.
inline double f_distribution_sf(double f, double d1, double d2) {
  if (!(f > 0)) return 1;
  return regularized_incomplete_beta(d2 / 2, d1 / 2, d2 / (d2 + d1 * f));
}

struct FTestResult {
  double f_statistic = 0;
  double p_value = 1;
  int df_numerator = 0;
  int df_denominator = 0;
  double rss_base = 0;
  double rss_full = 0;
  /// Set when an added column carried no information beyond the base design.
  std::optional<int> collinear_extra_column;
};

namespace detail {

inline bool in_column_span(const Matrix<double>& design, const Vector<double>& column) {
  const double scale = column.norm();
  if (scale == 0) return true;
  if (design.cols() == 0) return false;
  Eigen::ColPivHouseholderQR<Matrix<double>> qr(design);
  const Vector<double> residual = column - design * qr.solve(column);
  return residual.norm() <= 1e-9 * scale;
}

inline double ols_rss(const Matrix<double>& design, const Vector<double>& y) {
  if (design.cols() == 0) return y.squaredNorm();
  Eigen::ColPivHouseholderQR<Matrix<double>> qr(design);
  return (y - design * qr.solve(y)).squaredNorm();
}

}  // namespace detail

/// Nested OLS comparison of y ~ [1, X_base] against y ~ [1, X_base, X_extra].
/// Extra columns already spanned by the base design add no degrees of freedom
/// and are reported through `collinear_extra_column`; a rank-deficient base
/// design is an error.
inline FTestResult nested_f_test(const Vector<double>& y, const Matrix<double>& X_base,
                                 const Matrix<double>& X_extra, bool add_intercept = true) {
  const Eigen::Index n = y.size();
  if (X_base.rows() != n || X_extra.rows() != n) throw ArgumentError("nested_f_test: row count mismatch");
  if (X_extra.cols() < 1) throw ArgumentError("nested_f_test: no added columns");
  if (!y.allFinite() || !X_base.allFinite() || !X_extra.allFinite())
    throw NumericError("nested_f_test: non-finite input");

  const Eigen::Index offset = add_intercept ? 1 : 0;
  Matrix<double> base(n, offset + X_base.cols());
  if (add_intercept) base.col(0).setOnes();
  for (Eigen::Index j = 0; j < X_base.cols(); ++j) {
    if (detail::in_column_span(base.leftCols(offset + j), X_base.col(j)))
      throw NumericError("nested_f_test: base column " + std::to_string(j) +
                         " is collinear with preceding columns");
    base.col(offset + j) = X_base.col(j);
  }

  Matrix<double> full = base;
  FTestResult result;
  for (Eigen::Index j = 0; j < X_extra.cols(); ++j) {
    if (detail::in_column_span(full, X_extra.col(j))) {
      if (!result.collinear_extra_column) result.collinear_extra_column = static_cast<int>(j);
      continue;
    }
    full.conservativeResize(Eigen::NoChange, full.cols() + 1);
    full.col(full.cols() - 1) = X_extra.col(j);
  }

  const Eigen::Index p_full = full.cols();
  if (n < p_full + 2) throw ArgumentError("nested_f_test: need rows >= columns + 2 for the full model");

  const int q = static_cast<int>(p_full - base.cols());
  result.df_numerator = static_cast<int>(X_extra.cols());
  result.df_denominator = static_cast<int>(n - p_full);
  result.rss_base = detail::ols_rss(base, y);
  if (q == 0) {
    result.rss_full = result.rss_base;
    result.f_statistic = 0;
    result.p_value = 1;
    return result;
  }
  result.df_numerator = q;
  result.rss_full = detail::ols_rss(full, y);
  const double numerator = std::max(0.0, result.rss_base - result.rss_full) / q;
  const double denominator = result.rss_full / result.df_denominator;
  if (denominator == 0) {
    result.f_statistic = numerator > 0 ? std::numeric_limits<double>::infinity() : 0;
    result.p_value = numerator > 0 ? 0 : 1;
    return result;
  }
  result.f_statistic = numerator / denominator;
  result.p_value = f_distribution_sf(result.f_statistic, q, result.df_denominator);
  return result;
}

}  // namespace normprobe
