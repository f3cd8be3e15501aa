#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "normprobe/error.hpp"

namespace normprobe {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// log(1 + exp(z)) without overflow.
template <typename Scalar>
Scalar softplus(Scalar z) {
  return std::max(z, Scalar(0)) + std::log1p(std::exp(-std::abs(z)));
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  if (z >= 0) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

/// log sigma(z), stable for large |z|.
template <typename Scalar>
Scalar log_sigmoid(Scalar z) {
  return -softplus(-z);
}

struct LogisticOptions {
  bool fit_intercept = true;
  double gradient_tolerance = 1e-6;  // on the infinity norm of the gradient
  int max_iterations = 500;
  int history = 10;                  // L-BFGS memory
  bool record_trace = false;
};

/// L2-regularized binary logistic probe sigma(w^T x + b).
/// The intercept is never penalized.
template <typename Scalar>
struct LogisticModel {
  Vector<Scalar> weights;
  Scalar intercept = 0;
  Scalar lambda = 0;
  bool converged = false;
  int iterations = 0;
  Scalar gradient_norm = 0;
  std::vector<Scalar> trace;  // objective per iteration, when requested

  Scalar decision(const Eigen::Ref<const Vector<Scalar>>& x) const {
    return weights.dot(x) + intercept;
  }

  /// Probability of the positive class, kept strictly inside (0, 1).
  Scalar probability(const Eigen::Ref<const Vector<Scalar>>& x) const {
    constexpr Scalar lo = std::numeric_limits<Scalar>::min();
    constexpr Scalar hi = Scalar(1) - std::numeric_limits<Scalar>::epsilon() / 2;
    return std::clamp(sigmoid(decision(x)), lo, hi);
  }

  /// log p(y = label | x).
  Scalar log_probability(const Eigen::Ref<const Vector<Scalar>>& x, int label) const {
    const Scalar z = decision(x);
    return label == 1 ? log_sigmoid(z) : log_sigmoid(-z);
  }
};

/// Objective value of  sum_i s_i [log(1+e^{z_i}) - y_i z_i] + lambda ||w||^2
/// with z = X w + b. Gradient is written to `grad_w` / `grad_b` when given.
template <typename Scalar, typename DerivedX, typename DerivedY>
Scalar logistic_objective(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
                          const Vector<Scalar>& sample_weights, Scalar lambda,
                          const Vector<Scalar>& w, Scalar b, Vector<Scalar>* grad_w = nullptr,
                          Scalar* grad_b = nullptr) {
  const Vector<Scalar> z = (X * w).array() + b;
  Scalar value = lambda * w.squaredNorm();
  Vector<Scalar> residual(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const Scalar yi = static_cast<Scalar>(y(i));
    value += sample_weights(i) * (softplus(z(i)) - yi * z(i));
    residual(i) = sample_weights(i) * (sigmoid(z(i)) - yi);
  }
  if (grad_w) *grad_w = X.transpose() * residual + Scalar(2) * lambda * w;
  if (grad_b) *grad_b = residual.sum();
  return value;
}

namespace detail {

template <typename Scalar>
void check_logistic_inputs(const Matrix<Scalar>& X, const Vector<Scalar>& y,
                           const Vector<Scalar>& weights, Scalar lambda) {
  if (X.rows() < 1) throw ArgumentError("fit_logistic: need at least one example");
  if (y.size() != X.rows()) throw ArgumentError("fit_logistic: label count does not match rows");
  if (weights.size() != X.rows()) throw ArgumentError("fit_logistic: weight count does not match rows");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw ArgumentError("fit_logistic: lambda must be finite and >= 0");
  if (!X.allFinite()) throw NumericError("fit_logistic: design matrix has non-finite entries");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0 && y(i) != 1) throw ArgumentError("fit_logistic: labels must be 0 or 1");
    if (!(weights(i) >= 0) || !std::isfinite(weights(i)))
      throw ArgumentError("fit_logistic: sample weights must be finite and >= 0");
  }
}

}  // namespace detail

/// Minimizes the weighted, L2-penalized negative log-likelihood with L-BFGS
/// and Armijo backtracking, starting from zero. Deterministic. A fit that
/// hits the iteration cap is returned with `converged == false`.
template <typename Scalar>
LogisticModel<Scalar> fit_logistic(const Matrix<Scalar>& X, const Vector<Scalar>& y, Scalar lambda,
                                   const Vector<Scalar>& sample_weights,
                                   const LogisticOptions& options = {}) {
  detail::check_logistic_inputs(X, y, sample_weights, lambda);

  const Eigen::Index d = X.cols();
  const Eigen::Index p = d + (options.fit_intercept ? 1 : 0);
  const Eigen::Index n = X.rows();

  // Packed parameter theta = [w; b].
  Vector<Scalar> theta = Vector<Scalar>::Zero(p);
  Vector<Scalar> grad(p);
  Vector<Scalar> z = Vector<Scalar>::Zero(n);

  auto evaluate = [&](const Vector<Scalar>& zz, const Vector<Scalar>& th, Vector<Scalar>* g) {
    Scalar value = lambda * th.head(d).squaredNorm();
    Vector<Scalar> residual(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      value += sample_weights(i) * (softplus(zz(i)) - y(i) * zz(i));
      residual(i) = sample_weights(i) * (sigmoid(zz(i)) - y(i));
    }
    if (g) {
      g->head(d) = X.transpose() * residual + Scalar(2) * lambda * th.head(d);
      if (options.fit_intercept) (*g)(d) = residual.sum();
    }
    return value;
  };
  auto direction_scores = [&](const Vector<Scalar>& dir) {
    Vector<Scalar> dz = X * dir.head(d);
    if (options.fit_intercept) dz.array() += dir(d);
    return dz;
  };

  Scalar value = evaluate(z, theta, &grad);

  LogisticModel<Scalar> model;
  model.lambda = lambda;
  if (options.record_trace) model.trace.push_back(value);

  std::deque<Vector<Scalar>> s_hist, y_hist;
  std::deque<Scalar> rho_hist;

  int iter = 0;
  Scalar gnorm = grad.template lpNorm<Eigen::Infinity>();
  while (gnorm >= options.gradient_tolerance && iter < options.max_iterations) {
    // Two-loop recursion.
    Vector<Scalar> q = grad;
    std::vector<Scalar> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * s_hist[k].dot(q);
      q -= alpha[k] * y_hist[k];
    }
    if (!s_hist.empty()) {
      const Scalar gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    } else {
      q /= std::max(Scalar(1), grad.norm());
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const Scalar beta = rho_hist[k] * y_hist[k].dot(q);
      q += (alpha[k] - beta) * s_hist[k];
    }
    Vector<Scalar> dir = -q;
    Scalar slope = grad.dot(dir);
    if (!(slope < 0)) {
      // Lost descent; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -grad / std::max(Scalar(1), grad.norm());
      slope = grad.dot(dir);
    }

    const Vector<Scalar> dz = direction_scores(dir);
    Scalar step = 1;
    Vector<Scalar> z_new(n), theta_new(p), grad_new(p);
    Scalar value_new = 0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      theta_new = theta + step * dir;
      z_new = z + step * dz;
      value_new = evaluate(z_new, theta_new, nullptr);
      if (value_new <= value + Scalar(1e-4) * step * slope) {
        accepted = true;
        break;
      }
      step /= 2;
    }
    if (!accepted) break;
    evaluate(z_new, theta_new, &grad_new);

    Vector<Scalar> s = theta_new - theta;
    Vector<Scalar> yk = grad_new - grad;
    const Scalar sy = s.dot(yk);
    if (sy > std::numeric_limits<Scalar>::epsilon() * yk.squaredNorm()) {
      if (static_cast<int>(s_hist.size()) == options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yk));
      rho_hist.push_back(Scalar(1) / sy);
    }

    theta.swap(theta_new);
    z.swap(z_new);
    grad.swap(grad_new);
    value = value_new;
    gnorm = grad.template lpNorm<Eigen::Infinity>();
    ++iter;
    if (options.record_trace) model.trace.push_back(value);
  }

  model.weights = theta.head(d);
  model.intercept = options.fit_intercept ? theta(d) : Scalar(0);
  model.iterations = iter;
  model.gradient_norm = gnorm;
  model.converged = gnorm < options.gradient_tolerance;
  return model;
}

template <typename Scalar>
LogisticModel<Scalar> fit_logistic(const Matrix<Scalar>& X, const Vector<Scalar>& y, Scalar lambda,
                                   const LogisticOptions& options = {}) {
  return fit_logistic<Scalar>(X, y, lambda, Vector<Scalar>::Ones(X.rows()), options);
}

}  // namespace normprobe
