#include <doctest.h>

#include <random>
#include <vector>

#include "normprobe/error.hpp"
#include "normprobe/numerics.hpp"
#include "oracles.hpp"

using namespace normprobe;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd ones(Eigen::Index n) { return VectorXd::Ones(n); }

MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

VectorXd random_labels(Eigen::Index n, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.4);
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = coin(rng) ? 1 : 0;
  y(0) = 1;
  y(1) = 0;
  return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// Logistic probe

TEST_CASE("strong regularization drives weights to zero") {
  std::mt19937_64 rng(11);
  const MatrixXd X = random_matrix(40, 5, rng);
  const VectorXd y = random_labels(40, rng);

  const auto huge = fit_logistic<double>(X, y, 1e9);
  CHECK(huge.weights.norm() < 1e-6);
  // Intercept-only fit: sigma(b) equals the positive rate.
  CHECK(sigmoid(huge.intercept) == doctest::Approx(y.mean()).epsilon(1e-6));

  const auto large = fit_logistic<double>(X, y, 1e6);
  CHECK(large.weights.norm() < 1e-3);
}

TEST_CASE("1-D fit agrees with a grid search") {
  MatrixXd X(2, 1);
  X << 1, -1;
  VectorXd y(2);
  y << 1, 0;
  LogisticOptions options;
  options.fit_intercept = false;
  const auto model = fit_logistic<double>(X, y, 1.0, ones(2), options);
  const double w = oracle::grid_search_1d(X.col(0), y, 1.0);
  CHECK(std::abs(model.weights(0) - w) < 1e-3);
}

TEST_CASE("gradient at zero on balanced data") {
  std::mt19937_64 rng(12);
  const MatrixXd X = random_matrix(6, 3, rng);
  VectorXd y(6);
  y << 1, 0, 1, 0, 1, 0;
  VectorXd grad;
  double grad_b = 0;
  logistic_objective<double>(X, y, ones(6), 0.7, VectorXd::Zero(3), 0.0, &grad, &grad_b);
  const VectorXd expected = -X.transpose() * (y.array() - 0.5).matrix();
  CHECK((grad - expected).norm() < 1e-14);
  CHECK(std::abs(grad_b) < 1e-15);
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(13);
  const MatrixXd X = random_matrix(30, 4, rng);
  const VectorXd y = random_labels(30, rng);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  VectorXd s(30);
  for (Eigen::Index i = 0; i < 30; ++i) s(i) = u(rng);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const VectorXd w = random_matrix(4, 1, rng).col(0);
    const double b = u(rng) - 1.25;
    VectorXd grad;
    double grad_b = 0;
    logistic_objective<double>(X, y, s, 0.3, w, b, &grad, &grad_b);
    VectorXd numeric(5);
    for (int k = 0; k < 4; ++k) {
      VectorXd wp = w, wm = w;
      wp(k) += h;
      wm(k) -= h;
      numeric(k) = (logistic_objective<double>(X, y, s, 0.3, wp, b) - logistic_objective<double>(X, y, s, 0.3, wm, b)) /
                   (2 * h);
    }
    numeric(4) = (logistic_objective<double>(X, y, s, 0.3, w, b + h) - logistic_objective<double>(X, y, s, 0.3, w, b - h)) /
                 (2 * h);
    VectorXd analytic(5);
    analytic << grad, grad_b;
    CHECK((analytic - numeric).norm() / std::max(1.0, analytic.norm()) < 1e-4);
  }
}

TEST_CASE("objective trace never increases") {
  std::mt19937_64 rng(14);
  const MatrixXd X = random_matrix(60, 8, rng);
  const VectorXd y = random_labels(60, rng);
  LogisticOptions options;
  options.record_trace = true;
  const auto model = fit_logistic<double>(X, y, 0.05, ones(60), options);
  CHECK(model.converged);
  REQUIRE(model.trace.size() >= 2);
  for (std::size_t i = 1; i < model.trace.size(); ++i) CHECK(model.trace[i] <= model.trace[i - 1]);
}

TEST_CASE("fit agrees with a Newton reference and predictions stay in (0,1)") {
  std::mt19937_64 rng(15);
  const MatrixXd X = 5 * random_matrix(25, 3, rng);
  const VectorXd y = random_labels(25, rng);
  const auto model = fit_logistic<double>(X, y, 0.1);
  const auto ref = oracle::newton_logistic(X, y, 0.1, ones(25));
  CHECK((model.weights - ref.weights).norm() < 1e-5);
  CHECK(std::abs(model.intercept - ref.intercept) < 1e-5);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double p = model.probability(X.row(i).transpose());
    CHECK(p > 0);
    CHECK(p < 1);
  }
}

TEST_CASE("single-class input and invalid input") {
  MatrixXd X(3, 1);
  X << 1, 2, 3;
  const auto all_negative = fit_logistic<double>(X, VectorXd::Zero(3), 1.0);
  CHECK(all_negative.converged == (all_negative.gradient_norm < 1e-6));
  CHECK(all_negative.probability(X.row(0).transpose()) < 0.5);

  MatrixXd bad = X;
  bad(1, 0) = std::nan("");
  CHECK_THROWS_AS(fit_logistic<double>(bad, VectorXd::Zero(3), 1.0), NumericError);
  CHECK_THROWS(fit_logistic<double>(X, VectorXd::Zero(3), -1.0));
}

TEST_CASE("iteration cap is reported, not hidden") {
  std::mt19937_64 rng(16);
  const MatrixXd X = random_matrix(50, 6, rng);
  const VectorXd y = random_labels(50, rng);
  LogisticOptions options;
  options.max_iterations = 1;
  const auto model = fit_logistic<double>(X, y, 1e-3, ones(50), options);
  CHECK_FALSE(model.converged);
}

TEST_CASE("float instantiation") {
  Eigen::MatrixXf X(4, 1);
  X << -2, -1, 1, 2;
  Eigen::VectorXf y(4);
  y << 0, 0, 1, 1;
  LogisticOptions options;
  options.gradient_tolerance = 1e-4;
  const auto model = fit_logistic<float>(X, y, 1.0f, Eigen::VectorXf::Ones(4), options);
  CHECK(model.weights(0) > 0);
}

// ---------------------------------------------------------------------------
// SVD

TEST_CASE("truncated SVD exact cases") {
  const MatrixXd I = MatrixXd::Identity(3, 3);
  CHECK((truncated_svd(I, 3).reconstruct() - I).norm() < 1e-14);

  VectorXd u(4), v(3);
  u << 1, 2, 3, 4;
  v << -1, 0.5, 2;
  const MatrixXd R = u * v.transpose();
  CHECK((truncated_svd(R, 1).reconstruct() - R).norm() < 1e-12);

  CHECK_THROWS(truncated_svd(R, 0));
  CHECK_THROWS(truncated_svd(R, 4));
}

TEST_CASE("truncated SVD factors and optimality") {
  std::mt19937_64 rng(17);
  const MatrixXd M = random_matrix(6, 6, rng);
  const auto svd = truncated_svd(M, 2);
  CHECK(((svd.left.transpose() * svd.left) - MatrixXd::Identity(2, 2)).norm() < 1e-8);
  CHECK(((svd.right.transpose() * svd.right) - MatrixXd::Identity(2, 2)).norm() < 1e-8);
  CHECK(svd.singular_values(0) >= svd.singular_values(1));
  CHECK(svd.singular_values(1) >= 0);
  const double error = (M - svd.reconstruct()).norm();
  CHECK(std::abs(error - oracle::best_rank_k_error(M, 2)) < 1e-8);

  // Eckart-Young spot check against random rank-2 factorizations.
  int beaten = 0;
  for (int t = 0; t < 1000; ++t) {
    const MatrixXd A = random_matrix(6, 2, rng), B = random_matrix(2, 6, rng);
    if ((M - A * B).norm() < error) ++beaten;
  }
  CHECK(beaten == 0);
}

// ---------------------------------------------------------------------------
// Statistics

TEST_CASE("pearson") {
  VectorXd a(3), b(3);
  a << 1, 2, 3;
  b << 3, 2, 1;
  CHECK(pearson(a, a) == 1.0);
  CHECK(pearson(a, b) == -1.0);

  std::mt19937_64 rng(18);
  const VectorXd u = random_matrix(7, 1, rng).col(0), v = random_matrix(7, 1, rng).col(0);
  CHECK(std::abs(pearson(u, v) - oracle::pearson_textbook(u, v)) < 1e-12);
  const VectorXd shifted = (3.5 * u.array() - 2.0).matrix();
  CHECK(std::abs(pearson(shifted, v) - pearson(u, v)) < 1e-12);
  CHECK_THROWS(pearson(VectorXd::Constant(3, 2.0), a));
  CHECK_THROWS(pearson(VectorXd::Ones(1), VectorXd::Ones(1)));
}

TEST_CASE("cosine similarity") {
  VectorXd e1(2), e2(2), one(2), two(2), p(2), q(2);
  e1 << 1, 0;
  e2 << 0, 1;
  one << 1, 1;
  two << 2, 2;
  p << 3, 4;
  q << 4, 3;
  CHECK(cosine_sim(e1, e2) == 0.0);
  CHECK(cosine_sim(one, two) == 1.0);
  CHECK(cosine_sim(p, q) == doctest::Approx(0.96).epsilon(1e-15));
  CHECK(cosine_sim(p, (-p).eval()) == -1.0);
  CHECK(cosine_sim((7.0 * p).eval(), q) == doctest::Approx(cosine_sim(p, q)).epsilon(1e-15));
  CHECK_THROWS(cosine_sim(VectorXd::Zero(2), p));
}

TEST_CASE("binary F1") {
  VectorXd gold(4), pred(4);
  gold << 1, 1, 0, 0;
  pred << 1, 0, 1, 0;
  CHECK(binary_f1(gold, gold) == 1.0);
  CHECK(binary_f1(VectorXd::Zero(4), gold) == 0.0);
  CHECK(binary_f1(pred, gold) == doctest::Approx(0.5));
  CHECK(binary_f1(pred, gold) == doctest::Approx(oracle::f1_textbook(pred, gold)));
  CHECK_THROWS(binary_f1(pred, VectorXd::Zero(4)));
}

TEST_CASE("median and least-squares line") {
  CHECK(median(std::vector<double>{3, 1, 2}) == 2.0);
  CHECK(median(std::vector<double>{4, 1, 2, 3}) == 2.5);
  VectorXd a(3), b(3);
  a << 0, 50, 100;
  b << 0, 25, 50;
  const auto line = least_squares_line(a, b);
  CHECK(line.slope == doctest::Approx(0.5));
  CHECK(line.intercept == doctest::Approx(0.0));
}

// ---------------------------------------------------------------------------
// Bootstrap

TEST_CASE("bootstrap of constant samples is exact") {
  const std::vector<double> a(5, 5.0), b(5, 3.0);
  const auto ci = bootstrap_median_diff(a, b);
  CHECK(ci.low == 2.0);
  CHECK(ci.high == 2.0);
  CHECK(ci.resamples == 10000);
  CHECK(ci.seed == 1);
}

TEST_CASE("bootstrap properties") {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> g(50, 20);
  std::vector<double> a(60), b(45);
  for (auto& x : a) x = g(rng);
  for (auto& x : b) x = g(rng);

  BootstrapOptions options;
  options.resamples = 2000;
  const auto same = bootstrap_median_diff(a, a, options);
  CHECK(same.contains(0.0));

  const auto first = bootstrap_median_diff(a, b, options);
  const auto second = bootstrap_median_diff(a, b, options);
  CHECK(first.low == second.low);
  CHECK(first.high == second.high);
  CHECK(first.low <= first.high);

  options.threads = 4;
  const auto threaded = bootstrap_median_diff(a, b, options);
  CHECK(threaded.low == first.low);
  CHECK(threaded.high == first.high);

  double previous_width = 0;
  for (const double level : {0.5, 0.8, 0.9, 0.95, 0.99}) {
    options.level = level;
    const auto ci = bootstrap_median_diff(a, b, options);
    CHECK(ci.high - ci.low >= previous_width);
    previous_width = ci.high - ci.low;
  }

  options.resamples = 99;
  CHECK_THROWS(bootstrap_median_diff(a, b, options));
  CHECK_THROWS(bootstrap_median_diff(std::vector<double>{}, b, {}));
}

// ---------------------------------------------------------------------------
// F-test

TEST_CASE("incomplete beta and F tail") {
  CHECK(regularized_incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3));
  CHECK(regularized_incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2, 3, 1.0) == 1.0);
  // I_x(a, 1) = x^a
  CHECK(regularized_incomplete_beta(3.5, 1, 0.6) == doctest::Approx(std::pow(0.6, 3.5)));
  // F(1, d) tail equals the two-sided t tail; F(2, 2) tail is 1 / (1 + f).
  CHECK(f_distribution_sf(3.0, 2, 2) == doctest::Approx(0.25));
  CHECK(f_distribution_sf(0.0, 3, 10) == 1.0);
}

TEST_CASE("nested F-test") {
  std::mt19937_64 rng(20);
  std::normal_distribution<double> g;
  const Eigen::Index n = 60;
  const MatrixXd base = random_matrix(n, 3, rng);
  const MatrixXd extra = random_matrix(n, 1, rng);

  SUBCASE("signal in the extra column") {
    VectorXd y = extra.col(0) + 0.3 * base.col(1);
    for (Eigen::Index i = 0; i < n; ++i) y(i) += 0.05 * g(rng);
    const auto r = nested_f_test(y, base, extra);
    MatrixXd design_base(n, 4), design_full(n, 5);
    design_base << VectorXd::Ones(n), base;
    design_full << design_base, extra;
    const double rss_b = oracle::rss_normal_equations(design_base, y);
    const double rss_f = oracle::rss_normal_equations(design_full, y);
    CHECK(r.f_statistic == doctest::Approx((rss_b - rss_f) / (rss_f / (n - 5))).epsilon(1e-8));
    CHECK(r.df_numerator == 1);
    CHECK(r.df_denominator == n - 5);
    CHECK(r.p_value < 1e-6);
  }
  SUBCASE("reparameterized base gives the same F") {
    VectorXd y = 0.5 * extra.col(0);
    for (Eigen::Index i = 0; i < n; ++i) y(i) += g(rng);
    MatrixXd T(3, 3);
    T << 2, 1, 0, 0, -1, 3, 1, 0, 1;
    const auto a = nested_f_test(y, base, extra);
    const auto b = nested_f_test(y, (base * T).eval(), extra);
    CHECK(a.f_statistic == doctest::Approx(b.f_statistic).epsilon(1e-9));
    CHECK(a.p_value == doctest::Approx(b.p_value).epsilon(1e-9));
  }
  SUBCASE("duplicated base column adds nothing") {
    VectorXd y = random_matrix(n, 1, rng).col(0);
    const auto r = nested_f_test(y, base, base.col(2).eval());
    CHECK(r.f_statistic == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK(r.collinear_extra_column.has_value());
  }
  SUBCASE("rank-deficient base is an error") {
    MatrixXd bad(n, 3);
    bad << base.col(0), base.col(1), (base.col(0) + base.col(1));
    CHECK_THROWS(nested_f_test(random_matrix(n, 1, rng).col(0).eval(), bad, extra));
  }
  SUBCASE("too few rows") {
    CHECK_THROWS(nested_f_test(VectorXd::Ones(5).eval(), base.topRows(5).eval(), extra.topRows(5).eval()));
  }
}
