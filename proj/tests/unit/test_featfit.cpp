#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "normprobe/error.hpp"
#include "normprobe/featfit.hpp"
#include "oracles.hpp"

using namespace normprobe;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

/// Labels from a hyperplane, with `flips` labels inverted.
VectorXd planted_labels(const MatrixXd& X, std::mt19937_64& rng, int flips = 0) {
  const VectorXd w = gaussian(X.cols(), 1, rng).col(0);
  const VectorXd z = X * w;
  VectorXd sorted = z;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  const double cut = sorted(static_cast<Eigen::Index>(0.7 * static_cast<double>(z.size())));
  VectorXd y = (z.array() > cut).cast<double>();
  for (int f = 0; f < flips; ++f) {
    const auto i = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(y.size()));
    y(i) = 1 - y(i);
  }
  return y;
}

}  // namespace

TEST_CASE("default grid") {
  const auto grid = default_lambda_grid();
  REQUIRE(grid.size() == 13);
  CHECK(grid.front() == doctest::Approx(1e-2));
  CHECK(grid.back() == doctest::Approx(1e4));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] / grid[i - 1] == doctest::Approx(std::sqrt(10.0)));
}

TEST_CASE("LOOCV objective on a separable feature") {
  MatrixXd X(8, 1);
  X << 1, 1, 1, 1, -1, -1, -1, -1;
  VectorXd y(8);
  y << 1, 1, 1, 1, 0, 0, 0, 0;
  LogisticOptions options;
  options.fit_intercept = false;
  const auto loocv = loocv_objective(y, X, 1e-3, options);
  CHECK(loocv.objective <= 0);
  CHECK(loocv.objective > 2 * std::log(0.9));
  CHECK(loocv.objective == doctest::Approx(oracle::loocv_reference(y, X, 1e-3, false)).epsilon(1e-6));
}

TEST_CASE("LOOCV objective in the heavy-regularization limit") {
  std::mt19937_64 rng(31);
  const MatrixXd X = gaussian(30, 4, rng);
  VectorXd y = VectorXd::Zero(30);
  for (int i = 0; i < 8; ++i) y(3 * i) = 1;
  const double q = (8.0 - 1.0) / (30.0 - 1.0);
  const auto loocv = loocv_objective(y, X, 1e9);
  CHECK(loocv.objective == doctest::Approx(std::log(q) + std::log(1 - q)).epsilon(1e-6));
}

TEST_CASE("LOOCV objective is symmetric under concept permutation") {
  std::mt19937_64 rng(32);
  const MatrixXd X = gaussian(25, 3, rng);
  const VectorXd y = planted_labels(X, rng, 2);
  std::vector<int> order(25);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  MatrixXd Xp(25, 3);
  VectorXd yp(25);
  for (int i = 0; i < 25; ++i) {
    Xp.row(i) = X.row(order[i]);
    yp(i) = y(order[i]);
  }
  CHECK(loocv_objective(y, X, 0.3).objective == doctest::Approx(loocv_objective(yp, Xp, 0.3).objective).epsilon(1e-7));
}

TEST_CASE("LOOCV preconditions") {
  MatrixXd X = MatrixXd::Identity(4, 4);
  VectorXd one_positive(4);
  one_positive << 1, 0, 0, 0;
  CHECK_THROWS_AS(loocv_objective(one_positive, X, 1.0), ArgumentError);
  CHECK_THROWS_AS(loocv_objective(VectorXd::Ones(4), X, 1.0), ArgumentError);
}

TEST_CASE("negatives are averaged, not summed") {
  std::mt19937_64 rng(33);
  const MatrixXd X = gaussian(20, 3, rng);
  const VectorXd y = planted_labels(X, rng, 1);
  // Every negative listed twice...
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < 20; ++i) {
    rows.push_back(i);
    if (y(i) == 0) rows.push_back(i);
  }
  MatrixXd Xd(static_cast<Eigen::Index>(rows.size()), 3);
  VectorXd yd(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Xd.row(static_cast<Eigen::Index>(r)) = X.row(rows[r]);
    yd(static_cast<Eigen::Index>(r)) = y(rows[r]);
  }
  // ...matches every negative given weight two.
  VectorXd weights = (2.0 - y.array()).matrix();
  const double listed = loocv_objective(yd, Xd, 0.5).objective;
  const double weighted = loocv_objective(y, X, 0.5, {}, &weights).objective;
  CHECK(std::abs(listed - weighted) < 1e-6);
}

TEST_CASE("lambda selection") {
  std::mt19937_64 rng(34);
  const MatrixXd X = gaussian(40, 4, rng);
  const VectorXd y = planted_labels(X, rng, 4);

  SUBCASE("singleton grid") { CHECK(select_lambda(y, X, {1.0}).lambda == 1.0); }
  SUBCASE("ties go to the largest lambda") {
    // With an all-zero design the penalty never binds, so every lambda ties.
    const MatrixXd zero = MatrixXd::Zero(40, 2);
    const auto s = select_lambda(y, zero, {10.0, 0.1, 1.0});
    CHECK(s.objectives[0] == s.objectives[2]);
    CHECK(s.lambda == 10.0);
  }
  SUBCASE("matches an exhaustive search over a fine grid") {
    std::vector<double> fine;
    for (int i = 0; i <= 24; ++i) fine.push_back(std::pow(10.0, -2.0 + 0.25 * i));
    const auto selected = select_lambda(y, X, fine);
    double best = -INFINITY, best_lambda = 0;
    for (const double l : fine) {
      const double v = oracle::loocv_reference(y, X, l);
      if (v >= best - 1e-9) {
        if (v > best) best = v;
        best_lambda = l;
      }
    }
    CHECK(selected.lambda == best_lambda);
    CHECK(selected.objective == doctest::Approx(best).epsilon(1e-6));
  }
  SUBCASE("empty grid") { CHECK_THROWS(select_lambda(y, X, {})); }
}

TEST_CASE("a hyperplane feature is fit perfectly") {
  std::mt19937_64 rng(35);
  const MatrixXd X = gaussian(60, 5, rng);
  const VectorXd y = planted_labels(X, rng);
  ProbeConfig config = default_probe_config();
  config.lambda_grid = {1e-4};
  const auto record = score_feature("linear", "taxonomic", y, X, config);
  CHECK(record.f1 == 100.0);
  CHECK(record.positive_count == static_cast<std::size_t>(y.sum()));
  CHECK(record.lambda == 1e-4);
}

TEST_CASE("joint rescaling of vectors and grid leaves predictions unchanged") {
  std::mt19937_64 rng(36);
  const MatrixXd X = gaussian(40, 4, rng);
  const VectorXd y = planted_labels(X, rng, 5);
  const double c = 3.0;
  ProbeConfig config = default_probe_config();
  ProbeConfig scaled = config;
  for (auto& l : scaled.lambda_grid) l *= c * c;

  const auto a = select_lambda(y, X, config.lambda_grid);
  const auto b = select_lambda(y, (c * X).eval(), scaled.lambda_grid);
  CHECK(b.lambda == doctest::Approx(a.lambda * c * c));
  const auto ma = fit_logistic<double>(X, y, a.lambda);
  const auto mb = fit_logistic<double>((c * X).eval(), y, b.lambda);
  CHECK(predict_labels(ma, X) == predict_labels(mb, (c * X).eval()));
  CHECK(score_feature("f", "taxonomic", y, X, config).f1 ==
        score_feature("f", "taxonomic", y, (c * X).eval(), scaled).f1);
}

TEST_CASE("feature fit does not depend on concept order or thread count") {
  std::mt19937_64 rng(37);
  const MatrixXd X = gaussian(30, 4, rng);
  LabelMatrix labels;
  for (int i = 0; i < 30; ++i) labels.concepts.push_back("c" + std::to_string(100 + i));
  labels.Y = MatrixXd::Zero(30, 5);
  for (int f = 0; f < 5; ++f) {
    labels.features.push_back("f" + std::to_string(f));
    labels.categories.push_back(f % 2 ? "functional" : "visual-perceptual");
    labels.Y.col(f) = planted_labels(X, rng, f);
  }
  ProbeConfig config = default_probe_config();
  config.lambda_grid = {0.01, 0.1, 1, 10};

  const auto base = score_features(labels, X, config, 1);
  const auto threaded = score_features(labels, X, config, 4);

  std::vector<int> order(30);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  LabelMatrix shuffled = labels;
  MatrixXd Xs(30, 4);
  for (int i = 0; i < 30; ++i) {
    shuffled.Y.row(i) = labels.Y.row(order[i]);
    Xs.row(i) = X.row(order[i]);
  }
  const auto permuted = score_features(shuffled, Xs, config, 2);
  for (std::size_t f = 0; f < base.size(); ++f) {
    CHECK(threaded[f].f1 == base[f].f1);
    CHECK(threaded[f].lambda == base[f].lambda);
    CHECK(threaded[f].loocv_objective == base[f].loocv_objective);
    CHECK(permuted[f].f1 == base[f].f1);
    CHECK(permuted[f].lambda == base[f].lambda);
  }
}

TEST_CASE("leave-one-out F1 mode") {
  std::mt19937_64 rng(38);
  const MatrixXd X = gaussian(30, 3, rng);
  const VectorXd y = planted_labels(X, rng, 3);
  ProbeConfig config = default_probe_config();
  config.lambda_grid = {0.1};
  const auto in_sample = score_feature("f", "taxonomic", y, X, config);
  config.f1_mode = F1Mode::leave_one_out;
  const auto held_out = score_feature("f", "taxonomic", y, X, config);
  CHECK(held_out.f1 >= 0);
  CHECK(held_out.f1 <= in_sample.f1 + 1e-9);
}

TEST_CASE("permuted labels score near the base rate") {
  std::mt19937_64 rng(39);
  const MatrixXd X = gaussian(597, 20, rng);
  VectorXd y = VectorXd::Zero(597);
  for (int i = 0; i < 20; ++i) y(i) = 1;
  ProbeConfig config = default_probe_config();
  std::vector<double> scores;
  for (int p = 0; p < 20; ++p) {
    std::shuffle(y.data(), y.data() + y.size(), rng);
    scores.push_back(score_feature("noise", "taxonomic", y, X, config).f1);
  }
  CHECK(median(scores) < 20.0);
}

TEST_CASE("category summary") {
  std::vector<FeatureFitRecord> records;
  const std::vector<double> scores{40, 55, 60, 72, 90};
  for (const double s : scores) {
    records.push_back({"p" + std::to_string(int(s)), "visual-perceptual", 1, -1, s, 5, true});
    records.push_back({"n" + std::to_string(int(s)), "functional", 1, -1, s, 5, true});
  }
  records.push_back({"e", "encyclopaedic", 1, -1, 100, 5, true});
  const auto summary = summarize_categories(records, default_category_groups());
  CHECK(summary.perceptual_count == 5);
  CHECK(summary.nonperceptual_count == 5);
  CHECK(summary.difference.contains(0.0));
  CHECK(summary.categories.size() == 3);
  CHECK(summary.categories.front().category == "encyclopaedic");

  std::vector<FeatureFitRecord> only_perceptual(records.begin(), records.begin() + 1);
  CHECK_THROWS(summarize_categories(only_perceptual, default_category_groups()));
}

TEST_CASE("representation comparison") {
  std::vector<FeatureFitRecord> a, b;
  const double pairs[3][2] = {{0, 0}, {50, 25}, {100, 50}};
  for (int i = 0; i < 3; ++i) {
    a.push_back({"f" + std::to_string(i), "functional", 1, -1, pairs[i][0], 5, true});
    b.push_back({"f" + std::to_string(i), "functional", 1, -1, pairs[i][1], 5, true});
  }
  b.push_back({"only_b", "functional", 1, -1, 10, 5, true});
  const auto cmp = compare_representations(a, b);
  CHECK(cmp.slope == doctest::Approx(0.5));
  CHECK(cmp.pearson_r == doctest::Approx(1.0));
  CHECK(cmp.pairs.size() == 3);

  const auto self = compare_representations(b, b);
  CHECK(self.slope == doctest::Approx(1.0));
  CHECK(self.pearson_r == doctest::Approx(1.0));

  a.pop_back();
  CHECK_THROWS(compare_representations(a, b));
}
