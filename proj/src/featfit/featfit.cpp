#include "normprobe/featfit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include "normprobe/error.hpp"

namespace normprobe {

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(std::pow(10.0, -2.0 + 0.5 * i));
  return grid;
}

ProbeConfig default_probe_config() {
  ProbeConfig config;
  config.lambda_grid = default_lambda_grid();
  return config;
}

LoocvResult loocv_objective(const Vector<double>& labels, const Matrix<double>& X, double lambda,
                            const LogisticOptions& options, const Vector<double>* weights) {
  const Eigen::Index n = X.rows();
  if (labels.size() != n) throw ArgumentError("loocv_objective: label count does not match rows");
  const Vector<double> base_weights = weights ? *weights : Vector<double>::Ones(n);
  if (base_weights.size() != n) throw ArgumentError("loocv_objective: weight count does not match rows");

  std::vector<Eigen::Index> positives, negatives;
  double negative_mass = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels(i) == 1) {
      if (base_weights(i) > 0) positives.push_back(i);
    } else {
      negatives.push_back(i);
      negative_mass += base_weights(i);
    }
  }
  if (positives.size() < 2) throw ArgumentError("loocv_objective: feature needs at least two positive concepts");
  if (negatives.empty() || negative_mass <= 0)
    throw ArgumentError("loocv_objective: feature needs at least one negative concept");

  LoocvResult result;
  double total = 0;
  double positive_mass = 0;
  Vector<double> fold_weights = base_weights;
  for (const Eigen::Index j : positives) {
    fold_weights(j) = 0;
    const auto model = fit_logistic<double>(X, labels, lambda, fold_weights, options);
    fold_weights(j) = base_weights(j);
    if (!model.converged) ++result.nonconverged_folds;

    const Vector<double> z = (X * model.weights).array() + model.intercept;
    double negative_term = 0;
    for (const Eigen::Index k : negatives) negative_term += base_weights(k) * log_sigmoid(-z(k));
    const double summand = log_sigmoid(z(j)) + negative_term / negative_mass;
    total += base_weights(j) * summand;
    positive_mass += base_weights(j);
  }
  result.objective = total / positive_mass;
  return result;
}

LambdaSelection select_lambda(const Vector<double>& labels, const Matrix<double>& X, std::vector<double> grid,
                              const LogisticOptions& options) {
  if (grid.empty()) throw ArgumentError("select_lambda: empty lambda grid");
  for (const double l : grid)
    if (!(l >= 0) || !std::isfinite(l)) throw ArgumentError("select_lambda: lambda values must be finite and >= 0");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  LambdaSelection selection;
  bool first = true;
  for (const double lambda : grid) {
    const auto loocv = loocv_objective(labels, X, lambda, options);
    selection.objectives.push_back(loocv.objective);
    selection.nonconverged_folds += loocv.nonconverged_folds;
    // Ascending grid with >= keeps the largest lambda among ties.
    if (first || loocv.objective >= selection.objective) {
      selection.lambda = lambda;
      selection.objective = loocv.objective;
      first = false;
    }
  }
  return selection;
}

Vector<double> predict_labels(const LogisticModel<double>& model, const Matrix<double>& X, double threshold) {
  Vector<double> out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    out(i) = model.probability(X.row(i).transpose()) >= threshold ? 1.0 : 0.0;
  return out;
}

FeatureFitRecord score_feature(const std::string& feature, const std::string& category, const Vector<double>& labels,
                               const Matrix<double>& X, const ProbeConfig& config) {
  const auto grid = config.lambda_grid.empty() ? default_lambda_grid() : config.lambda_grid;
  const auto selection = select_lambda(labels, X, grid, config.logistic);

  FeatureFitRecord record;
  record.feature = feature;
  record.category = category;
  record.lambda = selection.lambda;
  record.loocv_objective = selection.objective;
  record.positive_count = static_cast<std::size_t>((labels.array() == 1).count());
  record.converged = selection.nonconverged_folds == 0;

  Vector<double> predicted;
  if (config.f1_mode == F1Mode::in_sample) {
    const auto model = fit_logistic<double>(X, labels, selection.lambda, config.logistic);
    record.converged = record.converged && model.converged;
    predicted = predict_labels(model, X, config.threshold);
  } else {
    predicted.resize(X.rows());
    Vector<double> weights = Vector<double>::Ones(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      weights(i) = 0;
      const auto model = fit_logistic<double>(X, labels, selection.lambda, weights, config.logistic);
      weights(i) = 1;
      record.converged = record.converged && model.converged;
      predicted(i) = model.probability(X.row(i).transpose()) >= config.threshold ? 1.0 : 0.0;
    }
  }
  record.f1 = 100.0 * binary_f1(predicted, labels);
  return record;
}

std::vector<FeatureFitRecord> score_features(const LabelMatrix& labels, const Matrix<double>& X,
                                             const ProbeConfig& config, unsigned threads) {
  if (X.rows() != labels.Y.rows()) throw ArgumentError("score_features: embedding rows do not match concepts");
  const std::size_t n = labels.features.size();
  std::vector<FeatureFitRecord> records(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t f = next++; f < n; f = next++) {
      try {
        records[f] = score_feature(labels.features[f], labels.categories[f], labels.column(f), X, config);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return records;
}

CategoryGroups default_category_groups() {
  CategoryGroups groups;
  groups.perceptual = {"visual-perceptual", "other-perceptual", "visual-motion", "visual-form-and-surface",
                       "visual-colour", "visual-color", "sound", "tactile", "taste", "smell"};
  groups.nonperceptual = {"functional", "function", "taxonomic"};
  return groups;
}

CategorySummary summarize_categories(const std::vector<FeatureFitRecord>& records, const CategoryGroups& groups,
                                     const BootstrapOptions& bootstrap) {
  std::map<std::string, std::vector<double>> by_category;
  std::vector<double> perceptual, nonperceptual;
  for (const auto& r : records) {
    by_category[r.category].push_back(r.f1);
    if (groups.perceptual.contains(r.category)) perceptual.push_back(r.f1);
    else if (groups.nonperceptual.contains(r.category)) nonperceptual.push_back(r.f1);
  }
  if (perceptual.empty()) throw ArgumentError("summarize_categories: no features in the perceptual group");
  if (nonperceptual.empty()) throw ArgumentError("summarize_categories: no features in the non-perceptual group");

  CategorySummary summary;
  for (auto& [category, scores] : by_category) {
    const double m = median(scores);
    summary.categories.push_back({category, std::move(scores), m});
  }
  summary.median_perceptual = median(perceptual);
  summary.median_nonperceptual = median(nonperceptual);
  summary.perceptual_count = perceptual.size();
  summary.nonperceptual_count = nonperceptual.size();
  summary.difference = bootstrap_median_diff(nonperceptual, perceptual, bootstrap);
  return summary;
}

RepresentationComparison compare_representations(const std::vector<FeatureFitRecord>& records_a,
                                                  const std::vector<FeatureFitRecord>& records_b) {
  std::map<std::string, double> a_scores;
  for (const auto& r : records_a) a_scores.emplace(r.feature, r.f1);
  std::map<std::string, double> b_scores;
  for (const auto& r : records_b) b_scores.emplace(r.feature, r.f1);

  RepresentationComparison out;
  for (const auto& [feature, score_b] : b_scores)
    if (auto it = a_scores.find(feature); it != a_scores.end()) out.pairs.push_back({feature, it->second, score_b});
  if (out.pairs.size() < 3)
    throw ArgumentError("compare_representations: need at least 3 shared features, found " +
                        std::to_string(out.pairs.size()));

  Vector<double> a(static_cast<Eigen::Index>(out.pairs.size())), b(a.size());
  for (std::size_t i = 0; i < out.pairs.size(); ++i) {
    a(static_cast<Eigen::Index>(i)) = out.pairs[i].score_a;
    b(static_cast<Eigen::Index>(i)) = out.pairs[i].score_b;
  }
  const auto line = least_squares_line(a, b);
  out.slope = line.slope;
  out.intercept = line.intercept;
  out.pearson_r = pearson(a, b);
  return out;
}

}  // namespace normprobe
