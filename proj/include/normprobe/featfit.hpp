#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "normprobe/ingest.hpp"
#include "normprobe/numerics.hpp"

namespace normprobe {

enum class F1Mode {
  in_sample,      // refit on every concept, score the same concepts
  leave_one_out,  // each concept predicted by a probe trained without it
};

struct ProbeConfig {
  LogisticOptions logistic;
  std::vector<double> lambda_grid;
  F1Mode f1_mode = F1Mode::in_sample;
  double threshold = 0.5;
};

/// 13 log-spaced values 1e-2 ... 1e4.
std::vector<double> default_lambda_grid();
ProbeConfig default_probe_config();

struct FeatureFitRecord {
  std::string feature;
  std::string category;
  double lambda = 0;
  double loocv_objective = 0;
  double f1 = 0;  // percent
  std::size_t positive_count = 0;
  bool converged = true;  // every fit behind the record converged
};

struct LoocvResult {
  double objective = 0;
  int nonconverged_folds = 0;
};

/// Leave-one-positive-out objective for one feature: the mean over positives
/// j of [ log p_{-j}(1 | x_j) + mean over negatives k of log p_{-j}(0 | x_k) ],
/// where p_{-j} is trained without concept j. Optional per-concept weights
/// scale each concept's training loss and its share of both averages.
LoocvResult loocv_objective(const Vector<double>& labels, const Matrix<double>& X, double lambda,
                            const LogisticOptions& options = {}, const Vector<double>* weights = nullptr);

struct LambdaSelection {
  double lambda = 0;
  double objective = 0;
  std::vector<double> objectives;  // parallel to the ascending grid
  int nonconverged_folds = 0;
};

/// Argmax of the LOOCV objective over `grid`; ties go to the larger lambda.
LambdaSelection select_lambda(const Vector<double>& labels, const Matrix<double>& X, std::vector<double> grid,
                              const LogisticOptions& options = {});

/// Predicted labels (0/1) of `model` on the rows of X.
Vector<double> predict_labels(const LogisticModel<double>& model, const Matrix<double>& X, double threshold = 0.5);

FeatureFitRecord score_feature(const std::string& feature, const std::string& category, const Vector<double>& labels,
                               const Matrix<double>& X, const ProbeConfig& config);

/// Scores every LabelMatrix column against the row-aligned embedding matrix X.
/// Output order follows the LabelMatrix and does not depend on `threads`.
std::vector<FeatureFitRecord> score_features(const LabelMatrix& labels, const Matrix<double>& X,
                                             const ProbeConfig& config, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Category summaries

struct CategoryGroups {
  std::set<std::string> perceptual;
  std::set<std::string> nonperceptual;
};

/// Visual/other-perceptual (and McRae's sensory labels) against functional and
/// taxonomic. Encyclopedic belongs to neither group.
CategoryGroups default_category_groups();

struct CategoryScores {
  std::string category;
  std::vector<double> scores;
  double median = 0;
};

struct CategorySummary {
  std::vector<CategoryScores> categories;  // sorted by category label
  double median_nonperceptual = 0;
  double median_perceptual = 0;
  std::size_t nonperceptual_count = 0;
  std::size_t perceptual_count = 0;
  ConfidenceInterval difference;  // median(non-perceptual) - median(perceptual), percent
};

CategorySummary summarize_categories(const std::vector<FeatureFitRecord>& records, const CategoryGroups& groups,
                                     const BootstrapOptions& bootstrap = {});

// ---------------------------------------------------------------------------
// Cross-representation comparison

struct PairedScore {
  std::string feature;
  double score_a = 0;
  double score_b = 0;
};

struct RepresentationComparison {
  double slope = 0;
  double intercept = 0;
  double pearson_r = 0;
  std::vector<PairedScore> pairs;  // sorted by feature
};

/// Matches records by feature name and regresses b-scores on a-scores.
RepresentationComparison compare_representations(const std::vector<FeatureFitRecord>& records_a,
                                                  const std::vector<FeatureFitRecord>& records_b);

}  // namespace normprobe
