#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sepc {

/// Points with integer class labels remapped to 0..k-1. `class_values`
/// keeps the original label spelling per class id, `feature_names` the
/// column headers (synthesized when the file has none).
struct LabeledDataset {
  Eigen::MatrixXd points;  // records x features
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_values;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
  int num_classes() const { return static_cast<int>(class_values.size()); }
  std::vector<Eigen::Index> rows_of_class(int c) const;
};

/// CSV ingestion. `label_column` is a header name or a 0-based column
/// index in decimal. Rows are 1-based (header excluded) in error
/// messages. Missing or non-numeric cells raise ParseError naming the
/// row and column.
LabeledDataset load_csv(const std::string& path, const std::string& label_column,
                        bool has_header);

/// Writes features plus a trailing label column with 17 significant
/// digits, so a reload reproduces the values exactly.
void save_csv(const LabeledDataset& d, const std::string& path);

/// Reads a plain numeric matrix. When the header contains `drop_column`
/// that column is skipped (so prediction inputs may carry labels).
Eigen::MatrixXd load_matrix_csv(const std::string& path, bool has_header,
                                const std::string& drop_column = "");

/// Keeps only the rows where column `column` (name or index) equals
/// `value` within 1e-9.
LabeledDataset filter_rows(const LabeledDataset& d, const std::string& column,
                           double value);

// Synthetic generators. Deterministic per seed.
LabeledDataset gen_xor();
LabeledDataset gen_circles(int n_points, double noise, std::uint64_t seed);
LabeledDataset gen_moons(int n_points, double noise, std::uint64_t seed);
LabeledDataset gen_gaussians(int n_per_class, double separation,
                             std::uint64_t seed);

/// Adds uniform noise of half-width radius_frac * max(1, |feature|) to
/// every feature that is constant across the dataset. Other features
/// pass through untouched.
LabeledDataset jitter_constant_features(const LabeledDataset& d,
                                        double radius_frac, std::uint64_t seed);

struct SplitIndices {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

/// Stratified train/test split.
SplitIndices split(const LabeledDataset& d, double test_fraction,
                   std::uint64_t seed);

/// Stratified k folds (returned as test-index sets, disjoint and
/// covering). Throws ClassTooSmall when a class has fewer than k points.
std::vector<std::vector<Eigen::Index>> kfold(const LabeledDataset& d, int k,
                                             std::uint64_t seed);

LabeledDataset subset(const LabeledDataset& d,
                      const std::vector<Eigen::Index>& rows);

/// Overlap diagnostic for a pair of classes: class MVE volumes, the MVE
/// of the points contained in both class MVEs (absent when fewer than
/// n+1 such points exist), volume ratios, and per-class counts inside /
/// outside the overlap region.
struct OvrReport {
  double volume_a = 0.0;
  double volume_b = 0.0;
  std::optional<double> overlap_volume;
  double ovr_a = 0.0;
  double ovr_b = 0.0;
  Eigen::Index in_overlap_a = 0, out_overlap_a = 0;
  Eigen::Index in_overlap_b = 0, out_overlap_b = 0;
};

OvrReport ovr_report(const LabeledDataset& d, int class_a, int class_b,
                     double tol_fit = 1e-7, double tol_membership = 1e-9);

}  // namespace sepc
