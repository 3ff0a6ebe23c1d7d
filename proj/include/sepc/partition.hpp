#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sepc/config.hpp"
#include "sepc/dataset.hpp"
#include "sepc/ellipsoid.hpp"

namespace sepc {

/// One partition region: the ellipsoid, its label, and bookkeeping.
/// count_pos / count_neg are measured against the full training set
/// after partitioning finishes. creation_opposite_rows snapshots the
/// opposite-label working set at the iteration that carved this region,
/// so the impurity budget can be re-audited by plain containment scans.
struct PartitionEllipsoid {
  Ellipsoid e;
  int label = +1;  // +1 or -1
  Eigen::Index count_pos = 0;
  Eigen::Index count_neg = 0;
  int created_iteration = 0;
  bool terminal = false;
  Eigen::Index impure_at_creation = 0;
  std::vector<Eigen::Index> creation_opposite_rows;  // not serialized
};

struct IterationStat {
  int iteration = 0;
  std::string event;
  Eigen::Index carved_pos = 0;
  Eigen::Index carved_neg = 0;
  Eigen::Index impure_pos = 0;
  Eigen::Index impure_neg = 0;
  Eigen::Index remaining_pos = 0;
  Eigen::Index remaining_neg = 0;
};

/// Trained binary model: ordered ellipsoid lists per label (leftover
/// point-ellipsoids appended at the tail), the leftover points
/// themselves, and the training data the trust counts refer to.
struct PartitionModel {
  Eigen::Index dim = 0;
  std::vector<PartitionEllipsoid> positive;  // label +1, creation order
  std::vector<PartitionEllipsoid> negative;  // label -1
  std::vector<std::pair<Eigen::VectorXd, int>> leftovers;
  Eigen::Index total_pos = 0;  // N
  Eigen::Index total_neg = 0;  // M
  Eigen::MatrixXd train_points;   // post-jitter coordinates
  std::vector<int> train_labels;  // +1 / -1 per row
  Config config;
  int iterations = 0;
  std::vector<IterationStat> log;  // not serialized

  Eigen::Index num_regions() const {
    return static_cast<Eigen::Index>(positive.size() + negative.size());
  }
  /// Flat view: ids 0..|positive|-1 then the negative list.
  const PartitionEllipsoid& region(Eigen::Index id) const;
};

enum class RefineStatus {
  BudgetMet,  // subset MVE holds at most n_imp opposite points
  TooSmall,   // subset dropped to the independence-dimension limit
  Stuck,      // degenerate slab or no shrink possible
};

struct RefineResult {
  std::vector<Eigen::Index> kept;  // row indices into S
  RefineStatus status = RefineStatus::BudgetMet;
  std::optional<Ellipsoid> mve;    // set when status == BudgetMet
  Eigen::Index impure = 0;
  std::vector<Eigen::Index> opposite_inside;  // rows of O inside the MVE
};

/// Repeated slab cuts on S against O until the subset's MVE holds at
/// most n_imp points of O, the subset gets too small to fit, or no
/// further cut exists. Rows of S and O are points of opposite labels.
RefineResult refine_side(const Eigen::MatrixXd& S, const Eigen::MatrixXd& O,
                         int n_imp, const Config& cfg);

/// Sequential ellipsoidal partitioning of X (label +1) against Y
/// (label -1). Deterministic given cfg.seed.
PartitionModel partition(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                         const Config& cfg);

/// One-vs-all reduction: one binary model per class for k >= 3, a single
/// model (class 0 positive) for k == 2.
std::vector<PartitionModel> train_multiclass(const LabeledDataset& d,
                                             const Config& cfg);

}  // namespace sepc
