#pragma once

#include <utility>
#include <vector>

#include "sepc/partition.hpp"

namespace sepc {

enum class RegionKind { Single, Intersection, UnionFallback, Expanded };
enum class Rule { R1, R2a, R2b, Case3 };

const char* to_string(Rule r);
const char* to_string(RegionKind k);

/// The cell a query point was evaluated in: which ellipsoids it lies in
/// (or was pulled into by expansion) and the training counts of that
/// cell. Intersection counts run over points inside every member,
/// union-fallback counts over points inside any member.
struct Region {
  std::vector<std::pair<Eigen::Index, int>> member_ids;  // (region id, label)
  RegionKind kind = RegionKind::Single;
  Eigen::Index count_pos = 0;
  Eigen::Index count_neg = 0;
};

struct TrustReport {
  int label = +1;  // +1 or -1
  double posterior = 0.0;
  double odds_ratio = 0.0;
  bool abstain = false;
  Region region;
  Rule rule_fired = Rule::R1;
};

/// Finds the cell containing z. Points outside every ellipsoid expand
/// the nearest one(s) (ties within 1e-6 relative distance) and re-run
/// the membership logic on the expanded set; the expansion is local to
/// the query.
Region locate(const PartitionModel& model, const Eigen::VectorXd& z,
              const Config& cfg);

/// Posterior probability of `predicted` (+1 or -1) for a region with n
/// positive / m negative training points out of N / M totals. The
/// Laplace +1 attaches to the majority label of the region (prior-ratio
/// tie-break when n == m), and the opposite label receives the
/// complement, so the two calls sum to one.
double trust_score(Eigen::Index n, Eigen::Index m, Eigen::Index N,
                   Eigen::Index M, int predicted);

/// Full rule evaluation: locate, majority label (priors break ties),
/// trust score, odds ratio, abstain flag.
TrustReport classify(const PartitionModel& model, const Eigen::VectorXd& z,
                     const Config& cfg);

/// One-vs-all aggregation: the class whose model gives the largest
/// positive-label posterior wins; ties go to the class with more
/// training points, then the lower index. Returns the winning class and
/// that model's report.
std::pair<int, TrustReport> predict_multiclass(
    const std::vector<PartitionModel>& models, const Eigen::VectorXd& z,
    const Config& cfg);

}  // namespace sepc
