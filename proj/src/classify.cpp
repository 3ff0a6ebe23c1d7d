#include "sepc/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sepc/errors.hpp"

namespace sepc {

const char* to_string(Rule r) {
  switch (r) {
    case Rule::R1: return "R1";
    case Rule::R2a: return "R2a";
    case Rule::R2b: return "R2b";
    case Rule::Case3: return "Case3";
  }
  return "?";
}

const char* to_string(RegionKind k) {
  switch (k) {
    case RegionKind::Single: return "single";
    case RegionKind::Intersection: return "intersection";
    case RegionKind::UnionFallback: return "union";
    case RegionKind::Expanded: return "expanded";
  }
  return "?";
}

namespace {

// Posterior of `anchor` with the Laplace +1 on the anchor's counts.
double anchored_posterior(Eigen::Index n, Eigen::Index m, Eigen::Index N,
                          Eigen::Index M, int anchor) {
  const double ra = anchor > 0 ? static_cast<double>(n) : static_cast<double>(m);
  const double ta = anchor > 0 ? static_cast<double>(N) : static_cast<double>(M);
  const double ro = anchor > 0 ? static_cast<double>(m) : static_cast<double>(n);
  const double to = anchor > 0 ? static_cast<double>(M) : static_cast<double>(N);
  const double num = (ra + 1.0) * (ta + 1.0);
  return num / (num + ro * to);
}

int majority_label(Eigen::Index n, Eigen::Index m, Eigen::Index N,
                   Eigen::Index M) {
  if (n > m) return +1;
  if (m > n) return -1;
  // Balanced region: the priors decide.
  return anchored_posterior(n, m, N, M, +1) >= 0.5 ? +1 : -1;
}

void check_counts(Eigen::Index n, Eigen::Index m, Eigen::Index N,
                  Eigen::Index M) {
  if (n < 0 || m < 0) throw InvalidCounts("negative region count");
  if (N < 1 || M < 1) throw InvalidCounts("each label needs a positive total");
  if (n > N || m > M) throw InvalidCounts("region count exceeds class total");
}

struct Member {
  Eigen::Index id;
  int label;
  const Ellipsoid* shape;   // points into the model
  Ellipsoid expanded;       // used instead when kind == Expanded
};

// Counts training points inside every member / inside any member.
void scan_counts(const PartitionModel& model, const std::vector<Member>& ms,
                 bool all_of, double tol, Eigen::Index& pos, Eigen::Index& neg) {
  pos = neg = 0;
  for (Eigen::Index r = 0; r < model.train_points.rows(); ++r) {
    const Eigen::VectorXd p = model.train_points.row(r);
    bool in = all_of;
    for (const Member& m : ms) {
      const bool hit = contains(*m.shape, p, tol);
      if (all_of && !hit) {
        in = false;
        break;
      }
      if (!all_of && hit) {
        in = true;
        break;
      }
    }
    if (in) (model.train_labels[r] > 0 ? pos : neg) += 1;
  }
}

Region build_region(const PartitionModel& model, std::vector<Member> ms,
                    bool expanded, const Config& cfg) {
  Region region;
  for (const Member& m : ms) region.member_ids.emplace_back(m.id, m.label);

  if (ms.size() == 1) {
    region.kind = expanded ? RegionKind::Expanded : RegionKind::Single;
    if (expanded) {
      scan_counts(model, ms, true, cfg.tol_membership, region.count_pos,
                  region.count_neg);
    } else {
      const PartitionEllipsoid& pe = model.region(ms[0].id);
      region.count_pos = pe.count_pos;
      region.count_neg = pe.count_neg;
    }
    return region;
  }

  scan_counts(model, ms, true, cfg.tol_membership, region.count_pos,
              region.count_neg);
  if (region.count_pos + region.count_neg > 0) {
    region.kind = expanded ? RegionKind::Expanded : RegionKind::Intersection;
    return region;
  }
  // Empty intersection: fall back to the union of the members.
  scan_counts(model, ms, false, cfg.tol_membership, region.count_pos,
              region.count_neg);
  region.kind = expanded ? RegionKind::Expanded : RegionKind::UnionFallback;
  return region;
}

}  // namespace

Region locate(const PartitionModel& model, const Eigen::VectorXd& z,
              const Config& cfg) {
  if (model.num_regions() == 0) throw EmptyModel("model has no regions");
  if (z.size() != model.dim) {
    throw DimensionMismatch("model is " + std::to_string(model.dim) +
                            "-d, query is " + std::to_string(z.size()) + "-d");
  }

  std::vector<Member> hits;
  for (Eigen::Index id = 0; id < model.num_regions(); ++id) {
    const PartitionEllipsoid& pe = model.region(id);
    if (contains(pe.e, z, cfg.tol_membership)) {
      hits.push_back({id, pe.label, &pe.e, {}});
    }
  }
  if (!hits.empty()) return build_region(model, std::move(hits), false, cfg);

  // Outside every region: expand the nearest ellipsoid(s) to reach z and
  // redo the membership logic on the expanded set. Ties within 1e-6
  // relative distance all expand.
  std::vector<double> dist(model.num_regions());
  double d_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index id = 0; id < model.num_regions(); ++id) {
    dist[id] = distance_to_point(model.region(id).e, z);
    d_min = std::min(d_min, dist[id]);
  }
  std::vector<Member> expanded;
  for (Eigen::Index id = 0; id < model.num_regions(); ++id) {
    if (dist[id] <= d_min * (1.0 + 1e-6)) {
      const PartitionEllipsoid& pe = model.region(id);
      Member m{id, pe.label, nullptr, expand_to_cover(pe.e, z)};
      expanded.push_back(std::move(m));
    }
  }
  for (Member& m : expanded) m.shape = &m.expanded;
  return build_region(model, std::move(expanded), true, cfg);
}

double trust_score(Eigen::Index n, Eigen::Index m, Eigen::Index N,
                   Eigen::Index M, int predicted) {
  check_counts(n, m, N, M);
  if (predicted != +1 && predicted != -1) {
    throw InvalidParam("predicted label must be +1 or -1");
  }
  const int anchor = majority_label(n, m, N, M);
  const double p = anchored_posterior(n, m, N, M, anchor);
  return predicted == anchor ? p : 1.0 - p;
}

TrustReport classify(const PartitionModel& model, const Eigen::VectorXd& z,
                     const Config& cfg) {
  TrustReport report;
  report.region = locate(model, z, cfg);

  const Eigen::Index n = report.region.count_pos;
  const Eigen::Index m = report.region.count_neg;
  report.label = majority_label(n, m, model.total_pos, model.total_neg);
  report.posterior =
      trust_score(n, m, model.total_pos, model.total_neg, report.label);
  report.abstain = std::abs(report.posterior - 0.5) < cfg.abstain_band;
  report.odds_ratio = report.posterior == 1.0
                          ? std::numeric_limits<double>::infinity()
                          : report.posterior / (1.0 - report.posterior);

  switch (report.region.kind) {
    case RegionKind::Single: report.rule_fired = Rule::R1; break;
    case RegionKind::Intersection: report.rule_fired = Rule::R2a; break;
    case RegionKind::UnionFallback: report.rule_fired = Rule::R2b; break;
    case RegionKind::Expanded: report.rule_fired = Rule::Case3; break;
  }
  return report;
}

std::pair<int, TrustReport> predict_multiclass(
    const std::vector<PartitionModel>& models, const Eigen::VectorXd& z,
    const Config& cfg) {
  if (models.empty()) throw EmptyModel("no models given");

  int best_class = 0;
  TrustReport best_report;
  double best_pos = -1.0;
  for (std::size_t c = 0; c < models.size(); ++c) {
    TrustReport rep = classify(models[c], z, cfg);
    const double pos =
        rep.label > 0 ? rep.posterior : 1.0 - rep.posterior;
    bool better = pos > best_pos;
    if (pos == best_pos) {
      better = models[c].total_pos > models[best_class].total_pos;
    }
    if (better) {
      best_pos = pos;
      best_class = static_cast<int>(c);
      best_report = std::move(rep);
    }
  }
  return {best_class, std::move(best_report)};
}

}  // namespace sepc
