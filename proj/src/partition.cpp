#include "sepc/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sepc/errors.hpp"
#include "sepc/mve.hpp"
#include "sepc/rch.hpp"
#include "sepc/rng.hpp"

namespace sepc {

void Config::validate() const {
  if (n_imp < 0) throw InvalidParam("n_imp must be nonnegative");
  if (tol_fit <= 0 || tol_qp <= 0 || tol_membership <= 0) {
    throw InvalidParam("tolerances must be positive");
  }
  if (!(abstain_band >= 0.0 && abstain_band < 0.5)) {
    throw InvalidParam("abstain_band must lie in [0, 0.5)");
  }
  if (jitter_radius_frac <= 0.0) {
    throw InvalidParam("jitter_radius_frac must be positive");
  }
  if (folds < 0) throw InvalidParam("folds must be nonnegative");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidParam("test_fraction must lie in (0, 1)");
  }
}

const PartitionEllipsoid& PartitionModel::region(Eigen::Index id) const {
  const auto np = static_cast<Eigen::Index>(positive.size());
  if (id < 0 || id >= num_regions()) throw InvalidParam("region id out of range");
  return id < np ? positive[id] : negative[id - np];
}

namespace {

enum class FitOutcome { Fitted, TooSmall, Degenerate };

// Mutable training copy shared by the partition loop. Constant features
// (over whatever subset is about to be fitted) get one uniform-noise
// draw across the whole training set, at most once per feature per run.
struct Working {
  Eigen::MatrixXd pts;
  const Config* cfg = nullptr;
  Rng rng;
  std::vector<char> feature_jittered;

  Working(Eigen::MatrixXd p, const Config& c)
      : pts(std::move(p)), cfg(&c), rng(c.seed),
        feature_jittered(static_cast<std::size_t>(pts.cols()), 0) {}

  Eigen::Index dim() const { return pts.cols(); }

  Eigen::MatrixXd gather(const std::vector<Eigen::Index>& rows) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), pts.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = pts.row(rows[i]);
    return out;
  }

  bool jitter_constant_features_on(const std::vector<Eigen::Index>& rows) {
    bool changed = false;
    for (Eigen::Index j = 0; j < pts.cols(); ++j) {
      if (feature_jittered[j]) continue;
      double lo = pts(rows[0], j), hi = lo;
      for (Eigen::Index r : rows) {
        lo = std::min(lo, pts(r, j));
        hi = std::max(hi, pts(r, j));
      }
      if (hi - lo > 0.0) continue;
      const double radius = cfg->jitter_radius_frac *
                            std::max(1.0, pts.col(j).cwiseAbs().maxCoeff());
      for (Eigen::Index r = 0; r < pts.rows(); ++r) {
        pts(r, j) += rng.uniform(-radius, radius);
      }
      feature_jittered[j] = 1;
      changed = true;
    }
    return changed;
  }

  FitOutcome fit(const std::vector<Eigen::Index>& rows,
                 std::optional<Ellipsoid>& out) {
    out.reset();
    if (static_cast<Eigen::Index>(rows.size()) <= dim()) {
      return FitOutcome::TooSmall;
    }
    jitter_constant_features_on(rows);
    try {
      out = mve_fit(gather(rows), cfg->tol_fit).ellipsoid;
      return FitOutcome::Fitted;
    } catch (const RankDeficient&) {
      return FitOutcome::Degenerate;
    }
  }
};

struct SideRefine {
  std::vector<Eigen::Index> kept;  // rows into the training copy
  RefineStatus status = RefineStatus::BudgetMet;
  std::optional<Ellipsoid> mve;
  std::vector<Eigen::Index> opposite_inside;
};

// Alternates impurity count and slab cut on the subset until the budget
// holds or progress stops. Rows index the shared training copy.
SideRefine refine_rows(Working& ws, std::vector<Eigen::Index> s_rows,
                       const std::vector<Eigen::Index>& o_rows,
                       const std::optional<Ellipsoid>& opposite_mve) {
  const int n_imp = ws.cfg->n_imp;
  SideRefine result;
  for (;;) {
    std::optional<Ellipsoid> mve;
    const FitOutcome fo = ws.fit(s_rows, mve);
    if (fo == FitOutcome::TooSmall) {
      result = {std::move(s_rows), RefineStatus::TooSmall, std::nullopt, {}};
      return result;
    }
    if (fo == FitOutcome::Degenerate) {
      result = {std::move(s_rows), RefineStatus::Stuck, std::nullopt, {}};
      return result;
    }

    std::vector<Eigen::Index> inside;
    for (Eigen::Index r : o_rows) {
      if (contains(*mve, ws.pts.row(r), ws.cfg->tol_membership)) {
        inside.push_back(r);
      }
    }
    if (static_cast<int>(inside.size()) <= n_imp) {
      result = {std::move(s_rows), RefineStatus::BudgetMet, std::move(mve),
                std::move(inside)};
      return result;
    }

    const RchStep step = rch_step(ws.gather(s_rows), ws.gather(o_rows), *ws.cfg,
                                  mve, opposite_mve);
    if (step.outcome != RchOutcome::Split ||
        step.x_plus.size() == s_rows.size() || step.x_plus.empty()) {
      result = {std::move(s_rows), RefineStatus::Stuck, std::move(mve),
                std::move(inside)};
      return result;
    }
    std::vector<Eigen::Index> next;
    next.reserve(step.x_plus.size());
    for (Eigen::Index k : step.x_plus) next.push_back(s_rows[k]);
    s_rows = std::move(next);
  }
}

void remove_rows(std::vector<Eigen::Index>& from,
                 std::vector<Eigen::Index> gone) {
  std::sort(gone.begin(), gone.end());
  std::vector<Eigen::Index> keep;
  keep.reserve(from.size());
  for (Eigen::Index r : from) {
    if (!std::binary_search(gone.begin(), gone.end(), r)) keep.push_back(r);
  }
  from = std::move(keep);
}

}  // namespace

RefineResult refine_side(const Eigen::MatrixXd& S, const Eigen::MatrixXd& O,
                         int n_imp, const Config& cfg) {
  if (S.rows() < 1) throw EmptyInput("S must be nonempty");
  if (S.cols() != O.cols()) {
    throw DimensionMismatch("S has " + std::to_string(S.cols()) +
                            " features, O has " + std::to_string(O.cols()));
  }
  Config local = cfg;
  local.n_imp = n_imp;
  Eigen::MatrixXd all(S.rows() + O.rows(), S.cols());
  all.topRows(S.rows()) = S;
  all.bottomRows(O.rows()) = O;
  Working ws(std::move(all), local);

  std::vector<Eigen::Index> s_rows(S.rows()), o_rows(O.rows());
  std::iota(s_rows.begin(), s_rows.end(), Eigen::Index{0});
  std::iota(o_rows.begin(), o_rows.end(), S.rows());

  std::optional<Ellipsoid> o_mve;
  ws.fit(o_rows, o_mve);
  SideRefine r = refine_rows(ws, s_rows, o_rows, o_mve);

  RefineResult out;
  out.status = r.status;
  out.mve = std::move(r.mve);
  out.impure = static_cast<Eigen::Index>(r.opposite_inside.size());
  out.kept = std::move(r.kept);
  for (Eigen::Index r_o : r.opposite_inside) {
    out.opposite_inside.push_back(r_o - S.rows());
  }
  return out;
}

PartitionModel partition(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                         const Config& cfg) {
  cfg.validate();
  if (X.rows() < 1 || Y.rows() < 1) {
    throw EmptyInput("both labels need at least one training point");
  }
  if (X.cols() != Y.cols() || X.cols() < 1) {
    throw DimensionMismatch("X has " + std::to_string(X.cols()) +
                            " features, Y has " + std::to_string(Y.cols()));
  }

  const Eigen::Index n = X.cols();
  const Eigen::Index total = X.rows() + Y.rows();

  Eigen::MatrixXd all(total, n);
  all.topRows(X.rows()) = X;
  all.bottomRows(Y.rows()) = Y;
  Working ws(std::move(all), cfg);

  std::vector<Eigen::Index> x_rows(X.rows()), y_rows(Y.rows());
  std::iota(x_rows.begin(), x_rows.end(), Eigen::Index{0});
  std::iota(y_rows.begin(), y_rows.end(), X.rows());

  PartitionModel model;
  model.dim = n;
  model.total_pos = X.rows();
  model.total_neg = Y.rows();
  model.config = cfg;

  {
    std::vector<Eigen::Index> every(total);
    std::iota(every.begin(), every.end(), Eigen::Index{0});
    ws.jitter_constant_features_on(every);
  }

  auto record = [&](std::optional<Ellipsoid> e, int label, int iteration,
                    bool terminal, std::vector<Eigen::Index> opposite_snapshot,
                    Eigen::Index impure) {
    PartitionEllipsoid pe;
    pe.e = std::move(*e);
    pe.label = label;
    pe.created_iteration = iteration;
    pe.terminal = terminal;
    pe.impure_at_creation = impure;
    pe.creation_opposite_rows = std::move(opposite_snapshot);
    (label > 0 ? model.positive : model.negative).push_back(std::move(pe));
  };

  int iter = 0;
  std::string stop_event;
  while (static_cast<Eigen::Index>(x_rows.size()) > n &&
         static_cast<Eigen::Index>(y_rows.size()) > n) {
    ++iter;
    std::optional<Ellipsoid> ex, ey;
    ws.fit(x_rows, ex);
    ws.fit(y_rows, ey);

    const RchStep step =
        rch_step(ws.gather(x_rows), ws.gather(y_rows), cfg, ex, ey);

    IterationStat stat;
    stat.iteration = iter;

    if (step.outcome == RchOutcome::Disjoint) {
      // Each side's own MVE holds none of the other side: both become
      // final partitions outright.
      auto impure_in = [&](const Ellipsoid& e,
                           const std::vector<Eigen::Index>& rows) {
        Eigen::Index cnt = 0;
        for (Eigen::Index r : rows) {
          if (contains(e, ws.pts.row(r), cfg.tol_membership)) ++cnt;
        }
        return cnt;
      };
      record(step.mve_x_plus, +1, iter, false, y_rows,
             impure_in(*step.mve_x_plus, y_rows));
      record(step.mve_y_minus, -1, iter, false, x_rows,
             impure_in(*step.mve_y_minus, x_rows));
      stat.event = "disjoint";
      stat.carved_pos = static_cast<Eigen::Index>(x_rows.size());
      stat.carved_neg = static_cast<Eigen::Index>(y_rows.size());
      x_rows.clear();
      y_rows.clear();
      model.iterations = iter;
      model.log.push_back(stat);
      break;
    }
    if (step.outcome == RchOutcome::DegenerateSlab) {
      stop_event = "degenerate slab, cannot separate further";
      model.iterations = iter;
      break;
    }
    if (step.x_plus.empty() || step.y_minus.empty()) {
      stop_event = "empty split, cannot separate further";
      model.iterations = iter;
      break;
    }

    std::vector<Eigen::Index> xp, ym;
    for (Eigen::Index k : step.x_plus) xp.push_back(x_rows[k]);
    for (Eigen::Index k : step.y_minus) ym.push_back(y_rows[k]);

    // Both refinements run against the pre-removal opposite sets.
    SideRefine rx = refine_rows(ws, std::move(xp), y_rows, ey);
    SideRefine ry = refine_rows(ws, std::move(ym), x_rows, ex);

    bool carved = false;
    if (rx.status == RefineStatus::BudgetMet) {
      stat.carved_pos = static_cast<Eigen::Index>(rx.kept.size());
      stat.impure_pos = static_cast<Eigen::Index>(rx.opposite_inside.size());
      record(std::move(rx.mve), +1, iter, false, y_rows, stat.impure_pos);
      carved = true;
    }
    if (ry.status == RefineStatus::BudgetMet) {
      stat.carved_neg = static_cast<Eigen::Index>(ry.kept.size());
      stat.impure_neg = static_cast<Eigen::Index>(ry.opposite_inside.size());
      record(std::move(ry.mve), -1, iter, false, x_rows, stat.impure_neg);
      carved = true;
    }
    if (rx.status == RefineStatus::BudgetMet) remove_rows(x_rows, rx.kept);
    if (ry.status == RefineStatus::BudgetMet) remove_rows(y_rows, ry.kept);

    model.iterations = iter;
    stat.remaining_pos = static_cast<Eigen::Index>(x_rows.size());
    stat.remaining_neg = static_cast<Eigen::Index>(y_rows.size());
    stat.event = "carve";
    model.log.push_back(stat);

    if (!carved) {
      stop_event = "no side could be separated within budget";
      break;
    }
  }

  if (!stop_event.empty()) {
    IterationStat stat;
    stat.iteration = iter;
    stat.event = stop_event;
    stat.remaining_pos = static_cast<Eigen::Index>(x_rows.size());
    stat.remaining_neg = static_cast<Eigen::Index>(y_rows.size());
    model.log.push_back(stat);
  }

  // Terminal handling: a remaining side gets one final MVE when it can
  // still support one; otherwise its points become tiny balls.
  const Eigen::VectorXd box =
      ws.pts.colwise().maxCoeff() - ws.pts.colwise().minCoeff();
  const double point_radius = std::max(1e-6 * box.norm(), 1e-12);

  auto finish_side = [&](std::vector<Eigen::Index>& rows, int label,
                         const std::vector<Eigen::Index>& other_rows) {
    if (rows.empty()) return;
    std::optional<Ellipsoid> e;
    if (ws.fit(rows, e) == FitOutcome::Fitted) {
      Eigen::Index impure = 0;
      for (Eigen::Index r : other_rows) {
        if (contains(*e, ws.pts.row(r), cfg.tol_membership)) ++impure;
      }
      record(std::move(e), label, iter, true, other_rows, impure);
      IterationStat stat;
      stat.iteration = iter;
      stat.event = std::string("terminal partition, label ") +
                   (label > 0 ? "+1" : "-1");
      model.log.push_back(stat);
      rows.clear();
      return;
    }
    for (Eigen::Index r : rows) {
      Ellipsoid ball = Ellipsoid::ball(ws.pts.row(r), point_radius);
      PartitionEllipsoid pe;
      pe.e = std::move(ball);
      pe.label = label;
      pe.created_iteration = iter;
      pe.terminal = true;
      (label > 0 ? model.positive : model.negative).push_back(std::move(pe));
      model.leftovers.emplace_back(ws.pts.row(r), label);
    }
    IterationStat stat;
    stat.iteration = iter;
    stat.event = std::to_string(rows.size()) + " leftover point(s), label " +
                 (label > 0 ? "+1" : "-1");
    model.log.push_back(stat);
    rows.clear();
  };
  finish_side(x_rows, +1, y_rows);
  finish_side(y_rows, -1, x_rows);

  // Final bookkeeping: trust counts run over the full (post-jitter)
  // training set regardless of which iteration carved each region.
  model.train_points = ws.pts;
  model.train_labels.assign(total, +1);
  for (Eigen::Index r = X.rows(); r < total; ++r) model.train_labels[r] = -1;
  for (auto* list : {&model.positive, &model.negative}) {
    for (auto& pe : *list) {
      for (Eigen::Index r = 0; r < total; ++r) {
        if (contains(pe.e, ws.pts.row(r), cfg.tol_membership)) {
          (model.train_labels[r] > 0 ? pe.count_pos : pe.count_neg) += 1;
        }
      }
    }
  }
  return model;
}

std::vector<PartitionModel> train_multiclass(const LabeledDataset& d,
                                             const Config& cfg) {
  const int k = d.num_classes();
  if (k < 2) throw InvalidParam("need at least 2 classes");
  for (int c = 0; c < k; ++c) {
    if (d.rows_of_class(c).empty()) {
      throw EmptyInput("class " + d.class_values[c] + " has no points");
    }
  }

  auto gather_split = [&](int positive_class) {
    std::vector<Eigen::Index> pos, neg;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      (d.labels[i] == positive_class ? pos : neg).push_back(i);
    }
    return std::make_pair(subset(d, pos).points, subset(d, neg).points);
  };

  std::vector<PartitionModel> models;
  if (k == 2) {
    auto [xp, yn] = gather_split(0);
    models.push_back(partition(xp, yn, cfg));
    return models;
  }
  models.reserve(k);
  for (int c = 0; c < k; ++c) {
    auto [xp, yn] = gather_split(c);
    models.push_back(partition(xp, yn, cfg));
  }
  return models;
}

}  // namespace sepc
