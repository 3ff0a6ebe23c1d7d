#pragma once

#include <optional>
#include <vector>

#include "sepc/config.hpp"
#include "sepc/ellipsoid.hpp"

namespace sepc {

/// Solution of the reduced-convex-hull nearest-point problem
///   min 1/2 ||X^T u - Y^T v||^2,  u,v in capped simplices {0<=.<=D, sum=1}.
struct RchSolution {
  Eigen::VectorXd u;  // weights over rows of X
  Eigen::VectorXd v;  // weights over rows of Y
  Eigen::VectorXd c;  // X^T u
  Eigen::VectorXd d;  // Y^T v
  Eigen::VectorXd w;  // c - d, slab normal
  double alpha = 0.0;  // c^T w
  double beta = 0.0;   // d^T w
  double gap = 0.0;    // Frank-Wolfe duality gap at exit
  bool disjoint = false;  // set when the MVE pre-check skipped the QP
};

enum class RchOutcome {
  Split,           // slab found, sides split
  Disjoint,        // class MVEs do not intersect
  DegenerateSlab,  // closest points coincide, no separating direction
};

struct RchStep {
  RchOutcome outcome = RchOutcome::Split;
  RchSolution solution;
  std::vector<Eigen::Index> x_plus;   // rows of X with x'w >= alpha
  std::vector<Eigen::Index> y_minus;  // rows of Y with y'w <= beta
  std::optional<Ellipsoid> mve_x_plus;
  std::optional<Ellipsoid> mve_y_minus;
};

/// Exact projection of z onto {w : 0 <= w_i <= cap, sum w = 1} via the
/// sorted-threshold method.
Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& z, double cap);

/// Projected-gradient solve with Barzilai-Borwein trial steps and a
/// monotone line search; stops at Frank-Wolfe gap <= tol_qp. Rows of X
/// and Y are points. Throws InfeasibleD when D < 1/min(|X|,|Y|).
/// `objective_trace`, when given, receives the objective value at every
/// iteration.
RchSolution solve_rch_qp(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                         double D, double tol_qp,
                         std::vector<double>* objective_trace = nullptr);

/// One slab-splitting pass: disjointness pre-check on the class MVEs,
/// QP with D = 1/min(|X|,|Y|), halfspace split through the closest
/// points, and MVEs of the split sides (left empty for sides that are
/// too small or rank-deficient). Precomputed class MVEs can be passed to
/// skip refitting; when a class MVE cannot be fitted at all the
/// pre-check is skipped and the QP decides.
RchStep rch_step(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                 const Config& cfg,
                 const std::optional<Ellipsoid>& mve_x = std::nullopt,
                 const std::optional<Ellipsoid>& mve_y = std::nullopt);

}  // namespace sepc
