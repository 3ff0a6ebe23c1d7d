#pragma once

#include "sepc/ellipsoid.hpp"

namespace sepc {

struct MveSolution {
  Ellipsoid ellipsoid;
  Eigen::VectorXd support_weights;  // over input rows, nonnegative, sums to 1
  double duality_gap = 0.0;         // n * relative dual slack at exit
  int iterations = 0;
};

/// Affine rank of the rows of `points` (dimension of their affine hull),
/// judged by singular values above rel_tol * sigma_max.
Eigen::Index affine_rank(const Eigen::MatrixXd& points, double rel_tol = 1e-10);

/// Minimum-volume enclosing ellipsoid of the rows of `points`.
///
/// Dual coordinate ascent on the log-det problem with away steps. Stops
/// once the largest dual violation is below tol_fit on both sides, which
/// certifies a (1 + tol_fit)-optimal volume. Requires strictly more rows
/// than columns (independence-dimension condition) and full affine rank;
/// otherwise throws TooFewPoints / RankDeficient. The returned ellipsoid
/// touches its outermost input point exactly.
MveSolution mve_fit(const Eigen::MatrixXd& points, double tol_fit);

}  // namespace sepc
