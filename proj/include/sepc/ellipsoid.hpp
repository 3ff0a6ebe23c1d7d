#pragma once

#include <Eigen/Dense>
#include <optional>

namespace sepc {

/// Ellipsoid in the norm form {x : ||A x + b|| <= 1}. A is symmetric
/// positive definite, so the set is bounded with nonempty interior.
/// Isolated leftover points are represented as tiny balls and carry
/// `degenerate_radius` so downstream code can tell them apart.
struct Ellipsoid {
  Eigen::MatrixXd shape;   // A
  Eigen::VectorXd offset;  // b
  std::optional<double> degenerate_radius;

  Eigen::Index dim() const { return shape.rows(); }

  /// Center -A^{-1} b.
  Eigen::VectorXd center() const;

  /// Quadratic representation (A^T A, A^T b, b^T b - 1) of the same set,
  /// i.e. {x : x^T Q x + 2 r^T x + s <= 0}.
  void quadratic_form(Eigen::MatrixXd& q, Eigen::VectorXd& r, double& s) const;

  /// Ball of the given radius.
  static Ellipsoid ball(const Eigen::VectorXd& center, double radius);

  /// Checks symmetry and positive definiteness; throws CorruptModel.
  void validate(double sym_rel_tol = 1e-10) const;
};

/// ||A x + b||; at most 1 inside, exactly 1 on the boundary.
double level(const Ellipsoid& e, const Eigen::VectorXd& x);

bool contains(const Ellipsoid& e, const Eigen::VectorXd& x,
              double tol_membership);

/// min over x of max(level(a,x), level(b,x)). Values <= 1 mean the
/// ellipsoids share a point.
double min_max_level(const Ellipsoid& a, const Ellipsoid& b);

/// Boundary-tangent configurations within tol count as intersecting.
bool intersects(const Ellipsoid& a, const Ellipsoid& b, double tol);

/// Euclidean distance from x to the boundary of e; 0 when x is inside.
double distance_to_point(const Ellipsoid& e, const Eigen::VectorXd& x);

/// Uniform scaling about the center so that x lands exactly on the
/// boundary. No-op when x is already covered.
Ellipsoid expand_to_cover(const Ellipsoid& e, const Eigen::VectorXd& x);

/// sqrt(det(A^{-1})): the ellipsoid volume up to the unit-ball constant.
double volume_measure(const Ellipsoid& e);

}  // namespace sepc
