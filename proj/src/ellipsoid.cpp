#include "sepc/ellipsoid.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "sepc/errors.hpp"

namespace sepc {

namespace {

void check_dim(const Ellipsoid& e, const Eigen::VectorXd& x) {
  if (e.shape.rows() != x.size()) {
    throw DimensionMismatch("ellipsoid is " + std::to_string(e.shape.rows()) +
                            "-d, point is " + std::to_string(x.size()) + "-d");
  }
}

void check_pair(const Ellipsoid& a, const Ellipsoid& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("ellipsoid dimensions " + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()));
  }
}

}  // namespace

Eigen::VectorXd Ellipsoid::center() const {
  return shape.ldlt().solve(-offset);
}

void Ellipsoid::quadratic_form(Eigen::MatrixXd& q, Eigen::VectorXd& r,
                               double& s) const {
  q = shape.transpose() * shape;
  r = shape.transpose() * offset;
  s = offset.squaredNorm() - 1.0;
}

Ellipsoid Ellipsoid::ball(const Eigen::VectorXd& center, double radius) {
  if (radius <= 0.0) throw InvalidParam("ball radius must be positive");
  const Eigen::Index n = center.size();
  Ellipsoid e;
  e.shape = Eigen::MatrixXd::Identity(n, n) / radius;
  e.offset = -center / radius;
  e.degenerate_radius = radius;
  return e;
}

void Ellipsoid::validate(double sym_rel_tol) const {
  if (shape.rows() != shape.cols() || shape.rows() != offset.size() ||
      shape.rows() < 1) {
    throw CorruptModel("inconsistent ellipsoid dimensions");
  }
  if (!shape.allFinite() || !offset.allFinite()) {
    throw CorruptModel("non-finite ellipsoid coefficients");
  }
  const double scale = shape.cwiseAbs().maxCoeff();
  const double asym = (shape - shape.transpose()).cwiseAbs().maxCoeff();
  if (asym > sym_rel_tol * std::max(scale, 1e-300)) {
    throw CorruptModel("shape matrix is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(shape);
  if (llt.info() != Eigen::Success) {
    throw CorruptModel("shape matrix is not positive definite");
  }
}

double level(const Ellipsoid& e, const Eigen::VectorXd& x) {
  check_dim(e, x);
  return (e.shape * x + e.offset).norm();
}

bool contains(const Ellipsoid& e, const Eigen::VectorXd& x,
              double tol_membership) {
  return level(e, x) <= 1.0 + tol_membership;
}

double volume_measure(const Ellipsoid& e) {
  // sqrt(det(A^{-1})) = prod 1/L_ii for A = L L^T, done in log space.
  Eigen::LLT<Eigen::MatrixXd> llt(e.shape);
  if (llt.info() != Eigen::Success) {
    throw InvalidParam("volume of a non-positive-definite ellipsoid");
  }
  double log_det_l = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < e.dim(); ++i) log_det_l += std::log(l(i, i));
  return std::exp(-log_det_l);
}

Ellipsoid expand_to_cover(const Ellipsoid& e, const Eigen::VectorXd& x) {
  const double s = level(e, x);
  if (s <= 1.0) return e;
  Ellipsoid out;
  out.shape = e.shape / s;
  out.offset = e.offset / s;
  if (e.degenerate_radius) out.degenerate_radius = *e.degenerate_radius * s;
  return out;
}

double distance_to_point(const Ellipsoid& e, const Eigen::VectorXd& x) {
  const double lvl = level(e, x);
  if (lvl <= 1.0) return 0.0;

  // Work in the eigenbasis of A: with H = A^2 = V diag(lam) V^T and
  // y = V^T (x - c), the nearest boundary point solves the secular
  // equation f(mu) = sum lam_i y_i^2 / (1 + mu lam_i)^2 - 1 = 0, mu > 0.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.shape);
  if (es.info() != Eigen::Success) throw NonConvergence("eigensolver failed");
  const Eigen::VectorXd lam = es.eigenvalues().array().square();
  const Eigen::VectorXd y = es.eigenvectors().transpose() * (x - e.center());

  // f is convex and decreasing for mu >= 0 with f(0) > 0, so Newton from
  // 0 increases monotonically to the root.
  double mu = 0.0;
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    double f = -1.0, df = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const double t = 1.0 + mu * lam(i);
      const double a = lam(i) * y(i) * y(i) / (t * t);
      f += a;
      df -= 2.0 * a * lam(i) / t;
    }
    if (std::abs(f) < 1e-14 * std::max(1.0, lvl * lvl)) {
      converged = true;
      break;
    }
    const double step = f / df;
    mu -= step;
    if (std::abs(step) < 1e-16 * std::max(mu, 1.0)) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NonConvergence("secular equation did not converge");

  double dist2 = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    const double r = mu * lam(i) * y(i) / (1.0 + mu * lam(i));
    dist2 += r * r;
  }
  return std::sqrt(dist2);
}

namespace {

// Minimizer of lam*l1^2 + (1-lam)*l2^2 and the two levels there.
void balanced_point(const Eigen::MatrixXd& h1, const Eigen::VectorXd& g1,
                    const Eigen::MatrixXd& h2, const Eigen::VectorXd& g2,
                    const Ellipsoid& a, const Ellipsoid& b, double lam,
                    double& l1, double& l2) {
  const Eigen::MatrixXd h = lam * h1 + (1.0 - lam) * h2;
  const Eigen::VectorXd g = lam * g1 + (1.0 - lam) * g2;
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) {
    throw NonConvergence("intersection system not positive definite");
  }
  const Eigen::VectorXd x = llt.solve(-g);
  l1 = level(a, x);
  l2 = level(b, x);
}

}  // namespace

double min_max_level(const Ellipsoid& a, const Ellipsoid& b) {
  check_pair(a, b);
  const Eigen::VectorXd ca = a.center();
  const Eigen::VectorXd cb = b.center();

  const double la_cb = level(a, cb);
  const double lb_ca = level(b, ca);
  if (la_cb <= 1e-14) return lb_ca;  // coincident centers
  if (lb_ca <= 1e-14) return la_cb;

  const Eigen::MatrixXd h1 = a.shape * a.shape;
  const Eigen::VectorXd g1 = a.shape * a.offset;
  const Eigen::MatrixXd h2 = b.shape * b.shape;
  const Eigen::VectorXd g2 = b.shape * b.offset;

  // The weighted minimizer traces a path from cb (lam=0) to ca (lam=1);
  // psi = l1^2 - l2^2 changes sign along it, and the balanced point is
  // the minimax optimum. Bisection with a secant refinement.
  double lo = 0.0, hi = 1.0;
  double l1 = la_cb, l2 = 0.0;  // values at lam = 0
  double psi_lo = l1 * l1;
  double psi_hi = -lb_ca * lb_ca;
  double best = std::max(l1, l2);
  for (int it = 0; it < 200; ++it) {
    double mid;
    // Secant proposal, safeguarded into the bracket.
    const double denom = psi_lo - psi_hi;
    if (denom > 0.0) {
      mid = lo + psi_lo * (hi - lo) / denom;
      const double margin = 1e-3 * (hi - lo);
      if (!(mid > lo + margin && mid < hi - margin)) mid = 0.5 * (lo + hi);
    } else {
      mid = 0.5 * (lo + hi);
    }
    balanced_point(h1, g1, h2, g2, a, b, mid, l1, l2);
    const double psi = l1 * l1 - l2 * l2;
    best = std::max(l1, l2);
    if (std::abs(l1 - l2) <= 1e-13 * std::max(1.0, best) ||
        hi - lo < 1e-15) {
      return 0.5 * (l1 + l2);
    }
    if (psi > 0.0) {
      lo = mid;
      psi_lo = psi;
    } else {
      hi = mid;
      psi_hi = psi;
    }
  }
  return best;
}

bool intersects(const Ellipsoid& a, const Ellipsoid& b, double tol) {
  check_pair(a, b);
  const Eigen::VectorXd ca = a.center();
  const Eigen::VectorXd cb = b.center();
  if (level(a, cb) <= 1.0 + tol || level(b, ca) <= 1.0 + tol) return true;

  // Cheap upper bound: convex max(l1,l2) minimized along the segment of
  // centers by ternary search. A value below 1 already proves overlap.
  {
    double lo = 0.0, hi = 1.0;
    auto g = [&](double t) {
      const Eigen::VectorXd x = ca + t * (cb - ca);
      return std::max(level(a, x), level(b, x));
    };
    for (int it = 0; it < 60; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (g(m1) < g(m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    if (g(0.5 * (lo + hi)) <= 1.0 + tol) return true;
  }

  return min_max_level(a, b) <= 1.0 + tol;
}

}  // namespace sepc
