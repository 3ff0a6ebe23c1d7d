#include "sepc/rch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sepc/errors.hpp"
#include "sepc/mve.hpp"

namespace sepc {

namespace {

double capped_mass(const Eigen::VectorXd& z, double cap, double tau) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    s += std::clamp(z(i) - tau, 0.0, cap);
  }
  return s;
}

// Linear minimization oracle over the capped simplex: pour the unit mass
// into the coordinates with the smallest gradient.
Eigen::VectorXd greedy_vertex(const Eigen::VectorXd& grad, double cap) {
  const Eigen::Index n = grad.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return grad(a) < grad(b); });
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  double rem = 1.0;
  for (Eigen::Index idx : order) {
    const double a = std::min(cap, rem);
    s(idx) = a;
    rem -= a;
    if (rem <= 0.0) break;
  }
  return s;
}

}  // namespace

Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& z, double cap) {
  const Eigen::Index n = z.size();
  if (n == 0) throw InvalidParam("empty projection input");
  if (cap * static_cast<double>(n) < 1.0 - 1e-12) {
    throw InfeasibleD("cap " + std::to_string(cap) + " infeasible for " +
                      std::to_string(n) + " weights");
  }

  // The mass function tau -> sum clamp(z_i - tau, 0, cap) is piecewise
  // linear and non-increasing with kinks at z_i and z_i - cap; locate the
  // segment crossing 1 and solve the linear piece exactly.
  std::vector<double> bp(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    bp[2 * i] = z(i);
    bp[2 * i + 1] = z(i) - cap;
  }
  std::sort(bp.begin(), bp.end());

  // First breakpoint with mass <= 1.
  std::size_t lo = 0, hi = bp.size() - 1;
  if (capped_mass(z, cap, bp[0]) <= 1.0) {
    hi = 0;
  } else {
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (capped_mass(z, cap, bp[mid]) <= 1.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }

  double tau;
  if (hi == 0) {
    tau = bp[0];
  } else {
    const double f_lo = capped_mass(z, cap, bp[lo]);
    const double f_hi = capped_mass(z, cap, bp[hi]);
    if (f_lo - f_hi <= 0.0) {
      tau = bp[lo];
    } else {
      tau = bp[lo] + (f_lo - 1.0) * (bp[hi] - bp[lo]) / (f_lo - f_hi);
    }
  }

  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = std::clamp(z(i) - tau, 0.0, cap);
  return w;
}

RchSolution solve_rch_qp(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                         double D, double tol_qp,
                         std::vector<double>* objective_trace) {
  const Eigen::Index nx = X.rows();
  const Eigen::Index ny = Y.rows();
  if (nx < 1 || ny < 1) throw EmptyInput("both point sets must be nonempty");
  if (X.cols() != Y.cols()) {
    throw DimensionMismatch("X has " + std::to_string(X.cols()) +
                            " features, Y has " + std::to_string(Y.cols()));
  }
  if (tol_qp <= 0.0) throw InvalidParam("tol_qp must be positive");
  if (D <= 0.0 || D > 1.0 + 1e-12) throw InvalidParam("D must lie in (0, 1]");
  const double d_min = 1.0 / static_cast<double>(std::min(nx, ny));
  if (D < d_min - 1e-12) {
    throw InfeasibleD("D = " + std::to_string(D) + " below 1/min(|X|,|Y|) = " +
                      std::to_string(d_min));
  }

  Eigen::VectorXd u = Eigen::VectorXd::Constant(nx, 1.0 / nx);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(ny, 1.0 / ny);
  Eigen::VectorXd r = X.transpose() * u - Y.transpose() * v;
  double obj = 0.5 * r.squaredNorm();

  const double lipschitz = X.squaredNorm() + Y.squaredNorm();
  const double t0 = 1.0 / std::max(lipschitz, 1e-300);

  Eigen::VectorXd gu = X * r, gv = -(Y * r);
  Eigen::VectorXd pu, pv;  // previous iterate
  Eigen::VectorXd pgu, pgv;
  double gap = 0.0;
  bool have_prev = false;
  const int max_iter = 200000;

  for (int it = 0;; ++it) {
    if (objective_trace) objective_trace->push_back(obj);

    const Eigen::VectorXd su = greedy_vertex(gu, D);
    const Eigen::VectorXd sv = greedy_vertex(gv, D);
    gap = gu.dot(u - su) + gv.dot(v - sv);
    if (gap <= tol_qp) break;
    if (it >= max_iter) {
      throw NonConvergence("rch qp stalled at gap " + std::to_string(gap));
    }

    // Barzilai-Borwein trial step, fallback 1/L.
    double t = t0;
    if (have_prev) {
      const double sy = (u - pu).dot(gu - pgu) + (v - pv).dot(gv - pgv);
      const double ss = (u - pu).squaredNorm() + (v - pv).squaredNorm();
      if (sy > 1e-300) t = std::clamp(ss / sy, 1e-6 * t0, 1e6 / std::max(lipschitz * 1e-6, 1e-300));
    }

    pu = u;
    pv = v;
    pgu = gu;
    pgv = gv;

    // Monotone backtracking on the projected step.
    Eigen::VectorXd u2, v2, r2;
    double obj2 = obj;
    for (int ls = 0; ls < 80; ++ls) {
      u2 = project_capped_simplex(u - t * gu, D);
      v2 = project_capped_simplex(v - t * gv, D);
      r2 = X.transpose() * u2 - Y.transpose() * v2;
      obj2 = 0.5 * r2.squaredNorm();
      const double decrease = gu.dot(u - u2) + gv.dot(v - v2);
      if (obj2 <= obj - 1e-4 * decrease + 1e-18) break;
      t *= 0.5;
    }
    u = u2;
    v = v2;
    r = r2;
    obj = std::min(obj, obj2);
    gu = X * r;
    gv = -(Y * r);
    have_prev = true;
  }

  RchSolution sol;
  sol.u = u;
  sol.v = v;
  sol.c = X.transpose() * u;
  sol.d = Y.transpose() * v;
  sol.w = sol.c - sol.d;
  sol.alpha = sol.c.dot(sol.w);
  sol.beta = sol.d.dot(sol.w);
  sol.gap = gap;
  return sol;
}

RchStep rch_step(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                 const Config& cfg, const std::optional<Ellipsoid>& mve_x,
                 const std::optional<Ellipsoid>& mve_y) {
  const Eigen::Index nx = X.rows();
  const Eigen::Index ny = Y.rows();
  const Eigen::Index n = X.cols();
  if (nx < 1 || ny < 1) throw EmptyInput("both point sets must be nonempty");
  if (n != Y.cols()) {
    throw DimensionMismatch("X has " + std::to_string(n) + " features, Y has " +
                            std::to_string(Y.cols()));
  }

  RchStep step;

  auto fit_or_null = [&](const Eigen::MatrixXd& pts) -> std::optional<Ellipsoid> {
    try {
      return mve_fit(pts, cfg.tol_fit).ellipsoid;
    } catch (const TooFewPoints&) {
      return std::nullopt;
    } catch (const RankDeficient&) {
      return std::nullopt;
    }
  };

  std::optional<Ellipsoid> ex = mve_x ? mve_x : fit_or_null(X);
  std::optional<Ellipsoid> ey = mve_y ? mve_y : fit_or_null(Y);

  if (ex && ey && !intersects(*ex, *ey, cfg.tol_membership)) {
    step.outcome = RchOutcome::Disjoint;
    step.solution.disjoint = true;
    step.x_plus.resize(nx);
    std::iota(step.x_plus.begin(), step.x_plus.end(), Eigen::Index{0});
    step.y_minus.resize(ny);
    std::iota(step.y_minus.begin(), step.y_minus.end(), Eigen::Index{0});
    step.mve_x_plus = ex;
    step.mve_y_minus = ey;
    return step;
  }

  const double d_cap = 1.0 / static_cast<double>(std::min(nx, ny));
  step.solution = solve_rch_qp(X, Y, d_cap, cfg.tol_qp);

  if (step.solution.w.norm() <= 1e-10) {
    step.outcome = RchOutcome::DegenerateSlab;
    return step;
  }

  const Eigen::VectorXd& w = step.solution.w;
  const double tie_x = 1e-12 * std::max(1.0, std::abs(step.solution.alpha));
  const double tie_y = 1e-12 * std::max(1.0, std::abs(step.solution.beta));
  for (Eigen::Index i = 0; i < nx; ++i) {
    if (X.row(i).dot(w) >= step.solution.alpha - tie_x) step.x_plus.push_back(i);
  }
  for (Eigen::Index j = 0; j < ny; ++j) {
    if (Y.row(j).dot(w) <= step.solution.beta + tie_y) step.y_minus.push_back(j);
  }

  auto side_mve = [&](const std::vector<Eigen::Index>& rows,
                      const Eigen::MatrixXd& pts) -> std::optional<Ellipsoid> {
    if (static_cast<Eigen::Index>(rows.size()) <= n) return std::nullopt;
    Eigen::MatrixXd sub(rows.size(), n);
    for (std::size_t k = 0; k < rows.size(); ++k) sub.row(k) = pts.row(rows[k]);
    return fit_or_null(sub);
  };
  step.mve_x_plus = side_mve(step.x_plus, X);
  step.mve_y_minus = side_mve(step.y_minus, Y);
  step.outcome = RchOutcome::Split;
  return step;
}

}  // namespace sepc
