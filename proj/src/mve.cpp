#include "sepc/mve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "sepc/errors.hpp"

namespace sepc {

Eigen::Index affine_rank(const Eigen::MatrixXd& points, double rel_tol) {
  if (points.rows() == 0) return 0;
  const Eigen::RowVectorXd mean = points.colwise().mean();
  const Eigen::MatrixXd centered = points.rowwise() - mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++rank;
  }
  return rank;
}

namespace {

// State for the dual ascent: lifted points Q = [P 1], weights u on the
// simplex, the inverse of Lambda(u) = Q^T diag(u) Q, and the dual values
// M_i = q_i^T Lambda^{-1} q_i. M and Linv are updated by rank-1 formulas
// and rebuilt from scratch periodically to shed rounding drift.
struct AscentState {
  Eigen::MatrixXd q;
  Eigen::VectorXd u;
  Eigen::MatrixXd linv;
  Eigen::VectorXd m;

  void rebuild() {
    u /= u.sum();
    const Eigen::Index d = q.cols();
    const Eigen::MatrixXd lambda = q.transpose() * u.asDiagonal() * q;
    Eigen::LDLT<Eigen::MatrixXd> f(lambda);
    if (f.info() != Eigen::Success || !f.isPositive()) {
      throw RankDeficient("weighted scatter matrix lost rank");
    }
    linv = f.solve(Eigen::MatrixXd::Identity(d, d));
    m = (q * linv).cwiseProduct(q).rowwise().sum();
  }
};

}  // namespace

MveSolution mve_fit(const Eigen::MatrixXd& points, double tol_fit) {
  const Eigen::Index n_rows = points.rows();
  const Eigen::Index n = points.cols();
  if (n < 1) throw InvalidParam("points need at least one feature");
  if (tol_fit <= 0.0) throw InvalidParam("tol_fit must be positive");
  if (!points.allFinite()) throw InvalidParam("non-finite input point");
  if (n_rows <= n) {
    throw TooFewPoints(std::to_string(n_rows) + " points in " +
                       std::to_string(n) + "-d; need more points than features");
  }
  if (affine_rank(points) < n) {
    throw RankDeficient("points span an affine subspace of dimension < " +
                        std::to_string(n));
  }

  const Eigen::Index d = n + 1;
  AscentState st;
  st.q.resize(n_rows, d);
  st.q.leftCols(n) = points;
  st.q.col(n).setOnes();
  st.u = Eigen::VectorXd::Constant(n_rows, 1.0 / static_cast<double>(n_rows));
  st.rebuild();

  const int max_iter = 500000;
  const int rebuild_every = 512;
  const double dd = static_cast<double>(d);
  int it = 0;
  bool fresh = true;

  while (true) {
    Eigen::Index jp = 0;
    st.m.maxCoeff(&jp);
    Eigen::Index jm = -1;
    double m_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n_rows; ++i) {
      if (st.u(i) > 0.0 && st.m(i) < m_min) {
        m_min = st.m(i);
        jm = i;
      }
    }
    const double eps_plus = st.m(jp) / dd - 1.0;
    const double eps_minus = 1.0 - m_min / dd;

    if (eps_plus <= tol_fit && eps_minus <= tol_fit) {
      if (fresh) break;
      st.rebuild();  // confirm on exact values before accepting
      fresh = true;
      continue;
    }

    // Add step toward the worst violator, or drop weight from the most
    // interior support point, whichever violation is larger.
    const bool away = eps_minus > eps_plus;
    const Eigen::Index j = away ? jm : jp;
    const double kappa = st.m(j);
    double beta = (kappa - dd) / (dd * (kappa - 1.0));
    bool clamped = false;
    if (away) {
      const double beta_min = -st.u(j) / (1.0 - st.u(j));
      if (beta < beta_min) {
        beta = beta_min;
        clamped = true;
      }
    }

    st.u *= (1.0 - beta);
    st.u(j) += beta;
    if (clamped) st.u(j) = 0.0;

    const Eigen::VectorXd lq = st.linv * st.q.row(j).transpose();
    const double denom = 1.0 - beta + beta * kappa;
    const Eigen::VectorXd g = st.q * lq;
    st.m = (st.m - (beta / denom) * g.cwiseProduct(g)) / (1.0 - beta);
    st.linv = (st.linv - (beta / denom) * (lq * lq.transpose())) / (1.0 - beta);
    fresh = false;

    if (++it % rebuild_every == 0) {
      st.rebuild();
      fresh = true;
    }
    if (it >= max_iter) {
      throw NonConvergence("ellipsoid fit stalled at gap " +
                           std::to_string(n * std::max(eps_plus, 0.0)));
    }
  }

  // Recover the ellipsoid in center form. The Schur identity gives
  // (p_i - c)^T Sigma^{-1} (p_i - c) = M_i - 1, so scaling Sigma^{-1} by
  // the largest M_i - 1 puts the outermost point exactly on the boundary.
  const Eigen::VectorXd c = points.transpose() * st.u;
  Eigen::MatrixXd sigma =
      points.transpose() * st.u.asDiagonal() * points - c * c.transpose();
  sigma = 0.5 * (sigma + sigma.transpose());
  const double kappa_max = st.m.maxCoeff();
  const double scale = kappa_max - 1.0;
  if (!(scale > 0.0)) throw NonConvergence("degenerate dual scale");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw RankDeficient("covering ellipsoid collapsed");
  }
  const Eigen::VectorXd inv_axes =
      (scale * es.eigenvalues().array()).rsqrt().matrix();
  Eigen::MatrixXd a =
      es.eigenvectors() * inv_axes.asDiagonal() * es.eigenvectors().transpose();
  a = 0.5 * (a + a.transpose());

  MveSolution sol;
  sol.ellipsoid.shape = std::move(a);
  sol.ellipsoid.offset = -sol.ellipsoid.shape * c;
  sol.support_weights = st.u;
  sol.duality_gap =
      static_cast<double>(n) * std::max(kappa_max / dd - 1.0, 0.0);
  sol.iterations = it;
  return sol;
}

}  // namespace sepc
