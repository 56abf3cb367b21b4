#include "marketsim/qp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

namespace marketsim {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_abs_coeff(const SpMat& m) {
  double v = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
  return v;
}

void append_triplets(std::vector<Triplet>& out, const SpMat& m, int row0, int col0,
                     double scale = 1.0) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      out.emplace_back(row0 + static_cast<int>(it.row()), col0 + static_cast<int>(it.col()),
                       scale * it.value());
}

void check_well_formed(const QpProblem& p) {
  if (p.n < 0) throw std::invalid_argument("qp: negative variable count");
  if (p.quadratic_cost.rows() != p.n || p.quadratic_cost.cols() != p.n)
    throw std::invalid_argument("qp: quadratic_cost must be n x n");
  if (p.linear_cost.size() != p.n) throw std::invalid_argument("qp: linear_cost must have length n");
  if (p.eq_matrix.rows() != p.eq_rhs.size() || (p.eq_matrix.rows() > 0 && p.eq_matrix.cols() != p.n))
    throw std::invalid_argument("qp: equality constraint dimensions inconsistent");
  if (p.in_matrix.rows() != p.in_lower.size() || p.in_matrix.rows() != p.in_upper.size() ||
      (p.in_matrix.rows() > 0 && p.in_matrix.cols() != p.n))
    throw std::invalid_argument("qp: inequality constraint dimensions inconsistent");
  for (Eigen::Index i = 0; i < p.in_lower.size(); ++i) {
    if (p.in_lower[i] > p.in_upper[i])
      throw std::invalid_argument("qp: inequality row with lower > upper");
  }
  SpMat qt = SpMat(p.quadratic_cost.transpose());
  SpMat diff = p.quadratic_cost - qt;
  const double tol = 1e-9 * (1.0 + max_abs_coeff(p.quadratic_cost));
  if (max_abs_coeff(diff) > tol)
    throw std::invalid_argument("qp: quadratic_cost must be symmetric");
}

}  // namespace

double QpProblem::objective(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(quadratic_cost * x) + linear_cost.dot(x);
}

struct QpSolver::Workspace {
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt;
  std::vector<int> pat_outer;
  std::vector<int> pat_inner;
  bool analyzed = false;

  // Factorizes K, re-running the symbolic analysis only when the sparsity
  // pattern changed since the previous call.
  bool factorize(const SpMat& K) {
    const int cols = static_cast<int>(K.cols());
    const int nnz = static_cast<int>(K.nonZeros());
    bool same = analyzed && static_cast<int>(pat_outer.size()) == cols + 1 &&
                static_cast<int>(pat_inner.size()) == nnz;
    if (same) {
      same = std::equal(pat_outer.begin(), pat_outer.end(), K.outerIndexPtr()) &&
             std::equal(pat_inner.begin(), pat_inner.end(), K.innerIndexPtr());
    }
    if (!same) {
      ldlt.analyzePattern(K);
      pat_outer.assign(K.outerIndexPtr(), K.outerIndexPtr() + cols + 1);
      pat_inner.assign(K.innerIndexPtr(), K.innerIndexPtr() + nnz);
      analyzed = true;
    }
    ldlt.factorize(K);
    return ldlt.info() == Eigen::Success;
  }
};

QpSolver::QpSolver() : ws_(std::make_unique<Workspace>()) {}
QpSolver::~QpSolver() = default;
QpSolver::QpSolver(QpSolver&&) noexcept = default;
QpSolver& QpSolver::operator=(QpSolver&&) noexcept = default;

QpSolution QpSolver::solve(const QpProblem& p, double tol, int max_iter) {
  check_well_formed(p);
  const int n = p.n;
  const int me_user = static_cast<int>(p.eq_matrix.rows());

  // Split two-sided inequality rows into one-sided rows G x <= h; rows with
  // lower == upper become extra equalities.
  std::vector<Triplet> a_trip, g_trip;
  append_triplets(a_trip, p.eq_matrix, 0, 0);
  std::vector<double> b_all(p.eq_rhs.data(), p.eq_rhs.data() + p.eq_rhs.size());
  std::vector<double> h_vals;
  {
    Eigen::SparseMatrix<double, Eigen::RowMajor> rm(p.in_matrix);
    for (int i = 0; i < rm.rows(); ++i) {
      const double lo = p.in_lower[i];
      const double up = p.in_upper[i];
      if (std::isinf(lo) && std::isinf(up)) continue;
      if (lo == up) {
        const int r = static_cast<int>(b_all.size());
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rm, i); it; ++it)
          a_trip.emplace_back(r, static_cast<int>(it.col()), it.value());
        b_all.push_back(lo);
        continue;
      }
      if (up < kInf) {
        const int r = static_cast<int>(h_vals.size());
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rm, i); it; ++it)
          g_trip.emplace_back(r, static_cast<int>(it.col()), it.value());
        h_vals.push_back(up);
      }
      if (lo > -kInf) {
        const int r = static_cast<int>(h_vals.size());
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rm, i); it; ++it)
          g_trip.emplace_back(r, static_cast<int>(it.col()), -it.value());
        h_vals.push_back(-lo);
      }
    }
  }

  const int me = static_cast<int>(b_all.size());
  const int mi = static_cast<int>(h_vals.size());
  SpMat A(me, n), G(mi, n);
  A.setFromTriplets(a_trip.begin(), a_trip.end());
  G.setFromTriplets(g_trip.begin(), g_trip.end());
  const VectorXd b = Eigen::Map<const VectorXd>(b_all.data(), me);
  const VectorXd h = Eigen::Map<const VectorXd>(h_vals.data(), mi);
  const SpMat At = SpMat(A.transpose());
  const SpMat Gt = SpMat(G.transpose());
  const VectorXd& c = p.linear_cost;
  const SpMat& Q = p.quadratic_cost;

  const double q_scale = max_abs_coeff(Q);
  const double c_scale = 1.0 + c.cwiseAbs().maxCoeff() + q_scale;
  double b_scale = 1.0;
  if (me > 0) b_scale = std::max(b_scale, b.cwiseAbs().maxCoeff());
  if (mi > 0) b_scale = std::max(b_scale, h.cwiseAbs().maxCoeff());
  b_scale += 1.0;
  const double reg = 1e-11 * (1.0 + q_scale + max_abs_coeff(A) + max_abs_coeff(G));

  const int N = n + me;
  SpMat identity_n(n, n);
  identity_n.setIdentity();

  auto assemble_kkt = [&](const SpMat& H) {
    std::vector<Triplet> trip;
    trip.reserve(H.nonZeros() + 2 * At.nonZeros() + me);
    append_triplets(trip, H, 0, 0);
    append_triplets(trip, A, n, 0);
    append_triplets(trip, At, 0, n);
    for (int i = 0; i < me; ++i) trip.emplace_back(n + i, n + i, -reg);
    SpMat K(N, N);
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
  };

  // Refine [dx; v] against the unregularized system [[H - rho I, A'],[A, 0]].
  // Keeps the best iterate: a diverging refinement pass is rolled back.
  // Returns the final relative residual so callers can reject a direction the
  // factorization failed to deliver.
  auto refine = [&](const SpMat& H, double rho, const VectorXd& rhs, VectorXd& sol) {
    auto residual = [&](const VectorXd& cand) {
      VectorXd r(N);
      r.head(n) = rhs.head(n) - (H * cand.head(n) - rho * cand.head(n) + At * cand.tail(me));
      r.tail(me) = rhs.tail(me) - A * cand.head(n);
      return r;
    };
    VectorXd r = residual(sol);
    double best = r.cwiseAbs().maxCoeff();
    for (int pass = 0; pass < 4; ++pass) {
      VectorXd cand = sol + ws_->ldlt.solve(r);
      VectorXd rc = residual(cand);
      const double nc = rc.cwiseAbs().maxCoeff();
      if (!(nc < 0.5 * best)) break;
      sol = std::move(cand);
      r = std::move(rc);
      best = nc;
    }
    const double rhs_norm = rhs.cwiseAbs().maxCoeff();
    return best / (1.0 + rhs_norm);
  };

  QpSolution sol;
  sol.x = VectorXd::Zero(n);
  sol.eq_duals = VectorXd::Zero(me_user);

  auto finish = [&](const VectorXd& x, const VectorXd& y, QpStatus status, KktResiduals kkt,
                    int iters) {
    sol.x = x;
    if (me_user > 0) sol.eq_duals = y.head(me_user);
    sol.status = status;
    sol.kkt = kkt;
    sol.iterations = iters;
    return sol;
  };

  // Pure equality-constrained problems collapse to one linear KKT solve.
  if (mi == 0) {
    const double rho = reg;
    SpMat H = Q + rho * identity_n;
    SpMat K = assemble_kkt(H);
    if (!ws_->factorize(K)) {
      return finish(VectorXd::Zero(n), VectorXd::Zero(me), QpStatus::max_iterations, {}, 0);
    }
    VectorXd rhs(N);
    rhs.head(n) = -c;
    rhs.tail(me) = b;
    VectorXd xy = ws_->ldlt.solve(rhs);
    refine(H, rho, rhs, xy);
    const VectorXd x = xy.head(n);
    const VectorXd y = -xy.tail(me);
    KktResiduals kkt;
    kkt.dual = (Q * x + c - At * y).cwiseAbs().maxCoeff() / c_scale;
    kkt.primal = me > 0 ? (A * x - b).cwiseAbs().maxCoeff() / b_scale : 0.0;
    kkt.comp = 0.0;
    QpStatus st = QpStatus::optimal;
    if (kkt.primal > tol || kkt.dual > tol)
      st = kkt.primal > std::sqrt(tol) ? QpStatus::infeasible : QpStatus::max_iterations;
    return finish(x, y, st, kkt, 1);
  }

  // Mehrotra predictor-corrector on the slack form
  //   A x = b,  G x + s = h,  s >= 0,  z >= 0,  s.z -> 0.
  // The multiplier convention makes eq_duals the objective sensitivity to b.
  VectorXd x(n), y(me), s(mi), z(mi);
  {
    const double w0 = std::max(1.0, c_scale);
    SpMat H0 = Q + w0 * SpMat(Gt * G) + w0 * identity_n;
    SpMat K0 = assemble_kkt(H0);
    VectorXd rhs(N);
    rhs.head(n) = -c;
    rhs.tail(me) = b;
    if (ws_->factorize(K0)) {
      VectorXd xy = ws_->ldlt.solve(rhs);
      x = xy.head(n);
      y = -xy.tail(me);
    } else {
      x.setZero();
      y.setZero();
    }
    // Mehrotra-style shifts: center the starting slacks and multipliers so
    // the first complementarity products share a common scale.
    VectorXd s_tilde = h - G * x;
    VectorXd z_tilde = VectorXd::Constant(mi, std::max(1.0, std::sqrt(c_scale)));
    const double shift_s = std::max(0.0, -1.5 * s_tilde.minCoeff());
    VectorXd s_hat = s_tilde.array() + shift_s;
    const double mu_hat = s_hat.dot(z_tilde);
    const double dsh = 0.5 * mu_hat / z_tilde.sum();
    const double dzh = 0.5 * mu_hat / s_hat.sum();
    s = s_hat.array() + dsh;
    z = z_tilde.array() + dzh;
  }

  KktResiduals kkt;
  struct BestIterate {
    VectorXd x, y;
    KktResiduals kkt;
    double merit = kInf;
  } best;
  double stall_ref = kInf;
  int stall = 0;
  int explosions = 0;
  int it = 0;
  bool converged = false;
  double rho = reg;

  for (; it < max_iter; ++it) {
    const VectorXd r_d = Q * x + c - At * y + Gt * z;
    const VectorXd r_p = me > 0 ? VectorXd(A * x - b) : VectorXd();
    const VectorXd r_g = G * x + s - h;
    const double mu = s.dot(z) / mi;

    kkt.dual = r_d.cwiseAbs().maxCoeff() / c_scale;
    kkt.primal = r_g.cwiseAbs().maxCoeff();
    if (me > 0) kkt.primal = std::max(kkt.primal, r_p.cwiseAbs().maxCoeff());
    kkt.primal /= b_scale;
    kkt.comp = mu / (1.0 + std::abs(p.objective(x)));

    const double merit = std::max({kkt.primal, kkt.dual, kkt.comp});
    if (std::getenv("MARKETSIM_QP_TRACE"))
      std::fprintf(stderr, "it=%3d primal=%.3e dual=%.3e comp=%.3e mu=%.3e\n", it, kkt.primal,
                   kkt.dual, kkt.comp, mu);
    if (kkt.primal <= tol && kkt.dual <= tol && kkt.comp <= tol) {
      converged = true;
      break;
    }
    if (merit < best.merit) {
      best.x = x;
      best.y = y;
      best.kkt = kkt;
      best.merit = merit;
    }
    // A few explosion-recovery cycles are normal when the scaling matrix gets
    // extreme near the solution; persistent plateaus and runaway multipliers
    // are not.
    if (best.merit < 1e-7 && merit > 1e3 * best.merit && ++explosions >= 3) break;
    if (merit < 0.9 * stall_ref) {
      stall_ref = merit;
      stall = 0;
    } else if (++stall >= 25) {
      break;
    }
    if (y.size() > 0 && y.cwiseAbs().maxCoeff() > 1e13) break;
    if (z.maxCoeff() > 1e13) break;

    auto solve_direction = [&](const SpMat& H, const VectorXd& r_comp, VectorXd& dx, VectorXd& dy,
                               VectorXd& ds, VectorXd& dz) {
      VectorXd rhs(N);
      rhs.head(n) = -r_d + Gt * ((r_comp - z.cwiseProduct(r_g)).cwiseQuotient(s));
      rhs.tail(me) = me > 0 ? VectorXd(-r_p) : VectorXd();
      VectorXd xy = ws_->ldlt.solve(rhs);
      const double quality = refine(H, rho, rhs, xy);
      dx = xy.head(n);
      dy = -xy.tail(me);
      ds = -r_g - G * dx;
      dz = (-r_comp - z.cwiseProduct(ds)).cwiseQuotient(s);
      return quality;
    };

    auto max_step = [](const VectorXd& v, const VectorXd& dv) {
      double a = 1.0;
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
      return a;
    };

    // Factor and compute both directions, escalating the regularization when
    // the KKT system cannot be solved to adequate accuracy.
    const VectorXd w = z.cwiseQuotient(s);
    VectorXd dx, dy, ds, dz;
    bool have_direction = false;
    for (int attempt = 0; attempt < 4 && !have_direction; ++attempt) {
      SpMat H = Q + SpMat(Gt * w.asDiagonal() * G) + rho * identity_n;
      SpMat K = assemble_kkt(H);
      if (!ws_->factorize(K)) {
        rho *= 100.0;
        continue;
      }

      // Affine scaling (predictor) direction.
      VectorXd dx_a, dy_a, ds_a, dz_a;
      if (solve_direction(H, s.cwiseProduct(z), dx_a, dy_a, ds_a, dz_a) > 1e-2) {
        rho *= 100.0;
        continue;
      }
      const double ap_a = max_step(s, ds_a);
      const double ad_a = max_step(z, dz_a);
      const double mu_aff = (s + ap_a * ds_a).dot(z + ad_a * dz_a) / mi;
      const double mu_safe = std::max(mu, 1e-300);
      double sigma = std::pow(std::max(mu_aff, 0.0) / mu_safe, 3.0);
      sigma = std::clamp(sigma, 1e-8, 0.99);

      // Corrector direction reuses the factorization.
      VectorXd r_comp = s.cwiseProduct(z) + ds_a.cwiseProduct(dz_a);
      r_comp.array() -= sigma * mu;
      if (solve_direction(H, r_comp, dx, dy, ds, dz) > 1e-2) {
        rho *= 100.0;
        continue;
      }
      have_direction = true;
    }
    if (!have_direction) break;

    const double tau = mu < 1e-6 * c_scale ? 0.9995 : 0.995;
    const double ap = std::min(1.0, tau * max_step(s, ds));
    const double ad = std::min(1.0, tau * max_step(z, dz));
    if (ap < 1e-14 && ad < 1e-14) {
      ++stall;
      if (stall >= 25) break;
    }

    x += ap * dx;
    s += ap * ds;
    y += ad * dy;
    z += ad * dz;
  }

  if (!converged && best.merit < std::max({kkt.primal, kkt.dual, kkt.comp})) {
    x = best.x;
    y = best.y;
    kkt = best.kkt;
  }
  QpStatus st;
  if (converged) {
    st = QpStatus::optimal;
  } else if (kkt.primal > std::sqrt(tol)) {
    st = QpStatus::infeasible;
  } else {
    st = QpStatus::max_iterations;
  }
  return finish(x, y, st, kkt, it);
}

QpSolution solve_qp(const QpProblem& p, double tol, int max_iter) {
  QpSolver solver;
  return solver.solve(p, tol, max_iter);
}

}  // namespace marketsim
