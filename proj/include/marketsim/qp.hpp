#pragma once

#include <memory>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace marketsim {

/// Convex quadratic program in the form
///
///   minimize    0.5 x'Qx + c'x
///   subject to  A_eq x = b_eq
///               lower <= A_in x <= upper   (entries may be +-inf)
///
/// Q must be symmetric positive semidefinite. Rows of A_in with
/// lower == upper are treated as additional equalities.
struct QpProblem {
  int n = 0;
  Eigen::SparseMatrix<double> quadratic_cost;  // n x n
  Eigen::VectorXd linear_cost;                 // n
  Eigen::SparseMatrix<double> eq_matrix;       // me x n
  Eigen::VectorXd eq_rhs;                      // me
  Eigen::SparseMatrix<double> in_matrix;       // mi x n
  Eigen::VectorXd in_lower;                    // mi
  Eigen::VectorXd in_upper;                    // mi

  double objective(const Eigen::VectorXd& x) const;
};

enum class QpStatus { optimal, infeasible, max_iterations };

/// Scaled KKT residual norms. `optimal` guarantees all three <= the solve
/// tolerance. primal is the largest constraint violation divided by
/// (1 + max |rhs|), dual the stationarity residual divided by
/// (1 + max |cost coefficient|), comp the average complementarity gap divided
/// by (1 + |objective|).
struct KktResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double comp = 0.0;
};

struct QpSolution {
  Eigen::VectorXd x;
  /// One multiplier per eq_matrix row. Sign convention: increasing b_eq[i] by
  /// a small delta increases the optimal objective by eq_duals[i] * delta.
  /// When the active set is degenerate (e.g. tied marginal offers) the
  /// multiplier is one valid element of the dual interval.
  Eigen::VectorXd eq_duals;
  QpStatus status = QpStatus::max_iterations;
  KktResiduals kkt;
  int iterations = 0;
};

/// Reusable solver. Keeps the symbolic factorization of the reduced KKT
/// system between calls, which pays off when the same problem structure is
/// solved many times with different cost vectors (the bidding search does
/// exactly that). Not thread-safe; use one instance per thread.
class QpSolver {
 public:
  QpSolver();
  ~QpSolver();
  QpSolver(QpSolver&&) noexcept;
  QpSolver& operator=(QpSolver&&) noexcept;

  QpSolution solve(const QpProblem& p, double tol = 1e-8, int max_iter = 10000);

 private:
  struct Workspace;
  std::unique_ptr<Workspace> ws_;
};

/// One-shot convenience wrapper around QpSolver.
QpSolution solve_qp(const QpProblem& p, double tol = 1e-8, int max_iter = 10000);

}  // namespace marketsim
