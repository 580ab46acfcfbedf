#pragma once

#include <memory>
#include <span>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mcporo/error.hpp"

namespace mcporo {

/// General (non-symmetric, possibly indefinite) sparse direct solver.
///
/// The matrix is equilibrated by power-of-two row and column scalings before
/// LU factorization, so entries spanning twenty orders of magnitude (stiff
/// and soft continua, tiny permeabilities) factor without loss. Every solve
/// runs iterative refinement against the unscaled matrix and fails with
/// `failure_kind` when the componentwise backward error stays above 1e-8.
class SparseDirectSolver {
 public:
  explicit SparseDirectSolver(const Eigen::SparseMatrix<double>& a,
                              ErrorKind failure_kind = ErrorKind::SingularSystem, std::string label = "system");
  ~SparseDirectSolver();
  SparseDirectSolver(SparseDirectSolver&&) noexcept;
  SparseDirectSolver& operator=(SparseDirectSolver&&) noexcept;

  [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  [[nodiscard]] Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

  [[nodiscard]] int size() const;
  /// Largest componentwise backward error max_i |r_i| / (|A||x| + |b|)_i of
  /// the most recent solve.
  [[nodiscard]] double last_backward_error() const { return last_backward_error_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ErrorKind failure_kind_;
  std::string label_;
  mutable double last_backward_error_ = 0.0;
};

/// Componentwise backward error of x for A x = b.
double backward_error(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// Throws SingularSystem if some combination of `modes` (columns, full
/// numbering) vanishes on every constrained dof and is annihilated by the
/// reduced matrix `a_free` up to `rel_tol`. `free_dofs` maps reduced indices
/// to full ones.
void check_kernel_modes(const Eigen::SparseMatrix<double>& a_free, std::span<const int> free_dofs,
                        const Eigen::MatrixXd& modes, const std::string& label, double rel_tol = 1e-8);

}  // namespace mcporo
