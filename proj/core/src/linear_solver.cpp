#include "mcporo/linear_solver.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

namespace mcporo {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

constexpr int kRuizSweeps = 25;
constexpr int kMaxRefinements = 6;
constexpr double kAcceptBackwardError = 1e-8;

double pow2_round(double s) { return std::exp2(std::round(std::log2(s))); }

// |A| |x| + |b|, the componentwise denominator.
Eigen::VectorXd abs_scale(const SpMat& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  Eigen::VectorXd s = b.cwiseAbs();
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      s[it.row()] += std::abs(it.value()) * std::abs(x[it.col()]);
    }
  }
  return s;
}

}  // namespace

double backward_error(const SpMat& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const Eigen::VectorXd r = b - a * x;
  const Eigen::VectorXd s = abs_scale(a, x, b);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (r[i] == 0.0) continue;
    if (s[i] == 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(r[i]) / s[i]);
  }
  return worst;
}

struct SparseDirectSolver::Impl {
  SpMat a;
  Eigen::VectorXd row_scale;
  Eigen::VectorXd col_scale;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
};

SparseDirectSolver::SparseDirectSolver(const SpMat& a, ErrorKind failure_kind, std::string label)
    : impl_(std::make_unique<Impl>()), failure_kind_(failure_kind), label_(std::move(label)) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::InvalidArgument, label_ + ": matrix is not square");
  }
  auto& m = *impl_;
  m.a = a;
  m.a.makeCompressed();
  const auto n = m.a.rows();
  m.row_scale = Eigen::VectorXd::Ones(n);
  m.col_scale = Eigen::VectorXd::Ones(n);

  // Ruiz equilibration: repeatedly divide rows and columns by the square root
  // of their largest entry.
  SpMat work = m.a;
  for (int sweep = 0; sweep < kRuizSweeps; ++sweep) {
    Eigen::VectorXd rmax = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd cmax = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < work.outerSize(); ++k) {
      for (SpMat::InnerIterator it(work, k); it; ++it) {
        const double v = std::abs(it.value());
        rmax[it.row()] = std::max(rmax[it.row()], v);
        cmax[it.col()] = std::max(cmax[it.col()], v);
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (rmax[i] == 0.0 || cmax[i] == 0.0) {
        throw Error(failure_kind_, label_ + ": empty row or column " + std::to_string(i));
      }
    }
    if ((rmax.array() - 1.0).abs().maxCoeff() < 0.5 && (cmax.array() - 1.0).abs().maxCoeff() < 0.5) break;
    const Eigen::VectorXd dr = rmax.cwiseSqrt().cwiseInverse();
    const Eigen::VectorXd dc = cmax.cwiseSqrt().cwiseInverse();
    m.row_scale.array() *= dr.array();
    m.col_scale.array() *= dc.array();
    work = dr.asDiagonal() * work * dc.asDiagonal();
  }
  // Power-of-two scalings make the scaled matrix an exact image of A.
  for (Eigen::Index i = 0; i < n; ++i) {
    m.row_scale[i] = pow2_round(m.row_scale[i]);
    m.col_scale[i] = pow2_round(m.col_scale[i]);
  }
  SpMat scaled = m.row_scale.asDiagonal() * m.a * m.col_scale.asDiagonal();
  scaled.makeCompressed();

  m.lu.analyzePattern(scaled);
  m.lu.factorize(scaled);
  if (m.lu.info() != Eigen::Success) {
    throw Error(failure_kind_, label_ + ": LU factorization failed (" + m.lu.lastErrorMessage() + ")");
  }
}

SparseDirectSolver::~SparseDirectSolver() = default;
SparseDirectSolver::SparseDirectSolver(SparseDirectSolver&&) noexcept = default;
SparseDirectSolver& SparseDirectSolver::operator=(SparseDirectSolver&&) noexcept = default;

int SparseDirectSolver::size() const { return static_cast<int>(impl_->a.rows()); }

Eigen::VectorXd SparseDirectSolver::solve(const Eigen::VectorXd& b) const {
  return solve(Eigen::MatrixXd(b)).col(0);
}

Eigen::MatrixXd SparseDirectSolver::solve(const Eigen::MatrixXd& b) const {
  const auto& m = *impl_;
  if (b.rows() != m.a.rows()) {
    throw Error(ErrorKind::InvalidArgument, label_ + ": right-hand side has wrong length");
  }
  auto apply_inverse = [&](const Eigen::MatrixXd& rhs) -> Eigen::MatrixXd {
    const Eigen::MatrixXd y = m.lu.solve(m.row_scale.asDiagonal() * rhs);
    return m.col_scale.asDiagonal() * y;
  };
  const auto cols = b.cols();
  auto column_errors = [&](const Eigen::MatrixXd& x) {
    Eigen::VectorXd e(cols);
    for (Eigen::Index j = 0; j < cols; ++j) e[j] = backward_error(m.a, x.col(j), b.col(j));
    return e;
  };

  // Refinement continues while it still halves the worst column error.
  Eigen::MatrixXd x = apply_inverse(b);
  Eigen::VectorXd berr = column_errors(x);
  for (int it = 0; it < kMaxRefinements && berr.maxCoeff() > 4.0 * std::numeric_limits<double>::epsilon(); ++it) {
    const Eigen::MatrixXd candidate = x + apply_inverse(b - m.a * x);
    const Eigen::VectorXd next = column_errors(candidate);
    bool improved = false;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (next[j] < berr[j]) {
        x.col(j) = candidate.col(j);
        improved = improved || next[j] <= 0.5 * berr[j];
        berr[j] = next[j];
      }
    }
    if (!improved) break;
  }
  last_backward_error_ = cols > 0 ? berr.maxCoeff() : 0.0;
  if (!x.allFinite() || !(last_backward_error_ <= kAcceptBackwardError)) {
    throw Error(failure_kind_, label_ + ": solve failed, backward error " + std::to_string(last_backward_error_));
  }
  return x;
}

void check_kernel_modes(const SpMat& a_free, std::span<const int> free_dofs, const Eigen::MatrixXd& modes,
                        const std::string& label, double rel_tol) {
  const auto n_full = modes.rows();
  const auto k = modes.cols();
  if (k == 0) return;
  std::vector<char> is_free(static_cast<std::size_t>(n_full), 0);
  for (int d : free_dofs) is_free[static_cast<std::size_t>(d)] = 1;

  Eigen::MatrixXd gram_all = modes.transpose() * modes;
  Eigen::MatrixXd gram_fixed = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < n_full; ++i) {
    if (!is_free[static_cast<std::size_t>(i)]) gram_fixed += modes.row(i).transpose() * modes.row(i);
  }
  const double ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram_all).eigenvalues().maxCoeff();
  if (!(ref > 0.0)) return;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_fixed);
  for (Eigen::Index c = 0; c < k; ++c) {
    if (eig.eigenvalues()[c] > 1e-12 * ref) continue;
    const Eigen::VectorXd full = modes * eig.eigenvectors().col(c);
    Eigen::VectorXd z(static_cast<Eigen::Index>(free_dofs.size()));
    for (std::size_t i = 0; i < free_dofs.size(); ++i) z[static_cast<Eigen::Index>(i)] = full[free_dofs[i]];
    if (z.cwiseAbs().maxCoeff() == 0.0) continue;
    const Eigen::VectorXd az = a_free * z;
    const double denom = abs_scale(a_free, z, Eigen::VectorXd::Zero(z.size())).maxCoeff();
    if (denom == 0.0 || az.cwiseAbs().maxCoeff() <= rel_tol * denom) {
      throw Error(ErrorKind::SingularSystem,
                  label + ": operator has an unconstrained kernel (rigid motion or constant pressure); "
                          "add Dirichlet conditions");
    }
  }
}

}  // namespace mcporo
