#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mcporo/assembly.hpp"
#include "mcporo/boundary.hpp"
#include "mcporo/linear_solver.hpp"

namespace mcporo {

struct TimeGrid {
  double t_max = 1.0;
  int n_steps = 1;

  [[nodiscard]] double tau() const { return t_max / n_steps; }
  /// Throws InvalidArgument unless t_max > 0 and n_steps >= 1.
  void validate() const;
};

/// Nodal (u1, u2, p) in DofLayout order at time t.
struct FineState {
  Vector x;
  double t = 0.0;

  [[nodiscard]] int node_count() const { return static_cast<int>(x.size() / 3); }
  [[nodiscard]] auto u1() const { return x.segment(0, node_count()); }
  [[nodiscard]] auto u2() const { return x.segment(node_count(), node_count()); }
  [[nodiscard]] auto p() const { return x.segment(2 * node_count(), node_count()); }
};

struct FineProblem {
  const FineMesh* mesh = nullptr;
  MaterialField material;
  BoundarySpec boundary;
  VectorField body_force;  // f; empty means zero
  ScalarField source;      // g; empty means zero
};

/// Nodal interpolant of (u0, p0). Empty fields mean zero.
FineState interpolate_state(const FineMesh& mesh, const VectorField& u0, const ScalarField& p0, double t = 0.0);

/// Backward Euler for the coupled system:
///   (A + T / tau) x^{n+1} = L + (T / tau) x^n
/// with A = [[A_u, G], [0, A_p]] and T = [[0, 0], [D, M]]. The per-step
/// operator is time-independent, so it is reduced and factored once.
class FineSolver {
 public:
  FineSolver(const FineProblem& problem, double tau);

  [[nodiscard]] FineState step(const FineState& state) const;
  [[nodiscard]] const BiotOperators& operators() const { return ops_; }
  [[nodiscard]] double tau() const { return tau_; }

 private:
  BiotOperators ops_;
  SparseOperator temporal_;
  SparseOperator coupling_;  // rows free, columns fixed
  Vector load_;
  Constraints constraints_;
  std::unique_ptr<SparseDirectSolver> solver_;
  double tau_;
};

/// Steady problem A x = L (no time derivative terms).
FineState solve_steady(const FineProblem& problem);

/// Initial state followed by n_steps backward-Euler states.
std::vector<FineState> solve_transient(const FineProblem& problem, const TimeGrid& grid, const FineState& initial,
                                       const std::function<void(int, const FineState&)>& on_step = {});

/// Rigid motions of the displacement (two translations and the rotation about
/// the mesh centre), plus the constant pressure when `with_pressure` is set,
/// as columns in DofLayout order.
Eigen::MatrixXd rigid_modes(const FineMesh& mesh, bool with_pressure);

/// 1/2 a^u(u, u) + 1/2 b^p(p, p).
double fine_energy(const BiotOperators& ops, const FineState& state);

}  // namespace mcporo
