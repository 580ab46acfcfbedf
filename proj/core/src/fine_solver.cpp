#include "mcporo/fine_solver.hpp"

#include "mcporo/error.hpp"

namespace mcporo {

void TimeGrid::validate() const {
  if (!(t_max > 0.0) || n_steps < 1) {
    throw Error(ErrorKind::InvalidArgument, "time grid needs t_max > 0 and at least one step");
  }
}

FineState interpolate_state(const FineMesh& mesh, const VectorField& u0, const ScalarField& p0, double t) {
  const int n = mesh.node_count();
  FineState s{Vector::Zero(3 * n), t};
  for (int i = 0; i < n; ++i) {
    const Point& x = mesh.node(i);
    if (u0) {
      const auto u = u0(x);
      s.x[i] = u[0];
      s.x[n + i] = u[1];
    }
    if (p0) s.x[2 * n + i] = p0(x);
  }
  return s;
}

Eigen::MatrixXd rigid_modes(const FineMesh& mesh, bool with_pressure) {
  const int n = mesh.node_count();
  const Point c = mesh.bbox().center();
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3 * n, with_pressure ? 4 : 3);
  for (int i = 0; i < n; ++i) {
    const Point& x = mesh.node(i);
    z(i, 0) = 1.0;
    z(n + i, 1) = 1.0;
    z(i, 2) = -(x.y - c.y);
    z(n + i, 2) = x.x - c.x;
    if (with_pressure) z(2 * n + i, 3) = 1.0;
  }
  return z;
}

namespace {

void check_problem(const FineProblem& problem) {
  if (problem.mesh == nullptr) throw Error(ErrorKind::InvalidArgument, "fine problem has no mesh");
  problem.material.validate();
}

}  // namespace

FineSolver::FineSolver(const FineProblem& problem, double tau) : tau_(tau) {
  check_problem(problem);
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "time step must be positive");
  const FineMesh& mesh = *problem.mesh;
  ops_ = assemble_biot(mesh, problem.material);
  temporal_ = ops_.temporal();
  load_ = assemble_loads(mesh, problem.body_force, problem.source).combined();
  constraints_ = collect_dirichlet(mesh, DofLayout(mesh.node_count()), problem.boundary);

  const SparseOperator system = ops_.spatial() + temporal_ / tau;
  const SparseOperator reduced = constraints_.free_block(system);
  coupling_ = constraints_.coupling_block(system);
  check_kernel_modes(reduced, constraints_.free_dofs(), rigid_modes(mesh, false), "fine system");
  solver_ = std::make_unique<SparseDirectSolver>(reduced, ErrorKind::SingularSystem, "fine system");
}

FineState FineSolver::step(const FineState& state) const {
  if (state.x.size() != constraints_.size()) throw Error(ErrorKind::InvalidArgument, "state size mismatch");
  const Vector rhs = load_ + temporal_ * state.x / tau_;
  Vector b = constraints_.restrict(rhs);
  if (!constraints_.fixed_dofs().empty()) b -= coupling_ * constraints_.fixed_values();
  return {constraints_.expand(solver_->solve(b)), state.t + tau_};
}

FineState solve_steady(const FineProblem& problem) {
  check_problem(problem);
  const FineMesh& mesh = *problem.mesh;
  const BiotOperators ops = assemble_biot(mesh, problem.material);
  const Vector load = assemble_loads(mesh, problem.body_force, problem.source).combined();
  const Constraints c = collect_dirichlet(mesh, DofLayout(mesh.node_count()), problem.boundary);
  const ConstrainedSystem sys = apply_dirichlet(ops.spatial(), load, c);
  check_kernel_modes(sys.matrix, c.free_dofs(), rigid_modes(mesh, true), "steady fine system");
  const SparseDirectSolver solver(sys.matrix, ErrorKind::SingularSystem, "steady fine system");
  return {c.expand(solver.solve(sys.rhs)), 0.0};
}

std::vector<FineState> solve_transient(const FineProblem& problem, const TimeGrid& grid, const FineState& initial,
                                       const std::function<void(int, const FineState&)>& on_step) {
  grid.validate();
  const FineSolver solver(problem, grid.tau());
  std::vector<FineState> states;
  states.reserve(static_cast<std::size_t>(grid.n_steps) + 1);
  states.push_back(initial);
  for (int n = 1; n <= grid.n_steps; ++n) {
    FineState next = solver.step(states.back());
    next.t = initial.t + n * grid.tau();
    states.push_back(std::move(next));
    if (on_step) on_step(n, states.back());
  }
  return states;
}

double fine_energy(const BiotOperators& ops, const FineState& state) {
  const int n = state.node_count();
  const Vector u = state.x.head(2 * n);
  const Vector p = state.p();
  return 0.5 * u.dot(ops.elasticity * u) + 0.5 * p.dot(ops.storage * p);
}

}  // namespace mcporo
