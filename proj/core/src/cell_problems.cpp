#include "mcporo/cell_problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "mcporo/error.hpp"
#include "mcporo/linear_solver.hpp"

namespace mcporo {

std::string_view to_string(CellFamily family) {
  switch (family) {
    case CellFamily::AvgDisplacement:
      return "avg_u";
    case CellFamily::AvgPressure:
      return "avg_p";
    case CellFamily::GradDisplacement:
      return "grad_u";
    case CellFamily::GradPressure:
      return "grad_p";
  }
  return "?";
}

int cell_column(const CellKey& key, int n) {
  const bool ok_i = key.i >= 0 && key.i < n;
  const bool ok_s = key.s >= 0 && key.s < 2;
  const bool ok_m = key.m >= 0 && key.m < 2;
  switch (key.family) {
    case CellFamily::AvgDisplacement:
      if (ok_i && ok_s) return key.i * 2 + key.s;
      break;
    case CellFamily::AvgPressure:
      if (ok_i) return 2 * n + key.i;
      break;
    case CellFamily::GradDisplacement:
      if (ok_i && ok_s && ok_m) return 3 * n + (key.i * 2 + key.s) * 2 + key.m;
      break;
    case CellFamily::GradPressure:
      if (ok_i && ok_m) return 7 * n + key.i * 2 + key.m;
      break;
  }
  throw Error(ErrorKind::InvalidArgument, "invalid cell problem index");
}

CellKey cell_key(int c, int n) {
  if (c < 0 || c >= cell_problem_count(n)) throw Error(ErrorKind::InvalidArgument, "cell column out of range");
  if (c < 2 * n) return {CellFamily::AvgDisplacement, c / 2, c % 2, -1};
  if (c < 3 * n) return {CellFamily::AvgPressure, c - 2 * n, -1, -1};
  if (c < 7 * n) {
    const int r = c - 3 * n;
    return {CellFamily::GradDisplacement, r / 4, (r / 2) % 2, r % 2};
  }
  const int r = c - 7 * n;
  return {CellFamily::GradPressure, r / 2, -1, r % 2};
}

int CellBasisSet::column(const CellKey& key) const {
  const auto it = std::find(keys.begin(), keys.end(), key);
  if (it == keys.end()) {
    throw Error(ErrorKind::InvalidArgument, "cell problem " + std::string(to_string(key.family)) + " not solved");
  }
  return static_cast<int>(it - keys.begin());
}

namespace {

// Weight of the rotation moment for displacement component s at x.
double rotation_weight(int s, const Point& x, const Point& c) { return s == 0 ? -(x.y - c.y) : (x.x - c.x); }

double coordinate(int m, const Point& x, const Point& c) { return m == 0 ? x.x - c.x : x.y - c.y; }

}  // namespace

CellConstraints build_cell_constraints(const RVERegion& region, const ContinuumMap& cont) {
  const FineMesh& mesh = region.submesh;
  const int n = mesh.node_count();
  const int nc = cont.n_continua();
  const int n_sub = region.sub_rve_count();
  if (cont.size() != mesh.element_count()) {
    throw Error(ErrorKind::InvalidArgument, "continuum map does not match region submesh");
  }

  CellConstraints out;
  out.rotation_row = (n_sub == 1);
  const int rows = n_sub * nc * 3 + (out.rotation_row ? 1 : 0);
  const int rot = rows - 1;

  // Centroid of the central RVE.
  double area_center = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    if (region.element_sub_rve[static_cast<std::size_t>(e)] != region.center_index) continue;
    const double a = mesh.area(e);
    const Point g = mesh.centroid(e);
    area_center += a;
    cx += a * g.x;
    cy += a * g.y;
  }
  out.center = {cx / area_center, cy / area_center};
  const Point c = out.center;

  out.sub_rve_areas.assign(static_cast<std::size_t>(n_sub * nc), 0.0);
  // First moments int_{R^l} (x_m - c_m) psi_j and rotation targets
  // int_R psi_j w_s (x_m - c_m)^k, k = 0, 1.
  std::vector<std::array<double, 2>> first(static_cast<std::size_t>(n_sub * nc), {0.0, 0.0});
  std::vector<std::array<double, 2>> rot_avg(static_cast<std::size_t>(nc), {0.0, 0.0});
  std::vector<std::array<std::array<double, 2>, 2>> rot_grad(static_cast<std::size_t>(nc), std::array<std::array<double, 2>, 2>{});

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.element_count()) * (out.rotation_row ? 15 : 9));
  for (int e = 0; e < mesh.element_count(); ++e) {
    const int l = region.element_sub_rve[static_cast<std::size_t>(e)];
    const int j = cont[e];
    const auto lj = static_cast<std::size_t>(l * nc + j);
    const auto& t = mesh.triangle(e);
    const double a = mesh.area(e);
    const Point g = mesh.centroid(e);
    out.sub_rve_areas[lj] += a;
    first[lj][0] += a * (g.x - c.x);
    first[lj][1] += a * (g.y - c.y);
    for (int f = 0; f < 3; ++f) {
      const int row = (l * nc + j) * 3 + f;
      for (int v = 0; v < 3; ++v) trip.emplace_back(row, f * n + t[static_cast<std::size_t>(v)], a / 3.0);
    }
    if (!out.rotation_row) continue;
    // Mid-edge rule: exact for the quadratic integrands below.
    const auto q = mid_edge_points(mesh, e);
    for (int k = 0; k < 3; ++k) {
      const Point& x = q[static_cast<std::size_t>(k)];
      const double w = a / 3.0;
      for (int s = 0; s < 2; ++s) {
        const double ws = rotation_weight(s, x, c);
        for (int v = 0; v < 3; ++v) {
          if (v == k) continue;
          trip.emplace_back(rot, s * n + t[static_cast<std::size_t>(v)], w * 0.5 * ws);
        }
        rot_avg[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] += w * ws;
        for (int m = 0; m < 2; ++m) {
          rot_grad[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)][static_cast<std::size_t>(m)] +=
              w * ws * coordinate(m, x, c);
        }
      }
    }
  }

  for (int l = 0; l < n_sub; ++l) {
    for (int j = 0; j < nc; ++j) {
      if (!(out.sub_rve_areas[static_cast<std::size_t>(l * nc + j)] > 0.0)) {
        throw Error(ErrorKind::ContinuumStarvation,
                    "sub-RVE " + std::to_string(region.sub_blocks[static_cast<std::size_t>(l)]) + " of block " +
                        std::to_string(region.center_block) + " contains no element of continuum " +
                        std::to_string(j + 1));
      }
    }
  }

  out.matrix = SparseOperator(rows, 3 * n);
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  out.matrix.makeCompressed();

  const int n_cols = cell_problem_count(nc);
  out.targets = Eigen::MatrixXd::Zero(rows, n_cols);
  for (int col = 0; col < n_cols; ++col) {
    const CellKey key = cell_key(col, nc);
    const auto i = static_cast<std::size_t>(key.i);
    for (int l = 0; l < n_sub; ++l) {
      const auto li = static_cast<std::size_t>(l * nc + key.i);
      const int base = (l * nc + key.i) * 3;
      switch (key.family) {
        case CellFamily::AvgDisplacement:
          out.targets(base + key.s, col) = out.sub_rve_areas[li];
          break;
        case CellFamily::AvgPressure:
          out.targets(base + 2, col) = out.sub_rve_areas[li];
          break;
        case CellFamily::GradDisplacement:
          out.targets(base + key.s, col) = first[li][static_cast<std::size_t>(key.m)];
          break;
        case CellFamily::GradPressure:
          out.targets(base + 2, col) = first[li][static_cast<std::size_t>(key.m)];
          break;
      }
    }
    if (out.rotation_row) {
      if (key.family == CellFamily::AvgDisplacement) {
        out.targets(rot, col) = rot_avg[i][static_cast<std::size_t>(key.s)];
      } else if (key.family == CellFamily::GradDisplacement) {
        out.targets(rot, col) = rot_grad[i][static_cast<std::size_t>(key.s)][static_cast<std::size_t>(key.m)];
      }
    }
  }
  return out;
}

RegionProblem restrict_to_region(const RVERegion& region, const MaterialField& mat, const ContinuumMap& cont) {
  return {&region, mat.restrict(region.local_to_global_element), cont.restrict(region.local_to_global_element)};
}

namespace {

double constraint_residual(const CellConstraints& cc, const RVERegion& region, const Eigen::MatrixXd& phi,
                           const Eigen::MatrixXd& targets) {
  const Eigen::MatrixXd r = cc.matrix * phi - targets;
  const double h = std::max(region.box.width(), region.box.height());
  double worst = 0.0;
  for (Eigen::Index row = 0; row < r.rows(); ++row) {
    double scale = 0.0;
    if (cc.rotation_row && row == r.rows() - 1) {
      scale = region.box.area() * h;
    } else {
      scale = cc.sub_rve_areas[static_cast<std::size_t>(row / 3)];
    }
    for (Eigen::Index col = 0; col < r.cols(); ++col) {
      const double avg_target = std::abs(targets(row, col)) / scale;
      worst = std::max(worst, std::abs(r(row, col)) / scale / (1.0 + avg_target));
    }
  }
  return worst;
}

double stationarity_residual(const SparseOperator& k, const SparseOperator& c, const Eigen::MatrixXd& phi,
                             const Eigen::MatrixXd& gamma) {
  const SparseOperator ct = c.transpose();
  const SparseOperator k_abs = k.cwiseAbs();
  const SparseOperator ct_abs = ct.cwiseAbs();
  double worst = 0.0;
  for (Eigen::Index col = 0; col < phi.cols(); ++col) {
    const Eigen::VectorXd r = k * phi.col(col) - ct * gamma.col(col);
    const Eigen::VectorXd s = k_abs * phi.col(col).cwiseAbs() + ct_abs * gamma.col(col).cwiseAbs();
    const double denom = s.cwiseAbs().maxCoeff();
    if (denom > 0.0) worst = std::max(worst, r.cwiseAbs().maxCoeff() / denom);
  }
  return worst;
}

int n_rows_without_rotation(const CellConstraints& cc) { return cc.rows() - (cc.rotation_row ? 1 : 0); }

}  // namespace

CellBasisSet solve_cell_problems(const RegionProblem& problem, const std::vector<CellKey>& keys) {
  if (problem.region == nullptr) throw Error(ErrorKind::InvalidArgument, "cell problem without region");
  const RVERegion& region = *problem.region;
  const FineMesh& mesh = region.submesh;
  const int nc = problem.continua.n_continua();
  const int n = mesh.node_count();

  const CellConstraints cc = build_cell_constraints(region, problem.continua);
  const BiotOperators ops = assemble_biot(mesh, problem.material);
  const int rows = cc.rows();

  Eigen::MatrixXd targets(rows, static_cast<Eigen::Index>(keys.size()));
  for (std::size_t q = 0; q < keys.size(); ++q) {
    targets.col(static_cast<Eigen::Index>(q)) = cc.targets.col(cell_column(keys[q], nc));
  }

  // The spatial operator is block upper triangular and no constraint mixes
  // u and p, so the saddle system splits exactly: pressure first, then
  // displacement driven by the pressure-gradient coupling.
  std::vector<int> p_rows;
  std::vector<int> u_rows;
  std::vector<int> local(static_cast<std::size_t>(rows), -1);
  std::vector<char> is_p(static_cast<std::size_t>(rows), 0);
  for (int r = 0; r < rows; ++r) {
    const bool pressure_row = r < n_rows_without_rotation(cc) && r % 3 == 2;
    is_p[static_cast<std::size_t>(r)] = pressure_row ? 1 : 0;
    auto& list = pressure_row ? p_rows : u_rows;
    local[static_cast<std::size_t>(r)] = static_cast<int>(list.size());
    list.push_back(r);
  }
  std::vector<Eigen::Triplet<double>> cp_trip;
  std::vector<Eigen::Triplet<double>> cu_trip;
  for (int col = 0; col < cc.matrix.outerSize(); ++col) {
    for (SparseOperator::InnerIterator it(cc.matrix, col); it; ++it) {
      const auto r = static_cast<std::size_t>(it.row());
      if (is_p[r]) {
        cp_trip.emplace_back(local[r], static_cast<int>(it.col()) - 2 * n, it.value());
      } else {
        cu_trip.emplace_back(local[r], static_cast<int>(it.col()), it.value());
      }
    }
  }
  SparseOperator cp(static_cast<int>(p_rows.size()), n);
  cp.setFromTriplets(cp_trip.begin(), cp_trip.end());
  SparseOperator cu(static_cast<int>(u_rows.size()), 2 * n);
  cu.setFromTriplets(cu_trip.begin(), cu_trip.end());

  auto gather = [&](const std::vector<int>& list) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(list.size()), targets.cols());
    for (std::size_t r = 0; r < list.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = targets.row(list[r]);
    return out;
  };
  const std::string label = "cell problems of block " + std::to_string(region.center_block);
  auto solve_saddle = [&](const SparseOperator& a, const SparseOperator& c, const Eigen::MatrixXd& top,
                          const Eigen::MatrixXd& bottom, const std::string& which, double& berr) {
    const SparseOperator neg_ct = -SparseOperator(c.transpose());
    const std::array<int, 2> sizes = {static_cast<int>(a.rows()), static_cast<int>(c.rows())};
    const std::array<const SparseOperator*, 4> blocks = {&a, &neg_ct, &c, nullptr};
    const SparseDirectSolver solver(stack_blocks(sizes, sizes, blocks), ErrorKind::SaddleSingular,
                                    label + " (" + which + ")");
    Eigen::MatrixXd rhs(a.rows() + c.rows(), targets.cols());
    rhs.topRows(a.rows()) = top;
    rhs.bottomRows(c.rows()) = bottom;
    Eigen::MatrixXd sol = solver.solve(rhs);
    berr = std::max(berr, solver.last_backward_error());
    return sol;
  };

  double berr = 0.0;
  const Eigen::MatrixXd sol_p =
      solve_saddle(ops.darcy, cp, Eigen::MatrixXd::Zero(n, targets.cols()), gather(p_rows), "pressure", berr);
  const Eigen::MatrixXd p_fields = sol_p.topRows(n);
  const Eigen::MatrixXd sol_u =
      solve_saddle(ops.elasticity, cu, -(ops.gradient * p_fields), gather(u_rows), "displacement", berr);

  Eigen::MatrixXd fields(3 * n, targets.cols());
  fields.topRows(2 * n) = sol_u.topRows(2 * n);
  fields.bottomRows(n) = p_fields;
  Eigen::MatrixXd multipliers(rows, targets.cols());
  for (std::size_t r = 0; r < p_rows.size(); ++r) {
    multipliers.row(p_rows[r]) = sol_p.row(n + static_cast<Eigen::Index>(r));
  }
  for (std::size_t r = 0; r < u_rows.size(); ++r) {
    multipliers.row(u_rows[r]) = sol_u.row(2 * n + static_cast<Eigen::Index>(r));
  }
  const SparseOperator k = ops.spatial();

  CellBasisSet out;
  out.block = region.center_block;
  out.n_continua = nc;
  out.keys = keys;
  out.fields = std::move(fields);
  out.multipliers = std::move(multipliers);
  out.diagnostics.solver_backward_error = berr;
  out.diagnostics.constraint_residual = constraint_residual(cc, region, out.fields, targets);
  out.diagnostics.stationarity_residual = stationarity_residual(k, cc.matrix, out.fields, out.multipliers);
  return out;
}

CellBasisSet solve_all(const RegionProblem& problem) {
  const int nc = problem.continua.n_continua();
  std::vector<CellKey> keys;
  for (int c = 0; c < cell_problem_count(nc); ++c) keys.push_back(cell_key(c, nc));
  return solve_cell_problems(problem, keys);
}

CellBasisSet solve_avg_displacement(const RegionProblem& problem, int i, int s) {
  return solve_cell_problems(problem, {{CellFamily::AvgDisplacement, i, s, -1}});
}

CellBasisSet solve_avg_pressure(const RegionProblem& problem, int i) {
  return solve_cell_problems(problem, {{CellFamily::AvgPressure, i, -1, -1}});
}

CellBasisSet solve_grad_displacement(const RegionProblem& problem, int i, int s, int m) {
  return solve_cell_problems(problem, {{CellFamily::GradDisplacement, i, s, m}});
}

CellBasisSet solve_grad_pressure(const RegionProblem& problem, int i, int m) {
  return solve_cell_problems(problem, {{CellFamily::GradPressure, i, -1, m}});
}

}  // namespace mcporo
