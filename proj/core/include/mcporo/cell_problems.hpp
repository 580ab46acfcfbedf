#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcporo/assembly.hpp"
#include "mcporo/material.hpp"
#include "mcporo/mesh.hpp"
#include "mcporo/microstructure.hpp"

namespace mcporo {

/// The four families of constrained cell problems. Indices are 0-based:
/// i is the continuum, s the displacement component, m the gradient direction.
enum class CellFamily : int { AvgDisplacement = 0, AvgPressure = 1, GradDisplacement = 2, GradPressure = 3 };

std::string_view to_string(CellFamily family);

struct CellKey {
  CellFamily family = CellFamily::AvgDisplacement;
  int i = 0;
  int s = -1;  // -1 for pressure families
  int m = -1;  // -1 for average families

  friend bool operator==(const CellKey&, const CellKey&) = default;
};

/// Number of cell problems per block for n continua: 2n + n + 4n + 2n.
constexpr int cell_problem_count(int n_continua) { return 9 * n_continua; }

/// Column of `key` in the canonical ordering: averages of u, averages of p,
/// gradients of u, gradients of p; lexicographic in (i, s, m) inside each.
int cell_column(const CellKey& key, int n_continua);
CellKey cell_key(int column, int n_continua);

/// Saddle system data of one oversampled region.
///
/// Constraint row (l, j, f) holds int_{R^l} psi_j phi for the f-component
/// (u1, u2 or p) of the trial field; its index is (l * N + j) * 3 + f. When
/// the region has a single sub-RVE, one extra row fixes the rotation moment
/// int_R ((x1 - c1) u2 - (x2 - c2) u1).
struct CellConstraints {
  SparseOperator matrix;              // rows x 3n
  Eigen::MatrixXd targets;            // rows x 9N, canonical columns
  std::vector<double> sub_rve_areas;  // |R^l cap Omega_j| at (l * N + j)
  Point center;                       // c: centroid of the central RVE
  bool rotation_row = false;

  [[nodiscard]] int rows() const { return static_cast<int>(matrix.rows()); }
};

CellConstraints build_cell_constraints(const RVERegion& region, const ContinuumMap& local_cont);

struct CellDiagnostics {
  /// max over rows and problems of |C phi - g| / |R^l cap Omega_j|, divided
  /// by 1 + |target average|.
  double constraint_residual = 0.0;
  /// ||K phi - C^T Gamma||_inf / ||(|K||phi| + |C^T||Gamma|)||_inf.
  double stationarity_residual = 0.0;
  double solver_backward_error = 0.0;
};

/// Cell solutions of one block as nodal fields on the region submesh.
struct CellBasisSet {
  int block = 0;
  int n_continua = 1;
  std::vector<CellKey> keys;    // one per column
  Eigen::MatrixXd fields;       // 3n x keys, DofLayout rows
  Eigen::MatrixXd multipliers;  // constraint rows x keys
  CellDiagnostics diagnostics;

  [[nodiscard]] int node_count() const { return static_cast<int>(fields.rows() / 3); }
  /// Column holding `key`; throws InvalidArgument if it was not solved.
  [[nodiscard]] int column(const CellKey& key) const;
  [[nodiscard]] Eigen::VectorXd field(const CellKey& key) const { return fields.col(column(key)); }
};

/// Local material and continuum data of a region.
struct RegionProblem {
  const RVERegion* region = nullptr;
  MaterialField material;  // restricted to region elements
  ContinuumMap continua;   // restricted to region elements
};

RegionProblem restrict_to_region(const RVERegion& region, const MaterialField& mat, const ContinuumMap& cont);

/// Solves the listed cell problems with one factorization of
/// [[K, -C^T], [C, 0]]. Throws SaddleSingular if the system cannot be solved.
CellBasisSet solve_cell_problems(const RegionProblem& problem, const std::vector<CellKey>& keys);

/// Every cell problem of the block, in canonical column order.
CellBasisSet solve_all(const RegionProblem& problem);

CellBasisSet solve_avg_displacement(const RegionProblem& problem, int i, int s);
CellBasisSet solve_avg_pressure(const RegionProblem& problem, int i);
CellBasisSet solve_grad_displacement(const RegionProblem& problem, int i, int s, int m);
CellBasisSet solve_grad_pressure(const RegionProblem& problem, int i, int m);

}  // namespace mcporo
