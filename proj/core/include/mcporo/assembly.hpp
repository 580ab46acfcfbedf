#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>

#include <Eigen/Sparse>

#include "mcporo/material.hpp"
#include "mcporo/mesh.hpp"

namespace mcporo {

using SparseOperator = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<std::array<double, 2>(const Point&)>;

enum class Field : int { U1 = 0, U2 = 1, P = 2 };

/// Field-blocked numbering of the P1 unknowns: [u1 nodes | u2 nodes | p nodes].
class DofLayout {
 public:
  explicit DofLayout(int n_nodes) : n_(n_nodes) {}

  [[nodiscard]] int node_count() const { return n_; }
  [[nodiscard]] int size() const { return 3 * n_; }
  [[nodiscard]] int index(int node, Field f) const { return static_cast<int>(f) * n_ + node; }
  [[nodiscard]] int offset(Field f) const { return static_cast<int>(f) * n_; }

 private:
  int n_ = 0;
};

/// Restricts integration to a subset of elements; nullopt means all.
using ElementSubset = std::optional<std::span<const int>>;

/// a^u(u, v) = int sigma(u) : eps(v); 2n x 2n over [u1 | u2].
SparseOperator assemble_elasticity(const FineMesh& mesh, const MaterialField& mat,
                                   ElementSubset subset = std::nullopt);

/// abar^u(p, v) = int alpha grad p . v; rows [u1 | u2] tests, columns p.
SparseOperator assemble_pressure_gradient_coupling(const FineMesh& mesh, const MaterialField& mat,
                                                   ElementSubset subset = std::nullopt);

/// a^p(p, q) = int kappa grad p . grad q.
SparseOperator assemble_darcy(const FineMesh& mesh, const MaterialField& mat, ElementSubset subset = std::nullopt);

/// b^p(p, q) = int S p q.
SparseOperator assemble_storage(const FineMesh& mesh, const MaterialField& mat, ElementSubset subset = std::nullopt);

/// bbar^p(u, q) = int alpha div(u) q; rows p tests, columns [u1 | u2].
SparseOperator assemble_divergence_coupling(const FineMesh& mesh, const MaterialField& mat,
                                            ElementSubset subset = std::nullopt);

/// The five forms of the Biot system on one mesh.
struct BiotOperators {
  SparseOperator elasticity;
  SparseOperator gradient;
  SparseOperator darcy;
  SparseOperator storage;
  SparseOperator divergence;

  /// a((u, p), (v, q)) as a 3n x 3n matrix: [[A_u, G], [0, A_p]].
  [[nodiscard]] SparseOperator spatial() const;
  /// b((u, p), q) as a 3n x 3n matrix: [[0, 0], [D, M]].
  [[nodiscard]] SparseOperator temporal() const;
};

BiotOperators assemble_biot(const FineMesh& mesh, const MaterialField& mat, ElementSubset subset = std::nullopt);

struct LoadVectors {
  Vector u;  // 2n: [u1 | u2]
  Vector p;  // n

  /// Concatenated 3n right-hand side in DofLayout order.
  [[nodiscard]] Vector combined() const;
};

/// L^u(v) = int f . v and L^p(q) = int g q, with the mid-edge rule.
LoadVectors assemble_loads(const FineMesh& mesh, const VectorField& f, const ScalarField& g,
                           ElementSubset subset = std::nullopt);

/// Element P1 gradients: grad phi_k = (b[k], c[k]) / (2 * area).
struct P1Gradients {
  std::array<double, 3> dx{};
  std::array<double, 3> dy{};
  double area = 0.0;
};
P1Gradients p1_gradients(const FineMesh& mesh, int e);

/// Mid-edge points of an element; point k is the midpoint of the edge
/// opposite to vertex k, where phi_k = 0 and the other two are 1/2.
std::array<Point, 3> mid_edge_points(const FineMesh& mesh, int e);

/// Stacks sparse blocks into one matrix. Null entries are zero blocks.
SparseOperator stack_blocks(std::span<const int> row_sizes, std::span<const int> col_sizes,
                            std::span<const SparseOperator* const> blocks);

}  // namespace mcporo
