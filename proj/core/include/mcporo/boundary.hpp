#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mcporo/assembly.hpp"

namespace mcporo {

/// field = value on one side of the bounding box. Sides without a condition
/// for a field are natural: traction-free for u, no-flow for p.
struct DirichletCondition {
  Field field = Field::P;
  Side side = Side::Left;
  ScalarField value;
  std::string label;  // human readable form, e.g. "constant(0)"
};

struct BoundarySpec {
  std::vector<DirichletCondition> conditions;

  [[nodiscard]] bool constrains(Field f) const;
};

/// Prescribed values for a set of dofs plus the free/fixed split they induce.
class Constraints {
 public:
  Constraints() = default;
  /// Later entries for the same dof override earlier ones.
  Constraints(int n_dofs, const std::vector<std::pair<int, double>>& fixed);

  [[nodiscard]] int size() const { return n_; }
  [[nodiscard]] const std::vector<int>& free_dofs() const { return free_; }
  [[nodiscard]] const std::vector<int>& fixed_dofs() const { return fixed_; }
  [[nodiscard]] const Vector& fixed_values() const { return values_; }
  [[nodiscard]] bool is_fixed(int dof) const { return slot_[static_cast<std::size_t>(dof)] < 0; }

  /// Rows and columns of `a` on free dofs.
  [[nodiscard]] SparseOperator free_block(const SparseOperator& a) const;
  /// Rows on free dofs, columns on fixed dofs.
  [[nodiscard]] SparseOperator coupling_block(const SparseOperator& a) const;
  [[nodiscard]] Vector restrict(const Vector& full) const;
  /// Full vector with free entries from `free` and fixed entries prescribed.
  [[nodiscard]] Vector expand(const Vector& free) const;

 private:
  int n_ = 0;
  std::vector<int> free_;
  std::vector<int> fixed_;
  Vector values_;
  std::vector<int> slot_;  // >= 0: index into free_, < 0: -(index into fixed_) - 1
};

/// Nodal Dirichlet values of `spec` on a fine mesh with the standard layout.
/// Throws UnknownBoundaryTag if a condition names a side not present on the mesh.
Constraints collect_dirichlet(const FineMesh& mesh, const DofLayout& layout, const BoundarySpec& spec);

/// K_ff x_f = b_f - K_fd x_d.
struct ConstrainedSystem {
  SparseOperator matrix;
  Vector rhs;
  Constraints constraints;
};

ConstrainedSystem apply_dirichlet(const SparseOperator& op, const Vector& rhs, const Constraints& constraints);

}  // namespace mcporo
