#pragma once

#include <array>
#include <memory>
#include <string_view>
#include <vector>

#include "mcporo/assembly.hpp"
#include "mcporo/boundary.hpp"
#include "mcporo/linear_solver.hpp"
#include "mcporo/upscaling.hpp"

namespace mcporo {

enum class ModelVariant { Full, Simplified1, Simplified2 };

std::string_view to_string(ModelVariant v);
/// "full", "simplified1", "simplified2"; throws Config.
ModelVariant parse_variant(std::string_view name);

/// Whether a variant keeps a tensor family.
bool keeps_family(ModelVariant v, FamilyId id);

/// Coarse unknowns: field i * 2 + s holds U_is, field 2N + i holds P_i;
/// global index = field * n_nodes + node.
class MacroLayout {
 public:
  MacroLayout(int n_continua, int n_nodes) : n_(n_continua), nodes_(n_nodes) {}

  [[nodiscard]] int n_continua() const { return n_; }
  [[nodiscard]] int node_count() const { return nodes_; }
  [[nodiscard]] int field_count() const { return 3 * n_; }
  [[nodiscard]] int size() const { return field_count() * nodes_; }
  [[nodiscard]] int displacement_field(int i, int s) const { return i * 2 + s; }
  [[nodiscard]] int pressure_field(int i) const { return 2 * n_ + i; }
  [[nodiscard]] int index(int field, int node) const { return field * nodes_ + node; }

 private:
  int n_ = 1;
  int nodes_ = 0;
};

struct MacroState {
  Vector x;
  double t = 0.0;
};

struct MacroOperators {
  SparseOperator spatial;   // A-, B-, Bbar-, C-families
  SparseOperator temporal;  // D-, G-, Gbar-, H-families
  Vector load;              // int F . test
};

/// Galerkin assembly of the kept families with bilinear elements and 2x2
/// Gauss quadrature. Throws MissingTensor unless there is one tensor record
/// per block, in block order.
MacroOperators assemble_macro(ModelVariant variant, const std::vector<EffectiveTensors>& tensors,
                              const CoarseGrid& grid);

/// Same, but with an explicit family mask instead of a variant.
MacroOperators assemble_macro_families(const std::array<bool, kFamilyCount>& keep,
                                       const std::vector<EffectiveTensors>& tensors, const CoarseGrid& grid);

/// Every continuum inherits the fine condition of its field type: a u1
/// condition constrains U_i1 for all i, a p condition constrains P_i for all i.
Constraints impose_macro_bcs(const CoarseGrid& grid, const MacroLayout& layout, const BoundarySpec& spec);

/// Backward Euler on every temporal family:
///   (S + T / tau) x^{n+1} = F + (T / tau) x^n.
class MacroSolver {
 public:
  MacroSolver(const MacroOperators& ops, const Constraints& constraints, const MacroLayout& layout,
              const CoarseGrid& grid, double tau);

  [[nodiscard]] MacroState step(const MacroState& state) const;

 private:
  SparseOperator temporal_;
  SparseOperator coupling_;
  Vector load_;
  Constraints constraints_;
  std::unique_ptr<SparseDirectSolver> solver_;
  double tau_;
};

/// Coarse-grid analogues of the rigid modes: uniform translations and the
/// rotation applied to every continuum, plus a uniform pressure.
Eigen::MatrixXd macro_kernel_modes(const CoarseGrid& grid, const MacroLayout& layout, bool with_pressure);

/// Nodal values from per-block, per-continuum averages: each node takes the
/// mean of the blocks around it. `averages` is (block, field) with the
/// MacroLayout field numbering.
MacroState init_macro(const CoarseGrid& grid, const MacroLayout& layout, const Eigen::MatrixXd& block_averages,
                      double t = 0.0);

/// Block means of the bilinear macro fields: (block, field).
Eigen::MatrixXd macro_block_averages(const CoarseGrid& grid, const MacroLayout& layout, const MacroState& state);

}  // namespace mcporo
