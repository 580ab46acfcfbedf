#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mcporo/fine_solver.hpp"
#include "mcporo/macro_solver.hpp"
#include "mcporo/microstructure.hpp"

namespace mcporo {

/// Per-block, per-continuum averages of the fine fields over K ∩ Omega_i,
/// laid out like the macro fields: values(block, field) with field i * 2 + s
/// for u_s and 2N + i for p.
struct BlockAverages {
  int n_continua = 1;
  Eigen::MatrixXd values;
  Eigen::MatrixXd areas;  // (block, continuum)
  /// (block, continuum) pairs with |K ∩ Omega_i| = 0; their values are 0 and
  /// they are left out of every error sum.
  std::vector<std::pair<int, int>> excluded;

  [[nodiscard]] bool is_excluded(int block, int continuum) const { return areas(block, continuum) <= 0.0; }
};

/// Exact for the P1 fine fields: each triangle contributes area times the
/// mean of its vertex values.
BlockAverages compute_block_averages(const FineMesh& mesh, const CoarseGrid& grid, const ContinuumMap& cont,
                                     const FineState& state);

/// Macro initial state from fine initial data: continuum averages per block,
/// then the mean over the blocks around each node. Blocks where a continuum
/// is absent fall back to the whole-block average.
MacroState init_macro_from_fine(const FineMesh& mesh, const CoarseGrid& grid, const ContinuumMap& cont,
                                const FineState& initial);

struct ErrorReport {
  std::string variant;
  int coarse_n = 0;
  std::vector<double> e_p;  // per continuum
  std::vector<double> e_u;
};

/// Relative discrete L2 errors between macro block means and fine averages,
/// per continuum. Throws ZeroDenominator if a fine field is identically zero
/// over the included blocks.
ErrorReport compute_errors(const Eigen::MatrixXd& macro_averages, const BlockAverages& fine);

}  // namespace mcporo
