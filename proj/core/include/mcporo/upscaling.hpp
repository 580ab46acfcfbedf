#pragma once

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mcporo/assembly.hpp"
#include "mcporo/cell_problems.hpp"

namespace mcporo {

/// A, B, Bbar, C pair cell solutions through the spatial form; D, G, Gbar, H
/// through the temporal form. A/D: gradient trial, gradient test. B/G:
/// gradient trial, value test. Bbar/Gbar: value trial, gradient test. C/H:
/// value trial, value test.
enum class TensorKind : int { A = 0, B, Bbar, C, D, G, Gbar, H };

/// First letter: trial field (macro unknown), second: test equation.
enum class Flavor : int { UU = 0, PU, UP, PP };

inline constexpr int kFamilyCount = 32;

struct FamilyId {
  TensorKind kind = TensorKind::A;
  Flavor flavor = Flavor::UU;

  [[nodiscard]] int index() const { return static_cast<int>(flavor) * 8 + static_cast<int>(kind); }
  [[nodiscard]] static FamilyId from_index(int k) { return {static_cast<TensorKind>(k % 8), static_cast<Flavor>(k / 8)}; }
  [[nodiscard]] bool temporal() const { return static_cast<int>(kind) >= 4; }
  [[nodiscard]] bool trial_gradient() const;
  [[nodiscard]] bool test_gradient() const;
  [[nodiscard]] bool trial_is_displacement() const { return flavor == Flavor::UU || flavor == Flavor::UP; }
  [[nodiscard]] bool test_is_displacement() const { return flavor == Flavor::UU || flavor == Flavor::PU; }
  /// e.g. "A_uu", "Gbar_up".
  [[nodiscard]] std::string name() const;
  /// Inverse of name(); throws InvalidArgument.
  static FamilyId parse(std::string_view name);

  friend bool operator==(const FamilyId&, const FamilyId&) = default;
};

/// Index of one side (test or trial) of a tensor entry. `slot` is j * 2 + d
/// for displacement variables V_jd / U_is and j for pressure variables;
/// `dir` is the gradient direction or -1.
struct TensorSide {
  int slot = 0;
  int dir = -1;
};

/// Homogenized coefficients of one coarse block, scaled by 1 / |R|.
struct EffectiveTensors {
  int block = 0;
  int n_continua = 1;
  bool clipped = false;
  double rve_area = 0.0;
  /// families[FamilyId::index()]: rows are test (slot, dir), columns trial.
  std::array<Eigen::MatrixXd, kFamilyCount> families;
  Eigen::VectorXd source_u;  // F^u at slot j * 2 + d
  Eigen::VectorXd source_p;  // F^p at j

  /// Zero-initialized tensors of the right shapes.
  static EffectiveTensors zeros(int block, int n_continua);

  [[nodiscard]] const Eigen::MatrixXd& family(FamilyId id) const {
    return families[static_cast<std::size_t>(id.index())];
  }
  [[nodiscard]] Eigen::MatrixXd& family(FamilyId id) { return families[static_cast<std::size_t>(id.index())]; }

  /// Entry by side indices; throws InvalidArgument on malformed indices.
  [[nodiscard]] double at(FamilyId id, TensorSide test, TensorSide trial) const;
  double& at(FamilyId id, TensorSide test, TensorSide trial);
};

/// Row or column of a family matrix for a side index.
int tensor_index(bool gradient, TensorSide side);

/// Pairs cell solutions over the central RVE: a_R(trial, test) / |R| and
/// b_R(trial, test) / |R| for every family, plus the macroscopic sources.
EffectiveTensors pair_cell_solutions(const RegionProblem& problem, const CellBasisSet& basis, const VectorField& f,
                                     const ScalarField& g);

struct BlockUpscaling {
  EffectiveTensors tensors;
  CellDiagnostics diagnostics;
  int region_nodes = 0;
  int sub_rves = 0;
  double seconds = 0.0;
};

struct UpscalingOptions {
  int layers = 1;
  int workers = 1;
  /// Called from worker threads once per block with its basis.
  std::function<void(const RVERegion&, const CellBasisSet&)> on_basis;
};

/// Cell problems and pairing for one block.
BlockUpscaling upscale_block(const FineMesh& mesh, const CoarseGrid& grid, const MaterialField& mat,
                             const ContinuumMap& cont, int block, const UpscalingOptions& options,
                             const VectorField& f, const ScalarField& g);

/// Every block of the grid; results are ordered by block id regardless of
/// the worker count.
std::vector<BlockUpscaling> upscale_all(const FineMesh& mesh, const CoarseGrid& grid, const MaterialField& mat,
                                        const ContinuumMap& cont, const UpscalingOptions& options,
                                        const VectorField& f = {}, const ScalarField& g = {});

}  // namespace mcporo
