#include "mcporo/upscaling.hpp"

#include <chrono>

#include "mcporo/error.hpp"
#include "mcporo/parallel.hpp"

namespace mcporo {

namespace {

constexpr std::array<std::string_view, 8> kKindNames = {"A", "B", "Bbar", "C", "D", "G", "Gbar", "H"};
constexpr std::array<std::string_view, 4> kFlavorNames = {"uu", "pu", "up", "pp"};

}  // namespace

bool FamilyId::trial_gradient() const {
  switch (kind) {
    case TensorKind::A:
    case TensorKind::B:
    case TensorKind::D:
    case TensorKind::G:
      return true;
    default:
      return false;
  }
}

bool FamilyId::test_gradient() const {
  switch (kind) {
    case TensorKind::A:
    case TensorKind::Bbar:
    case TensorKind::D:
    case TensorKind::Gbar:
      return true;
    default:
      return false;
  }
}

std::string FamilyId::name() const {
  return std::string(kKindNames[static_cast<std::size_t>(kind)]) + "_" +
         std::string(kFlavorNames[static_cast<std::size_t>(flavor)]);
}

FamilyId FamilyId::parse(std::string_view name) {
  for (int k = 0; k < kFamilyCount; ++k) {
    const FamilyId id = from_index(k);
    if (id.name() == name) return id;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown tensor family '" + std::string(name) + "'");
}

int tensor_index(bool gradient, TensorSide side) {
  if (gradient) {
    if (side.dir < 0 || side.dir > 1) throw Error(ErrorKind::InvalidArgument, "gradient direction missing");
    return side.slot * 2 + side.dir;
  }
  if (side.dir != -1) throw Error(ErrorKind::InvalidArgument, "unexpected gradient direction");
  return side.slot;
}

namespace {

int side_count(bool displacement, bool gradient, int n) { return (displacement ? 2 * n : n) * (gradient ? 2 : 1); }

// Cell problem whose solution represents macro variable `side` of the given
// type.
CellKey cell_for(bool displacement, bool gradient, TensorSide side) {
  if (displacement) {
    return gradient ? CellKey{CellFamily::GradDisplacement, side.slot / 2, side.slot % 2, side.dir}
                    : CellKey{CellFamily::AvgDisplacement, side.slot / 2, side.slot % 2, -1};
  }
  return gradient ? CellKey{CellFamily::GradPressure, side.slot, -1, side.dir}
                  : CellKey{CellFamily::AvgPressure, side.slot, -1, -1};
}

TensorSide side_at(bool gradient, int index) {
  return gradient ? TensorSide{index / 2, index % 2} : TensorSide{index, -1};
}

}  // namespace

EffectiveTensors EffectiveTensors::zeros(int block, int n) {
  EffectiveTensors t;
  t.block = block;
  t.n_continua = n;
  for (int k = 0; k < kFamilyCount; ++k) {
    const FamilyId id = FamilyId::from_index(k);
    t.families[static_cast<std::size_t>(k)] =
        Eigen::MatrixXd::Zero(side_count(id.test_is_displacement(), id.test_gradient(), n),
                              side_count(id.trial_is_displacement(), id.trial_gradient(), n));
  }
  t.source_u = Eigen::VectorXd::Zero(2 * n);
  t.source_p = Eigen::VectorXd::Zero(n);
  return t;
}

double EffectiveTensors::at(FamilyId id, TensorSide test, TensorSide trial) const {
  const auto& f = family(id);
  const int r = tensor_index(id.test_gradient(), test);
  const int c = tensor_index(id.trial_gradient(), trial);
  if (r >= f.rows() || c >= f.cols() || r < 0 || c < 0) throw Error(ErrorKind::InvalidArgument, "tensor index out of range");
  return f(r, c);
}

double& EffectiveTensors::at(FamilyId id, TensorSide test, TensorSide trial) {
  auto& f = family(id);
  const int r = tensor_index(id.test_gradient(), test);
  const int c = tensor_index(id.trial_gradient(), trial);
  if (r >= f.rows() || c >= f.cols() || r < 0 || c < 0) throw Error(ErrorKind::InvalidArgument, "tensor index out of range");
  return f(r, c);
}

EffectiveTensors pair_cell_solutions(const RegionProblem& problem, const CellBasisSet& basis, const VectorField& f,
                                     const ScalarField& g) {
  const RVERegion& region = *problem.region;
  const FineMesh& mesh = region.submesh;
  const int n = basis.n_continua;
  const std::vector<int> center = region.center_elements();
  const std::span<const int> subset(center);

  double area = 0.0;
  for (int e : center) area += mesh.area(e);

  const BiotOperators ops = assemble_biot(mesh, problem.material, subset);
  const SparseOperator k = ops.spatial();
  const SparseOperator t = ops.temporal();
  // Pairings of every solved column against every other: rows test, columns trial.
  const Eigen::MatrixXd ka = basis.fields.transpose() * (k * basis.fields) / area;
  const Eigen::MatrixXd tb = basis.fields.transpose() * (t * basis.fields) / area;

  EffectiveTensors out = EffectiveTensors::zeros(basis.block, n);
  out.clipped = region.clipped;
  out.rve_area = area;
  for (int fam = 0; fam < kFamilyCount; ++fam) {
    const FamilyId id = FamilyId::from_index(fam);
    const Eigen::MatrixXd& pairing = id.temporal() ? tb : ka;
    auto& dst = out.families[static_cast<std::size_t>(fam)];
    for (int r = 0; r < dst.rows(); ++r) {
      const CellKey test = cell_for(id.test_is_displacement(), id.test_gradient(),
                                    side_at(id.test_gradient(), r));
      const int tr = basis.column(test);
      for (int c = 0; c < dst.cols(); ++c) {
        const CellKey trial = cell_for(id.trial_is_displacement(), id.trial_gradient(),
                                       side_at(id.trial_gradient(), c));
        dst(r, c) = pairing(tr, basis.column(trial));
      }
    }
  }

  if (f || g) {
    const Vector load = assemble_loads(mesh, f, g, subset).combined();
    for (int j = 0; j < n; ++j) {
      for (int d = 0; d < 2; ++d) {
        out.source_u[j * 2 + d] =
            basis.field({CellFamily::AvgDisplacement, j, d, -1}).dot(load) / area;
      }
      out.source_p[j] = basis.field({CellFamily::AvgPressure, j, -1, -1}).dot(load) / area;
    }
  }
  return out;
}

BlockUpscaling upscale_block(const FineMesh& mesh, const CoarseGrid& grid, const MaterialField& mat,
                             const ContinuumMap& cont, int block, const UpscalingOptions& options,
                             const VectorField& f, const ScalarField& g) {
  const auto start = std::chrono::steady_clock::now();
  const RVERegion region = oversample(mesh, grid, block, options.layers);
  const RegionProblem problem = restrict_to_region(region, mat, cont);
  const CellBasisSet basis = solve_all(problem);
  if (options.on_basis) options.on_basis(region, basis);
  BlockUpscaling out;
  out.tensors = pair_cell_solutions(problem, basis, f, g);
  out.diagnostics = basis.diagnostics;
  out.region_nodes = region.submesh.node_count();
  out.sub_rves = region.sub_rve_count();
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<BlockUpscaling> upscale_all(const FineMesh& mesh, const CoarseGrid& grid, const MaterialField& mat,
                                        const ContinuumMap& cont, const UpscalingOptions& options,
                                        const VectorField& f, const ScalarField& g) {
  if (options.layers < 0) throw Error(ErrorKind::InvalidArgument, "oversampling layers must be >= 0");
  std::vector<BlockUpscaling> out(static_cast<std::size_t>(grid.block_count()));
  parallel_for(grid.block_count(), options.workers, [&](int b) {
    out[static_cast<std::size_t>(b)] = upscale_block(mesh, grid, mat, cont, b, options, f, g);
  });
  return out;
}

}  // namespace mcporo
