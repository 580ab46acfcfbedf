#include <numbers>

#include <benchmark/benchmark.h>

#include "mcporo/cell_problems.hpp"
#include "mcporo/fine_solver.hpp"
#include "mcporo/macro_solver.hpp"
#include "mcporo/microstructure.hpp"
#include "mcporo/upscaling.hpp"

namespace {

using namespace mcporo;

MaterialField channel_material(const ContinuumMap& cont) {
  return MaterialField::from_continua(cont, std::vector<ContinuumMaterial>{{1e9, 1e9, 1e-10}, {1e5, 1e5, 1e-6}}, 0.8,
                                      1e-6);
}

void BM_AssembleBiot(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FineMesh mesh = build_structured_mesh(n, n);
  const ContinuumMap cont = generate_microstructure(mesh, ChannelSpec{0.0625, 0.5});
  const MaterialField mat = channel_material(cont);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_biot(mesh, mat));
  state.SetItemsProcessed(state.iterations() * mesh.element_count());
}
BENCHMARK(BM_AssembleBiot)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_FineStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FineMesh mesh = build_structured_mesh(n, n);
  const ContinuumMap cont = generate_microstructure(mesh, ChannelSpec{0.0625, 0.5});
  FineProblem p;
  p.mesh = &mesh;
  p.material = channel_material(cont);
  p.boundary.conditions.push_back({Field::U1, Side::Right, [](const Point&) { return 0.0; }, "0"});
  p.boundary.conditions.push_back({Field::U2, Side::Bottom, [](const Point&) { return 0.0; }, "0"});
  p.source = [](const Point& x) { return std::sin(std::numbers::pi * x.x); };
  const FineSolver solver(p, 0.1);
  FineState s = interpolate_state(mesh, {}, [](const Point&) { return 1e6; });
  for (auto _ : state) {
    s = solver.step(s);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_FineStep)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

// All cell problems of one interior block: 8 x 8 coarse grid, 160 fine cells.
void BM_CellProblems(benchmark::State& state) {
  const FineMesh mesh = build_structured_mesh(160, 160);
  const CoarseGrid grid = build_coarse_grid(mesh, 8);
  const ContinuumMap cont = generate_microstructure(mesh, ChannelSpec{0.0625, 0.5});
  const MaterialField mat = channel_material(cont);
  const RVERegion region = oversample(mesh, grid, grid.block_id(4, 4), static_cast<int>(state.range(0)));
  const RegionProblem problem = restrict_to_region(region, mat, cont);
  for (auto _ : state) benchmark::DoNotOptimize(solve_all(problem));
}
BENCHMARK(BM_CellProblems)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_MacroStep(benchmark::State& state) {
  const int nc = static_cast<int>(state.range(0));
  const FineMesh mesh = build_structured_mesh(nc, nc);
  const CoarseGrid grid = build_coarse_grid(mesh, nc);
  std::vector<EffectiveTensors> tensors;
  for (int b = 0; b < grid.block_count(); ++b) {
    // Two isotropic continua with unit moduli, Biot coupling and exchange.
    EffectiveTensors t = EffectiveTensors::zeros(b, 2);
    for (int i = 0; i < 2; ++i) {
      for (int d = 0; d < 2; ++d) {
        for (int n = 0; n < 2; ++n) {
          for (int s = 0; s < 2; ++s) {
            for (int m = 0; m < 2; ++m) {
              t.at({TensorKind::A, Flavor::UU}, {i * 2 + d, n}, {i * 2 + s, m}) =
                  (d == n && s == m) + (d == s && n == m) + (d == m && n == s);
            }
          }
          t.at({TensorKind::A, Flavor::PP}, {i, d}, {i, n}) = d == n ? 1.0 : 0.0;
          t.at({TensorKind::B, Flavor::PU}, {i * 2 + d, -1}, {i, n}) = d == n ? 0.8 : 0.0;
          t.at({TensorKind::G, Flavor::UP}, {i, -1}, {i * 2 + d, n}) = d == n ? 0.8 : 0.0;
        }
      }
      t.at({TensorKind::H, Flavor::PP}, {i, -1}, {i, -1}) = 1e-3;
      t.at({TensorKind::C, Flavor::PP}, {i, -1}, {i, -1}) = 0.5;
      t.at({TensorKind::C, Flavor::PP}, {i, -1}, {1 - i, -1}) = -0.5;
    }
    tensors.push_back(std::move(t));
  }
  const MacroLayout layout(2, grid.node_count());
  BoundarySpec bc;
  for (Field f : {Field::U1, Field::U2, Field::P}) {
    bc.conditions.push_back({f, Side::Left, [](const Point&) { return 0.0; }, "0"});
    bc.conditions.push_back({f, Side::Bottom, [](const Point&) { return 0.0; }, "0"});
  }
  const MacroSolver solver(assemble_macro(ModelVariant::Full, tensors, grid), impose_macro_bcs(grid, layout, bc),
                           layout, grid, 0.1);
  MacroState s{Vector::Ones(layout.size()), 0.0};
  for (auto _ : state) {
    s = solver.step(s);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_MacroStep)->Arg(8)->Arg(20)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
