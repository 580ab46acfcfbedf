#include <cmath>

#include <gtest/gtest.h>

#include "mcporo/cell_problems.hpp"
#include "mcporo/error.hpp"
#include "mcporo/microstructure.hpp"

namespace mcporo {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Independent oracle: integral of psi_j * f over sub-RVE l for a nodal P1
// field f on the region submesh (area times vertex mean, exact for P1).
double moment(const RVERegion& r, const ContinuumMap& local, const VectorXd& nodal, int l, int j) {
  double sum = 0.0;
  for (int e = 0; e < r.submesh.element_count(); ++e) {
    if (r.element_sub_rve[static_cast<std::size_t>(e)] != l || local[e] != j) continue;
    const Triangle& t = r.submesh.triangle(e);
    sum += r.submesh.area(e) * (nodal[t[0]] + nodal[t[1]] + nodal[t[2]]) / 3.0;
  }
  return sum;
}

double psi_area(const RVERegion& r, const ContinuumMap& local, int l, int j) {
  return moment(r, local, VectorXd::Ones(r.submesh.node_count()), l, j);
}

// Exact integral of psi_j (x_m - c_m) over sub-RVE l.
double first_moment(const RVERegion& r, const ContinuumMap& local, int l, int j, int m, const Point& c) {
  double sum = 0.0;
  for (int e = 0; e < r.submesh.element_count(); ++e) {
    if (r.element_sub_rve[static_cast<std::size_t>(e)] != l || local[e] != j) continue;
    const Point g = r.submesh.centroid(e);
    sum += r.submesh.area(e) * (m == 0 ? g.x - c.x : g.y - c.y);
  }
  return sum;
}

struct Region {
  FineMesh mesh;
  CoarseGrid grid;
  ContinuumMap cont;
  MaterialField mat;
  RVERegion region;
  RegionProblem problem;

  Region(int fine, int coarse, int block, int layers, const MicrostructureSpec& spec, double alpha,
        std::vector<ContinuumMaterial> mats = {}) {
    mesh = build_structured_mesh(fine, fine);
    grid = build_coarse_grid(mesh, coarse);
    cont = generate_microstructure(mesh, spec);
    if (mats.empty()) mats.assign(static_cast<std::size_t>(cont.n_continua()), ContinuumMaterial{1.0, 1.0, 1.0});
    mat = MaterialField::from_continua(cont, mats, alpha, 1e-6);
    region = oversample(mesh, grid, block, layers);
    problem = restrict_to_region(region, mat, cont);
  }

  [[nodiscard]] int n() const { return region.submesh.node_count(); }
  [[nodiscard]] VectorXd component(const VectorXd& field, int f) const { return field.segment(f * n(), n()); }
};

TEST(CellKeys, CanonicalColumns) {
  EXPECT_EQ(cell_problem_count(2), 18);
  EXPECT_EQ(cell_problem_count(1), 9);
  for (int n : {1, 2, 3}) {
    for (int c = 0; c < cell_problem_count(n); ++c) EXPECT_EQ(cell_column(cell_key(c, n), n), c);
  }
  EXPECT_EQ(cell_column({CellFamily::AvgPressure, 1, -1, -1}, 2), 5);
  EXPECT_EQ(cell_column({CellFamily::GradDisplacement, 0, 1, 0}, 2), 6 + 2);
  EXPECT_EQ(cell_column({CellFamily::GradPressure, 1, -1, 1}, 2), 14 + 3);
  EXPECT_THROW((void)cell_key(18, 2), Error);
}

TEST(CellConstraints, CenteringAndZeroTargets) {
  Region s(16, 4, 5, 1, ChannelSpec{0.125, 0.5}, 0.8);
  const ContinuumMap& local = s.problem.continua;
  const CellConstraints cc = build_cell_constraints(s.region, local);
  EXPECT_FALSE(cc.rotation_row);
  EXPECT_EQ(cc.rows(), s.region.sub_rve_count() * 2 * 3);
  double mx = 0.0, my = 0.0;
  for (int e : s.region.center_elements()) {
    const Point g = s.region.submesh.centroid(e);
    mx += s.region.submesh.area(e) * (g.x - cc.center.x);
    my += s.region.submesh.area(e) * (g.y - cc.center.y);
  }
  EXPECT_LT(std::abs(mx), 1e-12);
  EXPECT_LT(std::abs(my), 1e-12);
  // Targets for continuum i only touch rows of continuum j == i.
  for (int col = 0; col < cell_problem_count(2); ++col) {
    const CellKey key = cell_key(col, 2);
    for (int row = 0; row < cc.rows(); ++row) {
      const int j = (row / 3) % 2;
      if (j != key.i) EXPECT_EQ(cc.targets(row, col), 0.0);
    }
  }
}

TEST(CellConstraints, SingleSubRveGetsRotationRow) {
  Region s(8, 2, 0, 0, UniformSpec{}, 0.8);
  const CellConstraints cc = build_cell_constraints(s.region, s.problem.continua);
  EXPECT_TRUE(cc.rotation_row);
  EXPECT_EQ(cc.rows(), 3 + 1);
  EXPECT_NO_THROW((void)solve_all(s.problem));
}

TEST(CellConstraints, MissingContinuumIsStarvation) {
  // One centred channel: the leftmost block column holds no continuum 2.
  Region s(16, 4, 5, 1, ChannelSpec{1.0, 0.25}, 0.8);
  try {
    (void)solve_all(s.problem);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ContinuumStarvation);
  }
}

TEST(AvgDisplacement, HomogeneousGivesConstants) {
  Region s(12, 3, 4, 1, UniformSpec{}, 0.8);
  for (int comp = 0; comp < 2; ++comp) {
    const CellBasisSet b = solve_avg_displacement(s.problem, 0, comp);
    const VectorXd phi = b.field({CellFamily::AvgDisplacement, 0, comp, -1});
    for (int f = 0; f < 2; ++f) {
      const VectorXd c = s.component(phi, f);
      EXPECT_LT((c.array() - (f == comp ? 1.0 : 0.0)).abs().maxCoeff(), 1e-10);
    }
    EXPECT_LT(s.component(phi, 2).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(b.diagnostics.constraint_residual, 1e-12);
    EXPECT_LT(b.diagnostics.stationarity_residual, 1e-12);
  }
}

TEST(AvgDisplacement, StripedContinuaHitTargets) {
  const std::vector<ContinuumMaterial> mats{{1e9, 1e9, 1e-10}, {1e5, 1e5, 1e-6}};
  Region s(16, 4, 5, 1, ChannelSpec{0.125, 0.5}, 0.8, mats);
  const ContinuumMap& local = s.problem.continua;
  for (int comp = 0; comp < 2; ++comp) {
    const VectorXd phi = solve_avg_displacement(s.problem, 0, comp).field({CellFamily::AvgDisplacement, 0, comp, -1});
    for (int l = 0; l < s.region.sub_rve_count(); ++l) {
      for (int j = 0; j < 2; ++j) {
        const double area = psi_area(s.region, local, l, j);
        for (int f = 0; f < 3; ++f) {
          const double want = (f == comp && j == 0) ? 1.0 : 0.0;
          EXPECT_NEAR(moment(s.region, local, s.component(phi, f), l, j) / area, want, 1e-9);
        }
      }
    }
  }
}

TEST(AvgDisplacement, DecoupledHasNoPressurePart) {
  Region s(16, 4, 5, 1, ChannelSpec{0.125, 0.5}, 0.0, {{1e3, 1e3, 1.0}, {1.0, 1.0, 1e-3}});
  const CellBasisSet b = solve_all(s.problem);
  for (int i = 0; i < 2; ++i) {
    for (int comp = 0; comp < 2; ++comp) {
      const VectorXd phi = b.field({CellFamily::AvgDisplacement, i, comp, -1});
      EXPECT_LT(s.component(phi, 2).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(AvgPressure, HomogeneousDecoupledIsOne) {
  Region s(12, 3, 4, 1, UniformSpec{}, 0.0);
  const VectorXd phi = solve_avg_pressure(s.problem, 0).field({CellFamily::AvgPressure, 0, -1, -1});
  EXPECT_LT((s.component(phi, 2).array() - 1.0).abs().maxCoeff(), 1e-10);
  EXPECT_LT(s.component(phi, 0).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(s.component(phi, 1).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(AvgPressure, CoupledDisplacementPartIsStationary) {
  Region s(12, 3, 4, 1, UniformSpec{}, 0.8);
  const CellBasisSet b = solve_avg_pressure(s.problem, 0);
  EXPECT_LT(b.diagnostics.stationarity_residual, 1e-9);
  EXPECT_LT(b.diagnostics.constraint_residual, 1e-9);
  const ContinuumMap& local = s.problem.continua;
  const VectorXd phi = b.field({CellFamily::AvgPressure, 0, -1, -1});
  for (int l = 0; l < s.region.sub_rve_count(); ++l) {
    const double area = psi_area(s.region, local, l, 0);
    EXPECT_NEAR(moment(s.region, local, s.component(phi, 0), l, 0) / area, 0.0, 1e-9);
    EXPECT_NEAR(moment(s.region, local, s.component(phi, 2), l, 0) / area, 1.0, 1e-9);
  }
}

TEST(AvgPressure, TwoContinuaAverages) {
  Region s(32, 4, 10, 1, InclusionSpec{0.125, 0.04}, 0.8, {{1e5, 1e5, 1e-10}, {1e9, 1e9, 1e-6}});
  const ContinuumMap& local = s.problem.continua;
  const VectorXd phi = solve_avg_pressure(s.problem, 0).field({CellFamily::AvgPressure, 0, -1, -1});
  for (int l = 0; l < s.region.sub_rve_count(); ++l) {
    EXPECT_NEAR(moment(s.region, local, s.component(phi, 2), l, 0) / psi_area(s.region, local, l, 0), 1.0, 1e-9);
    EXPECT_NEAR(moment(s.region, local, s.component(phi, 2), l, 1) / psi_area(s.region, local, l, 1), 0.0, 1e-9);
  }
}

TEST(GradDisplacement, FirstMomentsMatchCenteredCoordinates) {
  Region s(16, 4, 5, 1, ChannelSpec{0.125, 0.5}, 0.8, {{1e9, 1e9, 1e-10}, {1e5, 1e5, 1e-6}});
  const ContinuumMap& local = s.problem.continua;
  const CellConstraints cc = build_cell_constraints(s.region, local);
  for (int comp = 0; comp < 2; ++comp) {
    for (int m = 0; m < 2; ++m) {
      const VectorXd phi =
          solve_grad_displacement(s.problem, 1, comp, m).field({CellFamily::GradDisplacement, 1, comp, m});
      for (int l = 0; l < s.region.sub_rve_count(); ++l) {
        for (int j = 0; j < 2; ++j) {
          const double area = psi_area(s.region, local, l, j);
          const double want = j == 1 ? first_moment(s.region, local, l, j, m, cc.center) : 0.0;
          EXPECT_NEAR(moment(s.region, local, s.component(phi, comp), l, j), want, 1e-9 * area);
          EXPECT_NEAR(moment(s.region, local, s.component(phi, 1 - comp), l, j), 0.0, 1e-9 * area);
          EXPECT_NEAR(moment(s.region, local, s.component(phi, 2), l, j), 0.0, 1e-9 * area);
        }
      }
    }
  }
}

TEST(GradDisplacement, HomogeneousLinearFieldIsNearlyExact) {
  // Without heterogeneity the oversampled solution is (x_m - c_m) e_s plus a
  // boundary layer that the constraints damp away from the region edge.
  Region s(24, 6, 14, 2, UniformSpec{}, 0.0);
  const CellConstraints cc = build_cell_constraints(s.region, s.problem.continua);
  const VectorXd phi = solve_grad_displacement(s.problem, 0, 0, 0).field({CellFamily::GradDisplacement, 0, 0, 0});
  double worst = 0.0;
  for (int e : s.region.center_elements()) {
    for (int a : s.region.submesh.triangle(e)) {
      const double want = s.region.submesh.node(a).x - cc.center.x;
      worst = std::max(worst, std::abs(phi[a] - want));
    }
  }
  EXPECT_LT(worst, 0.05 * s.grid.hx());
}

TEST(GradPressure, DarcyEnergyOverCentralRve) {
  Region s(28, 7, 24, 3, UniformSpec{}, 0.0);
  const VectorXd phi = solve_grad_pressure(s.problem, 0, 0).field({CellFamily::GradPressure, 0, -1, 0});
  const auto center = s.region.center_elements();
  const SparseOperator a = assemble_darcy(s.region.submesh, s.problem.material, center);
  const VectorXd p = s.component(phi, 2);
  const double area = s.grid.hx() * s.grid.hy();
  EXPECT_NEAR(p.dot(a * p) / area, 1.0, 0.05);
}

TEST(GradPressure, ChannelMomentsAndZeroTargets) {
  Region s(16, 4, 6, 1, ChannelSpec{0.125, 0.5}, 0.8, {{1e9, 1e9, 1e-10}, {1e5, 1e5, 1e-6}});
  const ContinuumMap& local = s.problem.continua;
  const CellConstraints cc = build_cell_constraints(s.region, local);
  const CellBasisSet b = solve_all(s.problem);
  for (int m = 0; m < 2; ++m) {
    const VectorXd phi = b.field({CellFamily::GradPressure, 0, -1, m});
    for (int l = 0; l < s.region.sub_rve_count(); ++l) {
      for (int j = 0; j < 2; ++j) {
        const double area = psi_area(s.region, local, l, j);
        const double want = j == 0 ? first_moment(s.region, local, l, j, m, cc.center) : 0.0;
        EXPECT_NEAR(moment(s.region, local, s.component(phi, 2), l, j), want, 1e-9 * area);
      }
    }
  }
}

TEST(SolveAll, CountsResidualsAndDeterminism) {
  Region s(16, 4, 5, 1, ChannelSpec{0.125, 0.5}, 0.8, {{1e9, 1e9, 1e-10}, {1e5, 1e5, 1e-6}});
  const CellBasisSet a = solve_all(s.problem);
  EXPECT_EQ(a.keys.size(), 18u);
  EXPECT_EQ(a.fields.cols(), 18);
  EXPECT_TRUE(a.fields.allFinite());
  EXPECT_LT(a.diagnostics.constraint_residual, 1e-9);
  EXPECT_LT(a.diagnostics.stationarity_residual, 1e-9);
  const CellBasisSet b = solve_all(s.problem);
  EXPECT_EQ((a.fields - b.fields).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((a.multipliers - b.multipliers).cwiseAbs().maxCoeff(), 0.0);

  Region one(12, 3, 4, 1, UniformSpec{}, 0.8);
  EXPECT_EQ(solve_all(one.problem).keys.size(), 9u);
}

TEST(SolveAll, SubsetMatchesFullSolve) {
  Region s(16, 4, 5, 1, ChannelSpec{0.125, 0.5}, 0.8, {{1e9, 1e9, 1e-10}, {1e5, 1e5, 1e-6}});
  const CellBasisSet all = solve_all(s.problem);
  const CellKey key{CellFamily::GradDisplacement, 1, 0, 1};
  const VectorXd alone = solve_grad_displacement(s.problem, 1, 0, 1).field(key);
  const VectorXd within = all.field(key);
  EXPECT_LT((alone - within).cwiseAbs().maxCoeff(), 1e-9 * within.cwiseAbs().maxCoeff());
  EXPECT_THROW((void)solve_avg_pressure(s.problem, 0).field(key), Error);
}

TEST(Expansion, ConstantsAreReproduced) {
  // sum_i U_is phi_is + P_i phi_i has continuum averages (U_js, P_j) on every sub-RVE.
  Region s(16, 4, 9, 1, ChannelSpec{0.125, 0.5}, 0.8, {{1e9, 1e9, 1e-10}, {1e5, 1e5, 1e-6}});
  const ContinuumMap& local = s.problem.continua;
  const CellBasisSet b = solve_all(s.problem);
  const double u[2][2] = {{0.3, -1.2}, {2.0, 0.7}};
  const double p[2] = {1e6, 4e5};
  VectorXd field = VectorXd::Zero(3 * s.n());
  for (int i = 0; i < 2; ++i) {
    for (int c = 0; c < 2; ++c) field += u[i][c] * b.field({CellFamily::AvgDisplacement, i, c, -1});
    field += p[i] * b.field({CellFamily::AvgPressure, i, -1, -1});
  }
  for (int l = 0; l < s.region.sub_rve_count(); ++l) {
    for (int j = 0; j < 2; ++j) {
      const double area = psi_area(s.region, local, l, j);
      for (int c = 0; c < 2; ++c) {
        EXPECT_NEAR(moment(s.region, local, s.component(field, c), l, j) / area, u[j][c], 1e-9 * 2.0);
      }
      EXPECT_NEAR(moment(s.region, local, s.component(field, 2), l, j) / area, p[j], 1e-9 * 1e6);
    }
  }
}

}  // namespace
}  // namespace mcporo
