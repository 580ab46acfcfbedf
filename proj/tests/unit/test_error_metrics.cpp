#include <cmath>

#include <gtest/gtest.h>

#include "mcporo/error.hpp"
#include "mcporo/error_metrics.hpp"

namespace mcporo {
namespace {

ContinuumMap single(const FineMesh& m) {
  return ContinuumMap(std::vector<int>(static_cast<std::size_t>(m.element_count()), 0), 1);
}

// Continuum 1 on the right half of the domain.
ContinuumMap halves(const FineMesh& m) {
  std::vector<int> ids(static_cast<std::size_t>(m.element_count()));
  for (int e = 0; e < m.element_count(); ++e) {
    ids[static_cast<std::size_t>(e)] = m.centroid(e).x > 0.5 ? 1 : 0;
  }
  return ContinuumMap(std::move(ids), 2);
}

TEST(BlockAverages, ConstantFieldEverywhere) {
  const FineMesh m = build_structured_mesh(8, 8);
  const CoarseGrid g = build_coarse_grid(m, 4);
  const ContinuumMap c = generate_microstructure(m, ChannelSpec{0.25, 0.5});
  const FineState s = interpolate_state(
      m, [](const Point&) { return std::array<double, 2>{2.0, -3.0}; }, [](const Point&) { return 7.0; });
  const BlockAverages a = compute_block_averages(m, g, c, s);
  ASSERT_EQ(a.values.rows(), 16);
  ASSERT_EQ(a.values.cols(), 6);
  for (int b = 0; b < 16; ++b) {
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(a.values(b, i * 2), 2.0, 1e-14);
      EXPECT_NEAR(a.values(b, i * 2 + 1), -3.0, 1e-14);
      EXPECT_NEAR(a.values(b, 4 + i), 7.0, 1e-14);
    }
    EXPECT_NEAR(a.areas(b, 0) + a.areas(b, 1), g.block(b).box.area(), 1e-15);
  }
}

TEST(BlockAverages, LinearFieldOverOneBlock) {
  const FineMesh m = build_structured_mesh(6, 6);
  const CoarseGrid g = build_coarse_grid(m, 1);
  const BlockAverages a =
      compute_block_averages(m, g, single(m), interpolate_state(m, {}, [](const Point& x) { return x.x; }));
  EXPECT_NEAR(a.values(0, 2), 0.5, 1e-15);
}

TEST(BlockAverages, HalfDomainContinuumHasItsOwnCentroid) {
  const FineMesh m = build_structured_mesh(8, 8);
  const CoarseGrid g = build_coarse_grid(m, 1);
  const BlockAverages a =
      compute_block_averages(m, g, halves(m), interpolate_state(m, {}, [](const Point& x) { return x.x; }));
  EXPECT_NEAR(a.values(0, 4), 0.25, 1e-15);
  EXPECT_NEAR(a.values(0, 5), 0.75, 1e-15);
  EXPECT_NEAR(a.areas(0, 1), 0.5, 1e-15);
}

TEST(BlockAverages, AbsentContinuumIsExcluded) {
  const FineMesh m = build_structured_mesh(8, 8);
  const CoarseGrid g = build_coarse_grid(m, 2);
  const BlockAverages a =
      compute_block_averages(m, g, halves(m), interpolate_state(m, {}, [](const Point&) { return 1.0; }));
  // Left blocks hold only continuum 0, right blocks only continuum 1.
  EXPECT_TRUE(a.is_excluded(g.block_id(0, 0), 1));
  EXPECT_TRUE(a.is_excluded(g.block_id(1, 1), 0));
  EXPECT_FALSE(a.is_excluded(g.block_id(1, 1), 1));
  EXPECT_EQ(a.excluded.size(), 4u);
  EXPECT_EQ(a.values(g.block_id(0, 0), 5), 0.0);
}

BlockAverages synthetic(int blocks, int n, unsigned seed) {
  std::srand(seed);
  BlockAverages a;
  a.n_continua = n;
  a.values = Eigen::MatrixXd::Random(blocks, 3 * n);
  a.areas = Eigen::MatrixXd::Constant(blocks, n, 0.1);
  return a;
}

TEST(Errors, IdenticalFieldsGiveZero) {
  const BlockAverages fine = synthetic(9, 2, 3);
  const ErrorReport r = compute_errors(fine.values, fine);
  ASSERT_EQ(r.e_p.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(r.e_p[static_cast<std::size_t>(i)], 0.0);
    EXPECT_EQ(r.e_u[static_cast<std::size_t>(i)], 0.0);
  }
}

TEST(Errors, UniformRelativePerturbation) {
  const BlockAverages fine = synthetic(16, 1, 4);
  const ErrorReport r = compute_errors(1.01 * fine.values, fine);
  EXPECT_NEAR(r.e_p[0], 0.01, 1e-14);
  EXPECT_NEAR(r.e_u[0], 0.01, 1e-14);
}

TEST(Errors, ScaleInvariant) {
  const BlockAverages fine = synthetic(16, 2, 5);
  const Eigen::MatrixXd macro = fine.values + 0.05 * Eigen::MatrixXd::Random(16, 6);
  const ErrorReport r = compute_errors(macro, fine);
  BlockAverages scaled = fine;
  scaled.values *= 1e6;
  const ErrorReport rs = compute_errors(1e6 * macro, scaled);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(rs.e_p[i], r.e_p[i], 1e-14 * r.e_p[i] + 1e-15);
    EXPECT_NEAR(rs.e_u[i], r.e_u[i], 1e-14 * r.e_u[i] + 1e-15);
  }
}

TEST(Errors, DisplacementNormUsesBothComponents) {
  BlockAverages fine;
  fine.n_continua = 1;
  fine.values = Eigen::MatrixXd::Zero(2, 3);
  fine.values << 3, 4, 1, 0, 0, 1;
  fine.areas = Eigen::MatrixXd::Constant(2, 1, 1.0);
  Eigen::MatrixXd macro = fine.values;
  macro(0, 0) = 3.5;  // error 0.5 against a norm of 5
  const ErrorReport r = compute_errors(macro, fine);
  EXPECT_NEAR(r.e_u[0], 0.1, 1e-15);
  EXPECT_EQ(r.e_p[0], 0.0);
}

TEST(Errors, ZeroReferenceThrows) {
  BlockAverages fine = synthetic(4, 1, 6);
  fine.values.col(2).setZero();
  try {
    (void)compute_errors(fine.values, fine);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroDenominator);
  }
}

TEST(Errors, ExcludedBlocksDoNotCount) {
  BlockAverages fine = synthetic(4, 2, 7);
  fine.areas(2, 1) = 0.0;
  fine.excluded.emplace_back(2, 1);
  Eigen::MatrixXd macro = fine.values;
  macro(2, 5) += 100.0;
  macro(2, 2) -= 50.0;
  const ErrorReport r = compute_errors(macro, fine);
  EXPECT_EQ(r.e_p[1], 0.0);
  EXPECT_EQ(r.e_u[1], 0.0);
}

TEST(Errors, ShapeMismatchIsRejected) {
  const BlockAverages fine = synthetic(4, 2, 8);
  EXPECT_THROW((void)compute_errors(Eigen::MatrixXd::Zero(4, 3), fine), Error);
}

}  // namespace
}  // namespace mcporo
