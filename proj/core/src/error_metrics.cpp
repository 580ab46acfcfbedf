#include "mcporo/error_metrics.hpp"

#include <cmath>
#include <string>

#include "mcporo/error.hpp"

namespace mcporo {

BlockAverages compute_block_averages(const FineMesh& mesh, const CoarseGrid& grid, const ContinuumMap& cont,
                                     const FineState& state) {
  if (state.node_count() != mesh.node_count()) {
    throw Error(ErrorKind::InvalidArgument, "fine state does not match the mesh");
  }
  if (cont.size() != mesh.element_count()) {
    throw Error(ErrorKind::InvalidArgument, "continuum map does not match the mesh");
  }
  const int n = cont.n_continua();
  const int nb = grid.block_count();
  BlockAverages out;
  out.n_continua = n;
  out.values = Eigen::MatrixXd::Zero(nb, 3 * n);
  out.areas = Eigen::MatrixXd::Zero(nb, n);
  const auto u1 = state.u1();
  const auto u2 = state.u2();
  const auto p = state.p();
  for (int e = 0; e < mesh.element_count(); ++e) {
    const int b = grid.element_block(e);
    const int i = cont[e];
    const auto& tri = mesh.triangle(e);
    const double w = mesh.area(e) / 3.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double sp = 0.0;
    for (int v : tri) {
      s1 += u1[v];
      s2 += u2[v];
      sp += p[v];
    }
    out.areas(b, i) += mesh.area(e);
    out.values(b, i * 2) += w * s1;
    out.values(b, i * 2 + 1) += w * s2;
    out.values(b, 2 * n + i) += w * sp;
  }
  for (int b = 0; b < nb; ++b) {
    for (int i = 0; i < n; ++i) {
      const double a = out.areas(b, i);
      if (a <= 0.0) {
        out.excluded.emplace_back(b, i);
        continue;
      }
      out.values(b, i * 2) /= a;
      out.values(b, i * 2 + 1) /= a;
      out.values(b, 2 * n + i) /= a;
    }
  }
  return out;
}

MacroState init_macro_from_fine(const FineMesh& mesh, const CoarseGrid& grid, const ContinuumMap& cont,
                                const FineState& initial) {
  BlockAverages avg = compute_block_averages(mesh, grid, cont, initial);
  const int n = avg.n_continua;
  for (const auto& [b, i] : avg.excluded) {
    const double total = avg.areas.row(b).sum();
    for (int s = 0; s < 2; ++s) {
      double v = 0.0;
      for (int k = 0; k < n; ++k) v += avg.areas(b, k) * avg.values(b, k * 2 + s);
      avg.values(b, i * 2 + s) = v / total;
    }
    double v = 0.0;
    for (int k = 0; k < n; ++k) v += avg.areas(b, k) * avg.values(b, 2 * n + k);
    avg.values(b, 2 * n + i) = v / total;
  }
  return init_macro(grid, MacroLayout(n, grid.node_count()), avg.values, initial.t);
}

ErrorReport compute_errors(const Eigen::MatrixXd& macro_averages, const BlockAverages& fine) {
  const int n = fine.n_continua;
  if (macro_averages.rows() != fine.values.rows() || macro_averages.cols() != fine.values.cols()) {
    throw Error(ErrorKind::InvalidArgument, "macro and fine averages have different shapes");
  }
  ErrorReport out;
  out.e_p.assign(static_cast<std::size_t>(n), 0.0);
  out.e_u.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double num_p = 0.0;
    double den_p = 0.0;
    double num_u = 0.0;
    double den_u = 0.0;
    for (int b = 0; b < fine.values.rows(); ++b) {
      if (fine.is_excluded(b, i)) continue;
      const double dp = macro_averages(b, 2 * n + i) - fine.values(b, 2 * n + i);
      num_p += dp * dp;
      den_p += fine.values(b, 2 * n + i) * fine.values(b, 2 * n + i);
      for (int s = 0; s < 2; ++s) {
        const double du = macro_averages(b, i * 2 + s) - fine.values(b, i * 2 + s);
        num_u += du * du;
        den_u += fine.values(b, i * 2 + s) * fine.values(b, i * 2 + s);
      }
    }
    if (den_p == 0.0) throw Error(ErrorKind::ZeroDenominator, "fine pressure of continuum " + std::to_string(i + 1) + " is zero");
    if (den_u == 0.0) {
      throw Error(ErrorKind::ZeroDenominator, "fine displacement of continuum " + std::to_string(i + 1) + " is zero");
    }
    out.e_p[static_cast<std::size_t>(i)] = std::sqrt(num_p / den_p);
    out.e_u[static_cast<std::size_t>(i)] = std::sqrt(num_u / den_u);
  }
  return out;
}

}  // namespace mcporo
