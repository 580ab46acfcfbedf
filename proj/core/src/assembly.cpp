#include "mcporo/assembly.hpp"

#include <vector>

#include "mcporo/error.hpp"

namespace mcporo {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

template <class Fn>
void for_each_element(const FineMesh& mesh, const ElementSubset& subset, Fn&& fn) {
  if (subset) {
    for (int e : *subset) fn(e);
  } else {
    for (int e = 0; e < mesh.element_count(); ++e) fn(e);
  }
}

std::size_t element_count(const FineMesh& mesh, const ElementSubset& subset) {
  return subset ? subset->size() : static_cast<std::size_t>(mesh.element_count());
}

void check_material(const FineMesh& mesh, const MaterialField& mat) {
  if (mat.size() != mesh.element_count()) {
    throw Error(ErrorKind::InvalidArgument, "material field does not match mesh element count");
  }
}

SparseOperator from_triplets(int rows, int cols, const Triplets& t) {
  SparseOperator m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

P1Gradients p1_gradients(const FineMesh& mesh, int e) {
  const auto& t = mesh.triangle(e);
  P1Gradients g;
  g.area = mesh.signed_area(e);
  const double inv2a = 1.0 / (2.0 * g.area);
  for (int k = 0; k < 3; ++k) {
    const Point& p1 = mesh.node(t[static_cast<std::size_t>((k + 1) % 3)]);
    const Point& p2 = mesh.node(t[static_cast<std::size_t>((k + 2) % 3)]);
    g.dx[static_cast<std::size_t>(k)] = (p1.y - p2.y) * inv2a;
    g.dy[static_cast<std::size_t>(k)] = (p2.x - p1.x) * inv2a;
  }
  return g;
}

std::array<Point, 3> mid_edge_points(const FineMesh& mesh, int e) {
  const auto& t = mesh.triangle(e);
  std::array<Point, 3> q;
  for (int k = 0; k < 3; ++k) {
    const Point& p1 = mesh.node(t[static_cast<std::size_t>((k + 1) % 3)]);
    const Point& p2 = mesh.node(t[static_cast<std::size_t>((k + 2) % 3)]);
    q[static_cast<std::size_t>(k)] = {0.5 * (p1.x + p2.x), 0.5 * (p1.y + p2.y)};
  }
  return q;
}

SparseOperator assemble_elasticity(const FineMesh& mesh, const MaterialField& mat, ElementSubset subset) {
  check_material(mesh, mat);
  const int n = mesh.node_count();
  Triplets trip;
  trip.reserve(36 * element_count(mesh, subset));
  for_each_element(mesh, subset, [&](int e) {
    const auto g = p1_gradients(mesh, e);
    const auto& t = mesh.triangle(e);
    const double lam = mat.lambda[static_cast<std::size_t>(e)];
    const double mu = mat.mu[static_cast<std::size_t>(e)];
    const std::array<const std::array<double, 3>*, 2> d = {&g.dx, &g.dy};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const auto ua = static_cast<std::size_t>(a);
        const auto ub = static_cast<std::size_t>(b);
        const double dot = g.dx[ua] * g.dx[ub] + g.dy[ua] * g.dy[ub];
        for (int r = 0; r < 2; ++r) {
          for (int s = 0; s < 2; ++s) {
            const double da_r = (*d[static_cast<std::size_t>(r)])[ua];
            const double da_s = (*d[static_cast<std::size_t>(s)])[ua];
            const double db_r = (*d[static_cast<std::size_t>(r)])[ub];
            const double db_s = (*d[static_cast<std::size_t>(s)])[ub];
            const double v = g.area * (mu * ((r == s ? dot : 0.0) + da_s * db_r) + lam * da_r * db_s);
            trip.emplace_back(r * n + t[ua], s * n + t[ub], v);
          }
        }
      }
    }
  });
  return from_triplets(2 * n, 2 * n, trip);
}

SparseOperator assemble_pressure_gradient_coupling(const FineMesh& mesh, const MaterialField& mat,
                                                   ElementSubset subset) {
  check_material(mesh, mat);
  const int n = mesh.node_count();
  Triplets trip;
  trip.reserve(18 * element_count(mesh, subset));
  for_each_element(mesh, subset, [&](int e) {
    const auto g = p1_gradients(mesh, e);
    const auto& t = mesh.triangle(e);
    // int phi_a = area / 3 for every vertex.
    const double w = mat.alpha[static_cast<std::size_t>(e)] * g.area / 3.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const auto ub = static_cast<std::size_t>(b);
        trip.emplace_back(t[static_cast<std::size_t>(a)], t[ub], w * g.dx[ub]);
        trip.emplace_back(n + t[static_cast<std::size_t>(a)], t[ub], w * g.dy[ub]);
      }
    }
  });
  return from_triplets(2 * n, n, trip);
}

SparseOperator assemble_divergence_coupling(const FineMesh& mesh, const MaterialField& mat, ElementSubset subset) {
  check_material(mesh, mat);
  const int n = mesh.node_count();
  Triplets trip;
  trip.reserve(18 * element_count(mesh, subset));
  for_each_element(mesh, subset, [&](int e) {
    const auto g = p1_gradients(mesh, e);
    const auto& t = mesh.triangle(e);
    const double w = mat.alpha[static_cast<std::size_t>(e)] * g.area / 3.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const auto ub = static_cast<std::size_t>(b);
        trip.emplace_back(t[static_cast<std::size_t>(a)], t[ub], w * g.dx[ub]);
        trip.emplace_back(t[static_cast<std::size_t>(a)], n + t[ub], w * g.dy[ub]);
      }
    }
  });
  return from_triplets(n, 2 * n, trip);
}

SparseOperator assemble_darcy(const FineMesh& mesh, const MaterialField& mat, ElementSubset subset) {
  check_material(mesh, mat);
  const int n = mesh.node_count();
  Triplets trip;
  trip.reserve(9 * element_count(mesh, subset));
  for_each_element(mesh, subset, [&](int e) {
    const auto g = p1_gradients(mesh, e);
    const auto& t = mesh.triangle(e);
    const double k = mat.kappa[static_cast<std::size_t>(e)] * g.area;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const auto ua = static_cast<std::size_t>(a);
        const auto ub = static_cast<std::size_t>(b);
        trip.emplace_back(t[ua], t[ub], k * (g.dx[ua] * g.dx[ub] + g.dy[ua] * g.dy[ub]));
      }
    }
  });
  return from_triplets(n, n, trip);
}

SparseOperator assemble_storage(const FineMesh& mesh, const MaterialField& mat, ElementSubset subset) {
  check_material(mesh, mat);
  const int n = mesh.node_count();
  Triplets trip;
  trip.reserve(9 * element_count(mesh, subset));
  for_each_element(mesh, subset, [&](int e) {
    const auto& t = mesh.triangle(e);
    const double w = mat.storage[static_cast<std::size_t>(e)] * mesh.area(e) / 3.0;
    // Mid-edge rule: at point q, phi_k = 1/2 for k != q and 0 for k == q.
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        double sum = 0.0;
        for (int q = 0; q < 3; ++q) {
          const double pa = (a == q) ? 0.0 : 0.5;
          const double pb = (b == q) ? 0.0 : 0.5;
          sum += pa * pb;
        }
        trip.emplace_back(t[static_cast<std::size_t>(a)], t[static_cast<std::size_t>(b)], w * sum);
      }
    }
  });
  return from_triplets(n, n, trip);
}

SparseOperator stack_blocks(std::span<const int> row_sizes, std::span<const int> col_sizes,
                            std::span<const SparseOperator* const> blocks) {
  if (blocks.size() != row_sizes.size() * col_sizes.size()) {
    throw Error(ErrorKind::InvalidArgument, "block layout mismatch");
  }
  int rows = 0;
  int cols = 0;
  std::vector<int> roff;
  std::vector<int> coff;
  for (int r : row_sizes) {
    roff.push_back(rows);
    rows += r;
  }
  for (int c : col_sizes) {
    coff.push_back(cols);
    cols += c;
  }
  std::size_t nnz = 0;
  for (const auto* b : blocks) {
    if (b) nnz += static_cast<std::size_t>(b->nonZeros());
  }
  Triplets trip;
  trip.reserve(nnz);
  for (std::size_t bi = 0; bi < row_sizes.size(); ++bi) {
    for (std::size_t bj = 0; bj < col_sizes.size(); ++bj) {
      const auto* b = blocks[bi * col_sizes.size() + bj];
      if (!b) continue;
      if (b->rows() != row_sizes[bi] || b->cols() != col_sizes[bj]) {
        throw Error(ErrorKind::InvalidArgument, "block size mismatch");
      }
      for (int k = 0; k < b->outerSize(); ++k) {
        for (SparseOperator::InnerIterator it(*b, k); it; ++it) {
          trip.emplace_back(roff[bi] + static_cast<int>(it.row()), coff[bj] + static_cast<int>(it.col()),
                            it.value());
        }
      }
    }
  }
  return from_triplets(rows, cols, trip);
}

SparseOperator BiotOperators::spatial() const {
  const int n = static_cast<int>(darcy.rows());
  const std::array<int, 2> rs = {2 * n, n};
  const std::array<const SparseOperator*, 4> b = {&elasticity, &gradient, nullptr, &darcy};
  return stack_blocks(rs, rs, b);
}

SparseOperator BiotOperators::temporal() const {
  const int n = static_cast<int>(darcy.rows());
  const std::array<int, 2> rs = {2 * n, n};
  const std::array<const SparseOperator*, 4> b = {nullptr, nullptr, &divergence, &storage};
  return stack_blocks(rs, rs, b);
}

BiotOperators assemble_biot(const FineMesh& mesh, const MaterialField& mat, ElementSubset subset) {
  return {assemble_elasticity(mesh, mat, subset), assemble_pressure_gradient_coupling(mesh, mat, subset),
          assemble_darcy(mesh, mat, subset), assemble_storage(mesh, mat, subset),
          assemble_divergence_coupling(mesh, mat, subset)};
}

Vector LoadVectors::combined() const {
  Vector out(u.size() + p.size());
  out << u, p;
  return out;
}

LoadVectors assemble_loads(const FineMesh& mesh, const VectorField& f, const ScalarField& g, ElementSubset subset) {
  const int n = mesh.node_count();
  LoadVectors out{Vector::Zero(2 * n), Vector::Zero(n)};
  for_each_element(mesh, subset, [&](int e) {
    const auto& t = mesh.triangle(e);
    const double w = mesh.area(e) / 3.0;
    const auto pts = mid_edge_points(mesh, e);
    for (int q = 0; q < 3; ++q) {
      const Point& x = pts[static_cast<std::size_t>(q)];
      const auto fv = f ? f(x) : std::array<double, 2>{0.0, 0.0};
      const double gv = g ? g(x) : 0.0;
      for (int a = 0; a < 3; ++a) {
        if (a == q) continue;
        const int node = t[static_cast<std::size_t>(a)];
        out.u[node] += w * 0.5 * fv[0];
        out.u[n + node] += w * 0.5 * fv[1];
        out.p[node] += w * 0.5 * gv;
      }
    }
  });
  return out;
}

}  // namespace mcporo
