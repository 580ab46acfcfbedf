#include "mcporo/macro_solver.hpp"

#include <cmath>
#include <string>

#include "mcporo/error.hpp"

namespace mcporo {

std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::Full:
      return "full";
    case ModelVariant::Simplified1:
      return "simplified1";
    case ModelVariant::Simplified2:
      return "simplified2";
  }
  return "?";
}

ModelVariant parse_variant(std::string_view name) {
  if (name == "full") return ModelVariant::Full;
  if (name == "simplified1") return ModelVariant::Simplified1;
  if (name == "simplified2") return ModelVariant::Simplified2;
  throw Error(ErrorKind::Config, "unknown model variant '" + std::string(name) + "'");
}

bool keeps_family(ModelVariant v, FamilyId id) {
  using K = TensorKind;
  using F = Flavor;
  switch (v) {
    case ModelVariant::Full:
      return true;
    case ModelVariant::Simplified1:
      switch (id.flavor) {
        case F::UU:
          return !id.temporal();
        case F::PU:
          return id.kind == K::B || id.kind == K::Bbar;
        case F::UP:
          return id.kind == K::B || id.kind == K::Bbar || id.kind == K::G || id.kind == K::Gbar;
        case F::PP:
          return id.kind == K::A || id.kind == K::C || id.kind == K::D || id.kind == K::H;
      }
      return false;
    case ModelVariant::Simplified2:
      switch (id.flavor) {
        case F::UU:
          return id.kind == K::A || id.kind == K::C;
        case F::PU:
          return id.kind == K::B;
        case F::UP:
          return id.kind == K::G;
        case F::PP:
          return id.kind == K::A || id.kind == K::C || id.kind == K::H;
      }
      return false;
  }
  return false;
}

namespace {

// Integrals over one rectangle of products of bilinear shape-function parts:
// part 0 is the value, 1 the x-derivative, 2 the y-derivative.
struct ElementIntegrals {
  double v[3][3][4][4] = {};  // [test part][trial part][a][b]
  double load[4] = {};        // int N_a
};

ElementIntegrals element_integrals(double hx, double hy) {
  ElementIntegrals out;
  const double g = 0.5 / std::sqrt(3.0);
  const double pts[2] = {0.5 - g, 0.5 + g};
  // Corner a at reference position (ra, sa), counterclockwise from lower-left.
  const int ref[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const double w = 0.25 * hx * hy;
  for (double xi : pts) {
    for (double eta : pts) {
      double part[4][3];
      for (int a = 0; a < 4; ++a) {
        const double fx = ref[a][0] ? xi : 1.0 - xi;
        const double fy = ref[a][1] ? eta : 1.0 - eta;
        const double dfx = (ref[a][0] ? 1.0 : -1.0) / hx;
        const double dfy = (ref[a][1] ? 1.0 : -1.0) / hy;
        part[a][0] = fx * fy;
        part[a][1] = dfx * fy;
        part[a][2] = fx * dfy;
      }
      for (int a = 0; a < 4; ++a) {
        out.load[a] += w * part[a][0];
        for (int b = 0; b < 4; ++b) {
          for (int p = 0; p < 3; ++p) {
            for (int q = 0; q < 3; ++q) out.v[p][q][a][b] += w * part[a][p] * part[b][q];
          }
        }
      }
    }
  }
  return out;
}

// Macro field and shape-function part for row/column `index` of a family matrix.
struct SideField {
  int field;
  int part;
};

SideField side_field(bool displacement, bool gradient, int index, int n) {
  const int slot = gradient ? index / 2 : index;
  const int part = gradient ? 1 + index % 2 : 0;
  return {displacement ? slot : 2 * n + slot, part};
}

}  // namespace

MacroOperators assemble_macro_families(const std::array<bool, kFamilyCount>& keep,
                                       const std::vector<EffectiveTensors>& tensors, const CoarseGrid& grid) {
  if (static_cast<int>(tensors.size()) != grid.block_count()) {
    throw Error(ErrorKind::MissingTensor, "expected " + std::to_string(grid.block_count()) +
                                              " tensor records, got " + std::to_string(tensors.size()));
  }
  const int n = tensors.empty() ? 1 : tensors.front().n_continua;
  const MacroLayout layout(n, grid.node_count());
  for (std::size_t b = 0; b < tensors.size(); ++b) {
    if (tensors[b].block != static_cast<int>(b) || tensors[b].n_continua != n) {
      throw Error(ErrorKind::MissingTensor, "tensor record for block " + std::to_string(b) + " is missing");
    }
  }
  const ElementIntegrals ints = element_integrals(grid.hx(), grid.hy());

  std::vector<Eigen::Triplet<double>> spatial;
  std::vector<Eigen::Triplet<double>> temporal;
  Vector load = Vector::Zero(layout.size());
  for (int b = 0; b < grid.block_count(); ++b) {
    const auto nodes = grid.block_nodes(b);
    const EffectiveTensors& t = tensors[static_cast<std::size_t>(b)];
    for (int k = 0; k < kFamilyCount; ++k) {
      if (!keep[static_cast<std::size_t>(k)]) continue;
      const FamilyId id = FamilyId::from_index(k);
      const Eigen::MatrixXd& e = t.families[static_cast<std::size_t>(k)];
      auto& dst = id.temporal() ? temporal : spatial;
      for (int r = 0; r < e.rows(); ++r) {
        const SideField test = side_field(id.test_is_displacement(), id.test_gradient(), r, n);
        for (int c = 0; c < e.cols(); ++c) {
          const double coef = e(r, c);
          if (coef == 0.0) continue;
          const SideField trial = side_field(id.trial_is_displacement(), id.trial_gradient(), c, n);
          for (int a = 0; a < 4; ++a) {
            for (int bb = 0; bb < 4; ++bb) {
              const double v = ints.v[test.part][trial.part][a][bb];
              if (v == 0.0) continue;
              dst.emplace_back(layout.index(test.field, nodes[static_cast<std::size_t>(a)]),
                               layout.index(trial.field, nodes[static_cast<std::size_t>(bb)]), coef * v);
            }
          }
        }
      }
    }
    for (int a = 0; a < 4; ++a) {
      const int node = nodes[static_cast<std::size_t>(a)];
      for (int slot = 0; slot < 2 * n; ++slot) load[layout.index(slot, node)] += t.source_u[slot] * ints.load[a];
      for (int j = 0; j < n; ++j) load[layout.index(layout.pressure_field(j), node)] += t.source_p[j] * ints.load[a];
    }
  }
  MacroOperators out;
  out.spatial = SparseOperator(layout.size(), layout.size());
  out.spatial.setFromTriplets(spatial.begin(), spatial.end());
  out.spatial.makeCompressed();
  out.temporal = SparseOperator(layout.size(), layout.size());
  out.temporal.setFromTriplets(temporal.begin(), temporal.end());
  out.temporal.makeCompressed();
  out.load = std::move(load);
  return out;
}

MacroOperators assemble_macro(ModelVariant variant, const std::vector<EffectiveTensors>& tensors,
                              const CoarseGrid& grid) {
  std::array<bool, kFamilyCount> keep{};
  for (int k = 0; k < kFamilyCount; ++k) keep[static_cast<std::size_t>(k)] = keeps_family(variant, FamilyId::from_index(k));
  return assemble_macro_families(keep, tensors, grid);
}

Constraints impose_macro_bcs(const CoarseGrid& grid, const MacroLayout& layout, const BoundarySpec& spec) {
  std::vector<std::pair<int, double>> fixed;
  for (const auto& c : spec.conditions) {
    std::vector<int> fields;
    for (int i = 0; i < layout.n_continua(); ++i) {
      switch (c.field) {
        case Field::U1:
          fields.push_back(layout.displacement_field(i, 0));
          break;
        case Field::U2:
          fields.push_back(layout.displacement_field(i, 1));
          break;
        case Field::P:
          fields.push_back(layout.pressure_field(i));
          break;
      }
    }
    bool any = false;
    for (int node = 0; node < grid.node_count(); ++node) {
      if (!grid.node_on_side(node, c.side)) continue;
      any = true;
      const double v = c.value ? c.value(grid.node(node)) : 0.0;
      for (int f : fields) fixed.emplace_back(layout.index(f, node), v);
    }
    if (!any) {
      throw Error(ErrorKind::UnknownBoundaryTag, "coarse grid has no nodes on side " + std::string(to_string(c.side)));
    }
  }
  return Constraints(layout.size(), fixed);
}

Eigen::MatrixXd macro_kernel_modes(const CoarseGrid& grid, const MacroLayout& layout, bool with_pressure) {
  const Point c = grid.domain().center();
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(layout.size(), with_pressure ? 4 : 3);
  for (int node = 0; node < grid.node_count(); ++node) {
    const Point x = grid.node(node);
    for (int i = 0; i < layout.n_continua(); ++i) {
      z(layout.index(layout.displacement_field(i, 0), node), 0) = 1.0;
      z(layout.index(layout.displacement_field(i, 1), node), 1) = 1.0;
      z(layout.index(layout.displacement_field(i, 0), node), 2) = -(x.y - c.y);
      z(layout.index(layout.displacement_field(i, 1), node), 2) = x.x - c.x;
      if (with_pressure) z(layout.index(layout.pressure_field(i), node), 3) = 1.0;
    }
  }
  return z;
}

MacroSolver::MacroSolver(const MacroOperators& ops, const Constraints& constraints, const MacroLayout& layout,
                         const CoarseGrid& grid, double tau)
    : temporal_(ops.temporal), load_(ops.load), constraints_(constraints), tau_(tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "time step must be positive");
  if (ops.spatial.rows() != layout.size() || constraints.size() != layout.size()) {
    throw Error(ErrorKind::InvalidArgument, "macro operator and layout disagree in size");
  }
  const SparseOperator system = ops.spatial + ops.temporal / tau;
  const SparseOperator reduced = constraints_.free_block(system);
  coupling_ = constraints_.coupling_block(system);
  check_kernel_modes(reduced, constraints_.free_dofs(), macro_kernel_modes(grid, layout, false), "macro system");
  solver_ = std::make_unique<SparseDirectSolver>(reduced, ErrorKind::SingularSystem, "macro system");
}

MacroState MacroSolver::step(const MacroState& state) const {
  if (state.x.size() != constraints_.size()) throw Error(ErrorKind::InvalidArgument, "macro state size mismatch");
  const Vector rhs = load_ + temporal_ * state.x / tau_;
  Vector b = constraints_.restrict(rhs);
  if (!constraints_.fixed_dofs().empty()) b -= coupling_ * constraints_.fixed_values();
  return {constraints_.expand(solver_->solve(b)), state.t + tau_};
}

MacroState init_macro(const CoarseGrid& grid, const MacroLayout& layout, const Eigen::MatrixXd& block_averages,
                      double t) {
  if (block_averages.rows() != grid.block_count() || block_averages.cols() != layout.field_count()) {
    throw Error(ErrorKind::InvalidArgument, "block averages have the wrong shape");
  }
  Vector sum = Vector::Zero(layout.size());
  std::vector<int> count(static_cast<std::size_t>(grid.node_count()), 0);
  for (int b = 0; b < grid.block_count(); ++b) {
    for (int node : grid.block_nodes(b)) {
      ++count[static_cast<std::size_t>(node)];
      for (int f = 0; f < layout.field_count(); ++f) sum[layout.index(f, node)] += block_averages(b, f);
    }
  }
  for (int node = 0; node < grid.node_count(); ++node) {
    for (int f = 0; f < layout.field_count(); ++f) sum[layout.index(f, node)] /= count[static_cast<std::size_t>(node)];
  }
  return {std::move(sum), t};
}

Eigen::MatrixXd macro_block_averages(const CoarseGrid& grid, const MacroLayout& layout, const MacroState& state) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(grid.block_count(), layout.field_count());
  for (int b = 0; b < grid.block_count(); ++b) {
    for (int node : grid.block_nodes(b)) {
      for (int f = 0; f < layout.field_count(); ++f) out(b, f) += 0.25 * state.x[layout.index(f, node)];
    }
  }
  return out;
}

}  // namespace mcporo
