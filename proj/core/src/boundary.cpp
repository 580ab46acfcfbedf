#include "mcporo/boundary.hpp"

#include <algorithm>

#include "mcporo/error.hpp"

namespace mcporo {

bool BoundarySpec::constrains(Field f) const {
  return std::any_of(conditions.begin(), conditions.end(), [f](const auto& c) { return c.field == f; });
}

Constraints::Constraints(int n_dofs, const std::vector<std::pair<int, double>>& fixed) : n_(n_dofs) {
  std::vector<double> value(static_cast<std::size_t>(n_dofs), 0.0);
  std::vector<char> is_fixed(static_cast<std::size_t>(n_dofs), 0);
  for (const auto& [dof, v] : fixed) {
    if (dof < 0 || dof >= n_dofs) throw Error(ErrorKind::InvalidArgument, "constrained dof out of range");
    is_fixed[static_cast<std::size_t>(dof)] = 1;
    value[static_cast<std::size_t>(dof)] = v;
  }
  slot_.resize(static_cast<std::size_t>(n_dofs));
  std::vector<double> fixed_values;
  for (int d = 0; d < n_dofs; ++d) {
    if (is_fixed[static_cast<std::size_t>(d)]) {
      slot_[static_cast<std::size_t>(d)] = -static_cast<int>(fixed_.size()) - 1;
      fixed_.push_back(d);
      fixed_values.push_back(value[static_cast<std::size_t>(d)]);
    } else {
      slot_[static_cast<std::size_t>(d)] = static_cast<int>(free_.size());
      free_.push_back(d);
    }
  }
  values_ = Eigen::Map<const Vector>(fixed_values.data(), static_cast<Eigen::Index>(fixed_values.size()));
}

namespace {

SparseOperator select(const SparseOperator& a, const std::vector<int>& slot, bool cols_fixed, int n_rows,
                      int n_cols) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(a, k); it; ++it) {
      const int rs = slot[static_cast<std::size_t>(it.row())];
      const int cs = slot[static_cast<std::size_t>(it.col())];
      if (rs < 0) continue;
      if (!cols_fixed && cs >= 0) trip.emplace_back(rs, cs, it.value());
      if (cols_fixed && cs < 0) trip.emplace_back(rs, -cs - 1, it.value());
    }
  }
  SparseOperator out(n_rows, n_cols);
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

}  // namespace

SparseOperator Constraints::free_block(const SparseOperator& a) const {
  return select(a, slot_, false, static_cast<int>(free_.size()), static_cast<int>(free_.size()));
}

SparseOperator Constraints::coupling_block(const SparseOperator& a) const {
  return select(a, slot_, true, static_cast<int>(free_.size()), static_cast<int>(fixed_.size()));
}

Vector Constraints::restrict(const Vector& full) const {
  Vector out(static_cast<Eigen::Index>(free_.size()));
  for (std::size_t i = 0; i < free_.size(); ++i) out[static_cast<Eigen::Index>(i)] = full[free_[i]];
  return out;
}

Vector Constraints::expand(const Vector& free) const {
  Vector out(n_);
  for (std::size_t i = 0; i < free_.size(); ++i) out[free_[i]] = free[static_cast<Eigen::Index>(i)];
  for (std::size_t i = 0; i < fixed_.size(); ++i) out[fixed_[i]] = values_[static_cast<Eigen::Index>(i)];
  return out;
}

Constraints collect_dirichlet(const FineMesh& mesh, const DofLayout& layout, const BoundarySpec& spec) {
  std::vector<std::pair<int, double>> fixed;
  for (const auto& c : spec.conditions) {
    const auto nodes = mesh.side_nodes(c.side);
    if (nodes.empty()) {
      throw Error(ErrorKind::UnknownBoundaryTag, "mesh has no nodes on side " + std::string(to_string(c.side)));
    }
    for (int node : nodes) {
      fixed.emplace_back(layout.index(node, c.field), c.value ? c.value(mesh.node(node)) : 0.0);
    }
  }
  return Constraints(layout.size(), fixed);
}

ConstrainedSystem apply_dirichlet(const SparseOperator& op, const Vector& rhs, const Constraints& constraints) {
  if (op.rows() != constraints.size() || rhs.size() != constraints.size()) {
    throw Error(ErrorKind::InvalidArgument, "operator, right-hand side and constraints disagree in size");
  }
  Vector b = constraints.restrict(rhs);
  if (!constraints.fixed_dofs().empty()) b -= constraints.coupling_block(op) * constraints.fixed_values();
  return {constraints.free_block(op), std::move(b), constraints};
}

}  // namespace mcporo
