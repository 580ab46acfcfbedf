#include "mcporo/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mcporo/error.hpp"

namespace mcporo {

Side parse_side(std::string_view name) {
  if (name == "left") return Side::Left;
  if (name == "right") return Side::Right;
  if (name == "bottom") return Side::Bottom;
  if (name == "top") return Side::Top;
  throw Error(ErrorKind::UnknownBoundaryTag, "unknown boundary '" + std::string(name) + "'");
}

std::string_view to_string(Side side) {
  switch (side) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Bottom: return "bottom";
    case Side::Top: return "top";
  }
  return "?";
}

FineMesh::FineMesh(std::vector<Point> nodes, std::vector<Triangle> triangles,
                   std::optional<Structure> structure)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles)), structure_(structure) {
  if (nodes_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "mesh without nodes");
  }
  bbox_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
           std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const auto& p : nodes_) {
    bbox_.x0 = std::min(bbox_.x0, p.x);
    bbox_.y0 = std::min(bbox_.y0, p.y);
    bbox_.x1 = std::max(bbox_.x1, p.x);
    bbox_.y1 = std::max(bbox_.y1, p.y);
  }
  const double tol = 1e-12 * std::max(bbox_.width(), bbox_.height());
  tags_.assign(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& p = nodes_[i];
    std::uint8_t mask = 0;
    if (std::abs(p.x - bbox_.x0) <= tol) mask |= static_cast<std::uint8_t>(Side::Left);
    if (std::abs(p.x - bbox_.x1) <= tol) mask |= static_cast<std::uint8_t>(Side::Right);
    if (std::abs(p.y - bbox_.y0) <= tol) mask |= static_cast<std::uint8_t>(Side::Bottom);
    if (std::abs(p.y - bbox_.y1) <= tol) mask |= static_cast<std::uint8_t>(Side::Top);
    tags_[i] = mask;
  }
  for (std::size_t e = 0; e < triangles_.size(); ++e) {
    for (int v : triangles_[e]) {
      if (v < 0 || v >= node_count()) {
        throw Error(ErrorKind::InvalidArgument, "triangle references missing node");
      }
    }
    if (signed_area(static_cast<int>(e)) <= 0.0) {
      throw Error(ErrorKind::InvalidArgument,
                  "triangle " + std::to_string(e) + " is not counterclockwise");
    }
  }
}

double FineMesh::signed_area(int e) const {
  const auto& t = triangle(e);
  const Point& a = node(t[0]);
  const Point& b = node(t[1]);
  const Point& c = node(t[2]);
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Point FineMesh::centroid(int e) const {
  const auto& t = triangle(e);
  const Point& a = node(t[0]);
  const Point& b = node(t[1]);
  const Point& c = node(t[2]);
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

std::vector<int> FineMesh::side_nodes(Side side) const {
  std::vector<int> out;
  for (int i = 0; i < node_count(); ++i) {
    if (on_side(i, side)) out.push_back(i);
  }
  return out;
}

FineMesh build_structured_mesh(int nx, int ny, const BoundingBox& box) {
  if (nx < 1 || ny < 1) {
    throw Error(ErrorKind::InvalidArgument, "structured mesh needs nx, ny >= 1");
  }
  std::vector<Point> nodes;
  nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    // Endpoints are assigned exactly so that boundary and block edges match bit for bit.
    const double y = (j == ny) ? box.y1 : box.y0 + box.height() * j / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? box.x1 : box.x0 + box.width() * i / nx;
      nodes.push_back({x, y});
    }
  }
  std::vector<Triangle> tris;
  tris.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = j * (nx + 1) + i;
      const int n10 = n00 + 1;
      const int n01 = n00 + nx + 1;
      const int n11 = n01 + 1;
      tris.push_back({n00, n10, n11});
      tris.push_back({n00, n11, n01});
    }
  }
  return FineMesh(std::move(nodes), std::move(tris), FineMesh::Structure{nx, ny});
}

CoarseGrid::CoarseGrid(int n, BoundingBox domain, std::vector<Block> blocks,
                       std::vector<int> element_block)
    : n_(n), domain_(domain), blocks_(std::move(blocks)), element_block_(std::move(element_block)) {}

Point CoarseGrid::node(int id) const {
  const int ix = id % (n_ + 1);
  const int iy = id / (n_ + 1);
  const double x = (ix == n_) ? domain_.x1 : domain_.x0 + domain_.width() * ix / n_;
  const double y = (iy == n_) ? domain_.y1 : domain_.y0 + domain_.height() * iy / n_;
  return {x, y};
}

std::array<int, 4> CoarseGrid::block_nodes(int block) const {
  const int ix = block % n_;
  const int iy = block / n_;
  return {node_id(ix, iy), node_id(ix + 1, iy), node_id(ix + 1, iy + 1), node_id(ix, iy + 1)};
}

bool CoarseGrid::node_on_side(int node, Side side) const {
  const int ix = node % (n_ + 1);
  const int iy = node / (n_ + 1);
  switch (side) {
    case Side::Left: return ix == 0;
    case Side::Right: return ix == n_;
    case Side::Bottom: return iy == 0;
    case Side::Top: return iy == n_;
  }
  return false;
}

CoarseGrid build_coarse_grid(const FineMesh& mesh, int nc) {
  if (nc < 1) {
    throw Error(ErrorKind::InvalidArgument, "coarse grid needs at least one block");
  }
  const auto& st = mesh.structure();
  if (!st) {
    throw Error(ErrorKind::NonConforming, "coarse grids require a structured fine mesh");
  }
  if (st->nx % nc != 0 || st->ny % nc != 0) {
    throw Error(ErrorKind::NonConforming,
                "fine mesh " + std::to_string(st->nx) + "x" + std::to_string(st->ny) +
                    " does not conform to " + std::to_string(nc) + "x" + std::to_string(nc) +
                    " coarse blocks");
  }
  const BoundingBox dom = mesh.bbox();
  std::vector<CoarseGrid::Block> blocks(static_cast<std::size_t>(nc * nc));
  for (int iy = 0; iy < nc; ++iy) {
    for (int ix = 0; ix < nc; ++ix) {
      auto& b = blocks[static_cast<std::size_t>(iy * nc + ix)];
      b.id = iy * nc + ix;
      b.ix = ix;
      b.iy = iy;
      b.box = {ix == 0 ? dom.x0 : dom.x0 + dom.width() * ix / nc,
               iy == 0 ? dom.y0 : dom.y0 + dom.height() * iy / nc,
               ix + 1 == nc ? dom.x1 : dom.x0 + dom.width() * (ix + 1) / nc,
               iy + 1 == nc ? dom.y1 : dom.y0 + dom.height() * (iy + 1) / nc};
    }
  }
  // Structured numbering: cell (i, j) -> block (i / cells_x, j / cells_y).
  const int cx = st->nx / nc;
  const int cy = st->ny / nc;
  std::vector<int> owner(static_cast<std::size_t>(mesh.element_count()));
  for (int e = 0; e < mesh.element_count(); ++e) {
    const int cell = e / 2;
    const int i = cell % st->nx;
    const int j = cell / st->nx;
    const int b = (j / cy) * nc + (i / cx);
    owner[static_cast<std::size_t>(e)] = b;
    blocks[static_cast<std::size_t>(b)].elements.push_back(e);
  }
  return CoarseGrid(nc, dom, std::move(blocks), std::move(owner));
}

std::vector<int> RVERegion::center_elements() const {
  std::vector<int> out;
  for (std::size_t e = 0; e < element_sub_rve.size(); ++e) {
    if (element_sub_rve[e] == center_index) out.push_back(static_cast<int>(e));
  }
  return out;
}

RVERegion oversample(const FineMesh& mesh, const CoarseGrid& grid, int block, int layers) {
  if (block < 0 || block >= grid.block_count()) {
    throw Error(ErrorKind::InvalidArgument, "block id out of range");
  }
  if (layers < 0) {
    throw Error(ErrorKind::InvalidArgument, "oversampling layers must be >= 0");
  }
  const auto& center = grid.block(block);
  const int n = grid.n();
  const int ix0 = std::max(0, center.ix - layers);
  const int ix1 = std::min(n - 1, center.ix + layers);
  const int iy0 = std::max(0, center.iy - layers);
  const int iy1 = std::min(n - 1, center.iy + layers);

  RVERegion region;
  region.center_block = block;
  region.layers = layers;
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      const int id = grid.block_id(ix, iy);
      if (id == block) region.center_index = static_cast<int>(region.sub_blocks.size());
      region.sub_blocks.push_back(id);
    }
  }
  region.clipped = region.sub_rve_count() != (2 * layers + 1) * (2 * layers + 1);
  region.box = {grid.block(grid.block_id(ix0, iy0)).box.x0, grid.block(grid.block_id(ix0, iy0)).box.y0,
                grid.block(grid.block_id(ix1, iy1)).box.x1, grid.block(grid.block_id(ix1, iy1)).box.y1};

  std::vector<int> sub_of_block(static_cast<std::size_t>(grid.block_count()), -1);
  for (int k = 0; k < region.sub_rve_count(); ++k) {
    sub_of_block[static_cast<std::size_t>(region.sub_blocks[static_cast<std::size_t>(k)])] = k;
  }
  for (int e = 0; e < mesh.element_count(); ++e) {
    const int k = sub_of_block[static_cast<std::size_t>(grid.element_block(e))];
    if (k >= 0) {
      region.local_to_global_element.push_back(e);
      region.element_sub_rve.push_back(k);
    }
  }

  std::vector<int> global_to_local(static_cast<std::size_t>(mesh.node_count()), -1);
  for (int e : region.local_to_global_element) {
    for (int v : mesh.triangle(e)) global_to_local[static_cast<std::size_t>(v)] = 0;
  }
  std::vector<Point> nodes;
  for (int v = 0; v < mesh.node_count(); ++v) {
    if (global_to_local[static_cast<std::size_t>(v)] == 0) {
      global_to_local[static_cast<std::size_t>(v)] = static_cast<int>(region.local_to_global_node.size());
      region.local_to_global_node.push_back(v);
      nodes.push_back(mesh.node(v));
    }
  }
  std::vector<Triangle> tris;
  tris.reserve(region.local_to_global_element.size());
  for (int e : region.local_to_global_element) {
    const auto& t = mesh.triangle(e);
    tris.push_back({global_to_local[static_cast<std::size_t>(t[0])],
                    global_to_local[static_cast<std::size_t>(t[1])],
                    global_to_local[static_cast<std::size_t>(t[2])]});
  }
  std::optional<FineMesh::Structure> st;
  if (mesh.structure()) {
    const int cx = mesh.structure()->nx / n;
    const int cy = mesh.structure()->ny / n;
    st = FineMesh::Structure{(ix1 - ix0 + 1) * cx, (iy1 - iy0 + 1) * cy};
  }
  region.submesh = FineMesh(std::move(nodes), std::move(tris), st);
  return region;
}

double min_angle(const FineMesh& mesh) {
  double best = std::numbers::pi;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangle(e);
    for (int k = 0; k < 3; ++k) {
      const Point& a = mesh.node(t[static_cast<std::size_t>(k)]);
      const Point& b = mesh.node(t[static_cast<std::size_t>((k + 1) % 3)]);
      const Point& c = mesh.node(t[static_cast<std::size_t>((k + 2) % 3)]);
      const double ux = b.x - a.x, uy = b.y - a.y;
      const double vx = c.x - a.x, vy = c.y - a.y;
      const double cosv = (ux * vx + uy * vy) / (std::hypot(ux, uy) * std::hypot(vx, vy));
      best = std::min(best, std::acos(std::clamp(cosv, -1.0, 1.0)));
    }
  }
  return best;
}

}  // namespace mcporo
