#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mcporo {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct BoundingBox {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

  [[nodiscard]] double width() const { return x1 - x0; }
  [[nodiscard]] double height() const { return y1 - y0; }
  [[nodiscard]] double area() const { return width() * height(); }
  [[nodiscard]] Point center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
};

enum class Side : std::uint8_t { Left = 1, Right = 2, Bottom = 4, Top = 8 };

/// Parses "left" / "right" / "bottom" / "top"; throws UnknownBoundaryTag.
Side parse_side(std::string_view name);
std::string_view to_string(Side side);

inline constexpr std::array<Side, 4> kAllSides = {Side::Left, Side::Right, Side::Bottom, Side::Top};

using Triangle = std::array<int, 3>;

/// Triangulation of a rectangle. Triangles are counterclockwise; node
/// boundary tags are bitmasks of the sides of the bounding box the node lies
/// on, so corners carry two tags and interior nodes none.
class FineMesh {
 public:
  struct Structure {
    int nx = 0;
    int ny = 0;
  };

  FineMesh() = default;
  FineMesh(std::vector<Point> nodes, std::vector<Triangle> triangles,
           std::optional<Structure> structure = std::nullopt);

  [[nodiscard]] std::span<const Point> nodes() const { return nodes_; }
  [[nodiscard]] std::span<const Triangle> triangles() const { return triangles_; }
  [[nodiscard]] int node_count() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] int element_count() const { return static_cast<int>(triangles_.size()); }
  [[nodiscard]] const Point& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] const Triangle& triangle(int e) const { return triangles_[static_cast<std::size_t>(e)]; }

  [[nodiscard]] double signed_area(int e) const;
  [[nodiscard]] double area(int e) const { return signed_area(e); }
  [[nodiscard]] Point centroid(int e) const;
  [[nodiscard]] const BoundingBox& bbox() const { return bbox_; }

  [[nodiscard]] std::uint8_t boundary_mask(int node) const { return tags_[static_cast<std::size_t>(node)]; }
  [[nodiscard]] bool on_side(int node, Side side) const {
    return (tags_[static_cast<std::size_t>(node)] & static_cast<std::uint8_t>(side)) != 0;
  }
  [[nodiscard]] std::vector<int> side_nodes(Side side) const;

  [[nodiscard]] const std::optional<Structure>& structure() const { return structure_; }

 private:
  std::vector<Point> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<std::uint8_t> tags_;
  BoundingBox bbox_;
  std::optional<Structure> structure_;
};

/// nx x ny rectangles over `box`, each split along its lower-left/upper-right
/// diagonal. Node (i, j) has index j * (nx + 1) + i; cell (i, j) owns
/// triangles 2 * (j * nx + i) and 2 * (j * nx + i) + 1.
FineMesh build_structured_mesh(int nx, int ny, const BoundingBox& box = {});

/// Uniform Nc x Nc partition of the domain into rectangular blocks that the
/// fine mesh conforms to.
class CoarseGrid {
 public:
  struct Block {
    int id = 0;
    int ix = 0;
    int iy = 0;
    BoundingBox box;
    std::vector<int> elements;  // ascending fine element ids
  };

  CoarseGrid() = default;
  CoarseGrid(int n, BoundingBox domain, std::vector<Block> blocks, std::vector<int> element_block);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int block_count() const { return n_ * n_; }
  [[nodiscard]] int node_count() const { return (n_ + 1) * (n_ + 1); }
  [[nodiscard]] const Block& block(int id) const { return blocks_[static_cast<std::size_t>(id)]; }
  [[nodiscard]] std::span<const Block> blocks() const { return blocks_; }
  [[nodiscard]] int block_id(int ix, int iy) const { return iy * n_ + ix; }
  [[nodiscard]] int element_block(int e) const { return element_block_[static_cast<std::size_t>(e)]; }
  [[nodiscard]] const BoundingBox& domain() const { return domain_; }
  [[nodiscard]] double hx() const { return domain_.width() / n_; }
  [[nodiscard]] double hy() const { return domain_.height() / n_; }

  [[nodiscard]] int node_id(int ix, int iy) const { return iy * (n_ + 1) + ix; }
  [[nodiscard]] Point node(int id) const;
  /// Corner nodes of a block, counterclockwise from the lower-left one.
  [[nodiscard]] std::array<int, 4> block_nodes(int block) const;
  [[nodiscard]] bool node_on_side(int node, Side side) const;

 private:
  int n_ = 0;
  BoundingBox domain_;
  std::vector<Block> blocks_;
  std::vector<int> element_block_;
};

/// Throws NonConforming unless the mesh is structured with nx, ny divisible by nc.
CoarseGrid build_coarse_grid(const FineMesh& mesh, int nc);

/// Oversampled RVE around one coarse block: the block plus up to `layers`
/// rings of neighbours, clipped to the domain. Sub-RVEs are coarse blocks.
struct RVERegion {
  int center_block = 0;
  int layers = 0;
  std::vector<int> sub_blocks;  // row-major over the clipped stencil
  int center_index = 0;         // position of center_block inside sub_blocks
  bool clipped = false;         // fewer than (2l+1)^2 sub-RVEs
  BoundingBox box;

  FineMesh submesh;
  std::vector<int> local_to_global_node;
  std::vector<int> local_to_global_element;
  std::vector<int> element_sub_rve;  // local element -> index into sub_blocks

  [[nodiscard]] int sub_rve_count() const { return static_cast<int>(sub_blocks.size()); }
  /// Local element ids of the central RVE.
  [[nodiscard]] std::vector<int> center_elements() const;
};

RVERegion oversample(const FineMesh& mesh, const CoarseGrid& grid, int block, int layers);

/// Smallest interior angle (radians) over all triangles.
double min_angle(const FineMesh& mesh);

}  // namespace mcporo
