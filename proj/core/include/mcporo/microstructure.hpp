#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "mcporo/mesh.hpp"

namespace mcporo {

/// Element-wise continuum indicator: element e belongs to continuum
/// index(e) in [0, n_continua). psi_i is 1 on those elements, 0 elsewhere.
class ContinuumMap {
 public:
  ContinuumMap() = default;
  ContinuumMap(std::vector<int> index, int n_continua);

  [[nodiscard]] int n_continua() const { return n_; }
  [[nodiscard]] int size() const { return static_cast<int>(index_.size()); }
  [[nodiscard]] int operator[](int e) const { return index_[static_cast<std::size_t>(e)]; }
  [[nodiscard]] std::span<const int> indices() const { return index_; }
  [[nodiscard]] double indicator(int continuum, int e) const { return (*this)[e] == continuum ? 1.0 : 0.0; }

  /// Map restricted to the listed elements (e.g. an RVE submesh).
  [[nodiscard]] ContinuumMap restrict(std::span<const int> elements) const;

 private:
  std::vector<int> index_;
  int n_ = 1;
};

/// Continuum 2 fills vertical channels of width fraction * period, one per
/// period, centered inside each period cell.
struct ChannelSpec {
  double period = 0.0625;
  double fraction = 0.5;
};

/// Continuum 2 fills discs of the given radius centered in each period cell.
struct InclusionSpec {
  double period = 0.0625;
  double radius = 0.02;
};

/// Pixel raster, values 1..N, row 0 at the bottom of the domain.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<int> values;  // row-major, 1-based continuum ids

  [[nodiscard]] int at(int col, int row) const {
    return values[static_cast<std::size_t>(row * width + col)];
  }
};

struct UniformSpec {};

using MicrostructureSpec = std::variant<UniformSpec, ChannelSpec, InclusionSpec, Raster>;

/// Text format: "W H" followed by W*H integers.
Raster read_raster(std::istream& in);
Raster read_raster(const std::filesystem::path& path);
void write_raster(std::ostream& out, const Raster& raster);

ContinuumMap generate_microstructure(const FineMesh& mesh, const MicrostructureSpec& spec);

/// Area of each continuum inside the listed elements.
std::vector<double> continuum_areas(const FineMesh& mesh, const ContinuumMap& cont,
                                    std::span<const int> elements);

/// Throws ContinuumStarvation if some coarse block misses a continuum.
void check_continua(const FineMesh& mesh, const ContinuumMap& cont, const CoarseGrid& grid);

}  // namespace mcporo
