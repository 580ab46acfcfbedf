#include "mcporo/microstructure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "mcporo/error.hpp"

namespace mcporo {

ContinuumMap::ContinuumMap(std::vector<int> index, int n_continua)
    : index_(std::move(index)), n_(n_continua) {
  if (n_ < 1) {
    throw Error(ErrorKind::InvalidArgument, "need at least one continuum");
  }
  for (int v : index_) {
    if (v < 0 || v >= n_) {
      throw Error(ErrorKind::InvalidArgument, "continuum index out of range");
    }
  }
}

ContinuumMap ContinuumMap::restrict(std::span<const int> elements) const {
  std::vector<int> sub;
  sub.reserve(elements.size());
  for (int e : elements) sub.push_back((*this)[e]);
  return ContinuumMap(std::move(sub), n_);
}

Raster read_raster(std::istream& in) {
  Raster r;
  if (!(in >> r.width >> r.height) || r.width < 1 || r.height < 1) {
    throw Error(ErrorKind::Io, "raster header must be 'W H' with positive sizes");
  }
  r.values.resize(static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height));
  for (auto& v : r.values) {
    if (!(in >> v)) {
      throw Error(ErrorKind::Io, "raster ended before W*H values were read");
    }
    if (v < 1) {
      throw Error(ErrorKind::Io, "raster values must be continuum ids >= 1");
    }
  }
  return r;
}

Raster read_raster(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open raster " + path.string());
  }
  return read_raster(in);
}

void write_raster(std::ostream& out, const Raster& raster) {
  out << raster.width << ' ' << raster.height << '\n';
  for (int row = 0; row < raster.height; ++row) {
    for (int col = 0; col < raster.width; ++col) {
      out << raster.at(col, row) << (col + 1 == raster.width ? '\n' : ' ');
    }
  }
}

namespace {

// Position of x inside its period, in [0, 1).
double cell_phase(double x, double period) {
  const double t = x / period;
  return t - std::floor(t);
}

// Center of the triangle's bounding box. On structured meshes both triangles
// of a cell share it, so interfaces follow cell edges instead of diagonals.
Point probe_point(const FineMesh& mesh, int e) {
  const auto& t = mesh.triangle(e);
  const Point& a = mesh.node(t[0]);
  const Point& b = mesh.node(t[1]);
  const Point& c = mesh.node(t[2]);
  return {0.5 * (std::min({a.x, b.x, c.x}) + std::max({a.x, b.x, c.x})),
          0.5 * (std::min({a.y, b.y, c.y}) + std::max({a.y, b.y, c.y}))};
}

struct Classifier {
  const FineMesh& mesh;

  std::vector<int> operator()(const UniformSpec&) const {
    return std::vector<int>(static_cast<std::size_t>(mesh.element_count()), 0);
  }

  std::vector<int> operator()(const ChannelSpec& s) const {
    if (s.period <= 0.0 || s.fraction <= 0.0 || s.fraction >= 1.0) {
      throw Error(ErrorKind::InvalidArgument, "channels need period > 0 and 0 < fraction < 1");
    }
    const double lo = 0.5 * (1.0 - s.fraction);
    const double hi = lo + s.fraction;
    constexpr double eps = 1e-9;
    std::vector<int> out(static_cast<std::size_t>(mesh.element_count()));
    for (int e = 0; e < mesh.element_count(); ++e) {
      const double t = cell_phase(probe_point(mesh, e).x - mesh.bbox().x0, s.period);
      out[static_cast<std::size_t>(e)] = (t >= lo - eps && t < hi - eps) ? 1 : 0;
    }
    return out;
  }

  std::vector<int> operator()(const InclusionSpec& s) const {
    if (s.period <= 0.0 || s.radius <= 0.0 || 2.0 * s.radius >= s.period) {
      throw Error(ErrorKind::InvalidArgument, "inclusions need 0 < 2 * radius < period");
    }
    std::vector<int> out(static_cast<std::size_t>(mesh.element_count()));
    for (int e = 0; e < mesh.element_count(); ++e) {
      const Point c = probe_point(mesh, e);
      const double dx = (cell_phase(c.x - mesh.bbox().x0, s.period) - 0.5) * s.period;
      const double dy = (cell_phase(c.y - mesh.bbox().y0, s.period) - 0.5) * s.period;
      out[static_cast<std::size_t>(e)] = (dx * dx + dy * dy < s.radius * s.radius) ? 1 : 0;
    }
    return out;
  }

  std::vector<int> operator()(const Raster& r) const {
    const auto& box = mesh.bbox();
    std::vector<int> out(static_cast<std::size_t>(mesh.element_count()));
    for (int e = 0; e < mesh.element_count(); ++e) {
      const Point c = probe_point(mesh, e);
      const int col = std::clamp(static_cast<int>(std::floor((c.x - box.x0) / box.width() * r.width)), 0,
                                 r.width - 1);
      const int row = std::clamp(static_cast<int>(std::floor((c.y - box.y0) / box.height() * r.height)), 0,
                                 r.height - 1);
      out[static_cast<std::size_t>(e)] = r.at(col, row) - 1;
    }
    return out;
  }
};

int continuum_count(const MicrostructureSpec& spec) {
  if (std::holds_alternative<UniformSpec>(spec)) return 1;
  if (const auto* r = std::get_if<Raster>(&spec)) {
    return *std::max_element(r->values.begin(), r->values.end());
  }
  return 2;
}

}  // namespace

ContinuumMap generate_microstructure(const FineMesh& mesh, const MicrostructureSpec& spec) {
  return ContinuumMap(std::visit(Classifier{mesh}, spec), continuum_count(spec));
}

std::vector<double> continuum_areas(const FineMesh& mesh, const ContinuumMap& cont,
                                    std::span<const int> elements) {
  std::vector<double> areas(static_cast<std::size_t>(cont.n_continua()), 0.0);
  for (int e : elements) areas[static_cast<std::size_t>(cont[e])] += mesh.area(e);
  return areas;
}

void check_continua(const FineMesh& mesh, const ContinuumMap& cont, const CoarseGrid& grid) {
  for (const auto& b : grid.blocks()) {
    const auto areas = continuum_areas(mesh, cont, b.elements);
    for (std::size_t i = 0; i < areas.size(); ++i) {
      if (!(areas[i] > 0.0)) {
        throw Error(ErrorKind::ContinuumStarvation,
                    "coarse block " + std::to_string(b.id) + " (of " + std::to_string(grid.n()) + "x" +
                        std::to_string(grid.n()) + ") contains no element of continuum " +
                        std::to_string(i + 1));
      }
    }
  }
}

}  // namespace mcporo
