#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mcporo/boundary.hpp"
#include "mcporo/fine_solver.hpp"
#include "mcporo/macro_solver.hpp"
#include "mcporo/material.hpp"
#include "mcporo/microstructure.hpp"

namespace mcporo {

/// A field from a small closed set of named forms:
///   constant c                 c
///   linear a bx by             a + bx x + by y
///   sine_product a kx ky       a sin(kx pi x) sin(ky pi y)
///   gaussian a x0 y0 w         a exp(-w ((x - x0)^2 + (y - y0)^2))
///   cosine_x a b k             a + b cos(k pi x)
/// A bare number is a constant.
struct AnalyticForm {
  std::string name = "constant";
  std::vector<double> params = {0.0};

  /// Throws Config on unknown names or a wrong parameter count.
  static AnalyticForm parse(std::string_view text);

  [[nodiscard]] double operator()(const Point& x) const;
  [[nodiscard]] ScalarField field() const;
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] std::string text() const;
};

struct BoundaryEntry {
  Field field = Field::P;
  Side side = Side::Left;
  AnalyticForm value;
};

enum class VtkOutput { None, Final, All };

/// Everything one experiment needs. Text form: INI sections [mesh],
/// [microstructure], [material], [time], [boundary], [sources], [initial]
/// and [run]; see configs/ for complete files.
struct ExperimentConfig {
  std::string name = "experiment";

  int fine_cells = 160;
  std::vector<int> coarse = {8};
  std::vector<int> layers = {4};  // one per coarse grid, or a single value for all

  MicrostructureSpec microstructure = UniformSpec{};
  std::filesystem::path raster_path;  // when the microstructure is a raster

  std::vector<ContinuumMaterial> continua = {ContinuumMaterial{}};
  double alpha = 0.8;
  double biot_modulus = 1e6;

  TimeGrid time{5.0, 50};

  std::vector<BoundaryEntry> boundary;
  AnalyticForm f1;
  AnalyticForm f2;
  AnalyticForm g;
  AnalyticForm u1_initial;
  AnalyticForm u2_initial;
  AnalyticForm p_initial;

  std::vector<ModelVariant> variants = {ModelVariant::Full, ModelVariant::Simplified1, ModelVariant::Simplified2};
  std::filesystem::path output_dir;  // empty: nothing is written
  VtkOutput vtk = VtkOutput::Final;

  [[nodiscard]] int n_continua() const { return static_cast<int>(continua.size()); }
  [[nodiscard]] int layers_for(std::size_t grid_index) const;

  /// Throws Config when values are out of range or inconsistent.
  void validate() const;

  [[nodiscard]] MaterialField material(const ContinuumMap& cont) const;
  [[nodiscard]] BoundarySpec boundary_spec() const;
  [[nodiscard]] VectorField body_force() const;  // empty if zero
  [[nodiscard]] ScalarField source() const;      // empty if zero
};

/// Applies "section.key=value" overrides on top of the file contents.
/// Relative raster paths resolve against `base_dir`. Throws Config.
ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {},
                              const std::filesystem::path& base_dir = {});

/// Reads and parses a file; the raster path resolves against its directory.
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

}  // namespace mcporo
