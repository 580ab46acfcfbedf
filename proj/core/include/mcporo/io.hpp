#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcporo/error_metrics.hpp"
#include "mcporo/fine_solver.hpp"
#include "mcporo/macro_solver.hpp"
#include "mcporo/microstructure.hpp"
#include "mcporo/upscaling.hpp"

namespace mcporo {

/// Legacy ASCII VTK: triangles with point data u (vector) and p, cell data
/// continuum (1-based).
void write_fine_vtk(const std::filesystem::path& path, const FineMesh& mesh, const ContinuumMap& cont,
                    const FineState& state);

/// Legacy ASCII VTK structured points, one scalar array per macro field:
/// U<i><s> and P<i> with 1-based indices.
void write_macro_vtk(const std::filesystem::path& path, int coarse_n, const BoundingBox& domain, int n_continua,
                     const MacroState& state);

/// Binary snapshots. Both start with the 8-byte magic "MCPDUMP1" and a kind
/// byte; numbers are written in native byte order.
struct FineDump {
  FineMesh mesh;
  ContinuumMap continua;
  FineState state;
};

struct MacroDump {
  int coarse_n = 0;
  BoundingBox domain;
  int n_continua = 1;
  std::string variant;
  MacroState state;
};

enum class DumpKind : char { Fine = 'F', Macro = 'M' };

void write_fine_dump(const std::filesystem::path& path, const FineMesh& mesh, const ContinuumMap& cont,
                     const FineState& state);
void write_macro_dump(const std::filesystem::path& path, int coarse_n, const BoundingBox& domain, int n_continua,
                      std::string_view variant, const MacroState& state);
/// Throws Io on a missing file, bad magic or truncated data.
DumpKind peek_dump_kind(const std::filesystem::path& path);
FineDump read_fine_dump(const std::filesystem::path& path);
MacroDump read_macro_dump(const std::filesystem::path& path);

/// Header "grid,variant,e_p_1..e_p_N,e_u_1..e_u_N", values as %.6e.
void write_error_table(std::ostream& out, const std::vector<ErrorReport>& reports, int n_continua);

struct ErrorHistoryRow {
  int step = 0;
  double t = 0.0;
  ErrorReport report;
};

/// Header "grid,variant,step,t,e_p_...,e_u_...".
void write_error_history(std::ostream& out, const std::vector<ErrorHistoryRow>& rows, int n_continua);

/// Long format "block,n_continua,clipped,rve_area,entry,row,col,value" with
/// entry a family name, "F_u" or "F_p"; values round-trip exactly.
void write_tensors_csv(std::ostream& out, const std::vector<EffectiveTensors>& tensors);
std::vector<EffectiveTensors> read_tensors_csv(std::istream& in);

/// Creates the file's parent directory and opens it; throws Io on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace mcporo
