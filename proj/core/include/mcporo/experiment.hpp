#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcporo/config.hpp"
#include "mcporo/error_metrics.hpp"
#include "mcporo/io.hpp"
#include "mcporo/upscaling.hpp"

namespace mcporo {

/// Pipeline stages, in order. Failures are rethrown as StageError carrying
/// the stage name; the CLI maps stages to exit codes 2..7.
enum class Stage { Config, Fine, Upscale, Macro, Errors, Output };

std::string_view to_string(Stage stage);
int exit_code(Stage stage);
/// Exit code for a StageError's stage name; 1 for anything unrecognized.
int exit_code_for(std::string_view stage_name);

struct RunOptions {
  int workers = 1;
  /// Stop after upscaling (tensors and metadata only).
  bool tensors_only = false;
  std::function<void(std::string_view)> log;
};

struct VariantRun {
  ModelVariant variant = ModelVariant::Full;
  bool ok = false;
  std::string failure;  // set when the macro system could not be solved
  MacroState final_state;
};

struct GridRun {
  int coarse_n = 0;
  int layers = 0;
  CoarseGrid grid;
  std::vector<BlockUpscaling> blocks;
  std::vector<VariantRun> variants;
  std::vector<std::pair<int, int>> excluded;  // (block, continuum) with no area

  [[nodiscard]] std::vector<EffectiveTensors> tensors() const;
};

struct ExperimentResult {
  ExperimentConfig config;
  FineMesh mesh;
  ContinuumMap continua;
  FineState fine_final;
  std::vector<GridRun> grids;
  /// Final-time errors, grid-major then in variant order. Failed variants
  /// carry NaN errors.
  std::vector<ErrorReport> reports;
  std::vector<ErrorHistoryRow> history;
  std::vector<std::pair<std::string, double>> stage_seconds;

  [[nodiscard]] bool all_ok() const;
  /// Report for (coarse_n, variant); throws InvalidArgument if absent.
  [[nodiscard]] const ErrorReport& report(int coarse_n, ModelVariant variant) const;
};

/// fine reference -> cell problems and upscaling per coarse grid -> macro
/// solves per variant -> errors, then artifacts when config.output_dir is
/// set. Output is independent of the worker count.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Writes errors.csv, errors_history.csv, tensors_<n>x<n>.csv, dumps, VTK
/// files and metadata.json into `dir`.
void write_artifacts(const ExperimentResult& result, const std::filesystem::path& dir, int workers);

}  // namespace mcporo
