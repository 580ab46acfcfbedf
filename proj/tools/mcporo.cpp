#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcporo/error.hpp"
#include "mcporo/experiment.hpp"
#include "mcporo/io.hpp"
#include "mcporo/parallel.hpp"

namespace {

using namespace mcporo;

void log_line(std::string_view line) { std::cerr << line << '\n'; }

// Everything that escapes a subcommand ends up here; the stage tag decides
// the exit code so scripts can tell a bad config from a singular solve.
int report_failure(const std::string& stage, const std::string& what) {
  std::cerr << "mcporo: " << what << '\n';
  return exit_code_for(stage);
}

ExperimentConfig load(const std::string& path, const std::vector<std::string>& overrides) {
  try {
    return load_config(path, overrides);
  } catch (const Error& e) {
    throw StageError(std::string(to_string(Stage::Config)), e);
  }
}

void print_errors(const ExperimentResult& result) {
  write_error_table(std::cout, result.reports, result.config.n_continua());
}

int cmd_run(const std::string& path, const std::vector<std::string>& overrides, int workers, bool tensors_only) {
  ExperimentConfig config = load(path, overrides);
  RunOptions options;
  options.workers = workers;
  options.tensors_only = tensors_only;
  options.log = log_line;
  ExperimentResult result = run_experiment(config, options);
  if (tensors_only) {
    // run_experiment stops before the output stage here, so write what exists.
    if (!config.output_dir.empty()) {
      try {
        write_artifacts(result, config.output_dir, workers);
      } catch (const Error& e) {
        throw StageError(std::string(to_string(Stage::Output)), e);
      }
    } else {
      for (const auto& g : result.grids) write_tensors_csv(std::cout, g.tensors());
    }
    return 0;
  }
  print_errors(result);
  return 0;
}

int cmd_errors(const std::string& macro_path, const std::string& fine_path) {
  try {
    const MacroDump macro = read_macro_dump(macro_path);
    const FineDump fine = read_fine_dump(fine_path);
    const CoarseGrid grid = build_coarse_grid(fine.mesh, macro.coarse_n);
    const MacroLayout layout(macro.n_continua, grid.node_count());
    if (fine.continua.n_continua() != macro.n_continua) {
      throw Error(ErrorKind::InvalidArgument, "dumps disagree on the number of continua");
    }
    ErrorReport r = compute_errors(macro_block_averages(grid, layout, macro.state),
                                   compute_block_averages(fine.mesh, grid, fine.continua, fine.state));
    r.variant = macro.variant;
    r.coarse_n = macro.coarse_n;
    write_error_table(std::cout, {r}, macro.n_continua);
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(std::string(to_string(Stage::Errors)), e);
  }
  return 0;
}

int cmd_export(const std::string& dump, const std::string& dir) {
  try {
    const std::filesystem::path out(dir);
    if (peek_dump_kind(dump) == DumpKind::Fine) {
      const FineDump d = read_fine_dump(dump);
      write_fine_vtk(out / "fine.vtk", d.mesh, d.continua, d.state);
    } else {
      const MacroDump d = read_macro_dump(dump);
      write_macro_vtk(out / ("macro_" + d.variant + ".vtk"), d.coarse_n, d.domain, d.n_continua, d.state);
    }
  } catch (const Error& e) {
    throw StageError(std::string(to_string(Stage::Output)), e);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multicontinuum homogenization of Biot poroelasticity"};
  app.require_subcommand(1);
  // Global options may also follow the subcommand.
  app.fallthrough();

  std::vector<std::string> overrides;
  int workers = 0;
  app.add_option("--set", overrides, "Override a config entry, e.g. --set mesh.coarse=4")->take_all();
  app.add_option("-j,--workers", workers, "Worker threads for cell problems (default: MCPORO_WORKERS or 1)")
      ->check(CLI::NonNegativeNumber);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Fine reference, upscaling, macro variants and errors");
  run->add_option("config", config_path, "Experiment config file")->required();

  auto* upscale = app.add_subcommand("upscale", "Effective tensors only");
  upscale->add_option("config", config_path, "Experiment config file")->required();

  std::string macro_dump;
  std::string fine_dump;
  auto* errors = app.add_subcommand("errors", "Error table from a macro dump and a fine dump");
  errors->add_option("macro-dump", macro_dump)->required()->check(CLI::ExistingFile);
  errors->add_option("fine-dump", fine_dump)->required()->check(CLI::ExistingFile);

  std::string dump;
  std::string out_dir;
  auto* exporter = app.add_subcommand("export", "Write a dump as VTK");
  exporter->add_option("dump", dump)->required()->check(CLI::ExistingFile);
  exporter->add_option("dir", out_dir)->required();

  CLI11_PARSE(app, argc, argv);
  if (workers == 0) workers = worker_count_from_env(1);

  try {
    if (*run) return cmd_run(config_path, overrides, workers, false);
    if (*upscale) return cmd_run(config_path, overrides, workers, true);
    if (*errors) return cmd_errors(macro_dump, fine_dump);
    if (*exporter) return cmd_export(dump, out_dir);
  } catch (const StageError& e) {
    return report_failure(e.stage(), e.what());
  } catch (const std::exception& e) {
    return report_failure("", e.what());
  }
  return 1;
}
