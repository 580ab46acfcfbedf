#include "mcporo/experiment.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "mcporo/error.hpp"

namespace mcporo {

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
auto in_stage(Stage stage, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(std::string(to_string(stage)), e);
  }
}

class StageTimer {
 public:
  StageTimer(ExperimentResult& result, const RunOptions& options, std::string name)
      : result_(result), options_(options), name_(std::move(name)), start_(Clock::now()) {}

  void done(const std::string& what) {
    const double s = std::chrono::duration<double>(Clock::now() - start_).count();
    result_.stage_seconds.emplace_back(name_, s);
    if (options_.log) {
      std::ostringstream msg;
      msg.precision(3);
      msg << "[" << name_ << "] " << what << " (" << std::fixed << s << " s)";
      options_.log(msg.str());
    }
  }

 private:
  ExperimentResult& result_;
  const RunOptions& options_;
  std::string name_;
  Clock::time_point start_;
};

std::string grid_tag(int n) { return std::to_string(n) + "x" + std::to_string(n); }

std::string step_tag(int step) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", step);
  return buf;
}

ErrorReport nan_report(int n_continua) {
  ErrorReport r;
  r.e_p.assign(static_cast<std::size_t>(n_continua), std::numeric_limits<double>::quiet_NaN());
  r.e_u = r.e_p;
  return r;
}

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Config:
      return "config";
    case Stage::Fine:
      return "fine";
    case Stage::Upscale:
      return "upscale";
    case Stage::Macro:
      return "macro";
    case Stage::Errors:
      return "errors";
    case Stage::Output:
      return "output";
  }
  return "?";
}

int exit_code(Stage stage) { return 2 + static_cast<int>(stage); }

int exit_code_for(std::string_view stage_name) {
  for (Stage s : {Stage::Config, Stage::Fine, Stage::Upscale, Stage::Macro, Stage::Errors, Stage::Output}) {
    if (to_string(s) == stage_name) return exit_code(s);
  }
  return 1;
}

std::vector<EffectiveTensors> GridRun::tensors() const {
  std::vector<EffectiveTensors> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(b.tensors);
  return out;
}

bool ExperimentResult::all_ok() const {
  for (const auto& g : grids) {
    for (const auto& v : g.variants) {
      if (!v.ok) return false;
    }
  }
  return true;
}

const ErrorReport& ExperimentResult::report(int coarse_n, ModelVariant variant) const {
  for (const auto& r : reports) {
    if (r.coarse_n == coarse_n && r.variant == to_string(variant)) return r;
  }
  throw Error(ErrorKind::InvalidArgument,
              "no report for " + grid_tag(coarse_n) + " " + std::string(to_string(variant)));
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentResult result;
  result.config = config;
  const int n = config.n_continua();

  // Geometry, microstructure and coarse grids.
  StageTimer setup(result, options, "config");
  MaterialField material;
  in_stage(Stage::Config, [&] {
    config.validate();
    result.mesh = build_structured_mesh(config.fine_cells, config.fine_cells);
    result.continua = generate_microstructure(result.mesh, config.microstructure);
    if (result.continua.n_continua() != n) {
      throw Error(ErrorKind::Config, "microstructure has " + std::to_string(result.continua.n_continua()) +
                                         " continua, material lists " + std::to_string(n));
    }
    material = config.material(result.continua);
    material.validate();
    for (std::size_t k = 0; k < config.coarse.size(); ++k) {
      GridRun g;
      g.coarse_n = config.coarse[k];
      g.layers = config.layers_for(k);
      g.grid = build_coarse_grid(result.mesh, g.coarse_n);
      check_continua(result.mesh, result.continua, g.grid);
      result.grids.push_back(std::move(g));
    }
    return 0;
  });
  setup.done("mesh " + std::to_string(config.fine_cells) + "x" + std::to_string(config.fine_cells) + ", " +
             std::to_string(n) + " continua, " + std::to_string(config.coarse.size()) + " coarse grid(s)");

  const FineMesh& mesh = result.mesh;
  const ContinuumMap& cont = result.continua;
  const BoundarySpec bc = config.boundary_spec();
  const VectorField f = config.body_force();
  const ScalarField g = config.source();

  // Fine reference with per-step block averages for every grid.
  const FineState initial = interpolate_state(
      mesh,
      (config.u1_initial.is_zero() && config.u2_initial.is_zero())
          ? VectorField{}
          : VectorField([a = config.u1_initial, b = config.u2_initial](const Point& x) {
              return std::array<double, 2>{a(x), b(x)};
            }),
      config.p_initial.is_zero() ? ScalarField{} : config.p_initial.field());
  std::vector<std::vector<BlockAverages>> fine_avg(result.grids.size());
  if (!options.tensors_only) {
    StageTimer t(result, options, "fine");
    const FineProblem problem{&mesh, material, bc, f, g};
    for (std::size_t k = 0; k < result.grids.size(); ++k) {
      fine_avg[k].push_back(compute_block_averages(mesh, result.grids[k].grid, cont, initial));
    }
    const auto states = in_stage(Stage::Fine, [&] {
      return solve_transient(problem, config.time, initial, [&](int, const FineState& s) {
        for (std::size_t k = 0; k < result.grids.size(); ++k) {
          fine_avg[k].push_back(compute_block_averages(mesh, result.grids[k].grid, cont, s));
        }
      });
    });
    result.fine_final = states.back();
    if (config.vtk == VtkOutput::All && !config.output_dir.empty()) {
      in_stage(Stage::Output, [&] {
        for (std::size_t s = 0; s < states.size(); ++s) {
          write_fine_vtk(config.output_dir / "vtk" / ("fine_" + step_tag(static_cast<int>(s)) + ".vtk"), mesh, cont,
                         states[s]);
        }
        return 0;
      });
    }
    t.done(std::to_string(config.time.n_steps) + " steps, " + std::to_string(3 * mesh.node_count()) + " dofs");
  }
  // Cell problems and effective tensors per coarse grid.
  for (auto& grid : result.grids) {
    StageTimer t(result, options, "upscale");
    UpscalingOptions uo;
    uo.layers = grid.layers;
    uo.workers = options.workers;
    grid.blocks = in_stage(Stage::Upscale, [&] { return upscale_all(mesh, grid.grid, material, cont, uo, f, g); });
    double worst = 0.0;
    for (const auto& b : grid.blocks) worst = std::max(worst, b.diagnostics.constraint_residual);
    std::ostringstream what;
    what << grid_tag(grid.coarse_n) << ", l=" << grid.layers << ", " << grid.blocks.size()
         << " blocks, max constraint residual " << worst;
    t.done(what.str());
  }

  if (options.tensors_only) return result;
  for (std::size_t k = 0; k < result.grids.size(); ++k) result.grids[k].excluded = fine_avg[k].back().excluded;

  // Macro solves per variant.
  const double tau = config.time.tau();
  for (std::size_t k = 0; k < result.grids.size(); ++k) {
    GridRun& grid = result.grids[k];
    const MacroLayout layout(n, grid.grid.node_count());
    const std::vector<EffectiveTensors> tensors = grid.tensors();
    const MacroState start = init_macro_from_fine(mesh, grid.grid, cont, initial);
    for (ModelVariant v : config.variants) {
      StageTimer t(result, options, "macro");
      VariantRun run;
      run.variant = v;
      const std::string vname(to_string(v));
      std::vector<ErrorHistoryRow> rows;
      try {
        in_stage(Stage::Macro, [&] {
          const MacroOperators ops = assemble_macro(v, tensors, grid.grid);
          const Constraints cons = impose_macro_bcs(grid.grid, layout, bc);
          const MacroSolver solver(ops, cons, layout, grid.grid, tau);
          MacroState st = start;
          auto dump_vtk = [&](int step) {
            if (config.vtk != VtkOutput::All || config.output_dir.empty()) return;
            in_stage(Stage::Output, [&] {
              write_macro_vtk(config.output_dir / "vtk" /
                                  ("macro_" + grid_tag(grid.coarse_n) + "_" + vname + "_" + step_tag(step) + ".vtk"),
                              grid.coarse_n, mesh.bbox(), n, st);
              return 0;
            });
          };
          dump_vtk(0);
          for (int step = 1; step <= config.time.n_steps; ++step) {
            st = solver.step(st);
            dump_vtk(step);
            ErrorHistoryRow row;
            row.step = step;
            row.t = st.t;
            try {
              row.report = compute_errors(macro_block_averages(grid.grid, layout, st),
                                          fine_avg[k][static_cast<std::size_t>(step)]);
            } catch (const Error& e) {
              if (e.kind() != ErrorKind::ZeroDenominator) throw;
              row.report = nan_report(n);
            }
            row.report.variant = vname;
            row.report.coarse_n = grid.coarse_n;
            rows.push_back(std::move(row));
          }
          run.final_state = std::move(st);
          return 0;
        });
        run.ok = true;
      } catch (const StageError& e) {
        if (e.kind() != ErrorKind::SingularSystem) throw;
        run.failure = e.what();
        rows.clear();
      }

      ErrorReport final = nan_report(n);
      if (run.ok) {
        final = in_stage(Stage::Errors, [&] {
          return compute_errors(macro_block_averages(grid.grid, layout, run.final_state), fine_avg[k].back());
        });
      }
      final.variant = vname;
      final.coarse_n = grid.coarse_n;
      std::ostringstream what;
      what.precision(3);
      what << grid_tag(grid.coarse_n) << " " << vname;
      if (run.ok) {
        for (std::size_t i = 0; i < final.e_p.size(); ++i) {
          what << " e_p_" << i + 1 << "=" << std::scientific << final.e_p[i] << " e_u_" << i + 1 << "="
               << final.e_u[i];
        }
      } else {
        what << " failed: " << run.failure;
      }
      t.done(what.str());
      result.reports.push_back(std::move(final));
      for (auto& r : rows) result.history.push_back(std::move(r));
      grid.variants.push_back(std::move(run));
    }
  }

  if (!config.output_dir.empty()) {
    StageTimer t(result, options, "output");
    in_stage(Stage::Output, [&] {
      write_artifacts(result, config.output_dir, options.workers);
      return 0;
    });
    t.done("artifacts in " + config.output_dir.string());
  }
  return result;
}

void write_artifacts(const ExperimentResult& result, const std::filesystem::path& dir, int workers) {
  const auto& config = result.config;
  const int n = config.n_continua();
  {
    auto out = open_output(dir / "errors.csv");
    write_error_table(out, result.reports, n);
  }
  {
    auto out = open_output(dir / "errors_history.csv");
    write_error_history(out, result.history, n);
  }
  if (result.fine_final.x.size() > 0) {
    write_fine_dump(dir / "fine_final.bin", result.mesh, result.continua, result.fine_final);
    if (config.vtk == VtkOutput::Final) {
      write_fine_vtk(dir / "vtk" / "fine_final.vtk", result.mesh, result.continua, result.fine_final);
    }
  }
  for (const auto& grid : result.grids) {
    {
      auto out = open_output(dir / ("tensors_" + grid_tag(grid.coarse_n) + ".csv"));
      write_tensors_csv(out, grid.tensors());
    }
    for (const auto& v : grid.variants) {
      if (!v.ok) continue;
      const std::string stem = "macro_" + grid_tag(grid.coarse_n) + "_" + std::string(to_string(v.variant));
      write_macro_dump(dir / (stem + ".bin"), grid.coarse_n, result.mesh.bbox(), n, to_string(v.variant),
                       v.final_state);
      if (config.vtk == VtkOutput::Final) {
        write_macro_vtk(dir / "vtk" / (stem + "_final.vtk"), grid.coarse_n, result.mesh.bbox(), n, v.final_state);
      }
    }
  }

  nlohmann::ordered_json meta;
  meta["name"] = config.name;
  meta["fine_cells"] = config.fine_cells;
  meta["n_continua"] = n;
  meta["time"] = {{"t_max", config.time.t_max}, {"steps", config.time.n_steps}};
  meta["workers"] = workers;
  meta["assumptions"] = {
      "macro boundary conditions mirror the fine conditions for every continuum",
      "macro initial state: continuum averages of the fine initial interpolant per block, averaged to nodes",
      "oversampled regions are clipped at the domain boundary",
  };
  nlohmann::ordered_json grids = nlohmann::ordered_json::array();
  for (const auto& grid : result.grids) {
    nlohmann::ordered_json gj;
    gj["coarse"] = grid.coarse_n;
    gj["layers"] = grid.layers;
    double worst_c = 0.0;
    double worst_s = 0.0;
    std::vector<int> clipped;
    double upscale_seconds = 0.0;
    for (const auto& b : grid.blocks) {
      worst_c = std::max(worst_c, b.diagnostics.constraint_residual);
      worst_s = std::max(worst_s, b.diagnostics.stationarity_residual);
      if (b.tensors.clipped) clipped.push_back(b.tensors.block);
      upscale_seconds += b.seconds;
    }
    gj["max_constraint_residual"] = worst_c;
    gj["max_stationarity_residual"] = worst_s;
    gj["clipped_blocks"] = clipped;
    gj["cell_problem_seconds"] = upscale_seconds;
    nlohmann::ordered_json excluded = nlohmann::ordered_json::array();
    for (const auto& [b, i] : grid.excluded) excluded.push_back({{"block", b}, {"continuum", i + 1}});
    gj["excluded_blocks"] = excluded;
    nlohmann::ordered_json variants = nlohmann::ordered_json::array();
    for (const auto& v : grid.variants) {
      variants.push_back({{"variant", to_string(v.variant)}, {"ok", v.ok}, {"failure", v.failure}});
    }
    gj["variants"] = variants;
    grids.push_back(gj);
  }
  meta["grids"] = grids;
  nlohmann::ordered_json timings = nlohmann::ordered_json::array();
  for (const auto& [stage, s] : result.stage_seconds) timings.push_back({{"stage", stage}, {"seconds", s}});
  meta["stage_seconds"] = timings;
  auto out = open_output(dir / "metadata.json");
  out << meta.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "failed writing metadata.json");
}

}  // namespace mcporo
