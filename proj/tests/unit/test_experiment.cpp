#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "mcporo/error.hpp"
#include "mcporo/experiment.hpp"

namespace mcporo {
namespace {

namespace fs = std::filesystem;

const fs::path kSmoke = fs::path(MCPORO_SOURCE_DIR) / "configs" / "smoke.cfg";

std::string error_table(const ExperimentResult& r) {
  std::ostringstream s;
  write_error_table(s, r.reports, r.config.n_continua());
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MCPORO_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Stages, ExitCodes) {
  EXPECT_EQ(exit_code(Stage::Config), 2);
  EXPECT_EQ(exit_code(Stage::Output), 7);
  EXPECT_EQ(exit_code_for("upscale"), 4);
  EXPECT_EQ(exit_code_for("nonsense"), 1);
}

TEST(Experiment, SmokeRunIsQuickAndComplete) {
  ExperimentConfig cfg = load_config(kSmoke, {"mesh.coarse=2 4"});
  cfg.output_dir.clear();
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult r = run_experiment(cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(seconds, 10.0);
  EXPECT_TRUE(r.all_ok());
  ASSERT_EQ(r.reports.size(), 6u);
  EXPECT_EQ(r.reports[0].coarse_n, 2);
  EXPECT_EQ(r.reports[0].variant, "full");
  EXPECT_EQ(r.reports[5].coarse_n, 4);
  EXPECT_EQ(r.reports[5].variant, "simplified2");
  for (const auto& rep : r.reports) {
    for (double e : rep.e_p) EXPECT_TRUE(std::isfinite(e));
  }
  EXPECT_EQ(r.history.size(), 6u * 5u);  // one row per step
  EXPECT_NO_THROW((void)r.report(4, ModelVariant::Simplified1));
  EXPECT_THROW((void)r.report(8, ModelVariant::Full), Error);
  ASSERT_EQ(r.grids.size(), 2u);
  EXPECT_EQ(r.grids[1].blocks.size(), 16u);
  for (const auto& b : r.grids[1].blocks) EXPECT_LE(b.diagnostics.constraint_residual, 1e-9);
}

TEST(Experiment, TensorsOnlyStopsAfterUpscaling) {
  ExperimentConfig cfg = load_config(kSmoke);
  cfg.output_dir.clear();
  RunOptions opt;
  opt.tensors_only = true;
  const ExperimentResult r = run_experiment(cfg, opt);
  EXPECT_TRUE(r.reports.empty());
  ASSERT_EQ(r.grids.size(), 1u);
  EXPECT_EQ(r.grids[0].tensors().size(), 16u);
}

TEST(Experiment, ErrorTablesAreDeterministic) {
  ExperimentConfig cfg = load_config(kSmoke);
  cfg.output_dir.clear();
  RunOptions one;
  RunOptions three;
  three.workers = 3;
  const std::string a = error_table(run_experiment(cfg, one));
  const std::string b = error_table(run_experiment(cfg, one));
  const std::string c = error_table(run_experiment(cfg, three));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(Experiment, ArtifactsAreWritten) {
  const fs::path dir = fs::temp_directory_path() / "mcporo_test_artifacts";
  fs::remove_all(dir);
  ExperimentConfig cfg = load_config(kSmoke, {"run.vtk=final"});
  cfg.output_dir = dir;
  (void)run_experiment(cfg);
  for (const char* f : {"errors.csv", "errors_history.csv", "metadata.json", "tensors_4x4.csv", "fine_final.bin",
                        "macro_4x4_full.bin", "macro_4x4_simplified2.bin"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const std::string meta = slurp(dir / "metadata.json");
  EXPECT_NE(meta.find("\"clipped_blocks\""), std::string::npos);
  EXPECT_NE(meta.find("\"assumptions\""), std::string::npos);
  EXPECT_EQ(slurp(dir / "errors.csv").rfind("grid,variant,e_p_1,e_p_2,e_u_1,e_u_2\n", 0), 0u);
}

TEST(Experiment, ConfigStageFailuresAreTagged) {
  ExperimentConfig cfg = load_config(kSmoke);
  cfg.output_dir.clear();
  cfg.continua.push_back({1, 1, 1});
  try {
    (void)run_experiment(cfg);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "config");
  }
}

TEST(Cli, ExitCodes) {
  const fs::path dir = fs::temp_directory_path() / "mcporo_test_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream(dir / "bad.cfg") << "[mesh]\nfine = 10\ncoarse = 3\n";
  }
  EXPECT_EQ(run_cli("run " + (dir / "bad.cfg").string()), 2);
  EXPECT_EQ(run_cli("run " + (dir / "absent.cfg").string()), 2);
  EXPECT_NE(run_cli("frobnicate"), 0);
  EXPECT_EQ(run_cli("run " + kSmoke.string() + " --set run.output=" + (dir / "out").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "errors.csv"));
  EXPECT_EQ(run_cli("errors " + (dir / "out" / "macro_4x4_full.bin").string() + " " +
                    (dir / "out" / "fine_final.bin").string()),
            0);
  EXPECT_EQ(run_cli("export " + (dir / "out" / "fine_final.bin").string() + " " + (dir / "vtk").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "vtk" / "fine.vtk"));
  EXPECT_NE(run_cli("errors " + (dir / "bad.cfg").string() + " " + (dir / "out" / "fine_final.bin").string()), 0);
}

}  // namespace
}  // namespace mcporo
