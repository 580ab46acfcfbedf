// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mcporo/error.hpp"
#include "mcporo/experiment.hpp"

namespace {

using namespace mcporo;
namespace fs = std::filesystem;

const fs::path kConfigs = fs::path(MCPORO_SOURCE_DIR) / "configs";

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

ExperimentConfig homogeneous_config(int fine, int coarse, int layers) {
  std::ostringstream s;
  s << "[mesh]\nfine = " << fine << "\ncoarse = " << coarse << "\nlayers = " << layers << "\n"
    << "[material]\nlambda = 1\nmu = 1\nkappa = 1\nalpha = 0.8\nbiot_modulus = 1e6\n"
    << "[time]\nt_max = 5\nsteps = 50\n"
    << "[boundary]\nu1.right = 0\nu2.bottom = 0\n"
    << "[sources]\nf1 = sine_product -1e4 2 1\nf2 = sine_product 1e7 1 1\ng = gaussian 0.15 0.5 0.5 40\n"
    << "[initial]\np = 1e6\n"
    << "[run]\nvariants = full\nvtk = none\n";
  return parse_config(s.str());
}

Outcome constraint_exactness() {
  Stopwatch clock;
  ExperimentConfig cfg = load_config(kConfigs / "smoke.cfg");
  cfg.output_dir.clear();
  const ExperimentResult r = run_experiment(cfg);
  double worst = 0.0;
  int problems = 0;
  for (const auto& g : r.grids) {
    for (const auto& b : g.blocks) {
      worst = std::max(worst, b.diagnostics.constraint_residual);
      ++problems;
    }
  }
  const double t = clock.seconds();
  return {worst <= 1e-9 && t < 30.0, std::to_string(problems) + " blocks, max residual " + fmt("%.2e", worst) +
                                         " (<= 1e-9), " + fmt("%.1f", t) + " s (< 30 s)"};
}

Outcome homogeneous_oracle() {
  Stopwatch clock;
  const int fine = 64;
  const int nc = 4;
  const FineMesh mesh = build_structured_mesh(fine, fine);
  const CoarseGrid grid = build_coarse_grid(mesh, nc);
  const ContinuumMap cont(std::vector<int>(static_cast<std::size_t>(mesh.element_count()), 0), 1);
  const MaterialField mat = MaterialField::uniform(mesh.element_count(), {1.0, 1.0, 1.0}, 0.8, 1e-6);
  UpscalingOptions opt;
  opt.layers = 3;

  // Plane-strain tensor lambda d_dn d_sm + mu (d_ds d_nm + d_dm d_ns) for lambda = mu = 1.
  auto elastic = [](int d, int n, int s, int m) {
    return 1.0 * (d == n && s == m) + 1.0 * ((d == s && n == m) + (d == m && n == s));
  };
  double worst_a = 0.0;
  double worst_pp = 0.0;
  double worst_g = 0.0;
  double worst_h = 0.0;
  // Every block of a 4 x 4 grid touches the boundary; the interior ones are the
  // blocks with the most oversampling the domain allows.
  for (int iy = 1; iy < nc - 1; ++iy) {
    for (int ix = 1; ix < nc - 1; ++ix) {
      const auto t = upscale_block(mesh, grid, mat, cont, grid.block_id(ix, iy), opt, {}, {}).tensors;
      for (int d = 0; d < 2; ++d) {
        for (int n = 0; n < 2; ++n) {
          for (int s = 0; s < 2; ++s) {
            for (int m = 0; m < 2; ++m) {
              const double want = elastic(d, n, s, m);
              const double got = t.at({TensorKind::A, Flavor::UU}, {d, n}, {s, m});
              if (want != 0.0) worst_a = std::max(worst_a, rel(got, want));
            }
          }
          const double pp = t.at({TensorKind::A, Flavor::PP}, {0, d}, {0, n});
          const double g = t.at({TensorKind::G, Flavor::UP}, {0, -1}, {d, n});
          if (d == n) {
            worst_pp = std::max(worst_pp, rel(pp, 1.0));
            worst_g = std::max(worst_g, rel(g, 0.8));
          } else {
            worst_pp = std::max(worst_pp, std::abs(pp));
            worst_g = std::max(worst_g, std::abs(g) / 0.8);
          }
        }
      }
      worst_h = std::max(worst_h, std::abs(t.at({TensorKind::H, Flavor::PP}, {0, -1}, {0, -1}) - 1e-6));
    }
  }
  const double secs = clock.seconds();
  const bool pass = worst_a <= 0.02 && worst_pp <= 0.02 && worst_g <= 0.02 && worst_h <= 1e-8 && secs < 120.0;
  return {pass, "A_uu " + fmt("%.2e", worst_a) + ", A_pp " + fmt("%.2e", worst_pp) + ", G_up " +
                    fmt("%.2e", worst_g) + " (rel, <= 2e-2); H_pp " + fmt("%.1e", worst_h) + " (abs, <= 1e-8); " +
                    fmt("%.0f", secs) + " s (< 120 s)"};
}

Outcome single_continuum_end_to_end() {
  const ExperimentResult r = run_experiment(homogeneous_config(160, 8, 4));
  const ErrorReport& e = r.report(8, ModelVariant::Full);
  return {e.e_p[0] <= 1e-2 && e.e_u[0] <= 5e-2,
          "full 8x8 e_p " + fmt("%.3e", e.e_p[0]) + " (<= 1e-2), e_u " + fmt("%.3e", e.e_u[0]) + " (<= 5e-2)"};
}

struct TwoContinuumRun {
  ExperimentResult result;
  double seconds = 0.0;
};

TwoContinuumRun two_continuum_run() {
  Stopwatch clock;
  ExperimentConfig cfg = load_config(kConfigs / "example1.cfg", {"mesh.coarse=4 8"});
  cfg.output_dir.clear();
  TwoContinuumRun out{run_experiment(cfg), 0.0};
  out.seconds = clock.seconds();
  return out;
}

Outcome two_continuum_example(const TwoContinuumRun& run) {
  const auto& r = run.result;
  const ErrorReport& full = r.report(8, ModelVariant::Full);
  const ErrorReport& s1 = r.report(8, ModelVariant::Simplified1);
  const ErrorReport& s2 = r.report(8, ModelVariant::Simplified2);
  bool bounds = true;
  bool order = true;
  std::string detail;
  for (std::size_t i = 0; i < full.e_p.size(); ++i) {
    bounds = bounds && full.e_p[i] <= 2e-2 && full.e_u[i] <= 8e-2;
    order = order && full.e_u[i] <= 1.1 * s1.e_u[i] && s1.e_u[i] < s2.e_u[i];
    detail += "continuum " + std::to_string(i + 1) + ": e_p " + fmt("%.2e", full.e_p[i]) + " e_u " +
              fmt("%.2e", full.e_u[i]) + " (s1 " + fmt("%.2e", s1.e_u[i]) + ", s2 " + fmt("%.2e", s2.e_u[i]) +
              "); ";
  }
  detail += std::string("bounds ") + (bounds ? "ok" : "violated") + ", ordering " + (order ? "ok" : "violated") +
            ", " + fmt("%.0f", run.seconds) + " s (< 900 s)";
  return {bounds && order && run.seconds < 900.0, detail};
}

Outcome coarse_refinement(const TwoContinuumRun& run) {
  const ErrorReport& c4 = run.result.report(4, ModelVariant::Full);
  const ErrorReport& c8 = run.result.report(8, ModelVariant::Full);
  bool pass = true;
  std::string detail = "full e_p 4x4 -> 8x8:";
  for (std::size_t i = 0; i < c4.e_p.size(); ++i) {
    pass = pass && c8.e_p[i] < c4.e_p[i];
    detail += " " + fmt("%.2e", c4.e_p[i]) + " -> " + fmt("%.2e", c8.e_p[i]);
  }
  return {pass, detail};
}

Outcome fine_solver_sanity() {
  Stopwatch clock;
  constexpr double kPi = std::numbers::pi;
  const FineMesh m = build_structured_mesh(32, 32);
  FineProblem p;
  p.mesh = &m;
  p.material = MaterialField::uniform(m.element_count(), {1.0, 1.0, 1.0}, 0.8, 0.2);
  for (Field f : {Field::U1, Field::U2, Field::P}) {
    for (Side s : kAllSides) p.boundary.conditions.push_back({f, s, [](const Point&) { return 0.0; }, "0"});
  }
  const FineState init =
      interpolate_state(m, {}, [&](const Point& x) { return std::sin(kPi * x.x) * std::sin(kPi * x.y); });

  const FineSolver solver(p, 0.01);
  FineState s = init;
  double e = fine_energy(solver.operators(), s);
  bool monotone = true;
  for (int n = 0; n < 20; ++n) {
    s = solver.step(s);
    const double next = fine_energy(solver.operators(), s);
    monotone = monotone && next <= e * (1.0 + 1e-12);
    e = next;
  }

  auto final_state = [&](int steps) { return solve_transient(p, {0.05, steps}, init).back().x; };
  const Vector a = final_state(4);
  const Vector b = final_state(8);
  const Vector c = final_state(16);
  const double ratio = (a - b).norm() / (b - c).norm();
  const double secs = clock.seconds();
  return {monotone && std::abs(ratio - 2.0) <= 0.3 && secs < 60.0,
          std::string("energy ") + (monotone ? "nonincreasing" : "increased") + ", ratio " + fmt("%.3f", ratio) +
              " (2 +- 0.3), " + fmt("%.1f", secs) + " s (< 60 s)"};
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "mcporo_acceptance_determinism";
  fs::remove_all(base);
  std::vector<std::string> tables;
  for (int workers : {1, 1, 2}) {
    ExperimentConfig cfg = load_config(kConfigs / "smoke.cfg", {"mesh.coarse=2 4"});
    cfg.output_dir = base / std::to_string(tables.size());
    RunOptions opt;
    opt.workers = workers;
    (void)run_experiment(cfg, opt);
    std::ifstream in(cfg.output_dir / "errors.csv", std::ios::binary);
    tables.emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  fs::remove_all(base);
  const bool same = !tables[0].empty() && tables[0] == tables[1] && tables[0] == tables[2];
  return {same, same ? "errors.csv byte-identical across reruns and 1/2 workers" : "errors.csv differs"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %d %-28s %s  %s\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };

  report(1, "constraint-exactness", constraint_exactness);
  report(2, "homogeneous-oracle", homogeneous_oracle);
  report(3, "single-continuum-end-to-end", single_continuum_end_to_end);
  std::optional<TwoContinuumRun> ex1;
  std::string ex1_error;
  try {
    ex1 = two_continuum_run();
  } catch (const std::exception& e) {
    ex1_error = e.what();
  }
  auto with_ex1 = [&](Outcome (*f)(const TwoContinuumRun&)) {
    return [&, f] {
      if (!ex1) throw Error(ErrorKind::InvalidArgument, ex1_error);
      return f(*ex1);
    };
  };
  report(4, "two-continuum-example", with_ex1(two_continuum_example));
  report(5, "coarse-refinement", with_ex1(coarse_refinement));
  report(6, "fine-solver-sanity", fine_solver_sanity);
  report(7, "determinism", determinism);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
