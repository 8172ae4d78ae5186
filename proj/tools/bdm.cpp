#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdm/benchmarks.hpp"
#include "bdm/io.hpp"
#include "bdm/weak_geometry.hpp"

using namespace bdm;

namespace {

constexpr int kUsage = 2;
constexpr int kNumerical = 3;

struct CaseOptions {
  std::string name = "square-mixed";
  std::string ratio = "2:3";
  int p = 2;
  int n = 1;
  bool mismatched = false;
  std::uint32_t seed = 42;

  void add(CLI::App* cmd) {
    cmd->add_option("--case", name, "benchmark case")->capture_default_str();
    cmd->add_option("--ratio", ratio, "master:slave element ratio")->capture_default_str();
    cmd->add_option("--p", p, "polynomial degree")->check(CLI::Range(1, 6))->capture_default_str();
    cmd->add_option("--n", n, "dual refinement level")->check(CLI::Range(0, 6))->capture_default_str();
    cmd->add_flag("--mismatched", mismatched, "perturb the interface parameterization");
    cmd->add_option("--seed", seed, "perturbation seed")->capture_default_str();
  }

  BenchmarkCase to_case() const {
    BenchmarkCase c;
    c.id = case_from_string(name);
    c.ratio = Ratio::parse(ratio);
    c.p = p;
    c.n = n;
    c.matched = !mismatched;
    c.seed = seed;
    return c;
  }
};

bool largedef(CaseId id) {
  return id == CaseId::LargeDef1 || id == CaseId::LargeDef2 || id == CaseId::LargeDef3;
}

nlohmann::json case_info(const BenchmarkCase& c, int level) {
  return {{"case", to_string(c.id)}, {"ratio", c.ratio.str()}, {"p", c.p},     {"n", c.n},
          {"matched", c.matched},    {"level", level},          {"seed", c.seed}};
}

BenchmarkCase case_from_info(const nlohmann::json& info, int& level) {
  if (!info.contains("case")) throw Error(ErrorCode::Io, "mesh file carries no case description");
  BenchmarkCase c;
  c.id = case_from_string(info.at("case").get<std::string>());
  c.ratio = Ratio::parse(info.value("ratio", std::string("2:3")));
  c.p = info.value("p", 2);
  c.n = info.value("n", 1);
  c.matched = info.value("matched", true);
  c.seed = info.value("seed", 42u);
  level = info.value("level", 0);
  return c;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

std::string coefficients_json(const BenchmarkCase& c, int level, Method m, const SolutionField& f) {
  nlohmann::json j = case_info(c, level);
  j["method"] = to_string(m);
  j["ncomp"] = f.ncomp();
  j["num_dofs"] = f.mesh().num_dofs;
  j["coefficients"] = std::vector<double>(f.coeffs().data(), f.coeffs().data() + f.coeffs().size());
  return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* t = std::getenv("BDM_THREADS")) {
    const int n = std::atoi(t);
    if (n > 0) omp_set_num_threads(n);
  }

  CLI::App app{"Bezier dual mortar multi-patch analysis"};
  app.require_subcommand(1);

  CaseOptions mesh_opts;
  int mesh_level = 0;
  bool mesh_weak = false;
  std::string mesh_out;
  auto* mesh_cmd = app.add_subcommand("mesh", "generate a benchmark mesh file");
  mesh_opts.add(mesh_cmd);
  mesh_cmd->add_option("--level", mesh_level, "refinement level")->check(CLI::Range(0, 8))->capture_default_str();
  mesh_cmd->add_flag("--weak", mesh_weak, "embed weak extraction operators");
  mesh_cmd->add_option("--out,-o", mesh_out, "output path (default stdout)");

  CaseOptions solve_opts;
  int solve_level = 0;
  std::string solve_method = "mortar", solve_mesh, solve_out, solve_csv;
  bool solve_conforming = false;
  int increments = 20;
  double pmax = 100e9;
  auto* solve_cmd = app.add_subcommand("solve", "solve a benchmark on one mesh");
  solve_opts.add(solve_cmd);
  solve_cmd->add_option("--level", solve_level, "refinement level")->check(CLI::Range(0, 8))->capture_default_str();
  solve_cmd->add_option("--method", solve_method, "mortar, weak or saddle")
      ->check(CLI::IsMember({"mortar", "weak", "saddle"}))
      ->capture_default_str();
  solve_cmd->add_option("--mesh", solve_mesh, "mesh file written by `mesh` (overrides case options)");
  solve_cmd->add_option("--out,-o", solve_out, "coefficient file");
  solve_cmd->add_option("--csv", solve_csv, "summary CSV (default stdout)");
  solve_cmd->add_flag("--conforming", solve_conforming, "large deformation: conforming reference mesh");
  solve_cmd->add_option("--increments", increments, "large deformation load increments")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--pmax", pmax, "large deformation pressure")->check(CLI::PositiveNumber);

  CaseOptions conv_opts;
  std::vector<int> conv_levels{0, 1, 2, 3};
  std::string conv_method = "mortar", conv_out;
  auto* conv_cmd = app.add_subcommand("converge", "convergence study over levels");
  conv_opts.add(conv_cmd);
  conv_cmd->add_option("--levels", conv_levels, "refinement levels")->check(CLI::Range(0, 8))->capture_default_str();
  conv_cmd->add_option("--method", conv_method, "mortar, weak or saddle")
      ->check(CLI::IsMember({"mortar", "weak", "saddle"}))
      ->capture_default_str();
  conv_cmd->add_option("--out,-o", conv_out, "CSV path (default stdout)");
  conv_cmd->add_option("--increments", increments, "large deformation load increments")->check(CLI::PositiveNumber);
  conv_cmd->add_option("--pmax", pmax, "large deformation pressure")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*mesh_cmd) {
      const BenchmarkCase c = mesh_opts.to_case();
      MeshFile file;
      file.model = case_model(c, mesh_level);
      file.info = case_info(c, mesh_level);
      if (mesh_weak) {
        file.dual_level = c.n;
        file.weak = build_weak_mesh(file.model, c.n).mesh;
      }
      write_output(mesh_out, write_mesh(file));
      return 0;
    }

    if (*solve_cmd) {
      BenchmarkCase c = solve_opts.to_case();
      int level = solve_level;
      if (!solve_mesh.empty()) c = case_from_info(read_mesh(read_text_file(solve_mesh)).info, level);
      const Method m = method_from_string(solve_method);
      std::string csv = "case,p,ratio,matched,n,level,method,dofs,residual,l2_error\n";
      if (largedef(c.id)) {
        const int ne = 1 << level;
        const auto sol = solve_large_deformation(c.id, ne, solve_conforming, c.p, increments, 30e9, 0.48, pmax);
        if (!solve_out.empty()) write_text_file(solve_out, coefficients_json(c, level, m, sol.field));
        csv += std::string(to_string(c.id)) + "," + std::to_string(c.p) + "," + c.ratio.str() + "," +
               (c.matched ? "true" : "false") + "," + std::to_string(c.n) + "," + std::to_string(level) + "," +
               (solve_conforming ? "conforming" : "weak") + "," + std::to_string(sol.field.mesh().num_dofs * 2) +
               ",,\n";
      } else {
        const auto setup = setup_case(c, level);
        const auto sol = solve_case(setup, m);
        if (!solve_out.empty()) write_text_file(solve_out, coefficients_json(c, level, m, sol.field));
        csv += std::string(to_string(c.id)) + "," + std::to_string(c.p) + "," + c.ratio.str() + "," +
               (c.matched ? "true" : "false") + "," + std::to_string(c.n) + "," + std::to_string(level) + "," +
               to_string(m) + "," + std::to_string(sol.dofs) + "," + format_double(sol.residual) + "," +
               format_double(sol.error) + "\n";
      }
      write_output(solve_csv, csv);
      return 0;
    }

    if (*conv_cmd) {
      BenchmarkCase c = conv_opts.to_case();
      c.levels = conv_levels;
      ConvergenceReport report;
      if (largedef(c.id)) {
        std::vector<int> ns;
        for (int l : conv_levels) ns.push_back(1 << l);
        report = weak_vs_conforming_relative_error(c.id, ns, c.p, increments, pmax);
        report.spec.n = c.n;
        for (size_t k = 0; k < report.rows.size(); ++k) report.rows[k].level = conv_levels[k];
        report.spec.levels = conv_levels;
      } else {
        report = run_convergence(c, method_from_string(conv_method));
      }
      write_output(conv_out, report_csv(report));
      return report.failed ? kNumerical : 0;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::InvalidArgument:
      case ErrorCode::Io:
      case ErrorCode::InvalidKnotVector:
      case ErrorCode::InvalidWeights:
      case ErrorCode::InvalidControlNet:
        return kUsage;
      default:
        return kNumerical;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return 0;
}
