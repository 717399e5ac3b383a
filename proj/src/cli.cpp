#include "nct/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "nct/config.hpp"
#include "nct/verification.hpp"
#include "nct/vtk.hpp"

namespace nct {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitMesh = 3;
constexpr int kExitSolver = 4;
constexpr int kExitVerification = 5;
constexpr double kOrderThreshold = 0.8;

int exit_code_for(const Error& err) {
  switch (err.kind()) {
    case ErrorKind::ConfigParse:
      return kExitConfig;
    case ErrorKind::MeshLoad:
    case ErrorKind::DegenerateTriangle:
    case ErrorKind::NonManifoldEdge:
    case ErrorKind::InadmissibleAngle:
    case ErrorKind::ZeroTransmissibilityDistance:
    case ErrorKind::CollinearPoints:
      return kExitMesh;
    case ErrorKind::SolverFailure:
      return kExitSolver;
    default:
      return kExitSolver;
  }
}

Mesh mesh_from_config(const RunConfig& config) {
  MeshBuildOptions options;
  options.allow_right_angles = config.allow_right_angles;
  if (!config.use_generator) {
    return load_mesh(config.mesh_file, options);
  }
  return generate_equilateral_mesh(config.rows, config.cols, config.side, options);
}

void apply_chain_to_primary(RunConfig& config) {
  if (!config.has_chain) return;
  config.chain.validate();
  std::vector<double> a0 = config.chain_initial;
  std::vector<double> src = config.chain_sources;
  a0.resize(config.chain.n_species(), 0.0);
  src.resize(config.chain.n_species(), 0.0);
  // The transform has a unit first row, so the primary species keeps its
  // physical initial data and source.
  config.data.lambda = config.chain.lambdas[0];
  const double c0 = a0[0];
  const double s0 = src[0];
  config.data.c0 = [c0](const Vec2&) { return c0; };
  config.data.s_c = [s0](const Vec2&) { return s0; };
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
  RunConfig config = parse_config_file(config_path);
  if (!out_override.empty()) config.out_dir = out_override;
  apply_chain_to_primary(config);
  const Mesh mesh = mesh_from_config(config);

  const ValidationReport validation = validate_source_conditions(config.data, mesh);
  if (!validation.max_principle_guaranteed()) {
    std::cout << "==============================================================\n"
              << "WARNING: maximum principle NOT guaranteed for this data set\n"
              << "         (data inequalities violated on some cells); the run\n"
              << "         proceeds, bounds on c and theta may fail.\n"
              << "==============================================================\n";
  }

  std::filesystem::create_directories(config.out_dir);
  SchemeConfig scheme_cfg = config.scheme_config();
  const FieldP0 s_h = project_p0_mean(mesh, config.data.s);

  const std::string mesh_ref = config.use_generator
                                   ? "equilateral " + std::to_string(config.rows) +
                                         "x" + std::to_string(config.cols)
                                   : config.mesh_file;
  StepCallback callback;
  if (config.vtk_every > 0) {
    callback = [&](const SchemeState& state, const MonitorRow&) {
      if (state.step % config.vtk_every != 0 && state.step != scheme_cfg.N) return;
      char name[64];
      std::snprintf(name, sizeof(name), "state_%06d.vtk", state.step);
      export_vtk(mesh, state, s_h, config.out_dir + "/" + name,
                 "config " + config.config_hash);
    };
  }

  const RunResult result = run(mesh, config.data, scheme_cfg, callback);
  write_monitor_csv(config.out_dir + "/monitors.csv", result.monitors,
                    "config " + config.config_hash);
  write_checkpoint(config.out_dir + "/final", result.state, mesh_ref,
                   config.config_hash);
  if (!result.monitors.empty()) {
    const MonitorRow& last = result.monitors.back();
    std::printf("run finished: %d steps to t = %.6g\n", last.step, last.time);
    std::printf("  c in [%.6g, %.6g], theta in [%.6g, %.6g]\n", last.c_min,
                last.c_max, last.theta_min, last.theta_max);
    std::printf("  |u| = %.6g, |grad p| = %.6g, max |div u - s| = %.3e\n",
                last.u_l2, last.grad_p_l2, last.div_residual_max);
  }
  std::printf("outputs in %s (config %s)\n", config.out_dir.c_str(),
              config.config_hash.c_str());
  return kExitOk;
}

int cmd_convergence(const std::string& config_path, int levels_override,
                    const std::string& out_override) {
  RunConfig config = parse_config_file(config_path);
  if (!out_override.empty()) config.out_dir = out_override;
  if (levels_override > 0) config.levels = levels_override;
  if (config.mode != "mms") {
    throw Error(ErrorKind::ConfigParse,
                "convergence needs mode.kind = mms in the config");
  }
  const MMSCase mms_case = build_mms_case(config.mms_case, config.data);

  SchemeConfig scheme_template;
  scheme_template.transport_solver.rel_tolerance = config.solver_rel_tol;
  scheme_template.pressure_solver.rel_tolerance = config.solver_rel_tol;

  const ConvergenceReport report = run_convergence(mms_case, config.levels,
                                                   scheme_template);
  std::cout << report.render_table();
  std::filesystem::create_directories(config.out_dir);
  report.write_csv(config.out_dir + "/convergence.csv",
                   "config " + config.config_hash);

  const bool ok = report.order_combined.least_squares >= kOrderThreshold &&
                  report.order_grad.least_squares >= kOrderThreshold;
  if (!ok) {
    std::cout << "order threshold " << kOrderThreshold << " not met\n";
    return kExitVerification;
  }
  return kExitOk;
}

int cmd_verify(std::uint64_t seed, const std::string& out_dir) {
  const SuiteReport report = invariant_suite(seed);
  std::cout << report.render_text();
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream txt(out_dir + "/verify.txt");
    txt << report.render_text();
    report.write_csv(out_dir + "/verify.csv");
  }
  return report.all_passed() ? kExitOk : kExitVerification;
}

int cmd_check_mesh(const std::string& path) {
  // Build with the relaxed angle rule so deeper defects (coincident
  // circumcenters) are reported instead of the first right angle.
  MeshBuildOptions options;
  options.allow_right_angles = true;
  const Mesh mesh = load_mesh(path, options);
  const MeshQuality q = admissibility_report(mesh);
  std::printf("mesh %s: %zu vertices, %zu triangles, %zu interior + %zu boundary edges\n",
              path.c_str(), mesh.n_vertices(), mesh.n_triangles(), q.n_interior,
              q.n_boundary);
  std::printf("  h = %.6g, max angle = %.6g rad, min tau = %.6g (interior %.6g)\n",
              mesh.h, q.max_angle, q.min_tau, q.min_tau_interior);
  std::printf("  min d_sigma/|sigma| = %.6g, min |sigma|/h = %.6g\n",
              q.min_dsigma_over_len, q.min_len_over_h);
  if (!q.strictly_acute) {
    std::printf("mesh is NOT strictly acute: InadmissibleAngle\n");
    return kExitMesh;
  }
  std::printf("mesh is admissible\n");
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"coupled finite volume / nonconforming finite element solver "
               "for heat-affected contaminant transport in porous media"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int levels = 0;
  std::uint64_t seed = 42;
  std::string mesh_path;

  CLI::App* run_cmd = app.add_subcommand("run", "run a simulation from a config");
  run_cmd->add_option("--config", config_path, "config file")->required();
  run_cmd->add_option("--out", out_dir, "output directory override");

  CLI::App* conv_cmd =
      app.add_subcommand("convergence", "manufactured-solution convergence study");
  conv_cmd->add_option("--config", config_path, "config file")->required();
  conv_cmd->add_option("--levels", levels, "refinement levels");
  conv_cmd->add_option("--out", out_dir, "output directory override");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "randomized discrete-property suite");
  verify_cmd->add_option("--seed", seed, "random seed");
  verify_cmd->add_option("--out", out_dir, "output directory for reports");

  CLI::App* check_cmd = app.add_subcommand("check-mesh", "admissibility report");
  check_cmd->add_option("mesh", mesh_path, "mesh file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, out_dir);
    if (conv_cmd->parsed()) return cmd_convergence(config_path, levels, out_dir);
    if (verify_cmd->parsed()) return cmd_verify(seed, out_dir);
    if (check_cmd->parsed()) return cmd_check_mesh(mesh_path);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code_for(err);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitSolver;
  }
  return kExitConfig;
}

}  // namespace nct
