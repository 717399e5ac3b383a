#include "nct/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nct/operators.hpp"

namespace nct {

namespace {

struct StepSources {
  FieldP0 s;
  FieldP0 s_c;
  FieldP0 s_theta;
  VectorFieldP0 f;
};

StepSources project_sources(const Mesh& mesh, const PhysicalData& data,
                            const SchemeConfig& config, double t) {
  StepSources out;
  out.s = config.s_time
              ? project_p0_mean(mesh, [&](const Vec2& x) { return config.s_time(x, t); })
              : project_p0_mean(mesh, data.s);
  out.s_c = config.s_c_time
                ? project_p0_mean(mesh, [&](const Vec2& x) { return config.s_c_time(x, t); })
                : project_p0_mean(mesh, data.s_c);
  out.s_theta = config.s_theta_time
                    ? project_p0_mean(mesh,
                                      [&](const Vec2& x) { return config.s_theta_time(x, t); })
                    : project_p0_mean(mesh, data.s_theta);
  out.f = project_p0_mean(mesh, VectorFn([&](const Vec2& x) { return data.f(x, t); }));
  return out;
}

void require_compatible_source(const Mesh& mesh, const FieldP0& s_h) {
  // The no-flux boundary forces int s = 0; otherwise the pressure problem
  // has no solution.
  const double integral = mean_value(mesh, s_h) * mesh.total_area();
  const double scale =
      std::sqrt(mesh.total_area()) * l2_norm(mesh, s_h) + 1e-30;
  if (std::abs(integral) > 1e-8 * scale) {
    throw Error(ErrorKind::InadmissibleData,
                "source s must have zero mean (no-flux boundary), got integral " +
                    std::to_string(integral));
  }
}

struct PressureSolution {
  FieldP1NC p;
  FieldRT0 u;
  std::size_t pressure_iterations = 0;
};

/// Velocity recovery from the pressure solution. The normal fluxes come from
/// the triangle-local hybrid systems with the pressure dofs as edge
/// multipliers; the per-triangle divergence constraint is built in, which is
/// what makes div u = s_h hold to solver accuracy. (The global L2 projection
/// of f - kappa grad p onto the flux space does not satisfy the constraint;
/// the two reconstructions genuinely differ.)
FieldRT0 reconstruct_velocity(const Mesh& mesh, const FieldP0& kappa,
                              const VectorFieldP0& f_h, const FieldP0& s_h,
                              const FieldP1NC& p) {
  FieldRT0 u = make_rt0(mesh);
  std::vector<double> writes(mesh.n_edges(), 0.0);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    std::array<Vec2, 3> mids;
    for (int j = 0; j < 3; ++j) mids[j] = mesh.edges[tri.e[j]].midpoint;
    auto basis = [&](int j, const Vec2& x) {
      const Edge& edge = mesh.edges[tri.e[j]];
      return (edge.length / (2.0 * tri.area)) * (x - mesh.vertices[tri.v[j]]);
    };
    std::vector<int> interior;
    for (int j = 0; j < 3; ++j) {
      if (mesh.edges[tri.e[j]].interior()) interior.push_back(j);
    }
    if (interior.empty()) continue;  // all fluxes pinned to zero

    // Unknowns: outward fluxes on the interior edges, then the element
    // pressure; rows: the flux equations, then the divergence constraint.
    const std::size_t m = interior.size();
    std::vector<std::vector<double>> A(m + 1, std::vector<double>(m + 1, 0.0));
    std::vector<double> b(m + 1, 0.0);
    for (std::size_t row = 0; row < m; ++row) {
      const int j = interior[row];
      const Edge& ej = mesh.edges[tri.e[j]];
      for (std::size_t col = 0; col < m; ++col) {
        const int i = interior[col];
        double acc = 0.0;
        for (int q = 0; q < 3; ++q) acc += dot(basis(i, mids[q]), basis(j, mids[q]));
        A[row][col] = acc * tri.area / 3.0;
      }
      A[row][m] = -kappa.values[t] * ej.length;
      const Vec2 moment = (ej.length / 2.0) * (tri.centroid - mesh.vertices[tri.v[j]]);
      b[row] = dot(f_h.values[t], moment) -
               kappa.values[t] * ej.length * p.dofs[tri.e[j]];
    }
    for (std::size_t col = 0; col < m; ++col) {
      A[m][col] = mesh.edges[tri.e[interior[col]]].length;
    }
    b[m] = tri.area * s_h.values[t];
    const std::vector<double> sol = dense_solve(std::move(A), b);
    for (std::size_t col = 0; col < m; ++col) {
      const int j = interior[col];
      // Outward flux converted to the stored edge orientation; interior
      // edges receive one value from each side, identical up to round-off.
      u.fluxes[tri.e[j]] += tri.sign[j] * sol[col];
      writes[tri.e[j]] += 1.0;
    }
  }
  for (Index e : mesh.interior_edges) {
    if (writes[e] > 0.0) u.fluxes[e] /= writes[e];
  }
  return u;
}

PressureSolution pressure_velocity_solve(const Mesh& mesh,
                                         const PhysicalData& data,
                                         const SchemeConfig& config,
                                         const FieldP0& kappa,
                                         const StepSources& sources) {
  const SparseOperator S = assemble_pressure_matrix(mesh, kappa, data.kappa_inf);
  const std::vector<double> rhs = pressure_rhs(mesh, sources.f, sources.s);

  PressureSolution out;
  SolverConfig pressure_cfg = config.pressure_solver;
  // The divergence identity inherits the pressure residual through the flux
  // continuity across edges. Retry with a tighter tolerance until the
  // reconstructed velocity meets the identity within the advertised budget
  // (half of 10x the configured relative tolerance, to leave slack).
  const double budget =
      5.0 * config.pressure_solver.rel_tolerance;
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::vector<double> x;
    const SolveReport report = solve_spd(S, rhs, x, pressure_cfg);
    if (!report.converged) {
      throw Error(ErrorKind::SolverFailure,
                  "pressure solve stalled at relative residual " +
                      std::to_string(report.relative_residual));
    }
    out.p.dofs = std::move(x);
    // Gauge: the pressure is normalized to zero L2 mean (the solver's
    // deflation only controls the Euclidean component).
    const double mean = mean_value(mesh, out.p);
    for (double& v : out.p.dofs) v -= mean;
    out.pressure_iterations += report.iterations;
    out.u = reconstruct_velocity(mesh, kappa, sources.f, sources.s, out.p);

    const FieldP0 resid = div_residual(mesh, out.u, sources.s);
    const double scale = div_residual_scale(mesh, out.u, sources.s);
    double worst = 0.0;
    for (double v : resid.values) worst = std::max(worst, std::abs(v));
    if (worst <= budget * scale || pressure_cfg.rel_tolerance <= 1e-15) break;
    pressure_cfg.rel_tolerance =
        std::max(1e-15, pressure_cfg.rel_tolerance * 1e-2);
    pressure_cfg.abs_tolerance = std::min(pressure_cfg.abs_tolerance, 1e-15);
  }
  return out;
}

FieldP0 transport_solve(const Mesh& mesh, const SchemeConfig& config,
                        const FieldRT0& velocity, double diffusion,
                        const FieldP0& reaction, const FieldP0& previous,
                        const FieldP0& load, std::size_t* iterations) {
  const SparseOperator A =
      assemble_transport_matrix(mesh, velocity, diffusion, reaction, config.k);
  std::vector<double> rhs(previous.values.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    rhs[i] = previous.values[i] / config.k + load.values[i];
  }
  std::vector<double> x;
  const SolveReport report = solve_nonsymmetric(A, rhs, x, config.transport_solver);
  if (!report.converged) {
    throw Error(ErrorKind::SolverFailure,
                "transport solve stalled at relative residual " +
                    std::to_string(report.relative_residual));
  }
  if (iterations != nullptr) *iterations += report.iterations;
  return FieldP0{std::move(x)};
}

}  // namespace

SchemeState init_state(const Mesh& mesh, const PhysicalData& data,
                       const SchemeConfig& config) {
  if (!(config.k > 0.0)) {
    throw Error(ErrorKind::NonPositiveTimeStep, "scheme time step must be positive");
  }
  SchemeState state;
  state.step = 0;
  state.time = 0.0;
  state.c = project_p0_mean(mesh, data.c0);
  state.theta = project_p0_mean(mesh, data.theta0);
  for (const SpeciesSpec& spec : config.extra_species) {
    state.extra_species.push_back(project_p0_mean(mesh, spec.c0));
  }
  const StepSources sources = project_sources(mesh, data, config, 0.0);
  require_compatible_source(mesh, sources.s);
  const KappaResult kappa = kappa_eval(data.viscosity, data, state.c, state.theta);
  PressureSolution pv =
      pressure_velocity_solve(mesh, data, config, kappa.kappa, sources);
  state.p = std::move(pv.p);
  state.u = std::move(pv.u);
  return state;
}

namespace {

struct StepStats {
  std::size_t transport_iterations = 0;
  std::size_t pressure_iterations = 0;
};

SchemeState step_impl(const SchemeState& state, const Mesh& mesh,
                      const PhysicalData& data, const SchemeConfig& config,
                      StepStats* stats) {
  const double t_next = state.time + config.k;
  const StepSources sources = project_sources(mesh, data, config, t_next);
  require_compatible_source(mesh, sources.s);

  SchemeState next;
  next.step = state.step + 1;
  next.time = t_next;

  std::size_t transport_iters = 0;

  // (a) concentration: reaction s + lambda, load s_c.
  FieldP0 reaction_c = sources.s;
  for (double& v : reaction_c.values) v += data.lambda;
  next.c = transport_solve(mesh, config, state.u, data.D_c, reaction_c, state.c,
                           sources.s_c, &transport_iters);

  // (b) temperature: reaction s, load -s_theta + s * theta_star.
  FieldP0 load_theta = sources.s_theta;
  for (std::size_t i = 0; i < load_theta.values.size(); ++i) {
    load_theta.values[i] =
        -load_theta.values[i] + sources.s.values[i] * data.viscosity.theta_star;
  }
  next.theta = transport_solve(mesh, config, state.u, data.D_theta, sources.s,
                               state.theta, load_theta, &transport_iters);

  // Extra transformed species ride on the same velocity.
  next.extra_species.reserve(state.extra_species.size());
  for (std::size_t i = 0; i < state.extra_species.size(); ++i) {
    const SpeciesSpec& spec = config.extra_species[i];
    FieldP0 reaction = sources.s;
    for (double& v : reaction.values) v += spec.lambda;
    const FieldP0 load = project_p0_mean(mesh, spec.s_c);
    next.extra_species.push_back(transport_solve(mesh, config, state.u, data.D_c,
                                                 reaction, state.extra_species[i],
                                                 load, &transport_iters));
  }

  // (c) mobility from the new pair, (d) pressure, (e) velocity.
  const KappaResult kappa = kappa_eval(data.viscosity, data, next.c, next.theta);
  PressureSolution pv =
      pressure_velocity_solve(mesh, data, config, kappa.kappa, sources);
  next.p = std::move(pv.p);
  next.u = std::move(pv.u);
  if (stats != nullptr) {
    stats->transport_iterations = transport_iters;
    stats->pressure_iterations = pv.pressure_iterations;
  }
  return next;
}

}  // namespace

SchemeState step(const SchemeState& state, const Mesh& mesh,
                 const PhysicalData& data, const SchemeConfig& config) {
  return step_impl(state, mesh, data, config, nullptr);
}

FieldP0 div_residual(const Mesh& mesh, const FieldRT0& u, const FieldP0& s_h) {
  FieldP0 out = rt0_divergence(mesh, u);
  for (std::size_t t = 0; t < out.values.size(); ++t) {
    out.values[t] -= s_h.values[t];
  }
  return out;
}

double div_residual_scale(const Mesh& mesh, const FieldRT0& u, const FieldP0& s_h) {
  double scale = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) {
      acc += mesh.edges[tri.e[j]].length * std::abs(u.fluxes[tri.e[j]]);
    }
    scale = std::max(scale, acc / tri.area);
    scale = std::max(scale, std::abs(s_h.values[t]));
  }
  return scale;
}

MonitorRow compute_monitor(const Mesh& mesh, const PhysicalData& data,
                           const SchemeConfig& config, const SchemeState& state) {
  MonitorRow row;
  row.step = state.step;
  row.time = state.time;
  row.c_min = *std::min_element(state.c.values.begin(), state.c.values.end());
  row.c_max = *std::max_element(state.c.values.begin(), state.c.values.end());
  row.theta_min =
      *std::min_element(state.theta.values.begin(), state.theta.values.end());
  row.theta_max =
      *std::max_element(state.theta.values.begin(), state.theta.values.end());
  row.c_l2 = l2_norm(mesh, state.c);
  row.theta_l2 = l2_norm(mesh, state.theta);
  row.c_h = h_norm(mesh, state.c);
  row.theta_h = h_norm(mesh, state.theta);
  row.u_l2 = l2_norm(mesh, state.u);
  VectorFieldP0 grad = make_vec_p0(mesh);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    grad.values[t] = p1nc_gradient(mesh, state.p, static_cast<Index>(t));
  }
  row.grad_p_l2 = l2_norm(mesh, grad);
  row.p_mean = mean_value(mesh, state.p);
  const FieldP0 s_h =
      config.s_time
          ? project_p0_mean(mesh,
                            [&](const Vec2& x) { return config.s_time(x, state.time); })
          : project_p0_mean(mesh, data.s);
  const FieldP0 residual = div_residual(mesh, state.u, s_h);
  for (double v : residual.values) {
    row.div_residual_max = std::max(row.div_residual_max, std::abs(v));
  }
  row.div_residual_scale = div_residual_scale(mesh, state.u, s_h);
  return row;
}

RunResult run(const Mesh& mesh, const PhysicalData& data,
              const SchemeConfig& config, const StepCallback& callback) {
  RunResult result;
  result.state = init_state(mesh, data, config);
  double energy_c = 0.0;
  double energy_theta = 0.0;
  if (config.collect_monitors) {
    MonitorRow row = compute_monitor(mesh, data, config, result.state);
    if (callback) callback(result.state, row);
    result.monitors.push_back(row);
  }
  for (int n = 0; n < config.N; ++n) {
    SchemeState next;
    StepStats stats;
    try {
      next = step_impl(result.state, mesh, data, config, &stats);
    } catch (const Error& err) {
      throw Error(err.kind(),
                  "step " + std::to_string(n + 1) + ": " + err.what());
    }
    result.state = std::move(next);
    if (config.collect_monitors) {
      MonitorRow row = compute_monitor(mesh, data, config, result.state);
      energy_c += config.k * row.c_h * row.c_h;
      energy_theta += config.k * row.theta_h * row.theta_h;
      row.energy_c = energy_c;
      row.energy_theta = energy_theta;
      row.transport_iterations = stats.transport_iterations;
      row.pressure_iterations = stats.pressure_iterations;
      if (callback) callback(result.state, row);
      result.monitors.push_back(row);
    } else if (callback) {
      callback(result.state, MonitorRow{});
    }
  }
  return result;
}

void write_monitor_csv(const std::string& path,
                       const std::vector<MonitorRow>& rows,
                       const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "step,time,c_min,c_max,theta_min,theta_max,c_l2,theta_l2,c_h,theta_h,"
         "energy_c,energy_theta,u_l2,grad_p_l2,p_mean,div_residual_max,"
         "div_residual_scale,transport_iterations,pressure_iterations\n";
  char buf[512];
  for (const MonitorRow& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%zu\n",
                  r.step, r.time, r.c_min, r.c_max, r.theta_min, r.theta_max,
                  r.c_l2, r.theta_l2, r.c_h, r.theta_h, r.energy_c,
                  r.energy_theta, r.u_l2, r.grad_p_l2, r.p_mean,
                  r.div_residual_max, r.div_residual_scale,
                  r.transport_iterations, r.pressure_iterations);
    out << buf;
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path);
}

void write_checkpoint(const std::string& directory, const SchemeState& state,
                      const std::string& mesh_reference,
                      const std::string& config_hash) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  std::ofstream out(directory + "/checkpoint.txt");
  if (!out) throw Error(ErrorKind::IoError, "cannot write checkpoint in " + directory);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", state.time);
  out << "mesh = " << mesh_reference << "\n"
      << "step = " << state.step << "\n"
      << "time = " << buf << "\n"
      << "config_hash = " << config_hash << "\n"
      << "species = " << state.extra_species.size() << "\n";
  save_values_csv(directory + "/c.csv", state.c.values);
  save_values_csv(directory + "/theta.csv", state.theta.values);
  save_values_csv(directory + "/p.csv", state.p.dofs);
  save_values_csv(directory + "/u.csv", state.u.fluxes);
  for (std::size_t i = 0; i < state.extra_species.size(); ++i) {
    save_values_csv(directory + "/species_" + std::to_string(i + 2) + ".csv",
                    state.extra_species[i].values);
  }
}

SchemeState read_checkpoint(const std::string& directory, const Mesh& mesh) {
  std::ifstream in(directory + "/checkpoint.txt");
  if (!in) throw Error(ErrorKind::IoError, "cannot open checkpoint in " + directory);
  SchemeState state;
  std::size_t species = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string key, eq;
    if (!(ss >> key >> eq)) continue;
    if (key == "step") ss >> state.step;
    if (key == "time") ss >> state.time;
    if (key == "species") ss >> species;
  }
  state.c.values = load_values_csv(directory + "/c.csv");
  state.theta.values = load_values_csv(directory + "/theta.csv");
  state.p.dofs = load_values_csv(directory + "/p.csv");
  state.u.fluxes = load_values_csv(directory + "/u.csv");
  if (state.c.values.size() != mesh.n_triangles() ||
      state.p.dofs.size() != mesh.n_edges()) {
    throw Error(ErrorKind::DimensionMismatch, "checkpoint does not match mesh");
  }
  for (std::size_t i = 0; i < species; ++i) {
    state.extra_species.push_back(
        {load_values_csv(directory + "/species_" + std::to_string(i + 2) + ".csv")});
  }
  return state;
}

}  // namespace nct
