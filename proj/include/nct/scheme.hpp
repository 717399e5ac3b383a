#ifndef NCT_SCHEME_HPP
#define NCT_SCHEME_HPP

#include <functional>
#include <string>
#include <vector>

#include "nct/fields.hpp"
#include "nct/linsolve.hpp"
#include "nct/mesh.hpp"
#include "nct/physics.hpp"

namespace nct {

/// The four unknowns at one time level.
struct SchemeState {
  int step = 0;
  double time = 0.0;
  FieldP0 c;
  FieldP0 theta;
  FieldP1NC p;  // zero mean
  FieldRT0 u;
  /// Additional transformed species (independent transport clones sharing
  /// the velocity and temperature of the primary pair).
  std::vector<FieldP0> extra_species;
};

/// A decoupled extra species: its decay rate, transformed source and
/// transformed initial data.
struct SpeciesSpec {
  double lambda = 0.0;
  ScalarFn s_c = [](const Vec2&) { return 0.0; };
  ScalarFn c0 = [](const Vec2&) { return 0.0; };
};

struct SchemeConfig {
  double k = 0.1;  // constant time step
  int N = 1;       // number of steps
  SolverConfig transport_solver;
  SolverConfig pressure_solver;
  bool collect_monitors = true;

  /// Optional time-dependent sources (manufactured-solution runs); when
  /// unset the time-independent fields of PhysicalData are used.
  std::function<double(const Vec2&, double)> s_c_time;
  std::function<double(const Vec2&, double)> s_theta_time;
  std::function<double(const Vec2&, double)> s_time;

  std::vector<SpeciesSpec> extra_species;

  SchemeConfig() {
    transport_solver.method = SolverMethod::NonsymmetricIterative;
    pressure_solver.method = SolverMethod::SymmetricIterative;
    pressure_solver.deflate_constants = true;
  }
};

/// Per-step scalar diagnostics.
struct MonitorRow {
  int step = 0;
  double time = 0.0;
  double c_min = 0.0, c_max = 0.0;
  double theta_min = 0.0, theta_max = 0.0;
  double c_l2 = 0.0, theta_l2 = 0.0;
  double c_h = 0.0, theta_h = 0.0;
  double energy_c = 0.0, energy_theta = 0.0;  // running k * sum of h-norms^2
  double u_l2 = 0.0, grad_p_l2 = 0.0;
  double p_mean = 0.0;
  double div_residual_max = 0.0;
  double div_residual_scale = 0.0;
  std::size_t transport_iterations = 0;
  std::size_t pressure_iterations = 0;
};

struct RunResult {
  SchemeState state;
  std::vector<MonitorRow> monitors;
};

using StepCallback = std::function<void(const SchemeState&, const MonitorRow&)>;

/// Projects initial data, then obtains the initial pressure/velocity pair
/// from one pressure solve with the initial mobility.
SchemeState init_state(const Mesh& mesh, const PhysicalData& data,
                       const SchemeConfig& config);

/// One time level: implicit transport solves for concentration and
/// temperature with the previous velocity, mobility update, pressure solve,
/// velocity reconstruction. Throws on solver failure, leaving the input
/// state untouched.
SchemeState step(const SchemeState& state, const Mesh& mesh,
                 const PhysicalData& data, const SchemeConfig& config);

RunResult run(const Mesh& mesh, const PhysicalData& data,
              const SchemeConfig& config, const StepCallback& callback = {});

/// Per-triangle divergence of u minus the cell source.
FieldP0 div_residual(const Mesh& mesh, const FieldRT0& u, const FieldP0& s_h);

/// The normalization used when judging the divergence identity: the largest
/// per-triangle absolute-flux divergence scale or source magnitude.
double div_residual_scale(const Mesh& mesh, const FieldRT0& u, const FieldP0& s_h);

MonitorRow compute_monitor(const Mesh& mesh, const PhysicalData& data,
                           const SchemeConfig& config, const SchemeState& state);

void write_monitor_csv(const std::string& path,
                       const std::vector<MonitorRow>& rows,
                       const std::string& header_comment = "");

/// Checkpoint: a key-value text file plus one CSV per field, enough for a
/// bit-exact restart on the same mesh.
void write_checkpoint(const std::string& directory, const SchemeState& state,
                      const std::string& mesh_reference,
                      const std::string& config_hash);
SchemeState read_checkpoint(const std::string& directory, const Mesh& mesh);

}  // namespace nct

#endif
