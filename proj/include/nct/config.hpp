#ifndef NCT_CONFIG_HPP
#define NCT_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nct/physics.hpp"
#include "nct/scheme.hpp"

namespace nct {

/// Parsed run configuration. The file format is sectioned key-value text:
///   [section]
///   key = value tokens   # comment
/// Sections: mesh, physics, chain (optional), scheme, solver, output, mode.
struct RunConfig {
  // mesh: either a file or the equilateral generator
  std::string mesh_file;
  bool use_generator = true;
  int rows = 4;
  int cols = 4;
  double side = 0.25;
  bool allow_right_angles = false;

  PhysicalData data;

  bool has_chain = false;
  DecayChain chain;
  std::vector<double> chain_initial;  // physical concentrations a_i at t=0
  std::vector<double> chain_sources;  // physical source rates s_i

  double T = 1.0;
  double k = 0.0;  // derived from T/N when zero
  int N = 0;

  double solver_rel_tol = 1e-10;
  std::size_t solver_max_iter = 0;

  std::string out_dir = "out";
  int vtk_every = 0;  // 0 disables snapshots

  std::string mode = "physical";  // or "mms"
  std::string mms_case = "bump";
  int levels = 4;  // 32 -> 2048 triangles for the default base mesh
  std::uint64_t seed = 42;

  std::string config_hash;  // FNV-1a of the raw file text

  /// Time step count and size with k*N = T enforced.
  void resolve_time_grid();
  SchemeConfig scheme_config() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

std::string fnv1a_hex(const std::string& text);

/// Named analytic builders used by the config surface
/// (`zero`, `constant V`, `gaussian-bump CX CY R AMP BASE`,
///  `box X0 Y0 X1 Y1 INSIDE OUTSIDE`).
ScalarFn parse_scalar_builtin(const std::vector<std::string>& tokens,
                              const std::string& context);
/// (`zero`, `constant FX FY`, `rigid-rotation CX CY OMEGA`).
VectorFn parse_vector_builtin(const std::vector<std::string>& tokens,
                              const std::string& context);

}  // namespace nct

#endif
