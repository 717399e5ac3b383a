#include "nct/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nct {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

namespace {

double to_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigParse, context + ": not a number: '" + s + "'");
  }
}

long to_long(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigParse, context + ": not an integer: '" + s + "'");
  }
}

std::vector<double> to_doubles(const std::vector<std::string>& tokens,
                               std::size_t from, const std::string& context) {
  std::vector<double> out;
  for (std::size_t i = from; i < tokens.size(); ++i) {
    out.push_back(to_double(tokens[i], context));
  }
  return out;
}

}  // namespace

ScalarFn parse_scalar_builtin(const std::vector<std::string>& tokens,
                              const std::string& context) {
  if (tokens.empty()) {
    throw Error(ErrorKind::ConfigParse, context + ": empty field spec");
  }
  const std::string& kind = tokens[0];
  const std::vector<double> args = to_doubles(tokens, 1, context);
  if (kind == "zero") {
    return [](const Vec2&) { return 0.0; };
  }
  if (kind == "constant") {
    if (args.size() != 1) {
      throw Error(ErrorKind::ConfigParse, context + ": constant needs 1 value");
    }
    const double v = args[0];
    return [v](const Vec2&) { return v; };
  }
  if (kind == "gaussian-bump") {
    if (args.size() != 5) {
      throw Error(ErrorKind::ConfigParse,
                  context + ": gaussian-bump needs CX CY R AMP BASE");
    }
    const double cx = args[0], cy = args[1], r = args[2], amp = args[3],
                 base = args[4];
    return [cx, cy, r, amp, base](const Vec2& x) {
      const double dx = x.x - cx;
      const double dy = x.y - cy;
      return base + amp * std::exp(-(dx * dx + dy * dy) / (r * r));
    };
  }
  if (kind == "box") {
    if (args.size() != 6) {
      throw Error(ErrorKind::ConfigParse,
                  context + ": box needs X0 Y0 X1 Y1 INSIDE OUTSIDE");
    }
    const double x0 = args[0], y0 = args[1], x1 = args[2], y1 = args[3],
                 inside = args[4], outside = args[5];
    return [x0, y0, x1, y1, inside, outside](const Vec2& x) {
      const bool in = x.x >= x0 && x.x <= x1 && x.y >= y0 && x.y <= y1;
      return in ? inside : outside;
    };
  }
  throw Error(ErrorKind::ConfigParse, context + ": unknown field kind '" + kind + "'");
}

VectorFn parse_vector_builtin(const std::vector<std::string>& tokens,
                              const std::string& context) {
  if (tokens.empty()) {
    throw Error(ErrorKind::ConfigParse, context + ": empty field spec");
  }
  const std::string& kind = tokens[0];
  const std::vector<double> args = to_doubles(tokens, 1, context);
  if (kind == "zero") {
    return [](const Vec2&) { return Vec2{}; };
  }
  if (kind == "constant") {
    if (args.size() != 2) {
      throw Error(ErrorKind::ConfigParse, context + ": constant needs FX FY");
    }
    const double fx = args[0], fy = args[1];
    return [fx, fy](const Vec2&) { return Vec2{fx, fy}; };
  }
  if (kind == "rigid-rotation") {
    if (args.size() != 3) {
      throw Error(ErrorKind::ConfigParse,
                  context + ": rigid-rotation needs CX CY OMEGA");
    }
    const double cx = args[0], cy = args[1], omega = args[2];
    return [cx, cy, omega](const Vec2& x) {
      return Vec2{-omega * (x.y - cy), omega * (x.x - cx)};
    };
  }
  throw Error(ErrorKind::ConfigParse, context + ": unknown field kind '" + kind + "'");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  config.config_hash = fnv1a_hex(text);

  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  bool mesh_file_set = false;
  bool generator_set = false;

  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    const std::string where = "line " + std::to_string(line_no);

    if (first.front() == '[') {
      if (first.back() != ']') {
        throw Error(ErrorKind::ConfigParse, where + ": malformed section header");
      }
      section = first.substr(1, first.size() - 2);
      continue;
    }
    std::string eq;
    if (!(ls >> eq) || eq != "=") {
      throw Error(ErrorKind::ConfigParse, where + ": expected 'key = value'");
    }
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    if (tokens.empty()) {
      throw Error(ErrorKind::ConfigParse, where + ": missing value for " + first);
    }
    const std::string& v0 = tokens[0];
    const std::string context = "[" + section + "] " + first + " (" + where + ")";

    if (section == "mesh") {
      if (first == "file") {
        config.mesh_file = v0;
        config.use_generator = false;
        mesh_file_set = true;
      } else if (first == "generator") {
        if (v0 != "equilateral") {
          throw Error(ErrorKind::ConfigParse, context + ": unknown generator");
        }
        config.use_generator = true;
        generator_set = true;
      } else if (first == "rows") {
        config.rows = static_cast<int>(to_long(v0, context));
      } else if (first == "cols") {
        config.cols = static_cast<int>(to_long(v0, context));
      } else if (first == "side") {
        config.side = to_double(v0, context);
      } else if (first == "allow_right_angles") {
        config.allow_right_angles = v0 == "true" || v0 == "1";
      } else {
        throw Error(ErrorKind::ConfigParse, context + ": unknown key");
      }
    } else if (section == "physics") {
      if (first == "D_c") config.data.D_c = to_double(v0, context);
      else if (first == "D_theta") config.data.D_theta = to_double(v0, context);
      else if (first == "lambda") config.data.lambda = to_double(v0, context);
      else if (first == "theta_minus") config.data.theta_minus = to_double(v0, context);
      else if (first == "theta_plus") config.data.theta_plus = to_double(v0, context);
      else if (first == "kappa_inf") config.data.kappa_inf = to_double(v0, context);
      else if (first == "theta_star") config.data.viscosity.theta_star = to_double(v0, context);
      else if (first == "mu0") config.data.viscosity.mu0 = to_double(v0, context);
      else if (first == "mobility_ratio") config.data.viscosity.mobility_ratio = to_double(v0, context);
      else if (first == "permeability") config.data.viscosity.permeability = to_double(v0, context);
      else if (first == "c0") config.data.c0 = parse_scalar_builtin(tokens, context);
      else if (first == "theta0") config.data.theta0 = parse_scalar_builtin(tokens, context);
      else if (first == "s") config.data.s = parse_scalar_builtin(tokens, context);
      else if (first == "s_c") config.data.s_c = parse_scalar_builtin(tokens, context);
      else if (first == "s_theta") config.data.s_theta = parse_scalar_builtin(tokens, context);
      else if (first == "f") {
        const VectorFn fn = parse_vector_builtin(tokens, context);
        config.data.f = [fn](const Vec2& x, double) { return fn(x); };
      } else {
        throw Error(ErrorKind::ConfigParse, context + ": unknown key");
      }
    } else if (section == "chain") {
      config.has_chain = true;
      if (first == "lambdas") config.chain.lambdas = to_doubles(tokens, 0, context);
      else if (first == "branching") config.chain.branching = to_doubles(tokens, 0, context);
      else if (first == "initial") config.chain_initial = to_doubles(tokens, 0, context);
      else if (first == "sources") config.chain_sources = to_doubles(tokens, 0, context);
      else throw Error(ErrorKind::ConfigParse, context + ": unknown key");
    } else if (section == "scheme") {
      if (first == "T") config.T = to_double(v0, context);
      else if (first == "k") config.k = to_double(v0, context);
      else if (first == "N") config.N = static_cast<int>(to_long(v0, context));
      else throw Error(ErrorKind::ConfigParse, context + ": unknown key");
    } else if (section == "solver") {
      if (first == "rel_tol") config.solver_rel_tol = to_double(v0, context);
      else if (first == "max_iter") config.solver_max_iter = static_cast<std::size_t>(to_long(v0, context));
      else throw Error(ErrorKind::ConfigParse, context + ": unknown key");
    } else if (section == "output") {
      if (first == "dir") config.out_dir = v0;
      else if (first == "vtk_every") config.vtk_every = static_cast<int>(to_long(v0, context));
      else throw Error(ErrorKind::ConfigParse, context + ": unknown key");
    } else if (section == "mode") {
      if (first == "kind") config.mode = v0;
      else if (first == "case") config.mms_case = v0;
      else if (first == "levels") config.levels = static_cast<int>(to_long(v0, context));
      else if (first == "seed") config.seed = static_cast<std::uint64_t>(to_long(v0, context));
      else throw Error(ErrorKind::ConfigParse, context + ": unknown key");
    } else {
      throw Error(ErrorKind::ConfigParse,
                  where + ": key outside any known section: " + first);
    }
  }

  if (mesh_file_set && generator_set) {
    throw Error(ErrorKind::ConfigParse,
                "exactly one mesh source allowed: file or generator");
  }
  if (config.mode != "physical" && config.mode != "mms") {
    throw Error(ErrorKind::ConfigParse, "mode.kind must be physical or mms");
  }
  config.resolve_time_grid();
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigParse, "cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void RunConfig::resolve_time_grid() {
  if (N > 0 && k > 0.0) {
    if (std::abs(k * N - T) > 1e-12 * std::max(1.0, T)) {
      throw Error(ErrorKind::ConfigParse,
                  "scheme block over-determined: k*N must equal T");
    }
  } else if (N > 0) {
    k = T / N;
  } else if (k > 0.0) {
    N = std::max(1, static_cast<int>(std::lround(T / k)));
    k = T / N;
  } else {
    N = 16;
    k = T / N;
  }
}

SchemeConfig RunConfig::scheme_config() const {
  SchemeConfig sc;
  sc.k = k;
  sc.N = N;
  sc.transport_solver.rel_tolerance = solver_rel_tol;
  sc.pressure_solver.rel_tolerance = solver_rel_tol;
  if (solver_max_iter != 0) {
    sc.transport_solver.max_iterations = solver_max_iter;
    sc.pressure_solver.max_iterations = solver_max_iter;
  }
  if (has_chain) {
    chain.validate();
    const std::size_t n = chain.n_species();
    std::vector<double> a0 = chain_initial;
    std::vector<double> src = chain_sources;
    a0.resize(n, 0.0);
    src.resize(n, 0.0);
    const std::vector<double> c0 = bateman_forward(chain, a0);
    const std::vector<double> sc_t = bateman_forward(chain, src);
    for (std::size_t i = 1; i < n; ++i) {
      SpeciesSpec spec;
      spec.lambda = chain.lambdas[i];
      const double ci = c0[i];
      const double si = sc_t[i];
      spec.c0 = [ci](const Vec2&) { return ci; };
      spec.s_c = [si](const Vec2&) { return si; };
      sc.extra_species.push_back(std::move(spec));
    }
  }
  return sc;
}

}  // namespace nct
