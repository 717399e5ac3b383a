#include "nct/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "nct/operators.hpp"
#include "nct/quadrature.hpp"
#include "nct/rng.hpp"

namespace nct {

double OrderEstimate::worst_pair() const {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pairwise.size(); ++i) {
    if (!pair_saturated[i]) worst = std::min(worst, pairwise[i]);
  }
  return worst;
}

OrderEstimate observed_order(const std::vector<double>& errors,
                             const std::vector<double>& hs) {
  if (errors.size() < 2 || errors.size() != hs.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "observed_order needs >= 2 matching levels");
  }
  for (double e : errors) {
    if (!(e > 0.0)) {
      throw Error(ErrorKind::NonPositiveError,
                  "observed_order needs positive errors");
    }
  }
  const double floor =
      std::max(1e-15, 1e-13 * *std::max_element(errors.begin(), errors.end()));
  OrderEstimate est;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    est.pairwise.push_back(std::log(errors[i] / errors[i + 1]) /
                           std::log(hs[i] / hs[i + 1]));
    est.pair_saturated.push_back(errors[i] <= floor || errors[i + 1] <= floor);
  }
  // Least-squares slope of log e vs log h over non-saturated levels. When
  // fewer than two levels survive, every error sits at the round-off floor
  // and no finite order can be claimed; report infinity (vacuously fine).
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i] > floor) keep.push_back(i);
  }
  est.least_squares = std::numeric_limits<double>::infinity();
  if (keep.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i : keep) {
      const double lx = std::log(hs[i]);
      const double ly = std::log(errors[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double n = static_cast<double>(keep.size());
    est.least_squares = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return est;
}

// ---------------------------------------------------------------------------
// Random field builders
// ---------------------------------------------------------------------------

FieldP0 random_p0(const Mesh& mesh, Rng& rng, double lo, double hi) {
  FieldP0 out = make_p0(mesh);
  for (double& v : out.values) v = rng.uniform(lo, hi);
  return out;
}

FieldP0 random_zero_mean_p0(const Mesh& mesh, Rng& rng) {
  FieldP0 out = random_p0(mesh, rng);
  const double mean = mean_value(mesh, out);
  for (double& v : out.values) v -= mean;
  return out;
}

FieldP1NC random_p1nc(const Mesh& mesh, Rng& rng) {
  FieldP1NC out = make_p1nc(mesh);
  for (double& v : out.dofs) v = rng.symmetric();
  return out;
}

VectorFieldP0 random_vec_p0(const Mesh& mesh, Rng& rng) {
  VectorFieldP0 out = make_vec_p0(mesh);
  for (Vec2& v : out.values) v = {rng.symmetric(), rng.symmetric()};
  return out;
}

FieldRT0 random_divfree_rt0(const Mesh& mesh, Rng& rng) {
  // Vertex stream function, zero on the boundary: the tangential increment
  // of psi along an edge is the normal flux, so per-triangle flux sums
  // telescope away.
  std::vector<bool> on_boundary(mesh.n_vertices(), false);
  for (Index e : mesh.boundary_edges) {
    on_boundary[mesh.edges[e].v[0]] = true;
    on_boundary[mesh.edges[e].v[1]] = true;
  }
  std::vector<double> psi(mesh.n_vertices(), 0.0);
  for (std::size_t v = 0; v < mesh.n_vertices(); ++v) {
    if (!on_boundary[v]) psi[v] = rng.symmetric();
  }
  FieldRT0 out = make_rt0(mesh);
  for (Index e : mesh.interior_edges) {
    const Edge& edge = mesh.edges[e];
    const Vec2 a = mesh.vertices[edge.v[0]];
    const Vec2 b = mesh.vertices[edge.v[1]];
    const double along = (psi[edge.v[1]] - psi[edge.v[0]]) / edge.length;
    const double orientation = dot(edge.normal, rot_cw(b - a)) > 0.0 ? 1.0 : -1.0;
    out.fluxes[e] = orientation * along;
  }
  return out;
}

PhysicalData random_admissible_data(Rng& rng) {
  PhysicalData data;
  data.D_c = rng.uniform(0.02, 0.5);
  data.D_theta = rng.uniform(0.02, 0.5);
  data.lambda = rng.uniform(0.2, 2.0);
  data.theta_minus = rng.uniform(0.4, 0.8);
  data.theta_plus = rng.uniform(1.5, 3.0);
  data.kappa_inf = 1e-10;
  data.viscosity.mu0 = rng.uniform(0.5, 2.0);
  data.viscosity.mobility_ratio = rng.uniform(1.0, 20.0);
  data.viscosity.theta_star = rng.uniform(data.theta_minus, data.theta_plus);
  data.viscosity.permeability = rng.uniform(0.5, 2.0);

  // Compatibility with the no-flux boundary forces int s = 0, and the data
  // inequalities then admit only s = 0 and s_theta = 0; the concentration
  // source may roam in [0, lambda].
  const double a1 = rng.uniform(0.5, 3.0);
  const double a2 = rng.uniform(0.5, 3.0);
  const double phase = rng.uniform(0.0, 6.28);
  const double amp = rng.uniform(0.0, 0.49) * data.lambda;
  const double mid = 0.5 * data.lambda;
  data.s = [](const Vec2&) { return 0.0; };
  data.s_theta = [](const Vec2&) { return 0.0; };
  data.s_c = [a1, a2, phase, amp, mid](const Vec2& x) {
    return mid + amp * std::sin(a1 * x.x + a2 * x.y + phase);
  };

  const double cb1 = rng.uniform(0.5, 4.0);
  const double cb2 = rng.uniform(0.5, 4.0);
  const double cphase = rng.uniform(0.0, 6.28);
  data.c0 = [cb1, cb2, cphase](const Vec2& x) {
    return 0.5 + 0.45 * std::cos(cb1 * x.x + cb2 * x.y + cphase);
  };
  const double tmid = 0.5 * (data.theta_minus + data.theta_plus);
  const double tamp = 0.45 * (data.theta_plus - data.theta_minus);
  const double tb1 = rng.uniform(0.5, 4.0);
  const double tb2 = rng.uniform(0.5, 4.0);
  const double tphase = rng.uniform(0.0, 6.28);
  data.theta0 = [tmid, tamp, tb1, tb2, tphase](const Vec2& x) {
    return tmid + tamp * std::sin(tb1 * x.x + tb2 * x.y + tphase);
  };
  const double fx = rng.uniform(-1.0, 1.0);
  const double fy = rng.uniform(-1.0, 1.0);
  const double fr = rng.uniform(0.0, 1.0);
  data.f = [fx, fy, fr](const Vec2& x, double) {
    return Vec2{fx - fr * (x.y - 0.4), fy + fr * (x.x - 0.7)};
  };
  return data;
}

// ---------------------------------------------------------------------------
// Convergence study
// ---------------------------------------------------------------------------

namespace {

double l2_error_p0_vs_exact(const Mesh& mesh, const FieldP0& field,
                            const std::function<double(const Vec2&)>& exact) {
  // Compare against cell averages, matching how data enters the scheme.
  const FieldP0 proj = project_p0_mean(mesh, exact);
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const double d = proj.values[t] - field.values[t];
    acc += mesh.triangles[t].area * d * d;
  }
  return std::sqrt(acc);
}

double h_norm_point_error(const Mesh& mesh, const FieldP0& field,
                          const std::function<double(const Vec2&)>& exact) {
  FieldP0 eps = project_p0_point(mesh, exact);
  for (std::size_t t = 0; t < eps.values.size(); ++t) {
    eps.values[t] -= field.values[t];
  }
  return h_norm(mesh, eps);
}

}  // namespace

ConvergenceReport run_convergence(const MMSCase& mms_case, int levels,
                                  const SchemeConfig& config_template) {
  if (levels < 1) {
    throw Error(ErrorKind::InadmissibleData, "convergence study needs >= 1 level");
  }
  ConvergenceReport report;
  report.case_name = mms_case.name;

  Mesh mesh = generate_equilateral_mesh(
      mms_case.base_rows, mms_case.base_cols,
      mms_case.domain_side / mms_case.base_rows);
  const double T = mms_case.horizon;
  const int N0 = std::max(1, static_cast<int>(std::lround(T / (mesh.h / 4.0))));

  for (int level = 0; level < levels; ++level) {
    if (level > 0) mesh = uniform_refine(mesh);
    const int N = N0 << level;
    const double k = T / N;

    SchemeConfig config = config_template;
    config.k = k;
    config.N = N;
    config.collect_monitors = false;
    config.s_time = [&](const Vec2& x, double) { return mms_case.s(x); };
    config.s_c_time = mms_case.s_c;
    config.s_theta_time = mms_case.s_theta;

    double energy_c = 0.0;
    double energy_theta = 0.0;
    SchemeState state = init_state(mesh, mms_case.data, config);
    for (int n = 0; n < N; ++n) {
      state = step(state, mesh, mms_case.data, config);
      const double t_n = state.time;
      const double ec = h_norm_point_error(
          mesh, state.c, [&](const Vec2& x) { return mms_case.c_exact(x, t_n); });
      const double eth = h_norm_point_error(
          mesh, state.theta,
          [&](const Vec2& x) { return mms_case.theta_exact(x, t_n); });
      energy_c += k * ec * ec;
      energy_theta += k * eth * eth;
    }

    ConvergenceLevel lvl;
    lvl.level = level;
    lvl.h = mesh.h;
    lvl.k = k;
    lvl.n_triangles = mesh.n_triangles();
    lvl.n_steps = N;
    lvl.e_c = l2_error_p0_vs_exact(
        mesh, state.c, [&](const Vec2& x) { return mms_case.c_exact(x, T); });
    lvl.e_theta = l2_error_p0_vs_exact(
        mesh, state.theta,
        [&](const Vec2& x) { return mms_case.theta_exact(x, T); });
    lvl.energy_c = energy_c;
    lvl.energy_theta = energy_theta;
    lvl.combined = std::sqrt(lvl.e_c * lvl.e_c + lvl.e_theta * lvl.e_theta +
                             energy_c + energy_theta);

    double grad_p_err2 = 0.0;
    double u_err2 = 0.0;
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
      const Triangle& tri = mesh.triangles[t];
      const Vec2 gh = p1nc_gradient(mesh, state.p, static_cast<Index>(t));
      grad_p_err2 += integrate_triangle(
          tri_quad_deg4(), mesh.vertices[tri.v[0]], mesh.vertices[tri.v[1]],
          mesh.vertices[tri.v[2]], [&](const Vec2& x) {
            const Vec2 d = mms_case.grad_p(x, T) - gh;
            return dot(d, d);
          });
      u_err2 += integrate_triangle(
          tri_quad_deg4(), mesh.vertices[tri.v[0]], mesh.vertices[tri.v[1]],
          mesh.vertices[tri.v[2]], [&](const Vec2& x) {
            const Vec2 d = mms_case.u_exact(x) -
                           rt0_evaluate(mesh, state.u, static_cast<Index>(t), x);
            return dot(d, d);
          });
    }
    lvl.e_grad_p = std::sqrt(grad_p_err2);
    lvl.e_u = std::sqrt(u_err2);
    lvl.grad_combined = lvl.e_grad_p + lvl.e_u;
    report.levels.push_back(lvl);
  }

  if (report.levels.size() >= 2) {
    std::vector<double> hs, combined, grad;
    for (const ConvergenceLevel& lvl : report.levels) {
      hs.push_back(lvl.h);
      // A solver that reproduces the exact solution leaves zero error;
      // lift to the representable floor so the saturation logic applies.
      combined.push_back(std::max(lvl.combined, 1e-300));
      grad.push_back(std::max(lvl.grad_combined, 1e-300));
    }
    report.order_combined = observed_order(combined, hs);
    report.order_grad = observed_order(grad, hs);
  }
  return report;
}

std::string ConvergenceReport::render_table() const {
  std::ostringstream out;
  char buf[256];
  out << "convergence study: case " << case_name << "\n";
  out << "level  cells      h          k         e_c        e_theta    energy_c   "
         "energy_th  combined   ord   e_grad_p   e_u        grad_comb  ord\n";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const ConvergenceLevel& l = levels[i];
    std::string ord1 = "  -  ";
    std::string ord2 = "  -  ";
    if (i > 0 && i - 1 < order_combined.pairwise.size()) {
      std::snprintf(buf, sizeof(buf), "%5.2f", order_combined.pairwise[i - 1]);
      ord1 = buf;
      std::snprintf(buf, sizeof(buf), "%5.2f", order_grad.pairwise[i - 1]);
      ord2 = buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "%-6d %-10zu %-10.4g %-9.4g %-10.4g %-10.4g %-10.4g %-10.4g "
                  "%-10.4g %s %-10.4g %-10.4g %-10.4g %s\n",
                  l.level, l.n_triangles, l.h, l.k, l.e_c, l.e_theta,
                  std::sqrt(l.energy_c), std::sqrt(l.energy_theta), l.combined,
                  ord1.c_str(), l.e_grad_p, l.e_u, l.grad_combined, ord2.c_str());
    out << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "least-squares orders: combined %.3f, gradient/velocity %.3f\n",
                order_combined.least_squares, order_grad.least_squares);
  out << buf;
  return out.str();
}

void ConvergenceReport::write_csv(const std::string& path,
                                  const std::string& header_comment) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "level,n_triangles,h,k,e_c,e_theta,energy_c,energy_theta,combined,"
         "e_grad_p,e_u,grad_combined\n";
  char buf[512];
  for (const ConvergenceLevel& l : levels) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g\n",
                  l.level, l.n_triangles, l.h, l.k, l.e_c, l.e_theta,
                  l.energy_c, l.energy_theta, l.combined, l.e_grad_p, l.e_u,
                  l.grad_combined);
    out << buf;
  }
}

// ---------------------------------------------------------------------------
// Invariant suite
// ---------------------------------------------------------------------------

namespace {

void push(SuiteReport& report, const std::string& name, double measured,
          double threshold, bool larger_is_better, const std::string& detail) {
  PropertyResult r;
  r.name = name;
  r.measured = measured;
  r.threshold = threshold;
  r.larger_is_better = larger_is_better;
  r.pass = larger_is_better ? measured >= threshold : measured <= threshold;
  r.detail = detail;
  report.results.push_back(r);
}

/// Cell averages of div(w) computed from edge quadrature of the normal
/// trace; interior contributions cancel exactly in the global sum, which
/// keeps the result mean-free at round-off level.
FieldP0 cell_average_divergence(const Mesh& mesh, const VectorFn& w) {
  std::vector<double> edge_flux(mesh.n_edges(), 0.0);
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    edge_flux[e] = edge.length *
                   edge_average(edge_quad_4pt(), mesh.vertices[edge.v[0]],
                                mesh.vertices[edge.v[1]], [&](const Vec2& x) {
                                  return dot(w(x), edge.normal);
                                });
  }
  FieldP0 out = make_p0(mesh);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) acc += tri.sign[j] * edge_flux[tri.e[j]];
    out.values[t] = acc / tri.area;
  }
  return out;
}

void subtract_mean(const Mesh& mesh, FieldP0& q) {
  const double m = mean_value(mesh, q);
  for (double& v : q.values) v -= m;
}

}  // namespace

SuiteReport invariant_suite(std::uint64_t seed) {
  SuiteReport report;
  report.seed = seed;

  std::vector<Mesh> family;
  family.push_back(generate_equilateral_mesh(1, 1, 1.0));
  family.push_back(generate_equilateral_mesh(2, 2, 0.5));
  family.push_back(generate_equilateral_mesh(4, 4, 0.25));

  // Identities of the discrete operators on seeded random fields.
  {
    Rng rng(seed);
    double worst_adjoint = 0.0;
    double worst_coercive = 0.0;
    double worst_symmetric = 0.0;
    for (const Mesh& mesh : family) {
      for (int trial = 0; trial < 50; ++trial) {
        const VectorFieldP0 v = random_vec_p0(mesh, rng);
        const FieldP1NC q = random_p1nc(mesh, rng);
        const double lhs = l2_inner(mesh, v, grad_h(mesh, q));
        const double rhs = -l2_inner(mesh, q, div_h(mesh, v));
        const double scale = l2_norm(mesh, v) * broken_h1_norm(mesh, q) + 1e-30;
        worst_adjoint = std::max(worst_adjoint, std::abs(lhs - rhs) / scale);

        const FieldP0 p = random_p0(mesh, rng);
        const FieldP0 r = random_p0(mesh, rng);
        const double hn = h_norm(mesh, p);
        const double co =
            std::abs(-l2_inner(mesh, lap_h_apply(mesh, p), p) - hn * hn);
        worst_coercive = std::max(worst_coercive, co / (hn * hn + 1e-30));
        const double sym = std::abs(l2_inner(mesh, lap_h_apply(mesh, p), r) -
                                    l2_inner(mesh, p, lap_h_apply(mesh, r)));
        const double sscale =
            h_norm(mesh, p) * h_norm(mesh, r) + 1e-30;
        worst_symmetric = std::max(worst_symmetric, sym / sscale);
      }
    }
    push(report, "adjointness_grad_div", worst_adjoint, 1e-12, false,
         "max relative |(v,grad q) + (q,div v)| over 50 trials x 3 meshes");
    push(report, "laplacian_coercivity_identity", worst_coercive, 1e-12, false,
         "max relative |-(Lp,p) - |p|_h^2|");
    push(report, "laplacian_symmetry", worst_symmetric, 1e-12, false,
         "max relative |(Lp,q) - (p,Lq)|");
  }

  // Upwind form: positivity for divergence-free fields, equivalence of the
  // edge-based and cell-based evaluation.
  {
    Rng rng(seed + 1);
    double worst_neg = 0.0;
    double worst_equiv = 0.0;
    for (const Mesh& mesh : family) {
      for (int trial = 0; trial < 50; ++trial) {
        const FieldRT0 v = random_divfree_rt0(mesh, rng);
        const FieldP0 q = random_p0(mesh, rng);
        const FieldP0 p = random_p0(mesh, rng);
        const double bqq = b_h(mesh, v, q, q);
        const double scale =
            l2_norm(mesh, v) * (h_norm(mesh, q) * h_norm(mesh, q) + 1.0) + 1e-30;
        worst_neg = std::max(worst_neg, -bqq / scale);

        const double direct = b_h(mesh, v, p, q);
        const FieldP0 up = upwind_apply(mesh, v, p);
        double recomposed = 0.0;
        double escale = 1e-30;  // magnitude of the summands, not the sum
        for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
          const double term = mesh.triangles[t].area * q.values[t] * up.values[t];
          recomposed += term;
          escale += std::abs(term);
        }
        worst_equiv = std::max(worst_equiv, std::abs(direct - recomposed) / escale);
      }
    }
    push(report, "upwind_positivity_divfree", worst_neg, 1e-12, false,
         "max of -b(v,q,q)/scale for divergence-free v");
    push(report, "upwind_form_equivalence", worst_equiv, 1e-13, false,
         "edge-based trilinear form vs cell recomposition");
  }

  // Measured stability constants (reported; generous sanity thresholds).
  {
    Rng rng(seed + 2);
    double poincare_p0 = 0.0;
    double poincare_cr = 0.0;
    double bh_bound = 0.0;
    for (const Mesh& mesh : family) {
      for (int trial = 0; trial < 30; ++trial) {
        const FieldP0 q = random_zero_mean_p0(mesh, rng);
        poincare_p0 = std::max(poincare_p0,
                               l2_norm(mesh, q) / (h_norm(mesh, q) + 1e-30));
        FieldP1NC w = random_p1nc(mesh, rng);
        const double wm = mean_value(mesh, w);
        for (double& d : w.dofs) d -= wm;
        VectorFieldP0 gw = grad_h(mesh, w);
        poincare_cr = std::max(poincare_cr,
                               l2_norm(mesh, w) / (l2_norm(mesh, gw) + 1e-30));
        const FieldRT0 v = random_divfree_rt0(mesh, rng);
        const FieldP0 p = random_p0(mesh, rng);
        const FieldP0 r = random_p0(mesh, rng);
        const double denom = l2_norm(mesh, v) * h_norm(mesh, p) *
                                 h_norm(mesh, r) +
                             1e-30;
        bh_bound = std::max(bh_bound, std::abs(b_h(mesh, v, p, r)) / denom);
      }
    }
    push(report, "poincare_constant_p0", poincare_p0, 100.0, false,
         "measured sup |q| / |q|_h over zero-mean fields");
    push(report, "poincare_constant_cr", poincare_cr, 100.0, false,
         "measured sup |q| / |grad q| over zero-mean CR fields");
    push(report, "upwind_bound_constant", bh_bound, 100.0, false,
         "measured sup |b(v,p,q)| / (|v| |p|_h |q|_h), divergence-free v");
  }

  // Consistency orders on a refinement family with compactly supported
  // smooth test data. The family starts at h ~ 0.14 so even the coarsest
  // level resolves the profile and the fit sees the asymptotic regime.
  {
    const double cx = 0.75;
    const double cy = std::sqrt(3.0) / 4.0;
    const mms::BumpSpec bq{cx, cy, 0.42};
    const mms::BumpSpec bpsi{cx + 0.01, cy - 0.01, 0.41};
    auto q_fn = [bq](const Vec2& x) { return 0.7 * mms::bump(bq, x); };
    auto grad_q = [bq](const Vec2& x) { return 0.7 * mms::bump_gradient(bq, x); };
    auto v_fn = [bpsi](const Vec2& x) {
      const Vec2 g = 0.5 * mms::bump_gradient(bpsi, x);
      return Vec2{g.y, -g.x};
    };

    std::vector<double> hs;
    std::vector<double> lap_cons, upw_cons;
    std::vector<double> e_p0_mean, e_p0_pt_vs_mean, e_cr, e_cr_grad, e_rt0;
    Mesh mesh = generate_equilateral_mesh(8, 8, 0.125);
    for (int level = 0; level < 4; ++level) {
      if (level > 0) mesh = uniform_refine(mesh);
      hs.push_back(mesh.h);

      // Discrete Laplacian consistency in the dual norm.
      FieldP0 lap_avg = cell_average_divergence(mesh, grad_q);
      FieldP0 lap_disc = lap_h_apply(mesh, project_p0_point(mesh, q_fn));
      FieldP0 resid = lap_avg;
      for (std::size_t t = 0; t < resid.values.size(); ++t) {
        resid.values[t] -= lap_disc.values[t];
      }
      subtract_mean(mesh, resid);
      lap_cons.push_back(dual_norm_minus1h(mesh, resid));

      // Upwind consistency in the dual norm.
      FieldP0 conv_avg = cell_average_divergence(
          mesh, [&](const Vec2& x) { return q_fn(x) * v_fn(x); });
      const FieldRT0 vh = interp_rt0(mesh, v_fn);
      FieldP0 conv_disc = upwind_apply(mesh, vh, project_p0_point(mesh, q_fn));
      FieldP0 resid2 = conv_avg;
      for (std::size_t t = 0; t < resid2.values.size(); ++t) {
        resid2.values[t] -= conv_disc.values[t];
      }
      subtract_mean(mesh, resid2);
      upw_cons.push_back(dual_norm_minus1h(mesh, resid2));

      // Interpolation errors in L2.
      const FieldP0 qm = project_p0_mean(mesh, q_fn);
      const FieldP0 qp = project_p0_point(mesh, q_fn);
      double acc_mean = 0.0, acc_diff = 0.0, acc_cr = 0.0, acc_crg = 0.0,
             acc_rt = 0.0;
      const FieldP1NC qcr = interp_p1nc(mesh, q_fn);
      for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const Triangle& tri = mesh.triangles[t];
        const Vec2& p0 = mesh.vertices[tri.v[0]];
        const Vec2& p1 = mesh.vertices[tri.v[1]];
        const Vec2& p2 = mesh.vertices[tri.v[2]];
        acc_mean += integrate_triangle(tri_quad_deg5(), p0, p1, p2,
                                       [&](const Vec2& x) {
                                         const double d = q_fn(x) - qm.values[t];
                                         return d * d;
                                       });
        const double dd = qm.values[t] - qp.values[t];
        acc_diff += tri.area * dd * dd;
        acc_cr += integrate_triangle(
            tri_quad_deg5(), p0, p1, p2, [&](const Vec2& x) {
              const double d =
                  q_fn(x) - p1nc_evaluate(mesh, qcr, static_cast<Index>(t), x);
              return d * d;
            });
        const Vec2 gh = p1nc_gradient(mesh, qcr, static_cast<Index>(t));
        acc_crg += integrate_triangle(tri_quad_deg5(), p0, p1, p2,
                                      [&](const Vec2& x) {
                                        const Vec2 d = grad_q(x) - gh;
                                        return dot(d, d);
                                      });
        acc_rt += integrate_triangle(
            tri_quad_deg5(), p0, p1, p2, [&](const Vec2& x) {
              const Vec2 d =
                  v_fn(x) - rt0_evaluate(mesh, vh, static_cast<Index>(t), x);
              return dot(d, d);
            });
      }
      e_p0_mean.push_back(std::sqrt(acc_mean));
      e_p0_pt_vs_mean.push_back(std::sqrt(acc_diff));
      e_cr.push_back(std::sqrt(acc_cr));
      e_cr_grad.push_back(std::sqrt(acc_crg));
      e_rt0.push_back(std::sqrt(acc_rt));
    }
    push(report, "consistency_order_laplacian",
         observed_order(lap_cons, hs).least_squares, 0.9, true,
         "dual-norm consistency of the discrete Laplacian");
    push(report, "consistency_order_upwind",
         observed_order(upw_cons, hs).least_squares, 0.9, true,
         "dual-norm consistency of the upwind convection");
    push(report, "interp_order_p0_mean",
         observed_order(e_p0_mean, hs).least_squares, 0.9, true,
         "L2 order of cell-average projection");
    push(report, "interp_order_p0_mean_vs_point",
         observed_order(e_p0_pt_vs_mean, hs).least_squares, 0.9, true,
         "L2 order of the gap between the two P0 projections");
    push(report, "interp_order_cr",
         observed_order(e_cr, hs).least_squares, 0.9, true,
         "L2 order of edge-mean CR interpolation");
    push(report, "interp_order_cr_gradient",
         observed_order(e_cr_grad, hs).least_squares, 0.9, true,
         "broken H1 order of CR interpolation");
    push(report, "interp_order_rt0",
         observed_order(e_rt0, hs).least_squares, 0.9, true,
         "L2 order of RT0 flux interpolation");
  }

  // Maximum principle and divergence identity under randomized admissible
  // data on a 128-triangle mesh.
  {
    Rng rng(seed + 3);
    const Mesh mesh = generate_equilateral_mesh(8, 8, 0.125);
    double worst_c = 0.0;
    double worst_theta = 0.0;
    double worst_div = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const PhysicalData data = random_admissible_data(rng);
      const ValidationReport validation = validate_source_conditions(data, mesh);
      if (!validation.max_principle_guaranteed()) {
        worst_c = std::numeric_limits<double>::infinity();
        break;
      }
      SchemeConfig config;
      config.k = rng.uniform(0.02, 0.2);
      config.N = 10;
      config.collect_monitors = false;
      SchemeState state = init_state(mesh, data, config);
      const FieldP0 s_h = project_p0_mean(mesh, data.s);
      for (int n = 0; n < config.N; ++n) {
        state = step(state, mesh, data, config);
        for (double v : state.c.values) {
          worst_c = std::max(worst_c, std::max(-v, v - 1.0));
        }
        for (double v : state.theta.values) {
          worst_theta = std::max(worst_theta,
                                 std::max(data.theta_minus - v, v - data.theta_plus));
        }
        const FieldP0 resid = div_residual(mesh, state.u, s_h);
        const double scale = div_residual_scale(mesh, state.u, s_h);
        for (double v : resid.values) {
          worst_div = std::max(worst_div, std::abs(v) / (scale + 1e-30));
        }
      }
    }
    push(report, "maximum_principle_concentration", worst_c, 1e-9, false,
         "max excursion of c outside [0,1], 20 data sets x 10 steps");
    push(report, "maximum_principle_temperature", worst_theta, 1e-9, false,
         "max excursion of theta outside [theta-,theta+]");
    push(report, "divergence_identity", worst_div, 10.0 * 1e-10, false,
         "max |div u - s| over flux scale, all steps");
  }

  return report;
}

bool SuiteReport::all_passed() const {
  for (const PropertyResult& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

std::string SuiteReport::render_text() const {
  std::ostringstream out;
  out << "invariant suite, seed " << seed << "\n";
  char buf[256];
  for (const PropertyResult& r : results) {
    std::snprintf(buf, sizeof(buf), "[%s] %-36s measured %.6e %s %.6e  (%s)\n",
                  r.pass ? "PASS" : "FAIL", r.name.c_str(), r.measured,
                  r.larger_is_better ? ">=" : "<=", r.threshold,
                  r.detail.c_str());
    out << buf;
  }
  out << (all_passed() ? "all properties passed\n" : "FAILURES present\n");
  return out.str();
}

void SuiteReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << "# seed " << seed << "\n";
  out << "name,pass,measured,threshold,direction\n";
  char buf[256];
  for (const PropertyResult& r : results) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%.17g,%s\n", r.name.c_str(),
                  r.pass ? 1 : 0, r.measured, r.threshold,
                  r.larger_is_better ? "ge" : "le");
    out << buf;
  }
}

}  // namespace nct
