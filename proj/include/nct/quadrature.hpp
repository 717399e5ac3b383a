#ifndef NCT_QUADRATURE_HPP
#define NCT_QUADRATURE_HPP

#include <array>

#include "nct/geometry.hpp"

namespace nct {

/// Quadrature node in barycentric coordinates with weight relative to |K|.
struct TriQuadNode {
  double l0, l1, l2;
  double w;
};

/// 6-point rule, exact for polynomials of degree <= 4. This is the rule the
/// library uses for cell averages and mass integrals against analytic data.
inline const std::array<TriQuadNode, 6>& tri_quad_deg4() {
  static const std::array<TriQuadNode, 6> rule = [] {
    const double w1 = 0.223381589678011;
    const double a1 = 0.445948490915965;
    const double w2 = 0.109951743655322;
    const double a2 = 0.091576213509771;
    return std::array<TriQuadNode, 6>{{
        {a1, a1, 1.0 - 2.0 * a1, w1},
        {a1, 1.0 - 2.0 * a1, a1, w1},
        {1.0 - 2.0 * a1, a1, a1, w1},
        {a2, a2, 1.0 - 2.0 * a2, w2},
        {a2, 1.0 - 2.0 * a2, a2, w2},
        {1.0 - 2.0 * a2, a2, a2, w2},
    }};
  }();
  return rule;
}

/// 7-point rule, exact for degree <= 5. Kept as an independent cross-check
/// rule for tests; not used by the production assembly paths.
inline const std::array<TriQuadNode, 7>& tri_quad_deg5() {
  static const std::array<TriQuadNode, 7> rule = [] {
    const double w0 = 0.225;
    const double w1 = 0.132394152788506;
    const double a1 = 0.470142064105115;
    const double w2 = 0.125939180544827;
    const double a2 = 0.101286507323456;
    const double third = 1.0 / 3.0;
    return std::array<TriQuadNode, 7>{{
        {third, third, third, w0},
        {a1, a1, 1.0 - 2.0 * a1, w1},
        {a1, 1.0 - 2.0 * a1, a1, w1},
        {1.0 - 2.0 * a1, a1, a1, w1},
        {a2, a2, 1.0 - 2.0 * a2, w2},
        {a2, 1.0 - 2.0 * a2, a2, w2},
        {1.0 - 2.0 * a2, a2, a2, w2},
    }};
  }();
  return rule;
}

/// Integrate f over the triangle (p0,p1,p2) with a barycentric rule.
template <typename Rule, typename F>
double integrate_triangle(const Rule& rule, const Vec2& p0, const Vec2& p1,
                          const Vec2& p2, F&& f) {
  const double area = 0.5 * signed_area2(p0, p1, p2);
  double acc = 0.0;
  for (const auto& n : rule) {
    const Vec2 x = n.l0 * p0 + n.l1 * p1 + n.l2 * p2;
    acc += n.w * f(x);
  }
  return acc * area;
}

/// Gauss nodes on [0,1]; weights sum to 1.
struct EdgeQuadNode {
  double t;
  double w;
};

/// 2-point Gauss, exact for degree <= 3 along an edge.
inline const std::array<EdgeQuadNode, 2>& edge_quad_2pt() {
  static const std::array<EdgeQuadNode, 2> rule = [] {
    const double d = 0.5 / 1.7320508075688772935;  // 1/(2*sqrt(3))
    return std::array<EdgeQuadNode, 2>{{{0.5 - d, 0.5}, {0.5 + d, 0.5}}};
  }();
  return rule;
}

/// 4-point Gauss, exact for degree <= 7 along an edge.
inline const std::array<EdgeQuadNode, 4>& edge_quad_4pt() {
  static const std::array<EdgeQuadNode, 4> rule = [] {
    const double x1 = 0.3399810435848563;
    const double x2 = 0.8611363115940526;
    const double w1 = 0.6521451548625461;
    const double w2 = 0.3478548451374538;
    return std::array<EdgeQuadNode, 4>{{
        {0.5 * (1.0 - x2), 0.5 * w2},
        {0.5 * (1.0 - x1), 0.5 * w1},
        {0.5 * (1.0 + x1), 0.5 * w1},
        {0.5 * (1.0 + x2), 0.5 * w2},
    }};
  }();
  return rule;
}

/// Average of f along the segment [a,b].
template <typename Rule, typename F>
double edge_average(const Rule& rule, const Vec2& a, const Vec2& b, F&& f) {
  double acc = 0.0;
  for (const auto& n : rule) acc += n.w * f(a + n.t * (b - a));
  return acc;
}

}  // namespace nct

#endif
