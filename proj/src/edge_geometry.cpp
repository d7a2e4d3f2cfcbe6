#include "flexgate/edge_geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace flexgate {

EdgeQuad edge_quad(const Polyhedron& p, const EdgeFrame& frame) {
  return {p.vertices[frame.x], p.vertices[frame.y], p.vertices[frame.z_prime],
          p.vertices[frame.z_double_prime]};
}

DihedralData dihedral_data(const EdgeQuad& q) {
  const Vec3 w = q.y - q.x;
  const Vec3 wp = q.z_prime - q.x;
  const Vec3 wpp = q.z_double_prime - q.x;

  DihedralData d;
  d.ell = norm(w);
  d.ell_prime = norm(wp);
  d.ell_double_prime = norm(wpp);

  const Vec3 cp = cross(w, wp);
  const Vec3 cpp = cross(wpp, w);
  d.area_prime = norm(cp);
  d.area_double_prime = norm(cpp);
  if (d.area_prime == 0.0 || d.area_double_prime == 0.0)
    throw DegenerateFace("zero doubled area at edge frame");
  d.n_prime = cp / d.area_prime;
  d.n_double_prime = cpp / d.area_double_prime;

  const double areas = d.area_prime * d.area_double_prime;
  d.cos_phi = (d.ell * d.ell * dot(wp, wpp) - dot(wp, w) * dot(wpp, w)) / areas;
  d.sin_phi = -d.ell * dot(w, cross(wp, wpp)) / areas;

  d.phi = std::atan2(d.sin_phi, d.cos_phi);
  if (d.phi < 0.0) d.phi += 2.0 * std::numbers::pi;
  if (d.phi == 0.0) d.phi = 0.0;  // clear the sign of -0.0
  if (std::abs(d.sin_phi) <= kDefaultTrigTol && d.cos_phi < 0.0) d.phi = std::numbers::pi;
  return d;
}

CoefficientSet pq_vectors(const EdgeQuad& q) {
  const Vec3 w = q.y - q.x;
  const Vec3 wp = q.z_prime - q.x;
  const Vec3 wpp = q.z_double_prime - q.x;
  const double ell2 = norm2(w);
  const double ell = std::sqrt(ell2);

  CoefficientSet c;
  c.p.v = dot(w, wpp) * wp + dot(w, wp) * wpp;
  c.p.v_prime = dot(w, wpp) * w - ell2 * wpp;
  c.p.v_double_prime = dot(w, wp) * w - ell2 * wp;

  c.q.v = -ell * cross(wp, wpp);
  c.q.v_prime = ell * cross(w, wpp);
  c.q.v_double_prime = -ell * cross(w, wp);

  c.theta = ell2 * dot(wp, wpp) - dot(wp, w) * dot(wpp, w);
  c.triple_product = dot(w, cross(wp, wpp));
  return c;
}

CoefficientSet rs_vectors(const EdgeQuad& q, double trig_tol) {
  CoefficientSet c = pq_vectors(q);
  const DihedralData d = dihedral_data(q);

  const bool r_defined = std::abs(d.sin_phi) > trig_tol;
  const bool s_defined = std::abs(d.cos_phi) > trig_tol;
  if (!r_defined && !s_defined)
    throw BothBranchesUndefined("sin and cos both below trig tolerance " +
                                std::to_string(trig_tol));

  if (r_defined) {
    const double denom = d.ell * c.triple_product;
    c.r = VecTriple{-1.0 / denom * c.p.v, -1.0 / denom * c.p.v_prime,
                    -1.0 / denom * c.p.v_double_prime};
  }
  if (s_defined) {
    c.s = VecTriple{1.0 / c.theta * c.q.v, 1.0 / c.theta * c.q.v_prime,
                    1.0 / c.theta * c.q.v_double_prime};
  }
  return c;
}

GSelection g_vectors(const EdgeQuad& q, BranchPolicy policy, double trig_tol) {
  const CoefficientSet c = rs_vectors(q, trig_tol);
  const DihedralData d = dihedral_data(q);

  GSelection sel;
  switch (policy) {
    case BranchPolicy::ForceR:
      if (!c.r) throw BranchUndefined("r-triple undefined: |sin phi| <= trig tolerance");
      sel.g = *c.r;
      sel.variant = GVariant::RTriple;
      break;
    case BranchPolicy::ForceS:
      if (!c.s) throw BranchUndefined("s-triple undefined: |cos phi| <= trig tolerance");
      sel.g = *c.s;
      sel.variant = GVariant::STriple;
      break;
    case BranchPolicy::PreferStable:
    case BranchPolicy::MixedSlots:
      if (std::abs(d.cos_phi) >= std::abs(d.sin_phi)) {
        sel.g = *c.s;
        sel.variant = GVariant::STriple;
      } else {
        sel.g = *c.r;
        sel.variant = GVariant::RTriple;
      }
      break;
  }
  return sel;
}

DihedralData dihedral_data(const Polyhedron& p, const EdgeFrame& frame) {
  return dihedral_data(edge_quad(p, frame));
}

CoefficientSet pq_vectors(const Polyhedron& p, const EdgeFrame& frame) {
  return pq_vectors(edge_quad(p, frame));
}

CoefficientSet rs_vectors(const Polyhedron& p, const EdgeFrame& frame, double trig_tol) {
  return rs_vectors(edge_quad(p, frame), trig_tol);
}

GSelection g_vectors(const Polyhedron& p, const EdgeFrame& frame, BranchPolicy policy,
                     double trig_tol) {
  return g_vectors(edge_quad(p, frame), policy, trig_tol);
}

double angle_derivative(const Polyhedron& p, const EdgeFrame& frame, const FirstOrderFlex& flex,
                        double flex_tol, double trig_tol) {
  require_first_order_flex(p, flex, flex_tol);
  const GSelection sel = g_vectors(p, frame, BranchPolicy::PreferStable, trig_tol);
  return contract(sel.g, flex.velocities[frame.x], flex.velocities[frame.y],
                  flex.velocities[frame.z_prime], flex.velocities[frame.z_double_prime]);
}

}  // namespace flexgate
