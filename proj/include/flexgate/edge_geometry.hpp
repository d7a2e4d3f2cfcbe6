#pragma once

#include <optional>

#include "flexgate/flex_space.hpp"
#include "flexgate/mesh.hpp"

namespace flexgate {

inline constexpr double kDefaultTrigTol = 1e-9;

// Positions of the four vertices around an edge, in frame order.
struct EdgeQuad {
  Vec3 x, y, z_prime, z_double_prime;
};

// Per-edge dihedral quantities. area_prime / area_double_prime are the
// doubled face areas A', A''.
struct DihedralData {
  double ell = 0.0;
  double ell_prime = 0.0;
  double ell_double_prime = 0.0;
  double area_prime = 0.0;
  double area_double_prime = 0.0;
  Vec3 n_prime, n_double_prime;
  double cos_phi = 0.0;
  double sin_phi = 0.0;
  double phi = 0.0;  // interior dihedral angle in [0, 2*pi)
};

struct VecTriple {
  Vec3 v, v_prime, v_double_prime;
};

// Contraction of a coefficient triple with the velocity differences of the
// frame slots: g.(eta-xi) + g'.(zeta'-xi) + g''.(zeta''-xi).
inline double contract(const VecTriple& g, const Vec3& xi, const Vec3& eta, const Vec3& zeta_p,
                       const Vec3& zeta_pp) {
  return dot(g.v, eta - xi) + dot(g.v_prime, zeta_p - xi) + dot(g.v_double_prime, zeta_pp - xi);
}

// Coefficient vectors of the dihedral-angle derivative identities. The p/q
// triples are always defined; r is defined when |sin phi| > trigTol and
// s when |cos phi| > trigTol.
struct CoefficientSet {
  VecTriple p;
  VecTriple q;
  std::optional<VecTriple> r;
  std::optional<VecTriple> s;
  double theta = 0.0;           // = A' A'' cos phi
  double triple_product = 0.0;  // (y-x) . [(z'-x) x (z''-x)] = -A' A'' sin phi / ell
};

enum class GVariant { RTriple, STriple };

enum class BranchPolicy {
  PreferStable,  // larger of |cos phi| (s) vs |sin phi| (r)
  ForceR,
  ForceS,
  MixedSlots,    // PreferStable coefficients plus per-slot difference diagnostics
};

struct GSelection {
  VecTriple g;
  GVariant variant = GVariant::STriple;
};

// Hinge-level core (positions only).
EdgeQuad edge_quad(const Polyhedron& p, const EdgeFrame& frame);
DihedralData dihedral_data(const EdgeQuad& q);
CoefficientSet pq_vectors(const EdgeQuad& q);
CoefficientSet rs_vectors(const EdgeQuad& q, double trig_tol = kDefaultTrigTol);
GSelection g_vectors(const EdgeQuad& q, BranchPolicy policy, double trig_tol = kDefaultTrigTol);

// Mesh-level wrappers.
DihedralData dihedral_data(const Polyhedron& p, const EdgeFrame& frame);
CoefficientSet pq_vectors(const Polyhedron& p, const EdgeFrame& frame);
CoefficientSet rs_vectors(const Polyhedron& p, const EdgeFrame& frame,
                          double trig_tol = kDefaultTrigTol);
GSelection g_vectors(const Polyhedron& p, const EdgeFrame& frame, BranchPolicy policy,
                     double trig_tol = kDefaultTrigTol);

// Derivative of the dihedral angle at the frame's edge along the flex
// (PreferStable branch).
double angle_derivative(const Polyhedron& p, const EdgeFrame& frame, const FirstOrderFlex& flex,
                        double flex_tol = kDefaultFlexTol, double trig_tol = kDefaultTrigTol);

}  // namespace flexgate
