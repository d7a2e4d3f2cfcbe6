#pragma once

#include <string>
#include <vector>

#include "flexgate/edge_geometry.hpp"
#include "flexgate/flex_space.hpp"
#include "flexgate/mesh.hpp"
#include "flexgate/rational.hpp"

namespace flexgate {

inline constexpr double kDefaultDecompTol = 1e-9;            // relative, final residual
inline constexpr double kDefaultReconEps = 1e-14;            // relative, per-coefficient gate
inline constexpr std::int64_t kDefaultMaxDenominator = 1000000;
inline constexpr double kDefaultDehnTol = 1e-6;

// User-asserted Q-linearly independent positive reals spanning the edge lengths.
struct LengthBasis {
  struct Element {
    std::string label;
    double value = 0.0;
  };
  std::vector<Element> elements;

  int size() const { return static_cast<int>(elements.size()); }
};

// Exact rational coordinates of every edge length over the basis.
struct LengthDecomposition {
  LengthBasis basis;
  std::vector<std::vector<Rational>> coeffs;  // [edge][basis index]
};

// One linear equation in the vertex velocities, for basis element j. Each
// participating edge contributes +g to the y slot, +g' to z', +g'' to z'' and
// -(g+g'+g'') to x, all scaled by alpha_{sigma j}.
struct DehnEquation {
  int basis_index = 0;
  struct Term {
    int edge = 0;
    Rational alpha;
    VecTriple g;
    GVariant variant = GVariant::STriple;
  };
  std::vector<Term> terms;
  std::vector<Vec3> assembled;  // per-vertex coefficient vectors (3V entries total)
};

struct MixedSlotResidual {
  int edge = 0;
  double residual[3] = {0, 0, 0};  // per slot: y, z', z''
  double scale = 0.0;
};

struct DehnReport {
  std::vector<double> residuals;       // per basis element
  std::vector<double> scales;
  std::vector<bool> pass;
  std::vector<GVariant> policy_used;   // per edge
  bool all_pass = true;
  std::vector<MixedSlotResidual> mixed_slots;  // only under BranchPolicy::MixedSlots
};

struct BranchDiscrepancy {
  int edge = 0;
  double discrepancy = 0.0;  // (r-triple - s-triple) contraction
  double scale = 0.0;        // (|r|+|r'|+|r''|+|s|+...) * max vertex speed
};

// Distinct edge lengths (grouped at rel_tol) as a basis with unit coordinates.
LengthBasis auto_length_basis(const Polyhedron& p, double rel_tol = kDefaultDecompTol);

LengthDecomposition decompose_lengths(const Polyhedron& p, const LengthBasis& basis,
                                      double decomp_tol = kDefaultDecompTol,
                                      std::int64_t max_denominator = kDefaultMaxDenominator,
                                      double recon_eps = kDefaultReconEps);

// Builds a decomposition from user-supplied exact rationals and verifies the
// residual bound |sum alpha_j lambda_j - ell| <= decomp_tol * ell per edge.
LengthDecomposition make_decomposition(const Polyhedron& p, const LengthBasis& basis,
                                       std::vector<std::vector<Rational>> coeffs,
                                       double decomp_tol = kDefaultDecompTol);

std::vector<DehnEquation> dehn_equations(const Polyhedron& p, const LengthDecomposition& decomp,
                                         BranchPolicy policy = BranchPolicy::PreferStable,
                                         double trig_tol = kDefaultTrigTol);

DehnReport evaluate_dehn(const Polyhedron& p, const LengthDecomposition& decomp,
                         const FirstOrderFlex& flex,
                         BranchPolicy policy = BranchPolicy::PreferStable,
                         double dehn_tol = kDefaultDehnTol, double trig_tol = kDefaultTrigTol,
                         double flex_tol = kDefaultFlexTol);

// Current values of the per-basis-element angle sums sum_sigma alpha_{sigma j} phi_sigma.
std::vector<double> dehn_expression_values(const Polyhedron& p,
                                           const LengthDecomposition& decomp);

// For every edge whose r and s triples are both defined, the difference of the
// two branch contractions against the flex.
std::vector<BranchDiscrepancy> per_edge_branch_consistency(const Polyhedron& p,
                                                           const FirstOrderFlex& flex,
                                                           double trig_tol = kDefaultTrigTol);

}  // namespace flexgate
