#pragma once

#include <vector>

#include "flexgate/edge_geometry.hpp"
#include "flexgate/flex_space.hpp"
#include "flexgate/mesh.hpp"
#include "flexgate/minor_scan.hpp"

namespace flexgate {

inline constexpr double kDefaultFdStep = 1e-6;
inline constexpr double kDefaultNewtonTol = 1e-12;  // relative per edge
inline constexpr int kNewtonIterationCap = 50;

struct ContinuationStep {
  double t = 0.0;
  std::vector<Vec3> positions;
  FirstOrderFlex tangent;
  int newton_iterations = 0;
  int kernel_dim = 0;
};

struct ContinuationResult {
  std::vector<ContinuationStep> steps;  // includes the t=0 state
  double max_edge_drift = 0.0;          // max |length(t) - length(0)| over path
};

struct ExampleSpec {
  enum class Name { TetraRegular, BipyramidQ, Bricard1, OctaRegular };
  Name name = Name::TetraRegular;
  std::vector<double> params;  // TetraRegular/OctaRegular: {edge}; Bricard1: {ax,ay,az,bx,...,cz}
};

// Central difference of the dihedral angle at the frame's edge along
// p + t*flex, unwrapped continuously around the t=0 angle.
double fd_angle_derivative(const Polyhedron& p, const EdgeFrame& frame, const FirstOrderFlex& flex,
                           double h = kDefaultFdStep, double flex_tol = kDefaultFlexTol);

// Central difference of a rigidity-matrix minor along p + t*flex.
double fd_minor_derivative(const Polyhedron& p, const FirstOrderFlex& flex, const MinorIndex& idx,
                           double h = kDefaultFdStep);

// Predictor-corrector path following on the edge-length constraint manifold.
ContinuationResult continue_flex(const Polyhedron& p, const FirstOrderFlex& direction,
                                 double step_size, int n_steps,
                                 double newton_tol = kDefaultNewtonTol,
                                 double rank_tol = kDefaultRankTol);

Polyhedron gen_example(const ExampleSpec& spec);

}  // namespace flexgate
