#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "flexgate/mesh.hpp"

namespace flexgate {

inline constexpr double kDefaultFlexTol = 1e-9;  // relative to edge length
inline constexpr double kDefaultRankTol = 1e-9;  // relative to largest singular value

// One velocity vector per vertex.
struct FirstOrderFlex {
  std::vector<Vec3> velocities;

  static FirstOrderFlex zero(int vertex_count) {
    FirstOrderFlex f;
    f.velocities.assign(vertex_count, Vec3{});
    return f;
  }
  static FirstOrderFlex from_vector(const Eigen::VectorXd& v);
  Eigen::VectorXd to_vector() const;
};

// E x 3V matrix of the edge-length stationarity system. Column 3*i+k holds
// coordinate k of vertex i's velocity. The row of edge (i,j), i<j, carries
// +(p_i - p_j) in vertex-i columns and -(p_i - p_j) in vertex-j columns.
struct RigidityMatrix {
  Eigen::MatrixXd entries;
  std::vector<std::pair<int, int>> row_edge;

  int rows() const { return static_cast<int>(entries.rows()); }
  int cols() const { return static_cast<int>(entries.cols()); }
  static int column_of(int vertex, int axis) { return 3 * vertex + axis; }
};

struct FlexSpaceReport {
  int kernel_dim = 0;
  std::vector<FirstOrderFlex> trivial_basis;     // always 6, orthonormal in R^{3V}
  std::vector<FirstOrderFlex> nontrivial_basis;  // kernel_dim - 6 vectors
  bool infinitesimally_flexible = false;
  std::vector<double> singular_values;
};

RigidityMatrix rigidity_matrix(const Polyhedron& p);

// Rigidity-structure matrix built from a velocity field instead of positions;
// this is the t-derivative of the rigidity matrix along p + t*flex.
RigidityMatrix rigidity_matrix_rate(const Polyhedron& p, const FirstOrderFlex& flex);

// Per edge (i<j): (p_j - p_i) . (v_j - v_i).
std::vector<double> edge_length_residuals(const Polyhedron& p, const FirstOrderFlex& flex);

bool is_first_order_flex(const Polyhedron& p, const FirstOrderFlex& flex,
                         double flex_tol = kDefaultFlexTol);

// Throws NotAFirstOrderFlex when some residual exceeds flex_tol * edge length.
void require_first_order_flex(const Polyhedron& p, const FirstOrderFlex& flex,
                              double flex_tol = kDefaultFlexTol);

// 3 unit translations and 3 rotation fields about the centroid, orthonormalized
// in the 3V-dimensional inner product.
std::vector<FirstOrderFlex> trivial_motions(const Polyhedron& p);

FlexSpaceReport flex_space(const Polyhedron& p, double rank_tol = kDefaultRankTol);

// True iff some non-edge vertex pair has non-stationary distance:
// |(p_i-p_j).(v_i-v_j)| > tol * |p_i-p_j|.
bool is_nontrivial(const Polyhedron& p, const FirstOrderFlex& flex, double tol = 1e-8);

// Component of the flex orthogonal to the span of the trivial motions.
FirstOrderFlex project_out_trivial(const Polyhedron& p, const FirstOrderFlex& flex);

}  // namespace flexgate
