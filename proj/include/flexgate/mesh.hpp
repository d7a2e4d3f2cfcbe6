#pragma once

#include <array>
#include <utility>
#include <vector>

#include "flexgate/errors.hpp"
#include "flexgate/vec3.hpp"

namespace flexgate {

// Vertex quadruple around an edge: {x,y} are the edge end-points, z_prime and
// z_double_prime complete the two adjacent faces. The (x,y) order is
// canonicalized so that
//   n' = (y-x)x(z'-x)/A'   and   n'' = (z''-x)x(y-x)/A''
// are the outward face normals.
struct EdgeFrame {
  int edge_id = -1;
  int x = -1;
  int y = -1;
  int z_prime = -1;
  int z_double_prime = -1;
};

struct TopologyStats {
  int V = 0;
  int E = 0;
  int F = 0;
  int euler_char = 0;
  bool orientable = false;
  int genus_or_crosscaps = 0;  // genus g if orientable, crosscap count k otherwise
};

// Triangulated closed polyhedral surface. Immutable after build_polyhedron.
struct Polyhedron {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::pair<int, int>> edges;        // unordered pairs, stored (i<j), sorted
  std::vector<std::array<int, 2>> edge_faces;    // the two face ids adjacent to each edge
  bool oriented = false;                         // input windings globally consistent
  bool orientable = false;                       // consistent windings exist at all
  bool flipped_for_outward = false;              // all windings were reversed at build

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }

  // Index into edges for the unordered pair {a,b}; -1 if not an edge.
  int edge_index(int a, int b) const;
};

enum class OutwardPolicy {
  Auto,  // flip all windings when the signed volume is clearly negative
  Keep,  // trust input windings
  Flip,  // reverse all input windings
};

Polyhedron build_polyhedron(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces,
                            OutwardPolicy policy = OutwardPolicy::Auto);

// Same combinatorics, new vertex positions (no re-validation).
Polyhedron with_positions(const Polyhedron& p, std::vector<Vec3> positions);

TopologyStats topology_stats(const Polyhedron& p);

std::vector<EdgeFrame> edge_frames(const Polyhedron& p);

inline constexpr double kFaceDegeneracyTol = 1e-12;  // doubled area vs (longest edge)^2

bool is_face_degenerate(const Polyhedron& p, int face);

// Signed volume of the oriented surface (divergence theorem).
double signed_volume(const std::vector<Vec3>& vertices,
                     const std::vector<std::array<int, 3>>& faces);

}  // namespace flexgate
