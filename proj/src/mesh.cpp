#include "flexgate/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <string>

namespace flexgate {

namespace {

std::string edge_name(int a, int b) {
  return std::to_string(a) + "-" + std::to_string(b);
}

}  // namespace

int Polyhedron::edge_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(a, b));
  if (it == edges.end() || *it != std::make_pair(a, b)) return -1;
  return static_cast<int>(it - edges.begin());
}

double signed_volume(const std::vector<Vec3>& vertices,
                     const std::vector<std::array<int, 3>>& faces) {
  double six_vol = 0.0;
  for (const auto& f : faces) {
    const Vec3& a = vertices[f[0]];
    const Vec3& b = vertices[f[1]];
    const Vec3& c = vertices[f[2]];
    six_vol += dot(cross(a, b), c);
  }
  return six_vol / 6.0;
}

Polyhedron build_polyhedron(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces,
                            OutwardPolicy policy) {
  const int v_count = static_cast<int>(vertices.size());
  const int f_count = static_cast<int>(faces.size());
  if (v_count < 4) throw ValidationError("need at least 4 vertices, got " + std::to_string(v_count));
  if (f_count < 4) throw ValidationError("need at least 4 faces, got " + std::to_string(f_count));

  for (const auto& v : vertices) {
    if (!all_finite(v)) throw ValidationError("non-finite vertex coordinate");
  }
  std::vector<char> used(vertices.size(), 0);
  for (int fi = 0; fi < f_count; ++fi) {
    const auto& f = faces[fi];
    for (int k = 0; k < 3; ++k) {
      if (f[k] < 0 || f[k] >= v_count)
        throw ValidationError("face " + std::to_string(fi) + " has vertex index out of range");
      used[f[k]] = 1;
    }
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
      throw NonTriangleFace("face " + std::to_string(fi) + " has repeated vertices");
  }
  for (int vi = 0; vi < v_count; ++vi) {
    if (!used[vi]) throw DanglingVertex("vertex " + std::to_string(vi) + " belongs to no face");
  }

  // Derive edges; every edge must belong to exactly two faces.
  std::map<std::pair<int, int>, std::vector<int>> incident;
  for (int fi = 0; fi < f_count; ++fi) {
    const auto& f = faces[fi];
    for (int k = 0; k < 3; ++k) {
      int a = f[k], b = f[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      incident[{a, b}].push_back(fi);
    }
  }
  Polyhedron p;
  p.vertices = std::move(vertices);
  p.faces = std::move(faces);
  for (const auto& [e, fs] : incident) {
    if (fs.size() != 2)
      throw NonManifoldEdge("edge " + edge_name(e.first, e.second) + " belongs to " +
                            std::to_string(fs.size()) + " faces");
    p.edges.push_back(e);
    p.edge_faces.push_back({fs[0], fs[1]});
  }

  // Winding propagation over the face adjacency graph. flip[f] records whether
  // face f must be reversed to agree with the seed of its component.
  auto traverses = [&](int face, int a, int b) {
    const auto& f = p.faces[face];
    for (int k = 0; k < 3; ++k)
      if (f[k] == a && f[(k + 1) % 3] == b) return true;
    return false;
  };
  std::vector<int> flip(p.faces.size(), -1);
  bool orientable = true;
  bool any_flipped = false;
  for (int seed = 0; seed < f_count; ++seed) {
    if (flip[seed] != -1) continue;
    flip[seed] = 0;
    std::queue<int> bfs;
    bfs.push(seed);
    while (!bfs.empty()) {
      int fa = bfs.front();
      bfs.pop();
      const auto& f = p.faces[fa];
      for (int k = 0; k < 3; ++k) {
        int a = f[k], b = f[(k + 1) % 3];
        int ei = p.edge_index(a, b);
        int fb = p.edge_faces[ei][0] == fa ? p.edge_faces[ei][1] : p.edge_faces[ei][0];
        // Consistent orientation: the neighbour must traverse the shared edge
        // in the opposite direction once flips are applied.
        bool fa_ab = traverses(fa, a, b) != (flip[fa] == 1);
        bool fb_ab = traverses(fb, a, b);
        int need = fa_ab == fb_ab ? 1 : 0;
        if (flip[fb] == -1) {
          flip[fb] = need;
          if (need) any_flipped = true;
          bfs.push(fb);
        } else if (flip[fb] != need) {
          orientable = false;
        }
      }
    }
  }
  p.orientable = orientable;
  p.oriented = orientable && !any_flipped;

  if (p.oriented && policy != OutwardPolicy::Keep) {
    bool do_flip = false;
    if (policy == OutwardPolicy::Flip) {
      do_flip = true;
    } else {
      Vec3 lo = p.vertices[0], hi = p.vertices[0];
      for (const auto& v : p.vertices) {
        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
      }
      double diag = norm(hi - lo);
      double vol = signed_volume(p.vertices, p.faces);
      // Self-intersecting surfaces can have near-zero signed volume; keep the
      // input windings in that case.
      if (std::abs(vol) > 1e-9 * diag * diag * diag && vol < 0.0) do_flip = true;
    }
    if (do_flip) {
      for (auto& f : p.faces) std::swap(f[1], f[2]);
      p.flipped_for_outward = true;
    }
  }
  return p;
}

Polyhedron with_positions(const Polyhedron& p, std::vector<Vec3> positions) {
  if (positions.size() != p.vertices.size())
    throw SizeMismatch("position count " + std::to_string(positions.size()) + " != vertex count " +
                       std::to_string(p.vertices.size()));
  Polyhedron q = p;
  q.vertices = std::move(positions);
  return q;
}

TopologyStats topology_stats(const Polyhedron& p) {
  TopologyStats s;
  s.V = p.vertex_count();
  s.E = p.edge_count();
  s.F = p.face_count();
  s.euler_char = s.V - s.E + s.F;
  s.orientable = p.orientable;
  s.genus_or_crosscaps = p.orientable ? (2 - s.euler_char) / 2 : 2 - s.euler_char;
  if (3 * s.F != 2 * s.E || s.E != 3 * s.V - 3 * s.euler_char)
    throw ValidationError("triangulation counts violate 3F=2E / E=3V-3chi");
  return s;
}

std::vector<EdgeFrame> edge_frames(const Polyhedron& p) {
  if (!p.oriented) throw NotOrientable("edge frames require globally consistent face windings");
  auto third = [&](int face, int a, int b) {
    for (int v : p.faces[face])
      if (v != a && v != b) return v;
    return -1;
  };
  auto traverses = [&](int face, int a, int b) {
    const auto& f = p.faces[face];
    for (int k = 0; k < 3; ++k)
      if (f[k] == a && f[(k + 1) % 3] == b) return true;
    return false;
  };
  std::vector<EdgeFrame> frames;
  frames.reserve(p.edges.size());
  for (int ei = 0; ei < p.edge_count(); ++ei) {
    auto [a, b] = p.edges[ei];  // a < b
    EdgeFrame fr;
    fr.edge_id = ei;
    fr.x = a;
    fr.y = b;
    // Face whose winding runs x->y supplies z'; the other runs y->x and
    // supplies z''. With consistent outward windings this makes
    // (y-x)x(z'-x) and (z''-x)x(y-x) the outward normals.
    int f0 = p.edge_faces[ei][0], f1 = p.edge_faces[ei][1];
    int f_prime = traverses(f0, a, b) ? f0 : f1;
    int f_dprime = f_prime == f0 ? f1 : f0;
    fr.z_prime = third(f_prime, a, b);
    fr.z_double_prime = third(f_dprime, a, b);
    frames.push_back(fr);
  }
  return frames;
}

bool is_face_degenerate(const Polyhedron& p, int face) {
  if (face < 0 || face >= p.face_count()) throw IndexOutOfRange("face index out of range");
  const auto& f = p.faces[face];
  const Vec3& a = p.vertices[f[0]];
  const Vec3& b = p.vertices[f[1]];
  const Vec3& c = p.vertices[f[2]];
  double doubled_area = norm(cross(b - a, c - a));
  double longest = std::max({norm2(b - a), norm2(c - a), norm2(c - b)});
  return doubled_area < kFaceDegeneracyTol * longest;
}

}  // namespace flexgate
