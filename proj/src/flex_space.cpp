#include "flexgate/flex_space.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace flexgate {

FirstOrderFlex FirstOrderFlex::from_vector(const Eigen::VectorXd& v) {
  FirstOrderFlex f;
  const int n = static_cast<int>(v.size()) / 3;
  f.velocities.reserve(n);
  for (int i = 0; i < n; ++i) f.velocities.push_back({v[3 * i], v[3 * i + 1], v[3 * i + 2]});
  return f;
}

Eigen::VectorXd FirstOrderFlex::to_vector() const {
  Eigen::VectorXd v(3 * velocities.size());
  for (size_t i = 0; i < velocities.size(); ++i) {
    v[3 * i] = velocities[i].x;
    v[3 * i + 1] = velocities[i].y;
    v[3 * i + 2] = velocities[i].z;
  }
  return v;
}

namespace {

RigidityMatrix build_rows(const Polyhedron& p, const std::vector<Vec3>& field) {
  RigidityMatrix m;
  m.entries = Eigen::MatrixXd::Zero(p.edge_count(), 3 * p.vertex_count());
  m.row_edge = p.edges;
  for (int r = 0; r < p.edge_count(); ++r) {
    auto [i, j] = p.edges[r];
    const Vec3 d = field[i] - field[j];
    m.entries(r, 3 * i) = d.x;
    m.entries(r, 3 * i + 1) = d.y;
    m.entries(r, 3 * i + 2) = d.z;
    m.entries(r, 3 * j) = -d.x;
    m.entries(r, 3 * j + 1) = -d.y;
    m.entries(r, 3 * j + 2) = -d.z;
  }
  return m;
}

}  // namespace

RigidityMatrix rigidity_matrix(const Polyhedron& p) { return build_rows(p, p.vertices); }

RigidityMatrix rigidity_matrix_rate(const Polyhedron& p, const FirstOrderFlex& flex) {
  if (static_cast<int>(flex.velocities.size()) != p.vertex_count())
    throw SizeMismatch("flex has " + std::to_string(flex.velocities.size()) +
                       " velocities for " + std::to_string(p.vertex_count()) + " vertices");
  return build_rows(p, flex.velocities);
}

std::vector<double> edge_length_residuals(const Polyhedron& p, const FirstOrderFlex& flex) {
  if (static_cast<int>(flex.velocities.size()) != p.vertex_count())
    throw SizeMismatch("flex has " + std::to_string(flex.velocities.size()) +
                       " velocities for " + std::to_string(p.vertex_count()) + " vertices");
  std::vector<double> res;
  res.reserve(p.edges.size());
  for (auto [i, j] : p.edges)
    res.push_back(dot(p.vertices[j] - p.vertices[i], flex.velocities[j] - flex.velocities[i]));
  return res;
}

bool is_first_order_flex(const Polyhedron& p, const FirstOrderFlex& flex, double flex_tol) {
  const auto res = edge_length_residuals(p, flex);
  for (int e = 0; e < p.edge_count(); ++e) {
    auto [i, j] = p.edges[e];
    if (std::abs(res[e]) > flex_tol * norm(p.vertices[j] - p.vertices[i])) return false;
  }
  return true;
}

void require_first_order_flex(const Polyhedron& p, const FirstOrderFlex& flex, double flex_tol) {
  if (!is_first_order_flex(p, flex, flex_tol))
    throw NotAFirstOrderFlex("edge-length residual exceeds tolerance");
}

std::vector<FirstOrderFlex> trivial_motions(const Polyhedron& p) {
  const int n = p.vertex_count();
  Vec3 centroid{};
  for (const auto& v : p.vertices) centroid += v;
  centroid *= 1.0 / n;

  Eigen::MatrixXd t(3 * n, 6);
  const Vec3 axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < n; ++i) {
      t(3 * i, k) = axes[k].x;
      t(3 * i + 1, k) = axes[k].y;
      t(3 * i + 2, k) = axes[k].z;
      const Vec3 r = cross(axes[k], p.vertices[i] - centroid);
      t(3 * i, 3 + k) = r.x;
      t(3 * i + 1, 3 + k) = r.y;
      t(3 * i + 2, 3 + k) = r.z;
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(t);
  const Eigen::MatrixXd r_factor =
      qr.matrixQR().topLeftCorner(6, 6).triangularView<Eigen::Upper>();
  const double scale = std::abs(r_factor(0, 0));
  for (int k = 0; k < 6; ++k)
    if (std::abs(r_factor(k, k)) < 1e-12 * scale)
      throw DegenerateVertexSet("vertex set spans fewer than 6 rigid-motion dimensions");
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(3 * n, 6);

  std::vector<FirstOrderFlex> motions;
  motions.reserve(6);
  for (int k = 0; k < 6; ++k) motions.push_back(FirstOrderFlex::from_vector(q.col(k)));
  return motions;
}

FlexSpaceReport flex_space(const Polyhedron& p, double rank_tol) {
  const RigidityMatrix rm = rigidity_matrix(p);
  const int n3 = rm.cols();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rm.entries, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();

  FlexSpaceReport rep;
  rep.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rank_tol * smax) ++rank;
  rep.kernel_dim = n3 - rank;
  rep.infinitesimally_flexible = rep.kernel_dim >= 7;

  rep.trivial_basis = trivial_motions(p);
  Eigen::MatrixXd t(n3, 6);
  for (int k = 0; k < 6; ++k) t.col(k) = rep.trivial_basis[k].to_vector();

  // Kernel basis, then its component orthogonal to the trivial motions. The
  // trivial motions always lie in the kernel, so the projected columns span a
  // (kernel_dim - 6)-dimensional space; its top left singular vectors give an
  // orthonormal nontrivial basis.
  const Eigen::MatrixXd kernel = svd.matrixV().rightCols(rep.kernel_dim);
  const Eigen::MatrixXd projected = kernel - t * (t.transpose() * kernel);
  Eigen::JacobiSVD<Eigen::MatrixXd> psvd(projected, Eigen::ComputeThinU);
  for (int k = 0; k < rep.kernel_dim - 6; ++k)
    rep.nontrivial_basis.push_back(FirstOrderFlex::from_vector(psvd.matrixU().col(k)));
  return rep;
}

bool is_nontrivial(const Polyhedron& p, const FirstOrderFlex& flex, double tol) {
  const int n = p.vertex_count();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (p.edge_index(i, j) >= 0) continue;
      const Vec3 d = p.vertices[i] - p.vertices[j];
      if (std::abs(dot(d, flex.velocities[i] - flex.velocities[j])) > tol * norm(d)) return true;
    }
  }
  return false;
}

FirstOrderFlex project_out_trivial(const Polyhedron& p, const FirstOrderFlex& flex) {
  const auto trivial = trivial_motions(p);
  Eigen::VectorXd v = flex.to_vector();
  for (const auto& t : trivial) {
    const Eigen::VectorXd tv = t.to_vector();
    v -= tv.dot(v) * tv;
  }
  return FirstOrderFlex::from_vector(v);
}

}  // namespace flexgate
