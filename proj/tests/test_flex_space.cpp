#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "flexgate/flex_space.hpp"
#include "flexgate/oracle.hpp"

using namespace flexgate;

namespace {

Polyhedron make_q() { return gen_example({ExampleSpec::Name::BipyramidQ, {}}); }
Polyhedron make_tetra() { return gen_example({ExampleSpec::Name::TetraRegular, {1.0}}); }

// Independent rank oracle: Gaussian elimination with full pivoting.
int row_reduction_rank(Eigen::MatrixXd m, double tol) {
  const double scale = m.cwiseAbs().maxCoeff();
  int rank = 0;
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  std::vector<char> used(rows, 0);
  for (int c = 0; c < cols && rank < rows; ++c) {
    int best = -1;
    double best_abs = tol * scale;
    for (int r = 0; r < rows; ++r) {
      if (!used[r] && std::abs(m(r, c)) > best_abs) {
        best_abs = std::abs(m(r, c));
        best = r;
      }
    }
    if (best < 0) continue;
    used[best] = 1;
    ++rank;
    for (int r = 0; r < rows; ++r) {
      if (r == best || std::abs(m(r, c)) == 0.0) continue;
      m.row(r) -= (m(r, c) / m(best, c)) * m.row(best);
    }
  }
  return rank;
}

FirstOrderFlex v5_flex(const Polyhedron& p) {
  FirstOrderFlex f = FirstOrderFlex::zero(p.vertex_count());
  f.velocities[4] = {0, 0, 1};
  return f;
}

Polyhedron rotated_translated(const Polyhedron& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // Random rotation from a normalized quaternion.
  double qw = u(rng), qx = u(rng), qy = u(rng), qz = u(rng);
  const double n = std::sqrt(qw * qw + qx * qx + qy * qy + qz * qz);
  qw /= n; qx /= n; qy /= n; qz /= n;
  const double r[3][3] = {
      {1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qz * qw), 2 * (qx * qz + qy * qw)},
      {2 * (qx * qy + qz * qw), 1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qx * qw)},
      {2 * (qx * qz - qy * qw), 2 * (qy * qz + qx * qw), 1 - 2 * (qx * qx + qy * qy)}};
  const Vec3 shift{u(rng) * 5, u(rng) * 5, u(rng) * 5};
  std::vector<Vec3> moved;
  for (const auto& v : p.vertices) {
    moved.push_back({r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z + shift.x,
                     r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z + shift.y,
                     r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z + shift.z});
  }
  return with_positions(p, moved);
}

}  // namespace

TEST_CASE("rigidity matrix shape and row sparsity") {
  const Polyhedron tetra = make_tetra();
  const RigidityMatrix rm = rigidity_matrix(tetra);
  CHECK(rm.rows() == 6);
  CHECK(rm.cols() == 12);

  const RigidityMatrix q = rigidity_matrix(make_q());
  CHECK(q.rows() == 9);
  CHECK(q.cols() == 15);

  const RigidityMatrix octa = rigidity_matrix(gen_example({ExampleSpec::Name::OctaRegular, {}}));
  CHECK(octa.rows() == 12);
  CHECK(octa.cols() == 18);

  // Each row has support only in its two vertex blocks, which carry +/-(p_i-p_j).
  for (const auto* m : {&rm, &q, &octa}) {
    for (int r = 0; r < m->rows(); ++r) {
      auto [i, j] = m->row_edge[r];
      for (int c = 0; c < m->cols(); ++c)
        if (c / 3 != i && c / 3 != j) CHECK(m->entries(r, c) == 0.0);
      for (int k = 0; k < 3; ++k)
        CHECK(m->entries(r, 3 * i + k) == -m->entries(r, 3 * j + k));
    }
  }

  // Exactly 6 nonzeros per row once the mesh is in generic position.
  std::mt19937_64 rng(8080);
  const Polyhedron generic = rotated_translated(make_tetra(), rng);
  const RigidityMatrix gm = rigidity_matrix(generic);
  for (int r = 0; r < gm.rows(); ++r) {
    int nonzeros = 0;
    for (int c = 0; c < gm.cols(); ++c)
      if (gm.entries(r, c) != 0.0) ++nonzeros;
    CHECK(nonzeros == 6);
  }
}

TEST_CASE("edge length residuals") {
  const Polyhedron q = make_q();

  SUBCASE("the apex flex is an exact first-order flex") {
    const auto res = edge_length_residuals(q, v5_flex(q));
    for (double r : res) CHECK(r == 0.0);
  }

  SUBCASE("uniform translation gives exact zeros") {
    FirstOrderFlex t;
    t.velocities.assign(q.vertex_count(), Vec3{0.3, -0.7, 1.1});
    for (double r : edge_length_residuals(q, t)) CHECK(r == 0.0);
  }

  SUBCASE("radial expansion residual is the squared edge length") {
    const Polyhedron tetra = make_tetra();
    FirstOrderFlex radial;
    for (const auto& v : tetra.vertices) radial.velocities.push_back(v);
    const auto res = edge_length_residuals(tetra, radial);
    for (int e = 0; e < tetra.edge_count(); ++e) {
      auto [i, j] = tetra.edges[e];
      const double expected = norm2(tetra.vertices[i] - tetra.vertices[j]);
      CHECK(res[e] == doctest::Approx(expected).epsilon(1e-14));
    }
  }

  SUBCASE("size mismatch is reported") {
    FirstOrderFlex bad;
    bad.velocities.assign(3, Vec3{});
    CHECK_THROWS_AS(edge_length_residuals(q, bad), SizeMismatch);
  }
}

TEST_CASE("trivial motions are rigid, independent, and in the kernel") {
  for (const Polyhedron& p : {make_tetra(), make_q()}) {
    const auto motions = trivial_motions(p);
    REQUIRE(motions.size() == 6);

    Eigen::MatrixXd t(3 * p.vertex_count(), 6);
    for (int k = 0; k < 6; ++k) t.col(k) = motions[k].to_vector();
    // Orthonormal, hence Gram determinant 1.
    const Eigen::MatrixXd gram = t.transpose() * t;
    CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);

    const RigidityMatrix rm = rigidity_matrix(p);
    for (const auto& m : motions) {
      for (double r : edge_length_residuals(p, m)) CHECK(std::abs(r) < 1e-12);
      CHECK((rm.entries * m.to_vector()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("trivial motions demand a non-collinear vertex set") {
  Polyhedron p = make_tetra();
  std::vector<Vec3> line;
  for (int i = 0; i < 4; ++i) line.push_back({static_cast<double>(i), 0, 0});
  CHECK_THROWS_AS(trivial_motions(with_positions(p, line)), DegenerateVertexSet);
}

TEST_CASE("flex space dimensions of the fixtures") {
  const FlexSpaceReport tetra = flex_space(make_tetra());
  CHECK(tetra.kernel_dim == 6);
  CHECK(!tetra.infinitesimally_flexible);
  CHECK(tetra.nontrivial_basis.empty());

  const FlexSpaceReport q = flex_space(make_q());
  CHECK(q.kernel_dim == 7);
  CHECK(q.infinitesimally_flexible);
  REQUIRE(q.nontrivial_basis.size() == 1);
  // Modulo trivial motions the nontrivial direction is the apex-normal flex:
  // its trivial-free component must be parallel to the basis vector.
  const Polyhedron qp = make_q();
  FirstOrderFlex apex = FirstOrderFlex::zero(5);
  apex.velocities[4] = {0, 0, 1};
  const Eigen::VectorXd cleaned = project_out_trivial(qp, apex).to_vector().normalized();
  const Eigen::VectorXd basis = q.nontrivial_basis[0].to_vector();
  CHECK(std::abs(std::abs(cleaned.dot(basis)) - 1.0) < 1e-10);

  const FlexSpaceReport bricard = flex_space(gen_example({ExampleSpec::Name::Bricard1, {}}));
  CHECK(bricard.kernel_dim >= 7);
}

TEST_CASE("numerical rank agrees with the row-reduction oracle") {
  for (const Polyhedron& p :
       {make_tetra(), make_q(), gen_example({ExampleSpec::Name::Bricard1, {}}),
        gen_example({ExampleSpec::Name::OctaRegular, {}})}) {
    const RigidityMatrix rm = rigidity_matrix(p);
    const FlexSpaceReport rep = flex_space(p);
    const int oracle_rank = row_reduction_rank(rm.entries, 1e-9);
    CHECK(3 * p.vertex_count() - rep.kernel_dim == oracle_rank);
  }
}

TEST_CASE("kernel dimension is invariant under rigid motions") {
  std::mt19937_64 rng(4242);
  for (const Polyhedron& p :
       {make_tetra(), make_q(), gen_example({ExampleSpec::Name::Bricard1, {}})}) {
    const int base = flex_space(p).kernel_dim;
    for (int trial = 0; trial < 10; ++trial) {
      CHECK(flex_space(rotated_translated(p, rng)).kernel_dim == base);
    }
  }
}

TEST_CASE("nontrivial basis members are nontrivial flexes") {
  for (const Polyhedron& p : {make_q(), gen_example({ExampleSpec::Name::Bricard1, {}})}) {
    const FlexSpaceReport rep = flex_space(p);
    for (const auto& flex : rep.nontrivial_basis) {
      CHECK(is_first_order_flex(p, flex));
      CHECK(is_nontrivial(p, flex, 1e-8));
    }
  }
}

TEST_CASE("is_nontrivial on the apex flex and on trivial motions") {
  const Polyhedron q = make_q();

  // Non-edge pair (p1,p5): the pair distance is non-stationary under the apex flex.
  CHECK(q.edge_index(0, 4) < 0);
  const FirstOrderFlex flex = v5_flex(q);
  const Vec3 d = q.vertices[0] - q.vertices[4];
  CHECK(std::abs(dot(d, Vec3{0, 0, -1})) > 1.0);  // direct-oracle magnitude
  CHECK(is_nontrivial(q, flex, 1e-8));

  for (const auto& motion : trivial_motions(q)) CHECK(!is_nontrivial(q, motion, 1e-8));
  CHECK(!is_nontrivial(q, FirstOrderFlex::zero(q.vertex_count()), 1e-8));
}

TEST_CASE("project_out_trivial removes rigid components") {
  const Polyhedron q = make_q();
  const FlexSpaceReport rep = flex_space(q);
  Eigen::VectorXd mixed = rep.nontrivial_basis[0].to_vector();
  mixed += 0.7 * rep.trivial_basis[2].to_vector();
  mixed -= 1.3 * rep.trivial_basis[5].to_vector();
  const FirstOrderFlex cleaned = project_out_trivial(q, FirstOrderFlex::from_vector(mixed));
  const Eigen::VectorXd diff = cleaned.to_vector() - rep.nontrivial_basis[0].to_vector();
  CHECK(diff.cwiseAbs().maxCoeff() < 1e-12);
}
