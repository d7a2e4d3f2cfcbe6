#include "flexgate/oracle.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <string>

namespace flexgate {

namespace {

std::vector<Vec3> displaced(const std::vector<Vec3>& base, const FirstOrderFlex& flex, double t) {
  std::vector<Vec3> out(base.size());
  for (size_t i = 0; i < base.size(); ++i) out[i] = base[i] + t * flex.velocities[i];
  return out;
}

double wrap_to(double angle, double center) {
  while (angle - center > std::numbers::pi) angle -= 2.0 * std::numbers::pi;
  while (angle - center < -std::numbers::pi) angle += 2.0 * std::numbers::pi;
  return angle;
}

}  // namespace

double fd_angle_derivative(const Polyhedron& p, const EdgeFrame& frame, const FirstOrderFlex& flex,
                           double h, double flex_tol) {
  if (!(h > 0.0)) throw InvalidParams("finite-difference step must be positive");
  require_first_order_flex(p, flex, flex_tol);

  const double phi0 = dihedral_data(p, frame).phi;
  auto phi_at = [&](double t) {
    const Polyhedron q = with_positions(p, displaced(p.vertices, flex, t));
    return wrap_to(dihedral_data(q, frame).phi, phi0);
  };
  const double phi_plus = phi_at(h);
  const double phi_minus = phi_at(-h);
  if (std::abs(phi_plus - phi0) > std::numbers::pi / 2 ||
      std::abs(phi_minus - phi0) > std::numbers::pi / 2)
    throw AngleUnwrapFailure("dihedral angle jumped by more than pi/2 across one sample; "
                             "reduce h");
  return (phi_plus - phi_minus) / (2.0 * h);
}

double fd_minor_derivative(const Polyhedron& p, const FirstOrderFlex& flex, const MinorIndex& idx,
                           double h) {
  if (!(h > 0.0)) throw InvalidParams("finite-difference step must be positive");
  const Polyhedron plus = with_positions(p, displaced(p.vertices, flex, h));
  const Polyhedron minus = with_positions(p, displaced(p.vertices, flex, -h));
  return (minor_value(rigidity_matrix(plus), idx) - minor_value(rigidity_matrix(minus), idx)) /
         (2.0 * h);
}

ContinuationResult continue_flex(const Polyhedron& p, const FirstOrderFlex& direction,
                                 double step_size, int n_steps, double newton_tol,
                                 double rank_tol) {
  if (static_cast<int>(direction.velocities.size()) != p.vertex_count())
    throw SizeMismatch("direction size does not match vertex count");

  const int n3 = 3 * p.vertex_count();
  const int n_edges = p.edge_count();
  std::vector<double> target_len(n_edges);
  for (int e = 0; e < n_edges; ++e) {
    auto [i, j] = p.edges[e];
    target_len[e] = norm(p.vertices[j] - p.vertices[i]);
  }

  auto kernel_of = [&](const Polyhedron& mesh) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rigidity_matrix(mesh).entries, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > rank_tol * smax) ++rank;
    return std::make_pair(svd.matrixV().rightCols(n3 - rank).eval(), n3 - rank);
  };

  auto [kernel0, kdim0] = kernel_of(p);
  if (kdim0 < 7)
    throw KernelCollapse("kernel dimension " + std::to_string(kdim0) +
                         ": no nontrivial first-order flex to follow");

  Eigen::VectorXd tangent = direction.to_vector();
  const double tnorm = tangent.norm();
  if (tnorm == 0.0) throw InvalidParams("zero continuation direction");
  tangent /= tnorm;

  ContinuationResult result;
  result.steps.push_back(
      {0.0, p.vertices, FirstOrderFlex::from_vector(tangent), 0, kdim0});

  Polyhedron current = p;
  for (int step = 1; step <= n_steps; ++step) {
    const Eigen::VectorXd x_prev = [&] {
      Eigen::VectorXd v(n3);
      for (int i = 0; i < p.vertex_count(); ++i) {
        v[3 * i] = current.vertices[i].x;
        v[3 * i + 1] = current.vertices[i].y;
        v[3 * i + 2] = current.vertices[i].z;
      }
      return v;
    }();

    Eigen::VectorXd x = x_prev + step_size * tangent;
    int iters = 0;
    bool converged = false;
    while (iters < kNewtonIterationCap) {
      Polyhedron probe = with_positions(current, FirstOrderFlex::from_vector(x).velocities);
      Eigen::VectorXd constraint(n_edges);
      double worst = 0.0;
      for (int e = 0; e < n_edges; ++e) {
        auto [i, j] = probe.edges[e];
        const double l2 = norm2(probe.vertices[j] - probe.vertices[i]);
        constraint[e] = l2 - target_len[e] * target_len[e];
        worst = std::max(worst, std::abs(constraint[e]) / (target_len[e] * target_len[e]));
      }
      if (worst <= 2.0 * newton_tol) {
        converged = true;
        break;
      }
      const Eigen::MatrixXd jac = 2.0 * rigidity_matrix(probe).entries;
      // Least-norm Newton update keeps the corrector from wandering along the
      // rigid-motion directions.
      const Eigen::VectorXd dx =
          jac.completeOrthogonalDecomposition().solve((-constraint).eval());
      x += dx;
      ++iters;
    }
    if (!converged)
      throw ContinuationStalled("Newton corrector did not converge within " +
                                std::to_string(kNewtonIterationCap) + " iterations at step " +
                                std::to_string(step));
    const double progress = (x - x_prev).norm();
    if (progress < 0.25 * step_size)
      throw ContinuationStalled("corrector cancelled the predictor at step " +
                                std::to_string(step) + " (progress " + std::to_string(progress) +
                                " vs step " + std::to_string(step_size) + ")");

    current = with_positions(current, FirstOrderFlex::from_vector(x).velocities);
    double drift = 0.0;
    for (int e = 0; e < n_edges; ++e) {
      auto [i, j] = current.edges[e];
      drift = std::max(drift,
                       std::abs(norm(current.vertices[j] - current.vertices[i]) - target_len[e]));
    }
    result.max_edge_drift = std::max(result.max_edge_drift, drift);

    auto [kernel, kdim] = kernel_of(current);
    if (kdim < 7)
      throw KernelCollapse("kernel dimension dropped to " + std::to_string(kdim) + " at step " +
                           std::to_string(step));
    Eigen::VectorXd next_tangent = kernel * (kernel.transpose() * tangent);
    const double nt = next_tangent.norm();
    if (nt < 1e-8)
      throw ContinuationStalled("tangent lost in kernel projection at step " +
                                std::to_string(step));
    tangent = next_tangent / nt;

    result.steps.push_back({step * step_size, current.vertices,
                            FirstOrderFlex::from_vector(tangent), iters, kdim});
  }
  return result;
}

namespace {

Polyhedron gen_tetra(double edge) {
  if (!(edge > 0.0)) throw InvalidParams("tetrahedron edge must be positive");
  const double s = edge / (2.0 * std::sqrt(2.0));
  std::vector<Vec3> v = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<std::array<int, 3>> f = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
  return build_polyhedron(std::move(v), std::move(f));
}

Polyhedron gen_octa(double edge) {
  if (!(edge > 0.0)) throw InvalidParams("octahedron edge must be positive");
  const double s = edge / std::sqrt(2.0);
  std::vector<Vec3> v = {{s, 0, 0}, {-s, 0, 0}, {0, s, 0}, {0, -s, 0}, {0, 0, s}, {0, 0, -s}};
  std::vector<std::array<int, 3>> f = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                                       {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  return build_polyhedron(std::move(v), std::move(f));
}

Polyhedron gen_bipyramid_q() {
  const double s3 = std::sqrt(3.0);
  const double s6 = std::sqrt(6.0);
  std::vector<Vec3> v = {{4.0 * s3 / 3.0 - 3.0, 0.0, -8.0 * s6 / 3.0},
                         {4.0 * s3 - 3.0, 0.0, 0.0},
                         {-3.0, 4.0, 0.0},
                         {-3.0, -4.0, 0.0},
                         {0.0, 0.0, 0.0}};
  // Consistent outward windings; the apex v4 lies in the plane of v1,v2,v3.
  std::vector<std::array<int, 3>> f = {{1, 2, 4}, {2, 3, 4}, {3, 1, 4},
                                       {0, 2, 1}, {0, 3, 2}, {0, 1, 3}};
  return build_polyhedron(std::move(v), std::move(f));
}

Polyhedron gen_bricard1(const std::vector<double>& params) {
  std::vector<double> q = params;
  if (q.empty()) q = {2.0, 0.0, 1.0, 0.0, 1.5, 2.0, 1.0, -1.0, 3.0};
  if (q.size() != 9) throw InvalidParams("bricard1 takes 9 parameters (three base points)");
  const Vec3 a{q[0], q[1], q[2]}, b{q[3], q[4], q[5]}, c{q[6], q[7], q[8]};
  auto rot = [](const Vec3& v) { return Vec3{-v.x, -v.y, v.z}; };  // 180 deg about z-axis
  std::vector<Vec3> v = {a, b, c, rot(a), rot(b), rot(c)};
  std::vector<std::array<int, 3>> f = {{0, 1, 2}, {0, 2, 4}, {0, 4, 5}, {0, 5, 1},
                                       {3, 2, 1}, {3, 4, 2}, {3, 5, 4}, {3, 1, 5}};
  Polyhedron p = build_polyhedron(std::move(v), std::move(f));
  for (int face = 0; face < p.face_count(); ++face)
    if (is_face_degenerate(p, face))
      throw InvalidParams("bricard1 parameters produce a degenerate face");
  if (flex_space(p).kernel_dim < 7)
    throw InvalidParams("bricard1 parameters do not give an infinitesimally flexible octahedron");
  return p;
}

}  // namespace

Polyhedron gen_example(const ExampleSpec& spec) {
  switch (spec.name) {
    case ExampleSpec::Name::TetraRegular:
      return gen_tetra(spec.params.empty() ? 1.0 : spec.params[0]);
    case ExampleSpec::Name::OctaRegular:
      return gen_octa(spec.params.empty() ? 1.0 : spec.params[0]);
    case ExampleSpec::Name::BipyramidQ:
      if (!spec.params.empty()) throw InvalidParams("bipyramid-q takes no parameters");
      return gen_bipyramid_q();
    case ExampleSpec::Name::Bricard1:
      return gen_bricard1(spec.params);
  }
  throw UnknownExample("unknown example");
}

}  // namespace flexgate
