#include "flexgate/dehn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace flexgate {

namespace {

double edge_length(const Polyhedron& p, int e) {
  auto [i, j] = p.edges[e];
  return norm(p.vertices[j] - p.vertices[i]);
}

void check_theorem_hypothesis(const Polyhedron& p) {
  if (!p.oriented)
    throw TheoremHypothesisViolated("mesh is not consistently oriented");
  for (int f = 0; f < p.face_count(); ++f)
    if (is_face_degenerate(p, f))
      throw TheoremHypothesisViolated("face " + std::to_string(f) + " is degenerate");
}

}  // namespace

LengthBasis auto_length_basis(const Polyhedron& p, double rel_tol) {
  std::vector<double> lengths;
  lengths.reserve(p.edges.size());
  for (int e = 0; e < p.edge_count(); ++e) lengths.push_back(edge_length(p, e));
  std::sort(lengths.begin(), lengths.end());

  LengthBasis basis;
  for (double l : lengths) {
    if (!basis.elements.empty() &&
        std::abs(l - basis.elements.back().value) <= rel_tol * basis.elements.back().value)
      continue;
    std::ostringstream label;
    label.precision(17);
    label << l;
    basis.elements.push_back({label.str(), l});
  }
  return basis;
}

LengthDecomposition decompose_lengths(const Polyhedron& p, const LengthBasis& basis,
                                      double decomp_tol, std::int64_t max_denominator,
                                      double recon_eps) {
  if (basis.elements.empty()) throw InvalidParams("empty length basis");
  for (const auto& el : basis.elements)
    if (!(el.value > 0.0)) throw InvalidParams("basis value must be positive: " + el.label);

  LengthDecomposition decomp;
  decomp.basis = basis;
  const int m = basis.size();
  decomp.coeffs.reserve(p.edges.size());

  for (int e = 0; e < p.edge_count(); ++e) {
    const double ell = edge_length(p, e);
    // Reconstruct the length as a rational multiple of a single basis element;
    // take the candidate with the smallest residual.
    int best_j = -1;
    Rational best;
    double best_err = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      const double ratio = ell / basis.elements[j].value;
      const auto cand = rational_reconstruct(ratio, max_denominator, recon_eps);
      if (!cand) continue;
      const double err = std::abs(cand->to_double() * basis.elements[j].value - ell);
      if (err < best_err) {
        best_err = err;
        best_j = j;
        best = *cand;
      }
    }
    if (best_j < 0 || best_err > decomp_tol * ell) {
      auto [i, j] = p.edges[e];
      throw DecompositionFailed("edge " + std::to_string(i) + "-" + std::to_string(j) +
                                " (length " + std::to_string(ell) +
                                ") is not a bounded-denominator rational multiple of any basis "
                                "element; supply explicit alpha coefficients or extend the basis");
    }
    std::vector<Rational> row(m);
    row[best_j] = best;
    decomp.coeffs.push_back(std::move(row));
  }
  return decomp;
}

LengthDecomposition make_decomposition(const Polyhedron& p, const LengthBasis& basis,
                                       std::vector<std::vector<Rational>> coeffs,
                                       double decomp_tol) {
  if (static_cast<int>(coeffs.size()) != p.edge_count())
    throw SizeMismatch("alpha rows " + std::to_string(coeffs.size()) + " != edge count " +
                       std::to_string(p.edge_count()));
  for (int e = 0; e < p.edge_count(); ++e) {
    if (static_cast<int>(coeffs[e].size()) != basis.size())
      throw SizeMismatch("alpha row " + std::to_string(e) + " has wrong arity");
    double sum = 0.0;
    for (int j = 0; j < basis.size(); ++j)
      sum += coeffs[e][j].to_double() * basis.elements[j].value;
    const double ell = edge_length(p, e);
    if (std::abs(sum - ell) > decomp_tol * ell) {
      auto [i, j] = p.edges[e];
      throw DecompositionFailed("alpha coefficients for edge " + std::to_string(i) + "-" +
                                std::to_string(j) + " miss the length by " +
                                std::to_string(std::abs(sum - ell)));
    }
  }
  return LengthDecomposition{basis, std::move(coeffs)};
}

std::vector<DehnEquation> dehn_equations(const Polyhedron& p, const LengthDecomposition& decomp,
                                         BranchPolicy policy, double trig_tol) {
  check_theorem_hypothesis(p);
  const auto frames = edge_frames(p);
  std::vector<GSelection> selections(frames.size());
  for (size_t e = 0; e < frames.size(); ++e)
    selections[e] = g_vectors(p, frames[e], policy, trig_tol);

  const int m = decomp.basis.size();
  std::vector<DehnEquation> eqs(m);
  for (int j = 0; j < m; ++j) {
    DehnEquation& eq = eqs[j];
    eq.basis_index = j;
    eq.assembled.assign(p.vertex_count(), Vec3{});
    for (int e = 0; e < p.edge_count(); ++e) {
      const Rational& alpha = decomp.coeffs[e][j];
      if (alpha.is_zero()) continue;
      const auto& fr = frames[e];
      const VecTriple& g = selections[e].g;
      eq.terms.push_back({e, alpha, g, selections[e].variant});
      const double a = alpha.to_double();
      eq.assembled[fr.y] += a * g.v;
      eq.assembled[fr.z_prime] += a * g.v_prime;
      eq.assembled[fr.z_double_prime] += a * g.v_double_prime;
      eq.assembled[fr.x] -= a * (g.v + g.v_prime + g.v_double_prime);
    }
  }
  return eqs;
}

DehnReport evaluate_dehn(const Polyhedron& p, const LengthDecomposition& decomp,
                         const FirstOrderFlex& flex, BranchPolicy policy, double dehn_tol,
                         double trig_tol, double flex_tol) {
  check_theorem_hypothesis(p);
  require_first_order_flex(p, flex, flex_tol);
  const auto frames = edge_frames(p);

  double max_speed = 0.0;
  for (const auto& v : flex.velocities) max_speed = std::max(max_speed, norm(v));

  std::vector<GSelection> selections(frames.size());
  for (size_t e = 0; e < frames.size(); ++e)
    selections[e] = g_vectors(p, frames[e], policy, trig_tol);

  DehnReport rep;
  rep.policy_used.reserve(frames.size());
  for (const auto& sel : selections) rep.policy_used.push_back(sel.variant);

  const int m = decomp.basis.size();
  for (int j = 0; j < m; ++j) {
    double residual = 0.0;
    double scale = 0.0;
    for (int e = 0; e < p.edge_count(); ++e) {
      const Rational& alpha = decomp.coeffs[e][j];
      if (alpha.is_zero()) continue;
      const auto& fr = frames[e];
      const VecTriple& g = selections[e].g;
      const double a = alpha.to_double();
      residual += a * contract(g, flex.velocities[fr.x], flex.velocities[fr.y],
                               flex.velocities[fr.z_prime], flex.velocities[fr.z_double_prime]);
      scale += std::abs(a) * (norm(g.v) + norm(g.v_prime) + norm(g.v_double_prime)) * max_speed;
    }
    rep.residuals.push_back(residual);
    rep.scales.push_back(scale);
    const bool ok = std::abs(residual) <= dehn_tol * scale;
    rep.pass.push_back(ok);
    rep.all_pass = rep.all_pass && ok;
  }

  if (policy == BranchPolicy::MixedSlots) {
    for (int e = 0; e < p.edge_count(); ++e) {
      const auto& fr = frames[e];
      const CoefficientSet c = rs_vectors(p, fr, trig_tol);
      if (!c.r || !c.s) continue;
      MixedSlotResidual ms;
      ms.edge = e;
      const Vec3 dy = flex.velocities[fr.y] - flex.velocities[fr.x];
      const Vec3 dzp = flex.velocities[fr.z_prime] - flex.velocities[fr.x];
      const Vec3 dzpp = flex.velocities[fr.z_double_prime] - flex.velocities[fr.x];
      ms.residual[0] = dot(c.r->v - c.s->v, dy);
      ms.residual[1] = dot(c.r->v_prime - c.s->v_prime, dzp);
      ms.residual[2] = dot(c.r->v_double_prime - c.s->v_double_prime, dzpp);
      ms.scale = (norm(c.r->v) + norm(c.r->v_prime) + norm(c.r->v_double_prime) + norm(c.s->v) +
                  norm(c.s->v_prime) + norm(c.s->v_double_prime)) *
                 max_speed;
      rep.mixed_slots.push_back(ms);
    }
  }
  return rep;
}

std::vector<double> dehn_expression_values(const Polyhedron& p,
                                           const LengthDecomposition& decomp) {
  const auto frames = edge_frames(p);
  std::vector<double> phi(frames.size());
  for (size_t e = 0; e < frames.size(); ++e) phi[e] = dihedral_data(p, frames[e]).phi;

  std::vector<double> values(decomp.basis.size(), 0.0);
  for (int j = 0; j < decomp.basis.size(); ++j)
    for (int e = 0; e < p.edge_count(); ++e)
      values[j] += decomp.coeffs[e][j].to_double() * phi[e];
  return values;
}

std::vector<BranchDiscrepancy> per_edge_branch_consistency(const Polyhedron& p,
                                                           const FirstOrderFlex& flex,
                                                           double trig_tol) {
  const auto frames = edge_frames(p);
  double max_speed = 0.0;
  for (const auto& v : flex.velocities) max_speed = std::max(max_speed, norm(v));

  std::vector<BranchDiscrepancy> out;
  for (const auto& fr : frames) {
    const CoefficientSet c = rs_vectors(p, fr, trig_tol);
    if (!c.r || !c.s) continue;
    const Vec3& xi = flex.velocities[fr.x];
    const Vec3& eta = flex.velocities[fr.y];
    const Vec3& zp = flex.velocities[fr.z_prime];
    const Vec3& zpp = flex.velocities[fr.z_double_prime];
    BranchDiscrepancy d;
    d.edge = fr.edge_id;
    d.discrepancy = contract(*c.r, xi, eta, zp, zpp) - contract(*c.s, xi, eta, zp, zpp);
    d.scale = (norm(c.r->v) + norm(c.r->v_prime) + norm(c.r->v_double_prime) + norm(c.s->v) +
               norm(c.s->v_prime) + norm(c.s->v_double_prime)) *
              max_speed;
    out.push_back(d);
  }
  return out;
}

}  // namespace flexgate
