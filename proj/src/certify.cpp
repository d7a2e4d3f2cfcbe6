#include "flexgate/certify.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace flexgate {

namespace {

using nlohmann::json;

json minor_report_json(const MinorReport& rep) {
  json j;
  j["k"] = rep.k;
  if (rep.strategy.kind == MinorStrategy::Kind::Full) {
    j["strategy"] = "full";
  } else {
    j["strategy"] = "sampled";
    j["samples"] = rep.strategy.samples;
    j["seed"] = rep.strategy.seed;
  }
  j["minor_count"] = rep.minor_count;
  j["max_abs_value"] = rep.max_abs_value;
  j["max_abs_derivative"] = rep.max_abs_derivative;
  j["value_offender_count"] = rep.value_offender_count;
  j["derivative_offender_count"] = rep.derivative_offender_count;
  j["all_values_vanish"] = rep.all_values_vanish;
  j["all_derivatives_vanish"] = rep.all_derivatives_vanish;
  j["offenders"] = json::array();
  for (const auto& off : rep.offenders) {
    j["offenders"].push_back({{"rows", off.idx.rows},
                              {"cols", off.idx.cols},
                              {"value", off.value},
                              {"derivative", off.derivative}});
  }
  return j;
}

}  // namespace

CertifyReport certify(const Polyhedron& p, const FirstOrderFlex& flex,
                      const LengthDecomposition& decomp, const CertifyOptions& opts) {
  CertifyReport rep;
  rep.topology = topology_stats(p);

  const auto residuals = edge_length_residuals(p, flex);
  rep.max_edge_residual = 0.0;
  rep.flex_valid = true;
  for (int e = 0; e < p.edge_count(); ++e) {
    auto [i, j] = p.edges[e];
    const double ell = norm(p.vertices[j] - p.vertices[i]);
    rep.max_edge_residual = std::max(rep.max_edge_residual, std::abs(residuals[e]));
    if (std::abs(residuals[e]) > opts.flex_tol * ell) rep.flex_valid = false;
  }
  if (!rep.flex_valid)
    throw NotAFirstOrderFlex("max edge-length residual " +
                             std::to_string(rep.max_edge_residual) + " exceeds tolerance");

  rep.dehn = evaluate_dehn(p, decomp, flex, opts.policy, opts.dehn_tol, opts.trig_tol,
                           opts.flex_tol);
  if (!rep.dehn.all_pass) {
    for (size_t j = 0; j < rep.dehn.pass.size(); ++j)
      if (!rep.dehn.pass[j])
        rep.failed_conditions.push_back("dehn_equation[" + decomp.basis.elements[j].label + "]");
  }

  const auto discrepancies = per_edge_branch_consistency(p, flex, opts.trig_tol);
  rep.branch.edges_checked = static_cast<int>(discrepancies.size());
  for (const auto& d : discrepancies) {
    const double scaled = d.scale > 0.0 ? std::abs(d.discrepancy) / d.scale : 0.0;
    rep.branch.max_scaled_discrepancy = std::max(rep.branch.max_scaled_discrepancy, scaled);
    if (std::abs(d.discrepancy) > opts.branch_tol * d.scale) ++rep.branch.failures;
  }
  if (rep.branch.failures > 0) rep.failed_conditions.push_back("branch_consistency");

  const RigidityMatrix rm = rigidity_matrix(p);
  const int k = opts.minor_size > 0 ? opts.minor_size : 3 * p.vertex_count() - 7;
  auto pick_strategy = [&](int size) {
    if (opts.strategy) return *opts.strategy;
    const std::int64_t rows = binomial(rm.rows(), size);
    const std::int64_t cols = binomial(rm.cols(), size);
    const bool full_ok = rows <= kFullEnumerationCap && cols <= kFullEnumerationCap &&
                         rows * cols <= kFullEnumerationCap;
    return full_ok ? MinorStrategy::full()
                   : MinorStrategy::sampled(kDefaultSampleCount, kDefaultSampleSeed);
  };
  rep.minors = minor_stationarity_report(p, flex, k, pick_strategy(k), opts.value_tol,
                                         opts.deriv_tol, ScanMode::Parallel, opts.flex_tol);

  // An extending flex keeps the whole family flexible, so every minor of the
  // minimal vanishing size is identically zero along it; non-stationarity
  // there is the sound obstruction. Minors of smaller sizes are generically
  // nonzero and free to move, so the requested-size scan stays diagnostic.
  const int k_vanish = minimal_vanishing_size(rm, opts.rank_tol);
  if (k_vanish <= std::min(rm.rows(), rm.cols())) {
    rep.minors_vanishing_size =
        k_vanish == k ? rep.minors
                      : minor_stationarity_report(p, flex, k_vanish, pick_strategy(k_vanish),
                                                  opts.value_tol, opts.deriv_tol,
                                                  ScanMode::Parallel, opts.flex_tol);
    if (!rep.minors_vanishing_size->all_derivatives_vanish)
      rep.failed_conditions.push_back("minor_stationarity[k=" + std::to_string(k_vanish) + "]");
  }

  if (opts.minors_project_trivial) {
    const FirstOrderFlex projected = project_out_trivial(p, flex);
    rep.minors_projected = minor_stationarity_report(p, projected, k, pick_strategy(k),
                                                     opts.value_tol, opts.deriv_tol,
                                                     ScanMode::Parallel, opts.flex_tol);
  }

  rep.obstructed = !rep.failed_conditions.empty();
  return rep;
}

std::string minor_report_to_json(const MinorReport& report, bool pretty) {
  return minor_report_json(report).dump(pretty ? 2 : -1);
}

std::string certify_report_to_json(const CertifyReport& rep, bool pretty) {
  json j;
  j["schema_version"] = rep.schema_version;
  j["mesh"] = {{"V", rep.topology.V},
               {"E", rep.topology.E},
               {"F", rep.topology.F},
               {"euler_characteristic", rep.topology.euler_char},
               {"orientable", rep.topology.orientable},
               {"genus_or_crosscaps", rep.topology.genus_or_crosscaps}};
  j["flex"] = {{"valid", rep.flex_valid}, {"max_edge_residual", rep.max_edge_residual}};

  json dehn;
  dehn["residuals"] = rep.dehn.residuals;
  dehn["scales"] = rep.dehn.scales;
  dehn["pass"] = rep.dehn.pass;
  dehn["all_pass"] = rep.dehn.all_pass;
  json policy = json::array();
  for (const auto v : rep.dehn.policy_used)
    policy.push_back(v == GVariant::RTriple ? "r" : "s");
  dehn["policy_used"] = std::move(policy);
  if (!rep.dehn.mixed_slots.empty()) {
    json ms = json::array();
    for (const auto& m : rep.dehn.mixed_slots)
      ms.push_back({{"edge", m.edge},
                    {"residuals", {m.residual[0], m.residual[1], m.residual[2]}},
                    {"scale", m.scale}});
    dehn["mixed_slot_diagnostics"] = std::move(ms);
  }
  j["dehn"] = std::move(dehn);

  j["branch_consistency"] = {{"edges_checked", rep.branch.edges_checked},
                             {"max_scaled_discrepancy", rep.branch.max_scaled_discrepancy},
                             {"failures", rep.branch.failures}};
  j["minors"] = minor_report_json(rep.minors);
  if (rep.minors_vanishing_size)
    j["minors_vanishing_size"] = minor_report_json(*rep.minors_vanishing_size);
  if (rep.minors_projected) j["minors_projected"] = minor_report_json(*rep.minors_projected);
  j["verdict"] = rep.obstructed ? "OBSTRUCTED" : "NO_OBSTRUCTION_FOUND";
  j["failed_conditions"] = rep.failed_conditions;
  return j.dump(pretty ? 2 : -1);
}

}  // namespace flexgate
