#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flexgate/dehn.hpp"
#include "flexgate/flex_space.hpp"
#include "flexgate/mesh.hpp"
#include "flexgate/minor_scan.hpp"

namespace flexgate {

struct CertifyOptions {
  int minor_size = -1;  // -1: default 3V-7
  std::optional<MinorStrategy> strategy;  // unset: FULL when under cap, else SAMPLED
  BranchPolicy policy = BranchPolicy::PreferStable;
  double flex_tol = kDefaultFlexTol;
  double trig_tol = kDefaultTrigTol;
  double rank_tol = kDefaultRankTol;
  double dehn_tol = kDefaultDehnTol;
  double branch_tol = 1e-7;
  double value_tol = kDefaultMinorValueTol;
  double deriv_tol = kDefaultMinorDerivTol;
  bool minors_project_trivial = false;
};

struct BranchConsistencySummary {
  int edges_checked = 0;
  double max_scaled_discrepancy = 0.0;
  int failures = 0;
};

struct CertifyReport {
  int schema_version = 1;
  TopologyStats topology;
  bool flex_valid = false;
  double max_edge_residual = 0.0;
  DehnReport dehn;
  BranchConsistencySummary branch;
  // Scan at the requested size (default 3V-7), reported as-is.
  MinorReport minors;
  // Scan at the minimal vanishing size rank+1: these minors are zero and must
  // stay zero along an extending flex, so only this scan feeds the verdict.
  // Absent when rank+1 exceeds the matrix dimensions (vacuous pass).
  std::optional<MinorReport> minors_vanishing_size;
  std::optional<MinorReport> minors_projected;
  bool obstructed = false;
  std::vector<std::string> failed_conditions;
};

CertifyReport certify(const Polyhedron& p, const FirstOrderFlex& flex,
                      const LengthDecomposition& decomp, const CertifyOptions& opts = {});

std::string certify_report_to_json(const CertifyReport& report, bool pretty = false);
std::string minor_report_to_json(const MinorReport& report, bool pretty = false);

}  // namespace flexgate
