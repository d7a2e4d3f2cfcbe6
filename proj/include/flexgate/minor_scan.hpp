#pragma once

#include <cstdint>
#include <vector>

#include "flexgate/flex_space.hpp"
#include "flexgate/mesh.hpp"

namespace flexgate {

inline constexpr double kDefaultMinorValueTol = 1e-9;
inline constexpr double kDefaultMinorDerivTol = 1e-8;
inline constexpr std::int64_t kFullEnumerationCap = 10'000'000;
inline constexpr std::int64_t kDefaultSampleCount = 100'000;
inline constexpr std::uint64_t kDefaultSampleSeed = 0x5eed5eed5eed5eedULL;

struct MinorIndex {
  std::vector<int> rows;  // strictly increasing edge-row indices
  std::vector<int> cols;  // strictly increasing column indices
};

struct MinorStrategy {
  enum class Kind { Full, Sampled };
  Kind kind = Kind::Full;
  std::int64_t samples = kDefaultSampleCount;  // Sampled only
  std::uint64_t seed = kDefaultSampleSeed;     // Sampled only

  static MinorStrategy full() { return {Kind::Full, 0, 0}; }
  static MinorStrategy sampled(std::int64_t count, std::uint64_t seed) {
    return {Kind::Sampled, count, seed};
  }
};

struct MinorOffender {
  MinorIndex idx;
  double value = 0.0;
  double derivative = 0.0;
};

inline constexpr int kMaxRetainedOffenders = 100;

struct MinorReport {
  int k = 0;
  MinorStrategy strategy;
  std::int64_t minor_count = 0;
  double max_abs_value = 0.0;
  double max_abs_derivative = 0.0;
  std::int64_t value_offender_count = 0;
  std::int64_t derivative_offender_count = 0;
  std::vector<MinorOffender> offenders;  // first kMaxRetainedOffenders in scan order
  bool all_values_vanish = false;
  bool all_derivatives_vanish = false;
};

enum class ScanMode { Serial, Parallel };

// Determinant of the selected k x k submatrix (partial-pivot LU).
double minor_value(const RigidityMatrix& r, const MinorIndex& idx);

// d/dt of the minor at t=0 along p + t*flex: the submatrix entries are linear
// in the positions, so the derivative is the sum over rows of the determinant
// with that row replaced by its rate (equivalently sum_ab cof_ab * Mdot_ab).
double minor_directional_derivative(const Polyhedron& p, const FirstOrderFlex& flex,
                                    const MinorIndex& idx);

MinorReport minor_stationarity_report(const Polyhedron& p, const FirstOrderFlex& flex, int k,
                                      const MinorStrategy& strategy,
                                      double value_tol = kDefaultMinorValueTol,
                                      double deriv_tol = kDefaultMinorDerivTol,
                                      ScanMode mode = ScanMode::Parallel,
                                      double flex_tol = kDefaultFlexTol);

std::pair<int, std::vector<double>> rank_profile(const RigidityMatrix& r,
                                                 double rank_tol = kDefaultRankTol);

// Smallest k such that every k x k minor vanishes: rank + 1.
int minimal_vanishing_size(const RigidityMatrix& r, double rank_tol = kDefaultRankTol);

std::int64_t binomial(int n, int k);

}  // namespace flexgate
