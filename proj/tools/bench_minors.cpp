// Times the serial reference minor scan against the OpenMP kernel on the
// canonical fixtures and checks that both produce identical reports.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "flexgate/flex_space.hpp"
#include "flexgate/minor_scan.hpp"
#include "flexgate/oracle.hpp"

using namespace flexgate;

namespace {

double wall_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct Case {
  const char* name;
  Polyhedron mesh;
  FirstOrderFlex flex;
  int k;
  MinorStrategy strategy;
};

bool reports_match(const MinorReport& a, const MinorReport& b) {
  return a.minor_count == b.minor_count && a.max_abs_value == b.max_abs_value &&
         a.max_abs_derivative == b.max_abs_derivative &&
         a.value_offender_count == b.value_offender_count &&
         a.derivative_offender_count == b.derivative_offender_count &&
         a.offenders.size() == b.offenders.size();
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; parallel mode runs serially\n");
#endif

  const Polyhedron q = gen_example({ExampleSpec::Name::BipyramidQ, {}});
  FirstOrderFlex v5 = FirstOrderFlex::zero(q.vertex_count());
  v5.velocities[4] = {0, 0, 1};

  const Polyhedron bricard = gen_example({ExampleSpec::Name::Bricard1, {}});
  const FirstOrderFlex tangent = flex_space(bricard).nontrivial_basis[0];

  Case cases[] = {
      {"bipyramid-q k=8 FULL", q, v5, 8, MinorStrategy::full()},
      {"bricard1 k=11 FULL", bricard, tangent, 11, MinorStrategy::full()},
      {"bricard1 k=12 FULL", bricard, tangent, 12, MinorStrategy::full()},
      {"bricard1 k=11 SAMPLED(2e5)", bricard, tangent, 11, MinorStrategy::sampled(200000, 42)},
  };

  std::printf("%-28s %12s %10s %10s %8s %s\n", "case", "minors", "serial[s]", "openmp[s]",
              "speedup", "match");
  for (const auto& c : cases) {
    const double t0 = wall_seconds();
    const MinorReport serial =
        minor_stationarity_report(c.mesh, c.flex, c.k, c.strategy, kDefaultMinorValueTol,
                                  kDefaultMinorDerivTol, ScanMode::Serial);
    const double t1 = wall_seconds();
    const MinorReport parallel =
        minor_stationarity_report(c.mesh, c.flex, c.k, c.strategy, kDefaultMinorValueTol,
                                  kDefaultMinorDerivTol, ScanMode::Parallel);
    const double t2 = wall_seconds();
    std::printf("%-28s %12lld %10.3f %10.3f %8.2f %s\n", c.name,
                static_cast<long long>(serial.minor_count), t1 - t0, t2 - t1,
                (t1 - t0) / (t2 - t1), reports_match(serial, parallel) ? "yes" : "NO");
  }
  return 0;
}
