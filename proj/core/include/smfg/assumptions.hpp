#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "smfg/model.hpp"

namespace smfg {

/// Sample grids for the structural-assumption probes. The assumptions
/// quantify over all p and m, so the probes only report worst margins over
/// these grids.
struct SampleSpec {
  int dim = 1;
  /// Spatial samples; empty means the single point x = 0.
  std::vector<Vec> x_points;
  double p_max = 10.0;
  int p_count = 41;  // per axis
  double m_max = 10.0;
  int m_count = 201;
  double z_max = 1e3;
  int z_count = 60;  // log-spaced over (g(0), z_max]
  int theta_count = 9;
  int segment_count = 400;  // random (p, q) pairs for convexity probes
  std::uint64_t seed = 0;
};

/// Outcome of one probe. `margin` is the worst slack of the bound evaluated
/// with the model's declared constant (negative = violated); `fitted_constant`
/// is the smallest C >= 1 for which the bound holds on the samples (NaN when
/// the check has no constant).
struct AssumptionCheck {
  std::string name;
  double margin = 0.0;
  double fitted_constant = 0.0;
  bool passed = true;
  std::string witness;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;

  bool all_passed() const;
  const AssumptionCheck* find(std::string_view name) const;
};

/// Probes S.1 (monotone g), S.2 (convex H), S.3 (growth of g), S.4.a/b,
/// the three forms S.5.a/b/c, the extended-inverse bounds, the bounds on
/// g_inv(H) and convexity of G(H(x, .)). Violations are reported, never thrown.
AssumptionReport check_structural_assumptions(const HamiltonianModel& ham,
                                              const CouplingModel& coupling,
                                              const ExponentConfig& cfg,
                                              const SampleSpec& samples);

}  // namespace smfg
