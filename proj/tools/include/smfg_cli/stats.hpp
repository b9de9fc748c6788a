#pragma once

#include <span>

namespace smfg::cli {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_half_width = 0.0;  // 95% Student-t half-width
};

/// Least-squares fit of log(y) against log(x). Needs at least three points
/// with positive coordinates.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace smfg::cli
