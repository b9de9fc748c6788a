#pragma once

#include <functional>
#include <string>

#include "smfg/vec.hpp"

namespace smfg {

/// Exponents (alpha, beta) of the growth assumptions together with the
/// derived Sobolev exponent gamma = (beta + 1) alpha / beta and its
/// Hoelder conjugate.
struct ExponentConfig {
  double alpha = 2.0;
  double beta = 2.0;
  double gamma = 3.0;
  double gamma_conj = 1.5;
};

/// Throws Error{AlphaOutOfRange} for alpha <= 1 and Error{BetaOutOfRange}
/// for beta <= 0 (NaN is rejected as well).
ExponentConfig validate_exponents(double alpha, double beta);

/// Hamiltonian H(x, p) and its p-gradient. Immutable once built.
struct HamiltonianModel {
  std::function<double(const Vec& x, const Vec& p)> eval;
  std::function<Vec(const Vec& x, const Vec& p)> grad_p;
  /// Constant C > 1 the model claims for its growth bounds; the assumption
  /// probes measure margins against it.
  double growth_constant = 2.0;
  bool x_independent = true;

  double operator()(const Vec& x, const Vec& p) const { return eval(x, p); }
};

/// Coupling g together with its extended inverse and the primitive G of the
/// extended inverse.
///
/// The extended inverse is zero below g(0) and the ordinary inverse above.
/// G is normalized so that G(z) = 0 for z <= g(0). It is evaluated through
///   G(z) = M z - \int_0^M g(m) dm,   M = g_inv(z),
/// which is the integration-by-parts form of \int_{g(0)}^z g_inv(s) ds and
/// keeps the quadrature on the (smooth) coupling instead of on the inverse.
class CouplingModel {
 public:
  using ScalarFn = std::function<double(double)>;

  CouplingModel() = default;

  /// `inverse` may be empty, in which case g_inv_numeric is used.
  CouplingModel(ScalarFn g, double growth_constant, ScalarFn inverse = {});

  double g(double m) const { return g_(m); }
  double g_inv(double z) const;
  double primitive(double z) const;

  double g_zero() const noexcept { return g_zero_; }
  double growth_constant() const noexcept { return growth_constant_; }
  bool has_analytic_inverse() const noexcept { return static_cast<bool>(inverse_); }
  const ScalarFn& function() const noexcept { return g_; }

  /// Absolute tolerances used by the numeric inverse and the quadrature.
  double inverse_tol = 1e-12;
  double quadrature_tol = 1e-13;

 private:
  ScalarFn g_;
  ScalarFn inverse_;
  double g_zero_ = 0.0;
  double growth_constant_ = 2.0;
};

/// Extended inverse of a continuous strictly increasing g by bracket
/// doubling from [0, 1] followed by bisection until |g(m) - z| <= tol.
/// Throws Error{BracketFailure} when no upper bracket is found, which means
/// g does not grow to +infinity.
double g_inv_numeric(const std::function<double(double)>& g, double z, double tol = 1e-12);

/// G(z) = \int_{g(0)}^{z} g_inv(s) ds for z >= g(0), zero otherwise.
/// Adaptive Gauss-Kronrod; throws Error{QuadratureNonConvergence} when the
/// error estimate stays above tol at the refinement cap.
double primitive_G(const CouplingModel& coupling, double z, double tol = 1e-13);

/// H(x,p) = (|p|^2 + 1)^{alpha/2} + 1, x-independent.
HamiltonianModel prototype_hamiltonian(double alpha);

/// g(m) = (m^2 + 1)^{beta/2} with g_inv(z) = (z^{2/beta} - 1)^{1/2} for z >= 1.
CouplingModel prototype_coupling(double beta);

struct ModelSet {
  HamiltonianModel hamiltonian;
  CouplingModel coupling;
  ExponentConfig exponents;
  std::string name;
};

ModelSet prototype_models(double alpha, double beta);

}  // namespace smfg
