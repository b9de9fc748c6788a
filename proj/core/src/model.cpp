#include "smfg/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include "smfg/error.hpp"

namespace smfg {

ExponentConfig validate_exponents(double alpha, double beta) {
  if (!(alpha > 1.0)) {
    throw Error(ErrorCode::AlphaOutOfRange, "alpha must exceed 1, got " + std::to_string(alpha));
  }
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::BetaOutOfRange, "beta must be positive, got " + std::to_string(beta));
  }
  ExponentConfig cfg;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.gamma = (beta + 1.0) / beta * alpha;
  cfg.gamma_conj = cfg.gamma / (cfg.gamma - 1.0);
  return cfg;
}

double g_inv_numeric(const std::function<double(double)>& g, double z, double tol) {
  const double g0 = g(0.0);
  if (z < g0) return 0.0;
  if (z - g0 <= tol) return 0.0;

  double lo = 0.0;
  double hi = 1.0;
  constexpr int kMaxDoublings = 200;
  int doublings = 0;
  while (g(hi) < z) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > kMaxDoublings || !std::isfinite(hi)) {
      throw Error(ErrorCode::BracketFailure,
                  "no upper bracket for g(m) = " + std::to_string(z) +
                      "; the coupling does not grow without bound");
    }
  }

  // Bisection; stop on the value tolerance or when the interval cannot shrink.
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (std::abs(gm - z) <= tol) return mid;
    if (mid <= lo || mid >= hi) return mid;
    if (gm < z) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {
constexpr std::size_t kMaxRefinements = 12;
constexpr unsigned kKronrodDepth = 4;
}  // namespace

double primitive_G(const CouplingModel& coupling, double z, double tol) {
  const double g0 = coupling.g_zero();
  if (!(z > g0)) return 0.0;
  const double upper = coupling.g_inv(z);
  if (upper <= 0.0) return 0.0;

  const auto& g = coupling.function();
  const auto f = [&g](double m) { return g(m); };
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  double error = 0.0;
  double l1 = 0.0;

  // Cheap Gauss-Kronrod pass; exact for polynomial couplings.
  double integral_g =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, upper, kKronrodDepth, 8.0 * kEps, &error, &l1);
  // Roundoff floor grows with the magnitude of the integral.
  double allowed = std::max(tol, 64.0 * kEps * l1);
  if (!(error <= allowed)) {
    // tanh-sinh copes with algebraic endpoint behaviour of g near m = 0.
    thread_local boost::math::quadrature::tanh_sinh<double> quadrature(kMaxRefinements);
    try {
      integral_g = quadrature.integrate(f, 0.0, upper, 4.0 * kEps, &error, &l1);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::QuadratureNonConvergence, std::string("primitive quadrature failed: ") + e.what());
    }
    allowed = std::max(tol, 64.0 * kEps * l1);
    if (!(error <= allowed)) {
      throw Error(ErrorCode::QuadratureNonConvergence,
                  fmt::format("primitive quadrature error {:.3g} exceeds {:.3g}", error, allowed));
    }
  }
  return std::max(0.0, upper * z - integral_g);
}

CouplingModel::CouplingModel(ScalarFn g, double growth_constant, ScalarFn inverse)
    : g_(std::move(g)), inverse_(std::move(inverse)), growth_constant_(growth_constant) {
  if (!g_) throw Error(ErrorCode::InvalidArgument, "coupling function is empty");
  g_zero_ = g_(0.0);
}

double CouplingModel::g_inv(double z) const {
  if (z < g_zero_) return 0.0;
  if (inverse_) return std::max(0.0, inverse_(z));
  return g_inv_numeric(g_, z, inverse_tol);
}

double CouplingModel::primitive(double z) const { return primitive_G(*this, z, quadrature_tol); }

namespace {

// Growth constant declared by the prototype pair. The bounds of the growth
// and coercivity assumptions hold with this value on every (alpha, beta)
// combination exercised by the assumption probes; see tests/test_model.cpp.
double prototype_constant(double alpha, double beta) {
  const double a = std::max(alpha, 2.0);
  const double c_h = 2.0 * alpha * std::pow(2.0, a / 2.0) + 2.0;
  const double c_coercive = 4.0 / (alpha - 1.0) + 2.0;
  const double c_g = 2.0 * std::pow(2.0, std::max(beta, 1.0) / 2.0) + 2.0;
  const double c_inv = 2.0 * std::pow(2.0, 1.0 / beta) + 2.0;
  return std::max({c_h, c_coercive, c_g, c_inv});
}

HamiltonianModel make_prototype_hamiltonian(double alpha, double constant) {
  HamiltonianModel ham;
  ham.eval = [alpha](const Vec&, const Vec& p) {
    return std::pow(dot(p, p) + 1.0, 0.5 * alpha) + 1.0;
  };
  ham.grad_p = [alpha](const Vec&, const Vec& p) {
    const double scale = alpha * std::pow(dot(p, p) + 1.0, 0.5 * alpha - 1.0);
    return scale * p;
  };
  ham.growth_constant = constant;
  ham.x_independent = true;
  return ham;
}

CouplingModel make_prototype_coupling(double beta, double constant) {
  auto g = [beta](double m) { return std::pow(m * m + 1.0, 0.5 * beta); };
  auto inverse = [beta](double z) {
    if (z < 1.0) return 0.0;
    return std::sqrt(std::max(0.0, std::pow(z, 2.0 / beta) - 1.0));
  };
  return CouplingModel(g, constant, inverse);
}

}  // namespace

HamiltonianModel prototype_hamiltonian(double alpha) {
  return make_prototype_hamiltonian(alpha, prototype_constant(alpha, 1.0));
}

CouplingModel prototype_coupling(double beta) {
  return make_prototype_coupling(beta, prototype_constant(2.0, beta));
}

ModelSet prototype_models(double alpha, double beta) {
  ModelSet set;
  set.exponents = validate_exponents(alpha, beta);
  const double c = prototype_constant(alpha, beta);
  set.hamiltonian = make_prototype_hamiltonian(alpha, c);
  set.coupling = make_prototype_coupling(beta, c);
  set.name = "prototype";
  return set;
}

}  // namespace smfg
