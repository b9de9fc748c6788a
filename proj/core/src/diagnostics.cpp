#include "smfg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

namespace smfg {

namespace {

inline double pos_pow(double x, double e) noexcept { return x > 0.0 ? std::pow(x, e) : 0.0; }

double sup_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

bool DiagnosticsReport::all_finite() const {
  for (double v : {epsilon, flux_gap, energy_identity_residual, complementarity_mass, apriori_value, minty_gap,
                   minty_span, monotonicity_min, normal_trace_gap, grad_norm}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string diagnostics_csv_header() {
  return "epsilon,flux_gap,energy_identity_residual,complementarity_mass,apriori_value,minty_gap,minty_span,"
         "monotonicity_min,normal_trace_gap,grad_norm";
}

std::string diagnostics_csv_row(const DiagnosticsReport& r) {
  return fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}", r.epsilon,
                     r.flux_gap, r.energy_identity_residual, r.complementarity_mass, r.apriori_value, r.minty_gap, r.minty_span,
                     r.monotonicity_min, r.normal_trace_gap, r.grad_norm);
}

double flux_balance(const ProblemData& data, const SolutionState& state) {
  const auto& wd = data.dirichlet();
  double out = 0.0;
  for (std::size_t k = 0; k < wd.size(); ++k) out += wd.weights[k] * state.h[k];
  return out - data.inflow_total();
}

double energy_identity(const ProblemData& data, const SolutionState& state) {
  const Mesh& mesh = data.mesh();
  const auto u = state.u.values();
  const double gamma = data.exponents().gamma;
  double interior = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const Vec p = mesh.element_gradient(u, e);
    interior += mesh.element_measures()[e] * state.m[e] * dot(data.hamiltonian().grad_p(mesh.centroids()[e], p), p);
  }
  double penalty = 0.0;
  const auto& wd = data.dirichlet();
  for (std::size_t k = 0; k < wd.size(); ++k) penalty += wd.weights[k] * pos_pow(u[wd.nodes[k]], gamma);
  penalty /= std::pow(data.epsilon(), gamma);
  double inflow = 0.0;
  const auto& wn = data.neumann();
  for (std::size_t k = 0; k < wn.size(); ++k) inflow += wn.weights[k] * data.inflow()[wn.nodes[k]] * u[wn.nodes[k]];
  return std::abs(interior + penalty - inflow);
}

double complementarity_mass(const ProblemData& data, const SolutionState& state) {
  const auto& wd = data.dirichlet();
  const auto u = state.u.values();
  double s = 0.0;
  for (std::size_t k = 0; k < wd.size(); ++k) s += wd.weights[k] * state.h[k] * std::max(u[wd.nodes[k]], 0.0);
  return s;
}

double complementarity_mass_from_flux(const ProblemData& data, const SolutionState& state) {
  const auto& wd = data.dirichlet();
  const double gc = data.exponents().gamma_conj;
  double s = 0.0;
  for (std::size_t k = 0; k < wd.size(); ++k) s += wd.weights[k] * pos_pow(state.h[k], gc);
  return std::pow(data.epsilon(), gc) * s;
}

double apriori_bound(const ProblemData& data, const SolutionState& state) {
  const auto u = state.u.values();
  const double gamma = data.exponents().gamma;
  const auto& wd = data.dirichlet();
  double boundary = 0.0;
  for (std::size_t k = 0; k < wd.size(); ++k) boundary += wd.weights[k] * pos_pow(u[wd.nodes[k]], gamma);
  return boundary / std::pow(data.epsilon(), gamma) + quotient_norm_pow(data, u);
}

NormalTraceResult normal_trace_check(const ProblemData& data, const SolutionState& state) {
  const Mesh& mesh = data.mesh();
  const auto u = state.u.values();
  const auto& ham = data.hamiltonian();
  NormalTraceResult result;

  std::vector<Vec> flux(mesh.element_count());
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    flux[e] = state.m[e] * ham.grad_p(mesh.centroids()[e], mesh.element_gradient(u, e));
  }
  const auto& wd = data.dirichlet();

  if (mesh.dim() == 1) {
    double qmin = std::numeric_limits<double>::infinity();
    double qmax = -std::numeric_limits<double>::infinity();
    for (const Vec& q : flux) {
      qmin = std::min(qmin, q[0]);
      qmax = std::max(qmax, q[0]);
    }
    result.interior_defect = qmax - qmin;
    const std::size_t last = mesh.vertex_count() - 1;
    for (std::size_t k = 0; k < wd.size(); ++k) {
      const std::size_t i = wd.nodes[k];
      const double qn = i == 0 ? -flux.front()[0] : (i == last ? flux.back()[0] : 0.0);
      result.boundary_gap = std::max(result.boundary_gap, std::abs(state.h[k] + qn));
    }
    return result;
  }

  // Weak form: r_i = sum_T |T| q_T . grad(phi_i).
  std::vector<double> weak(mesh.vertex_count(), 0.0);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto shape = mesh.shape_gradients(e);
    for (std::size_t a = 0; a < shape.size(); ++a) {
      weak[mesh.elements()[e][a]] += mesh.element_measures()[e] * dot(flux[e], shape[a]);
    }
  }
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    if (mesh.is_interior(i)) result.interior_defect = std::max(result.interior_defect, std::abs(weak[i]));
  }
  std::vector<double> inflow_load(mesh.vertex_count(), 0.0);
  const auto& wn = data.neumann();
  for (std::size_t k = 0; k < wn.size(); ++k) inflow_load[wn.nodes[k]] = wn.weights[k] * data.inflow()[wn.nodes[k]];
  for (std::size_t k = 0; k < wd.size(); ++k) {
    const std::size_t i = wd.nodes[k];
    const double outward = -weak[i] + inflow_load[i];
    result.boundary_gap += std::abs(wd.weights[k] * state.h[k] - outward);
  }
  return result;
}

double monotonicity_pairing(const ProblemData& data, const SolutionState& x, const SolutionState& y) {
  TestTriplet diff;
  diff.mu.resize(x.m.size());
  diff.v.resize(x.u.size());
  diff.k.resize(x.h.size());
  for (std::size_t e = 0; e < diff.mu.size(); ++e) diff.mu[e] = x.m[e] - y.m[e];
  for (std::size_t i = 0; i < diff.v.size(); ++i) diff.v[i] = x.u[i] - y.u[i];
  for (std::size_t k = 0; k < diff.k.size(); ++k) diff.k[k] = x.h[k] - y.h[k];
  return pairing_A_eps(data, x, diff) - pairing_A_eps(data, y, diff);
}

double monotonicity_probe(const ProblemData& data, std::size_t samples, std::uint64_t seed) {
  const Mesh& mesh = data.mesh();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto draw = [&]() {
    SolutionState s{FeFunction(mesh), std::vector<double>(mesh.element_count()),
                    std::vector<double>(data.dirichlet().size()), data.epsilon()};
    for (std::size_t i = 0; i < s.u.size(); ++i) s.u[i] = normal(rng);
    for (double& m : s.m) m = std::abs(normal(rng));
    for (double& h : s.h) h = std::abs(normal(rng));
    return s;
  };
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < samples; ++n) {
    const SolutionState x = draw();
    SolutionState y = draw();
    switch (n % 4) {
      case 1: y.u = x.u; break;
      case 2: y.m = x.m; break;
      case 3: y.h = x.h; break;
      default: break;
    }
    worst = std::min(worst, monotonicity_pairing(data, x, y));
  }
  return worst;
}

double gradient_fd_error(const ProblemData& data, std::span<const double> u, double delta) {
  const auto g = gradient(data, u);
  std::vector<double> x(u.begin(), u.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + delta;
    const double fp = energy(data, x);
    x[i] = xi - delta;
    const double fm = energy(data, x);
    x[i] = xi;
    worst = std::max(worst, std::abs((fp - fm) / (2.0 * delta) - g[i]));
  }
  return worst / std::max(sup_norm(g), 1e-300);
}

double gradient_check(const ProblemData& data, std::size_t states, double delta, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> u(data.mesh().vertex_count());
  double worst = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    for (double& x : u) x = normal(rng);
    worst = std::max(worst, gradient_fd_error(data, u, delta));
  }
  return worst;
}

DiagnosticsReport diagnose(const ProblemData& data, const SolutionState& state, const DiagnosticsOptions& opts) {
  DiagnosticsReport r;
  r.epsilon = data.epsilon();
  r.flux_gap = flux_balance(data, state);
  r.energy_identity_residual = energy_identity(data, state);
  r.complementarity_mass = complementarity_mass(data, state);
  r.apriori_value = apriori_bound(data, state);
  r.minty_gap = minty_gap(data, state, opts.minty_samples, opts.seed, &r.minty_span);
  r.monotonicity_min = opts.monotonicity_samples > 0
                           ? monotonicity_probe(data, opts.monotonicity_samples, opts.seed + 1)
                           : 0.0;
  r.normal_trace_gap = normal_trace_check(data, state).worst();
  r.grad_norm = sup_norm(gradient(data, state.u.values()));
  return r;
}

}  // namespace smfg
