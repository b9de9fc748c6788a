#include "smfg/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

#include "smfg/error.hpp"

namespace smfg {

namespace {

// (x)_+^e with the convention 0^e = 0 for e > 0.
inline double pos_pow(double x, double e) noexcept { return x > 0.0 ? std::pow(x, e) : 0.0; }

}  // namespace

ProblemData::ProblemData(std::shared_ptr<const Mesh> mesh, HamiltonianModel ham, CouplingModel coupling,
                         ExponentConfig cfg, std::vector<double> j, double epsilon)
    : mesh_(std::move(mesh)),
      ham_(std::move(ham)),
      coupling_(std::move(coupling)),
      cfg_(cfg),
      j_(std::move(j)),
      epsilon_(epsilon) {
  if (!mesh_) throw Error(ErrorCode::InvalidArgument, "problem requires a mesh");
  if (!ham_.eval || !ham_.grad_p) throw Error(ErrorCode::InvalidArgument, "Hamiltonian evaluators are empty");
  if (!(epsilon_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (j_.size() != mesh_->vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "inflow must be nodal over all vertices");
  }
  for (double v : j_) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "inflow j must be nonnegative");
  }
  const auto& wn = neumann();
  for (std::size_t k = 0; k < wn.size(); ++k) inflow_total_ += wn.weights[k] * j_[wn.nodes[k]];
  if (!(inflow_total_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "inflow j vanishes on Γ_N");
}

ProblemData ProblemData::with_epsilon(double epsilon) const {
  ProblemData copy = *this;
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  copy.epsilon_ = epsilon;
  return copy;
}

bool TestTriplet::admissible() const {
  return std::all_of(mu.begin(), mu.end(), [](double x) { return x >= 0.0; }) &&
         std::all_of(k.begin(), k.end(), [](double x) { return x >= 0.0; });
}

double energy(const ProblemData& data, std::span<const double> u) {
  const Mesh& mesh = data.mesh();
  const auto measures = mesh.element_measures();
  const auto centroids = mesh.centroids();
  const double gamma = data.exponents().gamma;
  const double eps_pow = std::pow(data.epsilon(), gamma);

  double value = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double h = data.hamiltonian()(centroids[e], mesh.element_gradient(u, e));
    value += measures[e] * data.coupling().primitive(h);
  }
  const auto& wn = data.neumann();
  const auto j = data.inflow();
  for (std::size_t k = 0; k < wn.size(); ++k) value -= wn.weights[k] * j[wn.nodes[k]] * u[wn.nodes[k]];
  const auto& wd = data.dirichlet();
  for (std::size_t k = 0; k < wd.size(); ++k) {
    value += wd.weights[k] * pos_pow(u[wd.nodes[k]], gamma) / (gamma * eps_pow);
  }
  return value;
}

std::vector<double> gradient(const ProblemData& data, std::span<const double> u) {
  const Mesh& mesh = data.mesh();
  const auto& ham = data.hamiltonian();
  const auto& cpl = data.coupling();
  const auto measures = mesh.element_measures();
  const auto centroids = mesh.centroids();
  const auto elements = mesh.elements();
  const double gamma = data.exponents().gamma;
  const double eps_pow = std::pow(data.epsilon(), gamma);

  std::vector<double> grad(mesh.vertex_count(), 0.0);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const Vec p = mesh.element_gradient(u, e);
    const double m = cpl.g_inv(ham(centroids[e], p));
    if (m == 0.0) continue;
    const Vec flux = (measures[e] * m) * ham.grad_p(centroids[e], p);
    const auto shape = mesh.shape_gradients(e);
    for (std::size_t a = 0; a < shape.size(); ++a) grad[elements[e][a]] += dot(flux, shape[a]);
  }
  const auto& wn = data.neumann();
  const auto j = data.inflow();
  for (std::size_t k = 0; k < wn.size(); ++k) grad[wn.nodes[k]] -= wn.weights[k] * j[wn.nodes[k]];
  const auto& wd = data.dirichlet();
  for (std::size_t k = 0; k < wd.size(); ++k) {
    const std::size_t i = wd.nodes[k];
    grad[i] += wd.weights[k] * pos_pow(u[i], gamma - 1.0) / eps_pow;
  }
  return grad;
}

std::vector<double> recover_density(const ProblemData& data, std::span<const double> u) {
  const Mesh& mesh = data.mesh();
  std::vector<double> m(mesh.element_count());
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    m[e] = data.coupling().g_inv(data.hamiltonian()(mesh.centroids()[e], mesh.element_gradient(u, e)));
  }
  return m;
}

std::vector<double> recover_boundary_flux(const ProblemData& data, std::span<const double> u) {
  const auto& wd = data.dirichlet();
  const double gamma = data.exponents().gamma;
  const double eps_pow = std::pow(data.epsilon(), gamma);
  std::vector<double> h(wd.size());
  for (std::size_t k = 0; k < wd.size(); ++k) h[k] = pos_pow(u[wd.nodes[k]], gamma - 1.0) / eps_pow;
  return h;
}

double energy_and_gradient(const ProblemData& data, std::span<const double> u, std::span<double> grad) {
  const auto g = gradient(data, u);
  std::copy(g.begin(), g.end(), grad.begin());
  return energy(data, u);
}

SolutionState complete_state(const ProblemData& data, FeFunction u) {
  SolutionState state{std::move(u), {}, {}, data.epsilon()};
  state.m = recover_density(data, state.u.values());
  state.h = recover_boundary_flux(data, state.u.values());
  return state;
}

namespace {

// Shared body of the A_eps and A_0 pairings; `penalty` toggles the
// eps^{gamma'} h^{gamma'-1} contribution of the third row.
double pairing_impl(const ProblemData& data, const SolutionState& s, const TestTriplet& t, bool penalty) {
  const Mesh& mesh = data.mesh();
  const auto& ham = data.hamiltonian();
  const auto& cpl = data.coupling();
  const auto measures = mesh.element_measures();
  const auto centroids = mesh.centroids();
  const auto u = s.u.values();

  double total = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const Vec p = mesh.element_gradient(u, e);
    const double h = ham(centroids[e], p);
    total += measures[e] * (-h + cpl.g(s.m[e])) * t.mu[e];
    if (s.m[e] != 0.0) {
      const Vec dv = mesh.element_gradient(t.v, e);
      total += measures[e] * s.m[e] * dot(ham.grad_p(centroids[e], p), dv);
    }
  }
  const auto& wn = data.neumann();
  const auto j = data.inflow();
  for (std::size_t k = 0; k < wn.size(); ++k) total -= wn.weights[k] * j[wn.nodes[k]] * t.v[wn.nodes[k]];

  const auto& wd = data.dirichlet();
  const double gc = data.exponents().gamma_conj;
  const double eps_term = std::pow(data.epsilon(), gc);
  for (std::size_t k = 0; k < wd.size(); ++k) {
    const std::size_t i = wd.nodes[k];
    total += wd.weights[k] * s.h[k] * t.v[i];
    double row = -u[i];
    if (penalty) row += eps_term * pos_pow(s.h[k], gc - 1.0);
    total += wd.weights[k] * row * t.k[k];
  }
  return total;
}

}  // namespace

double pairing_A_eps(const ProblemData& data, const SolutionState& state, const TestTriplet& t) {
  return pairing_impl(data, state, t, true);
}

double pairing_A_zero(const ProblemData& data, const SolutionState& state, const TestTriplet& t) {
  return pairing_impl(data, state, t, false);
}

double kappa_solve(const ProblemData& data, std::span<const double> u, double tol) {
  const auto& wd = data.dirichlet();
  const double gamma = data.exponents().gamma;
  const double target = std::pow(data.epsilon(), gamma) * data.inflow_total();
  const auto f = [&](double shift) {
    double s = 0.0;
    for (std::size_t k = 0; k < wd.size(); ++k) s += wd.weights[k] * pos_pow(u[wd.nodes[k]] + shift, gamma - 1.0);
    return s;
  };

  double umax = 0.0;
  for (std::size_t k = 0; k < wd.size(); ++k) umax = std::max(umax, std::abs(u[wd.nodes[k]]));
  double lo = -(umax + 1.0);
  double hi = std::pow(target, data.exponents().gamma_conj - 1.0) + umax + 1.0;
  while (f(lo) > target) lo = 2.0 * lo - 1.0;
  while (f(hi) < target) hi = 2.0 * hi + 1.0;

  // Bisect to the floating-point resolution of the bracket so the reduced
  // residual is as smooth as the arithmetic allows.
  double best = hi;
  double best_err = std::abs(f(hi) - target);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    const double err = std::abs(fm - target);
    if (err < best_err) {
      best = mid;
      best_err = err;
    }
    if (fm < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (err <= tol) break;
  }
  return best;
}

std::vector<double> reduced_B_residual(const ProblemData& data, std::span<const double> u, double* kappa_out) {
  const double kappa = kappa_solve(data, u);
  if (kappa_out) *kappa_out = kappa;
  std::vector<double> shifted(u.begin(), u.end());
  for (double& x : shifted) x += kappa;
  return gradient(data, shifted);
}

double reduced_B_pairing(const ProblemData& data, std::span<const double> u, std::span<const double> v) {
  const auto r = reduced_B_residual(data, u);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r[i] * v[i];
  return s;
}

double minty_gap(const ProblemData& data, const SolutionState& state, std::size_t samples, std::uint64_t seed,
                 double* span_out) {
  if (span_out) *span_out = 0.0;
  if (samples == 0) return std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto u = state.u.values();
  TestTriplet diff;
  diff.mu.resize(state.m.size());
  diff.v.resize(u.size());
  diff.k.resize(state.h.size());
  double gap = std::numeric_limits<double>::infinity();
  double span = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    double l1 = 0.0;
    for (std::size_t e = 0; e < diff.mu.size(); ++e) diff.mu[e] = std::abs(normal(rng)) - state.m[e];
    for (std::size_t i = 0; i < diff.v.size(); ++i) {
      diff.v[i] = normal(rng) - u[i];
      l1 += std::abs(diff.v[i]);
    }
    span = std::max(span, l1);
    for (std::size_t k = 0; k < diff.k.size(); ++k) diff.k[k] = std::abs(normal(rng)) - state.h[k];
    gap = std::min(gap, pairing_A_eps(data, state, diff));
  }
  if (span_out) *span_out = span;
  return gap;
}

double quotient_norm_pow(const ProblemData& data, std::span<const double> u) {
  const Mesh& mesh = data.mesh();
  const double gamma = data.exponents().gamma;
  double s = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    s += mesh.element_measures()[e] * std::pow(norm(mesh.element_gradient(u, e)), gamma);
  }
  return s;
}

double quotient_norm(const ProblemData& data, std::span<const double> u) {
  return std::pow(quotient_norm_pow(data, u), 1.0 / data.exponents().gamma);
}

}  // namespace smfg
