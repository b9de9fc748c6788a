#include "smfg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "smfg/error.hpp"

namespace smfg {

Oracle1DSolution solve_oracle_1d(const HamiltonianModel& ham, const CouplingModel& coupling,
                                 const ExponentConfig& cfg, double j0, double eps, double tol) {
  if (!(j0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "oracle needs j0 > 0");
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "oracle needs eps > 0");
  if (!ham.x_independent) throw Error(ErrorCode::InvalidArgument, "oracle needs an x-independent Hamiltonian");

  const Vec x0{0.0, 0.0};
  const auto flux = [&](double p) {
    const Vec pv{p, 0.0};
    return coupling.g_inv(ham(x0, pv)) * ham.grad_p(x0, pv)[0];
  };

  double hi = -1e-14;
  if (flux(hi) <= -j0) throw Error(ErrorCode::NoRoot, "flux already below -j0 at p = 0-");
  double lo = -1.0;
  int doublings = 0;
  while (!(flux(lo) <= -j0)) {
    if (++doublings > 60) throw Error(ErrorCode::NoRoot, fmt::format("cannot bracket flux -j0 = {}", -j0));
    hi = lo;
    lo *= 2.0;
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= tol) break;
    if (flux(mid) <= -j0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double p = std::abs(flux(lo) + j0) <= std::abs(flux(hi) + j0) ? lo : hi;

  Oracle1DSolution sol;
  sol.p_star = p;
  sol.m_star = coupling.g_inv(ham(x0, Vec{p, 0.0}));
  sol.exit_flux = j0;
  sol.u_at_exit = std::pow(eps, cfg.gamma_conj) * std::pow(j0, cfg.gamma_conj - 1.0);
  return sol;
}

double brute_force_lattice_diameter(std::size_t resolution, double spacing) {
  if (resolution == 0) return 0.0;
  return spacing * static_cast<double>(resolution - 1) / 2.0;
}

double brute_force_vi(const ProblemData& data, const SolutionState& state, std::size_t resolution,
                      double spacing) {
  const Mesh& mesh = data.mesh();
  if (mesh.vertex_count() > 6) {
    throw Error(ErrorCode::InstanceTooLarge, fmt::format("{} vertices; brute force allows at most 6", mesh.vertex_count()));
  }
  if (resolution == 0) throw Error(ErrorCode::InvalidArgument, "lattice resolution must be positive");
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "lattice spacing must be positive");

  const std::size_t ne = state.m.size();
  const std::size_t nv = state.u.size();
  const std::size_t nh = state.h.size();
  const std::size_t dims = ne + nv + nh;
  const double half = static_cast<double>(resolution - 1) / 2.0;

  std::vector<std::size_t> index(dims, 0);
  TestTriplet t{std::vector<double>(ne), std::vector<double>(nv), std::vector<double>(nh)};
  const auto offset = [&](std::size_t c) { return spacing * (static_cast<double>(index[c]) - half); };

  double worst = std::numeric_limits<double>::infinity();
  while (true) {
    for (std::size_t e = 0; e < ne; ++e) t.mu[e] = std::max(state.m[e] + offset(e), 0.0) - state.m[e];
    for (std::size_t i = 0; i < nv; ++i) t.v[i] = offset(ne + i);
    for (std::size_t k = 0; k < nh; ++k) t.k[k] = std::max(state.h[k] + offset(ne + nv + k), 0.0) - state.h[k];
    worst = std::min(worst, pairing_A_eps(data, state, t));

    std::size_t c = 0;
    while (c < dims && ++index[c] == resolution) index[c++] = 0;
    if (c == dims) break;
  }
  return worst;
}

void write_oracle_csv(std::ostream& out, const Oracle1DSolution& sol, std::size_t points) {
  fmt::print(out, "x,u,Du,m\n");
  for (std::size_t i = 0; i < points; ++i) {
    const double x = points > 1 ? static_cast<double>(i) / static_cast<double>(points - 1) : 0.0;
    fmt::print(out, "{:.17g},{:.17g},{:.17g},{:.17g}\n", x, sol.profile(x), sol.p_star, sol.m_star);
  }
}

}  // namespace smfg
