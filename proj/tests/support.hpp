#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include <smfg/mesh.hpp>
#include <smfg/model.hpp>
#include <smfg/operator.hpp>

namespace smfg::test {

// Closed forms for the prototype with alpha = beta = 2, written out
// independently of the library: H = p^2 + 2, g_inv(z) = sqrt(z - 1),
// G(z) = (2/3)(z - 1)^{3/2}.
inline double proto_G(double z) { return z <= 1.0 ? 0.0 : 2.0 / 3.0 * std::pow(z - 1.0, 1.5); }

// q = -p* solves q^4 + q^2 - 1/4 = 0, so q^2 = (sqrt(2) - 1) / 2.
inline double oracle_p_star() { return -std::sqrt((std::sqrt(2.0) - 1.0) / 2.0); }
inline double oracle_m_star() { return std::sqrt(oracle_p_star() * oracle_p_star() + 1.0); }

inline std::shared_ptr<const Mesh> interval(std::size_t n, double a = 0.0, double b = 1.0) {
  return std::make_shared<const Mesh>(build_interval_mesh(a, b, n, BoundaryTag::neumann, BoundaryTag::dirichlet));
}

inline std::shared_ptr<const Mesh> square(std::size_t nx, std::size_t ny) {
  return std::make_shared<const Mesh>(build_rect_mesh(1.0, 1.0, nx, ny, RectTags{}));
}

inline ProblemData problem(std::shared_ptr<const Mesh> mesh, double eps, double j = 1.0, double alpha = 2.0,
                           double beta = 2.0) {
  auto models = prototype_models(alpha, beta);
  auto inflow = nodal_inflow(*mesh, j);
  return ProblemData(std::move(mesh), models.hamiltonian, models.coupling, models.exponents, std::move(inflow), eps);
}

inline std::vector<double> gaussian(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

inline std::vector<double> half_gaussian(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  auto v = gaussian(rng, n, scale);
  for (double& x : v) x = std::abs(x);
  return v;
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace smfg::test
