#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <smfg/diagnostics.hpp>
#include <smfg/error.hpp>
#include <smfg/operator.hpp>
#include <smfg/solver.hpp>

#include "support.hpp"

using namespace smfg;

namespace {

// Energy for alpha = beta = 2 assembled from the closed forms only.
double reference_energy(const ProblemData& d, std::span<const double> u) {
  const Mesh& m = d.mesh();
  double e = 0.0;
  for (std::size_t t = 0; t < m.element_count(); ++t) {
    const Vec p = m.element_gradient(u, t);
    e += m.element_measures()[t] * test::proto_G(dot(p, p) + 2.0);
  }
  for (std::size_t k = 0; k < d.neumann().size(); ++k) {
    const std::size_t i = d.neumann().nodes[k];
    e -= d.neumann().weights[k] * d.inflow()[i] * u[i];
  }
  const double eps3 = std::pow(d.epsilon(), 3.0);
  for (std::size_t k = 0; k < d.dirichlet().size(); ++k) {
    const double up = std::max(u[d.dirichlet().nodes[k]], 0.0);
    e += d.dirichlet().weights[k] * up * up * up / (3.0 * eps3);
  }
  return e;
}

SolutionState random_state(const ProblemData& d, std::mt19937_64& rng) {
  return SolutionState{FeFunction(d.mesh(), test::gaussian(rng, d.mesh().vertex_count())),
                       test::half_gaussian(rng, d.mesh().element_count()),
                       test::half_gaussian(rng, d.dirichlet().size()), d.epsilon()};
}

}  // namespace

TEST_CASE("ProblemData validation") {
  auto mesh = test::interval(4);
  auto models = prototype_models(2, 2);
  CHECK_THROWS_AS(ProblemData(mesh, models.hamiltonian, models.coupling, models.exponents, nodal_inflow(*mesh, 1.0), 0.0),
                  Error);
  CHECK_THROWS_AS(ProblemData(mesh, models.hamiltonian, models.coupling, models.exponents, nodal_inflow(*mesh, 0.0), 0.1),
                  Error);
  std::vector<double> negative = nodal_inflow(*mesh, 1.0);
  negative[0] = -1.0;
  CHECK_THROWS_AS(ProblemData(mesh, models.hamiltonian, models.coupling, models.exponents, negative, 0.1), Error);
  CHECK_THROWS_AS(ProblemData(mesh, models.hamiltonian, models.coupling, models.exponents, {1.0}, 0.1), Error);
  const auto d = test::problem(mesh, 0.1, 2.5);
  CHECK(d.inflow_total() == doctest::Approx(2.5));
  CHECK(d.with_epsilon(0.05).epsilon() == 0.05);
}

TEST_CASE("energy at constants") {
  for (const auto& mesh : {test::interval(8), test::square(3, 3)}) {
    const auto d = test::problem(mesh, 0.1);
    const std::vector<double> zero(mesh->vertex_count(), 0.0);
    CHECK(energy(d, zero) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    for (double c : {-3.0, -0.5, 0.2, 1.7}) {
      const std::vector<double> u(mesh->vertex_count(), c);
      const double penalty = c > 0.0 ? c * c * c / (3.0 * 1e-3) : 0.0;
      CHECK(energy(d, u) == doctest::Approx(2.0 / 3.0 - c + penalty).epsilon(1e-12));
    }
    // coercive against constants of either sign
    CHECK(energy(d, std::vector<double>(mesh->vertex_count(), -1e3)) > 1e2);
    CHECK(energy(d, std::vector<double>(mesh->vertex_count(), 1e3)) > 1e2);
  }
}

TEST_CASE("energy agrees with the closed-form assembly") {
  std::mt19937_64 rng(21);
  for (const auto& mesh : {test::interval(16), test::square(4, 4)}) {
    const auto d = test::problem(mesh, 0.2, 1.3);
    for (int s = 0; s < 50; ++s) {
      const auto u = test::gaussian(rng, mesh->vertex_count());
      CHECK(energy(d, u) == doctest::Approx(reference_energy(d, u)).epsilon(1e-11));
    }
  }
}

TEST_CASE("gradient at u = 0 is the inflow load") {
  const auto mesh = test::interval(8);
  const auto d = test::problem(mesh, 0.1);
  const auto g = gradient(d, std::vector<double>(mesh->vertex_count(), 0.0));
  CHECK(g[0] == doctest::Approx(-1.0));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(1234);
  for (const auto& mesh : {test::interval(16), test::square(4, 4)}) {
    for (double beta : {1.0, 2.0}) {
      const auto d = test::problem(mesh, 0.15, 1.0, 2.0, beta);
      CHECK(gradient_check(d, 20, 1e-6, rng()) <= 1e-5);
    }
    // odd alpha exercises the non-polynomial Hamiltonian branch
    const auto d = test::problem(mesh, 0.3, 0.7, 2.5, 1.5);
    CHECK(gradient_check(d, 20, 1e-6, rng()) <= 1e-5);
  }
}

TEST_CASE("energy_and_gradient is consistent with the separate calls") {
  std::mt19937_64 rng(2);
  const auto mesh = test::square(3, 5);
  const auto d = test::problem(mesh, 0.1);
  const auto u = test::gaussian(rng, mesh->vertex_count());
  std::vector<double> g(u.size());
  const double e = energy_and_gradient(d, u, g);
  CHECK(e == doctest::Approx(energy(d, u)).epsilon(1e-14));
  const auto g2 = gradient(d, u);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(g2[i]).epsilon(1e-14).scale(1.0));
}

TEST_CASE("constant test direction sees only the boundary terms") {
  std::mt19937_64 rng(8);
  for (const auto& mesh : {test::interval(10), test::square(4, 3)}) {
    const auto d = test::problem(mesh, 0.1);
    const double eps3 = 1e-3;
    for (int s = 0; s < 20; ++s) {
      const auto u = test::gaussian(rng, mesh->vertex_count(), 0.2);
      const auto g = gradient(d, u);
      double paired = 0.0;
      for (double x : g) paired += x;
      double expected = -d.inflow_total();
      for (std::size_t k = 0; k < d.dirichlet().size(); ++k) {
        const double up = std::max(u[d.dirichlet().nodes[k]], 0.0);
        expected += d.dirichlet().weights[k] * up * up / eps3;
      }
      CHECK(paired == doctest::Approx(expected).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("recover_density") {
  const auto mesh = test::interval(4);
  const auto d = test::problem(mesh, 0.1);
  const auto m0 = recover_density(d, std::vector<double>(5, 0.0));
  for (double m : m0) CHECK(m == doctest::Approx(1.0));

  const double p = -0.45509;
  const auto u = FeFunction::interpolate(*mesh, [p](const Vec& x) { return p * x[0]; });
  for (double m : recover_density(d, u.values())) CHECK(m == doctest::Approx(1.09868).epsilon(1e-5));

  // H(0) below g(0) gives zero density
  auto models = prototype_models(2, 2);
  HamiltonianModel low = models.hamiltonian;
  low.eval = [](const Vec&, const Vec& q) { return dot(q, q) + 0.5; };
  low.grad_p = [](const Vec&, const Vec& q) { return 2.0 * q; };
  const ProblemData dl(mesh, low, models.coupling, models.exponents, nodal_inflow(*mesh, 1.0), 0.1);
  for (double m : recover_density(dl, std::vector<double>(5, 0.0))) CHECK(m == 0.0);

  // complementarity -H + g(m) >= 0 and m (-H + g(m)) = 0 elementwise
  std::mt19937_64 rng(4);
  for (const auto* data : {&d, &dl}) {
    for (int s = 0; s < 20; ++s) {
      const auto v = test::gaussian(rng, 5, 0.4);
      const auto m = recover_density(*data, v);
      for (std::size_t e = 0; e < m.size(); ++e) {
        const double H = data->hamiltonian()(mesh->centroids()[e], mesh->element_gradient(v, e));
        const double gap = -H + data->coupling().g(m[e]);
        CHECK(gap >= -1e-10 * std::max(1.0, H));
        CHECK(std::abs(m[e] * gap) <= 1e-10 * std::max(1.0, H));
      }
    }
  }
}

TEST_CASE("recover_boundary_flux and the nodal Signorini identities") {
  const auto mesh = test::interval(4);
  const auto d = test::problem(mesh, 0.1);
  std::vector<double> u(5, 0.0);
  CHECK(recover_boundary_flux(d, u)[0] == 0.0);
  u[4] = 0.0316228;
  CHECK(recover_boundary_flux(d, u)[0] == doctest::Approx(1.0).epsilon(1e-5));
  u[4] = -0.3;
  CHECK(recover_boundary_flux(d, u)[0] == 0.0);

  std::mt19937_64 rng(6);
  const auto d2 = test::problem(test::square(5, 5), 0.07);
  for (int s = 0; s < 50; ++s) {
    const auto v = test::gaussian(rng, d2.mesh().vertex_count(), 0.05);
    const auto h = recover_boundary_flux(d2, v);
    const double eg = std::pow(0.07, 1.5);
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double ui = v[d2.dirichlet().nodes[k]];
      const double row = -ui + eg * std::pow(h[k], 0.5);
      CHECK(h[k] >= 0.0);
      CHECK(std::abs(row - std::max(-ui, 0.0)) <= 1e-12);
      CHECK(std::abs(h[k] * std::max(-ui, 0.0)) <= 1e-12);
    }
  }
}

TEST_CASE("pairing at a stationary state") {
  const auto mesh = test::interval(16);
  const auto d = test::problem(mesh, 0.1);
  SolverOptions opts;
  opts.tol_grad = 1e-12;
  const auto r = minimize_energy(d, FeFunction(*mesh), opts);
  REQUIRE(r.converged);
  const auto s = complete_state(d, r.u);

  TestTriplet self{s.m, std::vector<double>(s.u.values().begin(), s.u.values().end()), s.h};
  CHECK(std::abs(pairing_A_eps(d, s, self)) <= 1e-10);
  TestTriplet zero{std::vector<double>(s.m.size()), std::vector<double>(s.u.size()), std::vector<double>(s.h.size())};
  CHECK(zero.admissible());
  CHECK(pairing_A_eps(d, s, zero) == 0.0);

  std::mt19937_64 rng(10);
  for (int k = 0; k < 50; ++k) {
    TestTriplet t{test::half_gaussian(rng, s.m.size()), self.v, s.h};
    CHECK(t.admissible());
    CHECK(pairing_A_eps(d, s, t) >= -1e-10);
  }
  TestTriplet bad = zero;
  bad.mu[0] = -1.0;
  CHECK_FALSE(bad.admissible());
}

TEST_CASE("A_0 differs from A_eps only in the penalty row") {
  std::mt19937_64 rng(12);
  const auto d = test::problem(test::square(3, 3), 0.2);
  for (int s = 0; s < 20; ++s) {
    const auto st = random_state(d, rng);
    TestTriplet t{test::gaussian(rng, st.m.size()), test::gaussian(rng, st.u.size()), test::gaussian(rng, st.h.size())};
    double penalty = 0.0;
    for (std::size_t k = 0; k < st.h.size(); ++k) {
      penalty += d.dirichlet().weights[k] * std::pow(0.2, 1.5) * std::sqrt(st.h[k]) * t.k[k];
    }
    CHECK(pairing_A_eps(d, st, t) - pairing_A_zero(d, st, t) == doctest::Approx(penalty).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("monotonicity of A_eps on random pairs") {
  std::mt19937_64 rng(99);
  for (const auto& mesh : {test::interval(16), test::square(4, 4)}) {
    for (double eps : {0.05, 0.5}) {
      const auto d = test::problem(mesh, eps);
      double worst = std::numeric_limits<double>::infinity();
      for (int s = 0; s < 300; ++s) {
        const auto x = random_state(d, rng);
        auto y = random_state(d, rng);
        if (s % 3 == 0) y.u = x.u;
        worst = std::min(worst, monotonicity_pairing(d, x, y));
        CHECK(monotonicity_pairing(d, x, x) == 0.0);
      }
      CHECK(worst >= -1e-10);
      CHECK(monotonicity_probe(d, 200, rng()) >= -1e-10);
    }
  }
}

TEST_CASE("monotonicity probe detects a decreasing coupling") {
  const auto mesh = test::interval(16);
  auto models = prototype_models(2, 2);
  const CouplingModel decreasing([](double m) { return 10.0 - m; }, 2.0, [](double z) { return std::max(10.0 - z, 0.0); });
  const ProblemData d(mesh, models.hamiltonian, decreasing, models.exponents, nodal_inflow(*mesh, 1.0), 0.1);
  CHECK(monotonicity_probe(d, 200, 1) < 0.0);
}

TEST_CASE("kappa_solve") {
  auto mesh = test::interval(4);
  CHECK(kappa_solve(test::problem(mesh, 1.0), std::vector<double>(5, 0.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(kappa_solve(test::problem(mesh, 0.1), std::vector<double>(5, 0.0)) ==
        doctest::Approx(std::sqrt(1e-3)).epsilon(1e-14));
  // eps = 1: kappa(0) = (J / |Γ_D|)^{gamma' - 1}
  const auto d2 = test::problem(test::square(4, 4), 1.0, 2.0);
  CHECK(kappa_solve(d2, std::vector<double>(25, 0.0)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));

  // shift equivariance and the defining equation on random data
  std::mt19937_64 rng(17);
  const auto d = test::problem(test::square(4, 4), 0.1, 1.0);
  for (int s = 0; s < 30; ++s) {
    const auto u = test::gaussian(rng, 25);
    const double k = kappa_solve(d, u);
    double f = 0.0;
    for (std::size_t i = 0; i < d.dirichlet().size(); ++i) {
      const double v = std::max(u[d.dirichlet().nodes[i]] + k, 0.0);
      f += d.dirichlet().weights[i] * v * v;
    }
    CHECK(f == doctest::Approx(1e-3).epsilon(1e-10));
    auto shifted = u;
    for (double& x : shifted) x += 0.37;
    CHECK(kappa_solve(d, shifted) == doctest::Approx(k - 0.37).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("reduced residual annihilates constants and is shift invariant") {
  std::mt19937_64 rng(31);
  for (const auto& mesh : {test::interval(12), test::square(4, 4)}) {
    const auto d = test::problem(mesh, 0.1);
    const std::vector<double> ones(mesh->vertex_count(), 1.0);
    for (int s = 0; s < 20; ++s) {
      const auto u = test::gaussian(rng, mesh->vertex_count());
      CHECK(std::abs(reduced_B_pairing(d, u, ones)) <= 1e-12);
      double kappa = 0.0;
      const auto r = reduced_B_residual(d, u, &kappa);
      auto shifted = u;
      for (double& x : shifted) x -= 2.5;
      const auto r2 = reduced_B_residual(d, shifted);
      for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(r2[i]).epsilon(1e-9).scale(1.0));

      // with u already compatible the residual is the plain gradient
      auto compatible = u;
      for (double& x : compatible) x += kappa;
      const auto g = gradient(d, compatible);
      for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(g[i]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("minty gap") {
  const auto mesh = test::interval(8);
  const auto d = test::problem(mesh, 0.1);
  SolverOptions opts;
  opts.tol_grad = 1e-12;
  const auto r = minimize_energy(d, FeFunction(*mesh), opts);
  const auto s = complete_state(d, r.u);
  CHECK(minty_gap(d, s, 0, 1) == std::numeric_limits<double>::infinity());
  double span = 0.0;
  const double gap = minty_gap(d, s, 1000, 1, &span);
  CHECK(span > 0.0);
  CHECK(gap >= -(opts.tol_grad * span + 1e-10));

  auto perturbed = s;
  perturbed.u[3] += 0.3;
  perturbed = complete_state(d, perturbed.u);
  CHECK(minty_gap(d, perturbed, 1000, 1) < 0.0);
  // seeds make it reproducible
  CHECK(minty_gap(d, perturbed, 100, 5) == minty_gap(d, perturbed, 100, 5));
}

TEST_CASE("quotient norm vanishes exactly on constants") {
  std::mt19937_64 rng(40);
  const auto d = test::problem(test::square(3, 3), 0.1);
  CHECK(quotient_norm(d, std::vector<double>(16, 4.2)) == 0.0);
  for (int s = 0; s < 20; ++s) {
    const auto u = test::gaussian(rng, 16);
    CHECK(quotient_norm(d, u) > 0.0);
    auto shifted = u;
    for (double& x : shifted) x += 3.0;
    CHECK(quotient_norm(d, shifted) == doctest::Approx(quotient_norm(d, u)).epsilon(1e-12));
    auto scaled = u;
    for (double& x : scaled) x *= -2.0;
    CHECK(quotient_norm(d, scaled) == doctest::Approx(2.0 * quotient_norm(d, u)).epsilon(1e-12));
  }
}
