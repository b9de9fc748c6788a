// Acceptance suite: one PASS/FAIL line per check, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <smfg/diagnostics.hpp>
#include <smfg/oracle.hpp>
#include <smfg/solver.hpp>

#include "support.hpp"

using namespace smfg;

namespace {

constexpr double kTol = 1e-11;  // tol_grad for every solve below

SolverOptions solver_options() {
  SolverOptions o;
  o.tol_grad = kTol;
  return o;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double slope_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

double du_distance(const ProblemData& d, const FeFunction& a, const FeFunction& b) {
  const Mesh& m = d.mesh();
  double s = 0.0;
  for (std::size_t e = 0; e < m.element_count(); ++e) {
    s += m.element_measures()[e] * std::pow(norm(a.gradient(e) - b.gradient(e)), d.exponents().gamma);
  }
  return std::pow(s, 1.0 / d.exponents().gamma);
}

double max_exit_u(const ProblemData& d, const SolutionState& s) {
  double out = 0.0;
  for (std::size_t i : d.dirichlet().nodes) out = std::max(out, s.u[i]);
  return out;
}

double signorini_defect(const ProblemData& d, const SolutionState& s) {
  const double gc = d.exponents().gamma_conj;
  const double eg = std::pow(d.epsilon(), gc);
  double worst = 0.0;
  for (std::size_t k = 0; k < s.h.size(); ++k) {
    const double u = s.u[d.dirichlet().nodes[k]];
    const double u_minus = std::max(-u, 0.0);
    const double row = -u + eg * std::pow(s.h[k], gc - 1.0);
    worst = std::max({worst, std::abs(row - u_minus), std::abs(s.h[k] * u_minus)});
  }
  return worst;
}

double apriori_drift(const std::vector<ContinuationStage>& stages) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& s : stages) {
    lo = std::min(lo, s.diagnostics.apriori_value);
    hi = std::max(hi, s.diagnostics.apriori_value);
  }
  return hi / lo;
}

// Checks 3, 5 (sampled part) and 6 on a finished continuation run.
void check_stages(const ProblemData& base, const std::vector<ContinuationStage>& stages, Outcome& c3, Outcome& c5,
                  Outcome& c6, const char* label) {
  const double drift = apriori_drift(stages);
  c3.require(drift <= 10.0, fmt("drift %.3g", drift) + " (" + label + ")");
  for (const auto& s : stages) {
    const ProblemData d = base.with_epsilon(s.state.epsilon);
    const auto& r = s.diagnostics;
    c5.require(s.converged, std::string(label) + " stage not converged");
    c5.require(r.minty_gap >= -(kTol * r.minty_span + 1e-10), fmt("minty %.3g", r.minty_gap) + " (" + label + ")");
    c6.require(s.converged, std::string(label) + " stage not converged");
    c6.require(std::abs(r.flux_gap) <= 1e-8, fmt("flux_gap %.3g", r.flux_gap) + " (" + label + ")");
    c6.require(r.energy_identity_residual <= 1e-8,
               fmt("energy_identity %.3g", r.energy_identity_residual) + " (" + label + ")");
    const double sig = signorini_defect(d, s.state);
    c6.require(sig <= 1e-12, fmt("signorini %.3g", sig) + " (" + label + ")");
  }
}

void report(int id, const char* name, const Outcome& o, const std::string& summary, int& failures) {
  std::printf("%s  %2d %-28s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.pass ? summary.c_str() : o.detail.c_str());
  if (!o.pass) ++failures;
}

}  // namespace

int main() {
  int failures = 0;
  const auto models = prototype_models(2.0, 2.0);
  const SolverOptions opts = solver_options();

  // 1. Oracle equivalence.
  const auto mesh64 = test::interval(64);
  const ProblemData oracle_data = test::problem(mesh64, 0.1);
  std::optional<SolutionState> oracle_state;
  {
    Outcome c;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = minimize_energy(oracle_data, FeFunction(*mesh64), opts);
    oracle_state.emplace(complete_state(oracle_data, r.u));
    const auto o = solve_oracle_1d(models.hamiltonian, models.coupling, models.exponents, 1.0, 0.1);
    const double elapsed = seconds_since(t0);
    double worst_p = 0.0, worst_m = 0.0;
    for (std::size_t e = 0; e < mesh64->element_count(); ++e) {
      worst_p = std::max(worst_p, test::rel_err(r.u.gradient(e)[0], -0.4550899));
      worst_m = std::max(worst_m, test::rel_err(oracle_state->m[e], 1.0986841));
      worst_p = std::max(worst_p, test::rel_err(r.u.gradient(e)[0], o.p_star));
      worst_m = std::max(worst_m, test::rel_err(oracle_state->m[e], o.m_star));
    }
    c.require(r.converged, "not converged");
    c.require(worst_p <= 1e-6, fmt("Du rel err %.3g", worst_p));
    c.require(worst_m <= 1e-6, fmt("m rel err %.3g", worst_m));
    c.require(elapsed <= 5.0, fmt("%.2f s", elapsed));
    report(1, "oracle equivalence (1D)", c,
           fmt("Du rel %.2e", worst_p) + fmt(", m rel %.2e", worst_m) + fmt(", %.3f s", elapsed), failures);
  }

  // 2. Penalty-limit rate (and the sweep reused by 3, 5, 6).
  DiagnosticsOptions diag;
  diag.minty_samples = 1000;
  diag.monotonicity_samples = 0;
  diag.seed = 2024;
  ContinuationSchedule sweep;  // 0.2 * 2^-k, k = 0..5
  std::vector<ContinuationStage> stages1d;
  {
    Outcome c;
    const auto t0 = std::chrono::steady_clock::now();
    stages1d = continuation(oracle_data.with_epsilon(sweep.eps_start), sweep, opts, diag);
    const double elapsed = seconds_since(t0);
    std::vector<double> eps, umax;
    double worst = 0.0;
    for (const auto& s : stages1d) {
      c.require(s.converged, fmt("eps %.4g not converged", s.state.epsilon));
      const double want = std::pow(s.state.epsilon, 1.5);
      const double got = max_exit_u(oracle_data, s.state);
      worst = std::max(worst, test::rel_err(got, want));
      eps.push_back(s.state.epsilon);
      umax.push_back(got);
    }
    const double slope = slope_loglog(eps, umax);
    c.require(stages1d.size() == 6 && std::abs(eps.back() - 0.00625) < 1e-15, "wrong schedule");
    c.require(worst <= 1e-5, fmt("per-stage rel err %.3g", worst));
    c.require(std::abs(slope - 1.5) <= 0.02 * 1.5, fmt("slope %.6f", slope));
    c.require(elapsed <= 60.0, fmt("%.2f s", elapsed));
    report(2, "penalty-limit rate", c,
           fmt("slope %.6f", slope) + fmt(", worst rel %.2e", worst) + fmt(", %.3f s", elapsed), failures);
  }

  Outcome c3, c5, c6;
  check_stages(oracle_data, stages1d, c3, c5, c6, "1D");

  // 3. A priori uniformity.
  report(3, "a priori uniformity", c3, fmt("drift factor %.4f", apriori_drift(stages1d)), failures);

  // 4. Monotonicity.
  {
    Outcome c;
    const ProblemData d1 = test::problem(test::interval(16), 0.1);
    const ProblemData d2 = test::problem(test::square(4, 4), 0.1);
    const double m1 = monotonicity_probe(d1, 1000, 11);
    const double m2 = monotonicity_probe(d2, 1000, 12);
    c.require(m1 >= -1e-10, fmt("1D min %.3g", m1));
    c.require(m2 >= -1e-10, fmt("2D min %.3g", m2));
    report(4, "monotonicity", c, fmt("min 1D %.3e", m1) + fmt(", 2D %.3e", m2), failures);
  }

  // 5. Minty / VI certification.
  {
    const double oracle_gap_span = [&] {
      double span = 0.0;
      const double gap = minty_gap(oracle_data, *oracle_state, 1000, 77, &span);
      c5.require(gap >= -(kTol * span + 1e-10), fmt("oracle-state minty %.3g", gap));
      return gap;
    }();
    const auto mesh2 = test::interval(2);
    const ProblemData tiny = test::problem(mesh2, 0.1);
    const auto r = minimize_energy(tiny, FeFunction(*mesh2), opts);
    const double brute = brute_force_vi(tiny, complete_state(tiny, r.u), 5, 0.5);
    c5.require(r.converged, "2-element solve not converged");
    c5.require(brute >= -1e-8, fmt("brute force %.3g", brute));
    double worst = oracle_gap_span;
    for (const auto& s : stages1d) worst = std::min(worst, s.diagnostics.minty_gap);
    report(5, "Minty / VI certification", c5, fmt("min sampled gap %.3e", worst) + fmt(", brute force %.3e", brute),
           failures);
  }

  // 6. Stationarity identities.
  {
    double flux = 0.0, ident = 0.0, sig = 0.0;
    for (const auto& s : stages1d) {
      flux = std::max(flux, std::abs(s.diagnostics.flux_gap));
      ident = std::max(ident, s.diagnostics.energy_identity_residual);
      sig = std::max(sig, signorini_defect(oracle_data.with_epsilon(s.state.epsilon), s.state));
    }
    report(6, "stationarity identities", c6,
           fmt("flux %.2e", flux) + fmt(", energy %.2e", ident) + fmt(", signorini %.2e", sig), failures);
  }

  // 7. Gradient correctness.
  {
    Outcome c;
    const double e1 = gradient_check(test::problem(test::interval(16), 0.1), 50, 1e-6, 7);
    const double e2 = gradient_check(test::problem(test::square(4, 4), 0.1), 50, 1e-6, 8);
    c.require(e1 <= 1e-5, fmt("1D rel err %.3g", e1));
    c.require(e2 <= 1e-5, fmt("2D rel err %.3g", e2));
    report(7, "gradient correctness", c, fmt("rel err 1D %.2e", e1) + fmt(", 2D %.2e", e2), failures);
  }

  // 8. Quotient-path agreement.
  {
    Outcome c;
    const auto direct = minimize_energy(oracle_data, FeFunction(*mesh64), opts);
    const auto reduced = solve_reduced(oracle_data, FeFunction(*mesh64), opts);
    const double d1 = du_distance(oracle_data, direct.u, reduced.u_star);
    const double k1 = std::abs(kappa_solve(oracle_data, direct.u.values()));

    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> uni(0.05, 0.3);
    const auto mesh = test::square(8, 8);
    const ProblemData rnd = test::problem(mesh, uni(rng), 0.5 + uni(rng));
    const FeFunction start(*mesh, test::gaussian(rng, mesh->vertex_count()));
    const auto direct2 = minimize_energy(rnd, start, opts);
    const auto reduced2 = solve_reduced(rnd, start, opts);
    const double d2 = du_distance(rnd, direct2.u, reduced2.u_star);
    const double k2 = std::abs(kappa_solve(rnd, direct2.u.values()));

    c.require(direct.converged && reduced.converged && direct2.converged && reduced2.converged, "not converged");
    c.require(d1 <= 10 * kTol, fmt("oracle |Du diff| %.3g", d1));
    c.require(d2 <= 10 * kTol, fmt("2D |Du diff| %.3g", d2));
    c.require(k1 <= 1e-8 && k2 <= 1e-8, fmt("kappa %.3g", std::max(k1, k2)));
    report(8, "quotient-path agreement", c,
           fmt("Du diff %.2e", d1) + fmt(" / %.2e", d2) + fmt(", kappa %.2e", std::max(k1, k2)), failures);
  }

  // 9. Normal trace (1D).
  {
    Outcome c;
    double interior = 0.0, boundary = 0.0;
    const auto nt0 = normal_trace_check(oracle_data, *oracle_state);
    interior = nt0.interior_defect;
    boundary = nt0.boundary_gap;
    for (const auto& s : stages1d) {
      const auto nt = normal_trace_check(oracle_data.with_epsilon(s.state.epsilon), s.state);
      interior = std::max(interior, nt.interior_defect);
      boundary = std::max(boundary, nt.boundary_gap);
    }
    c.require(interior <= 1e-8, fmt("flux constancy %.3g", interior));
    c.require(boundary <= 1e-8, fmt("|h + m DpH.nu| %.3g", boundary));
    report(9, "normal trace (1D)", c, fmt("flux constancy %.2e", interior) + fmt(", exit %.2e", boundary), failures);
  }

  // 10. 2D smoke.
  {
    Outcome c, s3, s5, s6;
    const auto t0 = std::chrono::steady_clock::now();
    const ProblemData d = test::problem(test::square(16, 16), 0.2);
    ContinuationSchedule sched;
    sched.eps_count = 4;
    DiagnosticsOptions dopt;
    dopt.minty_samples = 1000;
    dopt.monotonicity_samples = 1000;
    dopt.seed = 99;
    const auto stages = continuation(d, sched, opts, dopt);
    const double elapsed = seconds_since(t0);
    check_stages(d, stages, s3, s5, s6, "2D");
    double mono = std::numeric_limits<double>::infinity();
    for (const auto& s : stages) mono = std::min(mono, s.diagnostics.monotonicity_min);
    c.require(stages.size() == 4, "wrong stage count");
    c.require(s3.pass, s3.detail);
    c.require(mono >= -1e-10, fmt("monotonicity %.3g", mono));
    c.require(s5.pass, s5.detail);
    c.require(s6.pass, s6.detail);
    c.require(elapsed <= 120.0, fmt("%.2f s", elapsed));
    report(10, "2D smoke", c,
           fmt("drift %.3f", apriori_drift(stages)) + fmt(", monotonicity %.2e", mono) + fmt(", %.2f s", elapsed),
           failures);
  }

  std::printf("%d of 10 checks failed\n", failures);
  return failures == 0 ? 0 : 1;
}
