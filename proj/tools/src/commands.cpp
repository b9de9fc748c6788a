#include "smfg_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include <smfg/assumptions.hpp>
#include <smfg/diagnostics.hpp>
#include <smfg/error.hpp>
#include <smfg/oracle.hpp>
#include <smfg/solver.hpp>

#include "smfg_cli/config.hpp"
#include "smfg_cli/stats.hpp"

namespace smfg::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
  RunConfig cfg;
  fs::path out_dir;
};

Context resolve(const CommandOptions& opts) {
  Context ctx{load_config(opts.config), {}};
  if (opts.seed) ctx.cfg.seed = *opts.seed;
  ctx.out_dir = opts.output ? *opts.output : fs::path(ctx.cfg.output_dir);
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create output directory '{}': {}", ctx.out_dir.string(), ec.message()));
  return ctx;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

DiagnosticsOptions diagnostics_options(const RunConfig& cfg) {
  DiagnosticsOptions d;
  d.minty_samples = cfg.minty_samples;
  d.monotonicity_samples = cfg.monotonicity_samples;
  d.seed = cfg.seed;
  return d;
}

std::vector<ContinuationStage> solve_schedule(const Problem& problem, const RunConfig& cfg, bool quiet,
                                              std::ostream& out) {
  auto stages = continuation(problem.data, cfg.schedule, cfg.solver, diagnostics_options(cfg));
  if (!quiet) {
    for (const auto& s : stages) {
      fmt::print(out, "eps={:.6g} iterations={} grad={:.3e} flux_gap={:.3e}{}\n", s.state.epsilon, s.iterations,
                 s.diagnostics.grad_norm, s.diagnostics.flux_gap, s.converged ? "" : " (not converged)");
    }
  }
  return stages;
}

bool all_converged(const std::vector<ContinuationStage>& stages) {
  return std::all_of(stages.begin(), stages.end(), [](const auto& s) { return s.converged; });
}

void write_solution_csv(const fs::path& path, const Mesh& mesh, const SolutionState& state) {
  auto out = open_out(path);
  fmt::print(out, "kind,index,x,y,u,du_x,du_y,m\n");
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    const Vec& x = mesh.vertices()[i];
    fmt::print(out, "node,{},{:.17g},{:.17g},{:.17g},,,\n", i, x[0], x[1], state.u[i]);
  }
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const Vec& c = mesh.centroids()[e];
    const Vec du = state.u.gradient(e);
    fmt::print(out, "element,{},{:.17g},{:.17g},,{:.17g},{:.17g},{:.17g}\n", e, c[0], c[1], du[0], du[1], state.m[e]);
  }
}

void write_boundary_csv(const fs::path& path, const ProblemData& data, const SolutionState& state) {
  auto out = open_out(path);
  const Mesh& mesh = data.mesh();
  fmt::print(out, "kind,node,x,y,weight,u,h,j\n");
  const auto& wd = data.dirichlet();
  for (std::size_t k = 0; k < wd.size(); ++k) {
    const std::size_t i = wd.nodes[k];
    const Vec& x = mesh.vertices()[i];
    fmt::print(out, "dirichlet,{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},\n", i, x[0], x[1], wd.weights[k], state.u[i],
               state.h[k]);
  }
  const auto& wn = data.neumann();
  for (std::size_t k = 0; k < wn.size(); ++k) {
    const std::size_t i = wn.nodes[k];
    const Vec& x = mesh.vertices()[i];
    fmt::print(out, "neumann,{},{:.17g},{:.17g},{:.17g},{:.17g},,{:.17g}\n", i, x[0], x[1], wn.weights[k], state.u[i],
               data.inflow()[i]);
  }
}

void write_diagnostics_csv(const fs::path& path, const std::vector<ContinuationStage>& stages) {
  auto out = open_out(path);
  fmt::print(out, "{},iterations,converged\n", diagnostics_csv_header());
  for (const auto& s : stages) {
    fmt::print(out, "{},{},{}\n", diagnostics_csv_row(s.diagnostics), s.iterations, s.converged ? 1 : 0);
  }
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg,
                    const std::vector<ContinuationStage>& stages, const std::string& status) {
  nlohmann::ordered_json m;
  m["command"] = command;
  m["version"] = SMFG_VERSION;
  m["config_hash"] = fmt::format("{:016x}", config_hash(cfg));
  nlohmann::ordered_json resolved;
  for (const auto& [k, v] : canonical_entries(cfg)) resolved[k] = v;
  m["config"] = resolved;
  m["status"] = status;
  m["partial"] = !all_converged(stages);
  auto list = nlohmann::ordered_json::array();
  for (const auto& s : stages) {
    list.push_back({{"epsilon", s.state.epsilon},
                    {"iterations", s.iterations},
                    {"grad_norm", s.diagnostics.grad_norm},
                    {"converged", s.converged}});
  }
  m["stages"] = list;
  auto out = open_out(dir / "manifest.json");
  out << m.dump(2) << '\n';
}

// Setup failures are configuration errors; everything later is reported by
// the command itself.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const Error& e) {
    const bool numeric = e.code() == ErrorCode::QuadratureNonConvergence || e.code() == ErrorCode::BracketFailure;
    fmt::print(err, "{}: {}\n", numeric ? "numerical failure" : "config error", e.what());
    return numeric ? kNonConvergence : kConfigError;
  }
}

double max_positive_exit(const ProblemData& data, const SolutionState& state) {
  double out = 0.0;
  for (const std::size_t i : data.dirichlet().nodes) out = std::max(out, state.u[i]);
  return out;
}

}  // namespace

int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Context ctx = resolve(opts);
    const Problem problem = build_problem(ctx.cfg);
    const auto stages = solve_schedule(problem, ctx.cfg, opts.quiet, out);
    const auto& last = stages.back();
    const ProblemData final_data = problem.data.with_epsilon(last.state.epsilon);

    write_solution_csv(ctx.out_dir / "solution.csv", *problem.mesh, last.state);
    write_boundary_csv(ctx.out_dir / "boundary.csv", final_data, last.state);
    write_diagnostics_csv(ctx.out_dir / "diagnostics.csv", stages);
    {
      auto trace = open_out(ctx.out_dir / "trace.csv");
      write_trace_csv(trace, last.trace);
    }
    const bool ok = all_converged(stages);
    write_manifest(ctx.out_dir, "run", ctx.cfg, stages, ok ? "ok" : "max_iters_exceeded");
    if (!ok) {
      fmt::print(err, "solver did not reach tol_grad = {:g} in {} iterations\n", ctx.cfg.solver.tol_grad,
                 ctx.cfg.solver.max_iters);
      return static_cast<int>(kNonConvergence);
    }
    return static_cast<int>(kSuccess);
  });
}

int cmd_oracle_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Context ctx = resolve(opts);
    const RunConfig& cfg = ctx.cfg;
    if (cfg.domain != DomainKind::interval) throw ConfigError("oracle requires interval domain");
    if (cfg.a != 0.0 || cfg.b != 1.0) throw ConfigError("oracle requires the interval (0,1)");
    if (cfg.tags.left != BoundaryTag::neumann || cfg.tags.right != BoundaryTag::dirichlet) {
      throw ConfigError("oracle requires tags.left = neumann and tags.right = dirichlet");
    }
    if (!cfg.j_values.empty()) throw ConfigError("oracle requires a constant j");
    const Problem problem = build_problem(cfg);

    const auto stages = solve_schedule(problem, cfg, opts.quiet, out);
    const auto& last = stages.back();
    const double eps = last.state.epsilon;
    const ProblemData final_data = problem.data.with_epsilon(eps);
    const Oracle1DSolution oracle =
        solve_oracle_1d(problem.models.hamiltonian, problem.models.coupling, problem.models.exponents, cfg.j, eps);

    // Report the element farthest from the oracle for the elementwise fields.
    double p_solver = last.state.u.gradient(0)[0];
    double m_solver = last.state.m[0];
    for (std::size_t e = 1; e < problem.mesh->element_count(); ++e) {
      const double p = last.state.u.gradient(e)[0];
      if (std::abs(p - oracle.p_star) > std::abs(p_solver - oracle.p_star)) p_solver = p;
      if (std::abs(last.state.m[e] - oracle.m_star) > std::abs(m_solver - oracle.m_star)) m_solver = last.state.m[e];
    }

    struct Row {
      const char* name;
      double solver;
      double oracle;
      double scale;
    };
    const std::vector<Row> rows = {
        {"p_star", p_solver, oracle.p_star, std::abs(oracle.p_star)},
        {"m_star", m_solver, oracle.m_star, std::abs(oracle.m_star)},
        {"u_at_exit", last.state.u[problem.mesh->vertex_count() - 1], oracle.u_at_exit, std::abs(oracle.u_at_exit)},
        {"exit_flux", last.state.h.at(0), oracle.exit_flux, std::abs(oracle.exit_flux)},
        {"flux_gap", flux_balance(final_data, last.state), 0.0, final_data.inflow_total()},
    };

    bool within = true;
    {
      auto csv = open_out(ctx.out_dir / "compare.csv");
      fmt::print(csv, "quantity,solver,oracle,abs_err,rel_err\n");
      for (const auto& r : rows) {
        const double abs_err = std::abs(r.solver - r.oracle);
        const double rel_err = abs_err / r.scale;
        if (!(rel_err <= cfg.oracle_tolerance)) {
          within = false;
          fmt::print(err, "{}: rel_err {:.3e} exceeds {:g}\n", r.name, rel_err, cfg.oracle_tolerance);
        }
        fmt::print(csv, "{},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.name, r.solver, r.oracle, abs_err, rel_err);
      }
    }
    {
      auto csv = open_out(ctx.out_dir / "oracle.csv");
      write_oracle_csv(csv, oracle, problem.mesh->vertex_count());
    }
    write_diagnostics_csv(ctx.out_dir / "diagnostics.csv", stages);
    const bool ok = all_converged(stages);
    write_manifest(ctx.out_dir, "oracle-compare", cfg, stages,
                   !ok ? "max_iters_exceeded" : (within ? "ok" : "verification_breach"));
    if (!ok) return static_cast<int>(kNonConvergence);
    return static_cast<int>(within ? kSuccess : kVerificationBreach);
  });
}

int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Context ctx = resolve(opts);
    const RunConfig& cfg = ctx.cfg;
    if (cfg.schedule.eps_count < 3) throw ConfigError("sweep needs schedule.eps_count >= 3");
    const Problem problem = build_problem(cfg);
    const auto stages = solve_schedule(problem, cfg, opts.quiet, out);

    std::vector<double> eps, max_u, comp, apriori;
    {
      auto csv = open_out(ctx.out_dir / "rates.csv");
      fmt::print(csv, "epsilon,max_u_plus,complementarity_mass,apriori_value,flux_gap,h_drift\n");
      const std::vector<double>* prev_h = nullptr;
      for (const auto& s : stages) {
        // sup-norm change of the nodal exit flux since the previous stage; reported only
        double h_drift = 0.0;
        if (prev_h) {
          for (std::size_t k = 0; k < s.state.h.size(); ++k) h_drift = std::max(h_drift, std::abs(s.state.h[k] - (*prev_h)[k]));
        }
        prev_h = &s.state.h;
        const ProblemData d = problem.data.with_epsilon(s.state.epsilon);
        eps.push_back(s.state.epsilon);
        max_u.push_back(max_positive_exit(d, s.state));
        comp.push_back(s.diagnostics.complementarity_mass);
        apriori.push_back(s.diagnostics.apriori_value);
        fmt::print(csv, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", eps.back(), max_u.back(), comp.back(),
                   apriori.back(), s.diagnostics.flux_gap, h_drift);
      }
    }
    write_diagnostics_csv(ctx.out_dir / "diagnostics.csv", stages);

    const double expected = problem.models.exponents.gamma_conj;
    bool within = true;
    {
      auto csv = open_out(ctx.out_dir / "rate_fits.csv");
      fmt::print(csv, "quantity,value,half_width,expected,tolerance,passed\n");
      const auto slope_row = [&](const char* name, const std::vector<double>& y) {
        bool pass = false;
        LineFit fit;
        try {
          fit = fit_loglog(eps, y);
          pass = std::abs(fit.slope - expected) <= cfg.slope_tolerance * expected;
        } catch (const Error& e) {
          fmt::print(err, "{}: {}\n", name, e.what());
          fit.slope = fit.slope_half_width = std::nan("");
        }
        if (!pass) fmt::print(err, "{} slope {:.6g} outside {:g} +/- {:g}%\n", name, fit.slope, expected,
                              100.0 * cfg.slope_tolerance);
        within = within && pass;
        fmt::print(csv, "{}_slope,{:.17g},{:.17g},{:.17g},{:.17g},{}\n", name, fit.slope, fit.slope_half_width,
                   expected, cfg.slope_tolerance * expected, pass ? 1 : 0);
      };
      slope_row("max_u_plus", max_u);
      slope_row("complementarity_mass", comp);

      const auto [lo, hi] = std::minmax_element(apriori.begin(), apriori.end());
      const double drift = *hi / *lo;
      const bool pass = *lo > 0.0 && drift <= cfg.drift_max;
      if (!pass) fmt::print(err, "apriori drift factor {:.6g} exceeds {:g}\n", drift, cfg.drift_max);
      within = within && pass;
      fmt::print(csv, "apriori_drift,{:.17g},,,{:.17g},{}\n", drift, cfg.drift_max, pass ? 1 : 0);
    }

    const bool ok = all_converged(stages);
    write_manifest(ctx.out_dir, "sweep", cfg, stages,
                   !ok ? "max_iters_exceeded" : (within ? "ok" : "verification_breach"));
    if (!ok) return static_cast<int>(kNonConvergence);
    return static_cast<int>(within ? kSuccess : kVerificationBreach);
  });
}

int cmd_check(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Context ctx = resolve(opts);
    const RunConfig& cfg = ctx.cfg;
    const Problem problem = build_problem(cfg);

    SampleSpec samples;
    samples.dim = problem.mesh->dim();
    samples.seed = cfg.seed;
    if (!problem.models.hamiltonian.x_independent) {
      const auto c = problem.mesh->centroids();
      const std::size_t stride = std::max<std::size_t>(1, c.size() / 5);
      for (std::size_t e = 0; e < c.size(); e += stride) samples.x_points.push_back(c[e]);
    }
    const AssumptionReport report = check_structural_assumptions(
        problem.models.hamiltonian, problem.models.coupling, problem.models.exponents, samples);
    const double mono = monotonicity_probe(problem.data, cfg.monotonicity_samples, cfg.seed);
    const double fd = gradient_check(problem.data, cfg.fd_states, cfg.fd_delta, cfg.seed);

    bool all = true;
    auto csv = open_out(ctx.out_dir / "check.csv");
    fmt::print(csv, "check,value,threshold,fitted_constant,passed,witness\n");
    const auto row = [&](const std::string& name, double value, double threshold, double fitted, bool pass,
                         const std::string& witness) {
      const std::string fitted_text = std::isfinite(fitted) ? fmt::format("{:.17g}", fitted) : "";
      fmt::print(csv, "{},{:.17g},{:.17g},{},{},{}\n", csv_quote(name), value, threshold, fitted_text, pass ? 1 : 0,
                 csv_quote(witness));
      if (!pass) {
        all = false;
        fmt::print(err, "FAIL {}: {}\n", name, witness.empty() ? fmt::format("value {:.6g}", value) : witness);
      } else if (!opts.quiet) {
        fmt::print(out, "ok   {}\n", name);
      }
    };
    constexpr double kNone = std::numeric_limits<double>::quiet_NaN();
    for (const auto& c : report.checks) row(c.name, c.margin, 0.0, c.fitted_constant, c.passed, c.witness);
    row("monotonicity", mono, cfg.monotonicity_floor, kNone, mono >= cfg.monotonicity_floor, "");
    row("gradient_fd", fd, cfg.fd_tolerance, kNone, fd <= cfg.fd_tolerance, "");
    return static_cast<int>(all ? kSuccess : kVerificationBreach);
  });
}

}  // namespace smfg::cli
