#include "smfg/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <fmt/format.h>

namespace smfg {

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const AssumptionCheck* AssumptionReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

constexpr double kSlack = 1e-10;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string describe(const Vec& x, const Vec& p, int dim) {
  if (dim == 1) return fmt::format("x={:.6g} p={:.6g}", x[0], p[0]);
  return fmt::format("x=({:.6g},{:.6g}) p=({:.6g},{:.6g})", x[0], x[1], p[0], p[1]);
}

// Accumulates one two-sided-constant bound
//   value >= a / C - C      (lower)   or   value <= C a + C   (upper)
// and tracks the worst margin against the declared constant and the smallest
// constant that makes the bound hold on every sample.
class BoundProbe {
 public:
  BoundProbe(std::string name, double declared) : declared_(declared) { check_.name = std::move(name); }

  void lower(double value, double a, const std::string& where) {
    if (!std::isfinite(value)) return record(-std::numeric_limits<double>::infinity(), where);
    // a / C - C <= value  <=>  C >= (-value + sqrt(value^2 + 4a)) / 2
    fit(0.5 * (-value + std::sqrt(value * value + 4.0 * a)));
    record(value - (a / declared_ - declared_), where);
  }

  void upper(double value, double a, const std::string& where) {
    if (!std::isfinite(value)) return record(-std::numeric_limits<double>::infinity(), where);
    fit(value / (a + 1.0));
    record(declared_ * a + declared_ - value, where);
  }

  // Bound of the form value <= C with no growth term.
  void bounded_above(double value, const std::string& where) {
    fit(value);
    record(declared_ - value, where);
  }

  // value >= -C
  void bounded_below(double value, const std::string& where) {
    fit(-value);
    record(value + declared_, where);
  }

  void require(bool ok, const std::string& where) {
    if (!ok) record(-std::numeric_limits<double>::infinity(), where);
  }

  AssumptionCheck finish() && {
    check_.margin = worst_;
    check_.fitted_constant = fitted_;
    check_.passed = worst_ >= -kSlack * std::max(1.0, declared_);
    return std::move(check_);
  }

 private:
  void fit(double c) { fitted_ = std::max(fitted_, c); }

  void record(double margin, const std::string& where) {
    if (margin < worst_ || std::isnan(margin)) {
      worst_ = std::isnan(margin) ? -std::numeric_limits<double>::infinity() : margin;
      check_.witness = where;
    }
  }

  double declared_;
  double worst_ = std::numeric_limits<double>::infinity();
  double fitted_ = 1.0;
  AssumptionCheck check_;
};

// Model evaluation that may throw (e.g. a numeric inverse of a coupling that
// violates the growth assumption) counts as a violation: NaN propagates into
// the probe, which records it as an unbounded negative margin.
double safe(const CouplingModel& coupling, double (CouplingModel::*fn)(double) const, double z) {
  try {
    return (coupling.*fn)(z);
  } catch (const std::exception&) {
    return kNaN;
  }
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  if (n <= 1) return {a};
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  return out;
}

std::vector<Vec> momentum_grid(const SampleSpec& s) {
  const auto axis = linspace(-s.p_max, s.p_max, s.p_count);
  std::vector<Vec> out;
  if (s.dim == 1) {
    for (double a : axis) out.push_back({a, 0.0});
  } else {
    for (double a : axis) {
      for (double b : axis) out.push_back({a, b});
    }
  }
  return out;
}

}  // namespace

AssumptionReport check_structural_assumptions(const HamiltonianModel& ham,
                                              const CouplingModel& coupling,
                                              const ExponentConfig& cfg,
                                              const SampleSpec& samples) {
  AssumptionReport report;
  const double c_ham = ham.growth_constant;
  const double c_cpl = coupling.growth_constant();
  const int dim = samples.dim;
  const std::vector<Vec> xs = samples.x_points.empty() ? std::vector<Vec>{Vec{0.0, 0.0}} : samples.x_points;
  const std::vector<Vec> ps = momentum_grid(samples);
  const auto ms = linspace(0.0, samples.m_max, samples.m_count);

  // S.1: strict monotonicity of g on the grid.
  {
    AssumptionCheck check{"S.1", std::numeric_limits<double>::infinity(), kNaN, true, {}};
    for (std::size_t k = 0; k + 1 < ms.size(); ++k) {
      const double diff = coupling.g(ms[k + 1]) - coupling.g(ms[k]);
      if (diff < check.margin) {
        check.margin = diff;
        check.witness = fmt::format("m={:.6g} m'={:.6g}", ms[k], ms[k + 1]);
      }
    }
    check.passed = check.margin > 0.0;
    report.checks.push_back(std::move(check));
  }

  std::mt19937_64 rng(samples.seed);
  std::uniform_real_distribution<double> unif(-samples.p_max, samples.p_max);
  auto draw_p = [&]() -> Vec { return {unif(rng), dim == 1 ? 0.0 : unif(rng)}; };
  const auto thetas = linspace(0.0, 1.0, samples.theta_count);

  // S.2: convexity in p along random segments.
  {
    AssumptionCheck check{"S.2", std::numeric_limits<double>::infinity(), kNaN, true, {}};
    for (const Vec& x : xs) {
      for (int s = 0; s < samples.segment_count; ++s) {
        const Vec p = draw_p();
        const Vec q = draw_p();
        const double hp = ham(x, p);
        const double hq = ham(x, q);
        for (double t : thetas) {
          const Vec mid = t * p + (1.0 - t) * q;
          const double gap = t * hp + (1.0 - t) * hq - ham(x, mid) + kSlack * std::max(1.0, std::abs(hp) + std::abs(hq));
          if (gap < check.margin) {
            check.margin = gap;
            check.witness = describe(x, p, dim) + fmt::format(" q=({:.6g},{:.6g}) theta={:.3g}", q[0], q[1], t);
          }
        }
      }
    }
    check.passed = check.margin >= 0.0;
    report.checks.push_back(std::move(check));
  }

  // S.3: C^{-1} m^beta - C <= g(m) <= C m^beta + C.
  {
    BoundProbe probe("S.3", c_cpl);
    for (double m : ms) {
      const double gm = coupling.g(m);
      const double mb = std::pow(m, cfg.beta);
      const auto where = fmt::format("m={:.6g}", m);
      probe.lower(gm, mb, where);
      probe.upper(gm, mb, where);
    }
    report.checks.push_back(std::move(probe).finish());
  }

  BoundProbe s4a("S.4.a", c_ham);
  BoundProbe s4b("S.4.b", c_ham);
  BoundProbe s5a("S.5.a", c_ham);
  BoundProbe s5b("S.5.b", c_ham);
  BoundProbe s5c("S.5.c", c_ham);
  BoundProbe ginv_h("g_inv(H) bounds", std::max(c_ham, c_cpl));
  for (const Vec& x : xs) {
    s4b.bounded_above(ham(x, Vec{0.0, 0.0}), describe(x, Vec{0.0, 0.0}, dim));
    for (const Vec& p : ps) {
      const auto where = describe(x, p, dim);
      const double h = ham(x, p);
      const Vec dh = ham.grad_p(x, p);
      const double pn = norm(p);
      const double pa = std::pow(pn, cfg.alpha);
      s4a.upper(norm(dh), std::pow(pn, cfg.alpha - 1.0), where);
      s5a.lower(h, pa, where);
      s5b.lower(dot(dh, p), pa, where);
      s5b.bounded_below(h, where);
      s5c.lower(-h + dot(dh, p), pa, where);
      s5c.bounded_below(h, where);
      const double minv = safe(coupling, &CouplingModel::g_inv, h);
      const double pab = std::pow(pn, cfg.alpha / cfg.beta);
      ginv_h.lower(minv, pab, where);
      ginv_h.upper(minv, pab, where);
      ginv_h.require(minv >= 0.0, where);
    }
  }
  report.checks.push_back(std::move(s4a).finish());
  report.checks.push_back(std::move(s4b).finish());
  report.checks.push_back(std::move(s5a).finish());
  report.checks.push_back(std::move(s5b).finish());
  report.checks.push_back(std::move(s5c).finish());

  // Extended-inverse growth on a log grid over (g(0), z_max].
  {
    BoundProbe probe("g_inv bounds", c_cpl);
    const double g0 = coupling.g_zero();
    const double span = std::max(samples.z_max - g0, 1e-12);
    for (int k = 0; k < samples.z_count; ++k) {
      const double t = samples.z_count > 1 ? static_cast<double>(k) / (samples.z_count - 1) : 1.0;
      const double z = g0 + std::pow(10.0, -6.0 + t * 6.0) * span;
      const double v = safe(coupling, &CouplingModel::g_inv, z);
      const double base = std::pow(std::max(z - g0, 0.0), 1.0 / cfg.beta);
      const auto where = fmt::format("z={:.6g}", z);
      probe.lower(v, base, where);
      probe.upper(v, base, where);
    }
    // Below g(0) the inverse must vanish.
    const double below = safe(coupling, &CouplingModel::g_inv, g0 - 1.0);
    probe.bounded_above(below, fmt::format("z={:.6g}", g0 - 1.0));
    report.checks.push_back(std::move(probe).finish());
  }
  report.checks.push_back(std::move(ginv_h).finish());

  // Convexity of p -> G(H(x, p)), the potential whose gradient is m D_pH.
  {
    AssumptionCheck check{"G(H) convexity", std::numeric_limits<double>::infinity(), kNaN, true, {}};
    const int pairs = std::max(1, samples.segment_count / 4);
    for (const Vec& x : xs) {
      for (int s = 0; s < pairs; ++s) {
        const Vec p = draw_p();
        const Vec q = draw_p();
        const double fp = safe(coupling, &CouplingModel::primitive, ham(x, p));
        const double fq = safe(coupling, &CouplingModel::primitive, ham(x, q));
        const double fm = safe(coupling, &CouplingModel::primitive, ham(x, 0.5 * (p + q)));
        double gap = 0.5 * (fp + fq) - fm + kSlack * std::max(1.0, std::abs(fp) + std::abs(fq));
        if (std::isnan(gap)) gap = -std::numeric_limits<double>::infinity();
        if (gap < check.margin) {
          check.margin = gap;
          check.witness = describe(x, p, dim) + fmt::format(" q=({:.6g},{:.6g})", q[0], q[1]);
        }
      }
    }
    check.passed = check.margin >= 0.0;
    report.checks.push_back(std::move(check));
  }

  return report;
}

}  // namespace smfg
