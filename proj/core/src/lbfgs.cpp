#include "smfg/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "smfg/error.hpp"

namespace smfg {

void SolverOptions::validate() const {
  if (!(tol_grad > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol_grad must be positive");
  if (max_iters == 0) throw Error(ErrorCode::InvalidArgument, "max_iters must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw Error(ErrorCode::InvalidArgument, "armijo_c must lie in (0,1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "backtrack_factor must lie in (0,1)");
  }
  if (!(initial_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "initial_step must be positive");
}

namespace {

double dotp(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sup_norm(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s = std::max(s, std::abs(x));
  return s;
}

struct Pair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

// Two-loop recursion: returns -H g for the inverse-Hessian approximation H.
std::vector<double> quasi_newton_direction(const std::deque<Pair>& history, std::span<const double> g) {
  std::vector<double> q(g.begin(), g.end());
  std::vector<double> alpha(history.size());
  for (std::size_t k = history.size(); k-- > 0;) {
    alpha[k] = history[k].rho * dotp(history[k].s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * history[k].y[i];
  }
  const auto& last = history.back();
  const double scale = dotp(last.s, last.y) / dotp(last.y, last.y);
  for (double& x : q) x *= scale;
  for (std::size_t k = 0; k < history.size(); ++k) {
    const double beta = history[k].rho * dotp(history[k].y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * history[k].s[i];
  }
  for (double& x : q) x = -x;
  return q;
}

}  // namespace

DescentResult lbfgs_minimize(const Objective& objective, std::vector<double> x0, const SolverOptions& opts,
                             const Projector& project, const Observer& observe) {
  opts.validate();
  const std::size_t n = x0.size();
  DescentResult result;
  std::vector<double> x = std::move(x0);
  if (project) project(x);
  std::vector<double> g(n);
  double f = objective(x, g);
  double gnorm = sup_norm(g);
  result.trace.push_back({0, f, gnorm, 0.0});
  if (observe) observe(result.trace.back(), x);

  std::deque<Pair> history;
  std::vector<double> x_trial(n);
  std::vector<double> g_trial(n);
  std::size_t iter = 0;
  bool failed = false;

  while (gnorm > opts.tol_grad && iter < opts.max_iters) {
    ++iter;
    bool accepted = false;
    double step = 0.0;
    double f_trial = f;
    // Attempt the quasi-Newton direction first, then steepest descent.
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const bool use_history = attempt == 0 && opts.memory > 0 && !history.empty();
      if (attempt == 1 && !history.empty()) history.clear();
      std::vector<double> d;
      if (use_history) {
        d = quasi_newton_direction(history, g);
      } else {
        d.assign(g.begin(), g.end());
        for (double& v : d) v = -v;
      }
      double slope = dotp(g, d);
      if (!(slope < 0.0)) {
        if (use_history) continue;
        break;
      }
      step = use_history ? opts.initial_step : opts.initial_step / std::max(1.0, std::sqrt(dotp(g, g)));
      const double slack = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(f) + 1.0);
      for (int bt = 0; bt < 80; ++bt) {
        for (std::size_t i = 0; i < n; ++i) x_trial[i] = x[i] + step * d[i];
        if (project) project(x_trial);
        f_trial = objective(x_trial, g_trial);
        if (std::isfinite(f_trial) && f_trial <= f + opts.armijo_c * step * slope + slack) {
          accepted = true;
          break;
        }
        step *= opts.backtrack_factor;
      }
    }
    if (!accepted) {
      failed = true;
      break;
    }

    Pair pair{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      pair.s[i] = x_trial[i] - x[i];
      pair.y[i] = g_trial[i] - g[i];
    }
    const double sy = dotp(pair.s, pair.y);
    if (opts.memory > 0 && sy > 1e-300 && sy > 1e-12 * std::sqrt(dotp(pair.s, pair.s) * dotp(pair.y, pair.y))) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (history.size() > opts.memory) history.pop_front();
    }

    x.swap(x_trial);
    g.swap(g_trial);
    f = f_trial;
    gnorm = sup_norm(g);
    result.trace.push_back({iter, f, gnorm, step});
    if (observe) observe(result.trace.back(), x);
  }

  result.x = std::move(x);
  result.value = f;
  result.grad_norm = gnorm;
  result.iterations = iter;
  result.converged = !failed && gnorm <= opts.tol_grad;
  return result;
}

}  // namespace smfg
