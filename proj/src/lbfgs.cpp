#include "gridlay/lbfgs.hpp"

#include "gridlay/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace gridlay {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

struct Correction {
  std::vector<double> s;
  std::vector<double> y;
  double rho = 0.0;
};

// Two-loop recursion: returns -H * g.
std::vector<double> search_direction(const std::deque<Correction>& history, std::span<const double> g) {
  std::vector<double> q(g.begin(), g.end());
  std::vector<double> alpha(history.size());
  for (std::size_t k = history.size(); k-- > 0;) {
    alpha[k] = history[k].rho * dot(history[k].s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * history[k].y[i];
  }
  if (!history.empty()) {
    const auto& last = history.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& e : q) e *= gamma;
  }
  for (std::size_t k = 0; k < history.size(); ++k) {
    const double beta = history[k].rho * dot(history[k].y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * history[k].s[i];
  }
  for (double& e : q) e = -e;
  return q;
}

} // namespace

MinimizeResult minimize(const Objective& f, std::vector<double> x0, const MinimizeOptions& options) {
  const std::size_t dim = x0.size();
  MinimizeResult result;
  result.x = std::move(x0);
  std::vector<double> g(dim);
  double fx = f(result.x, g);
  result.evaluations = 1;
  if (!std::isfinite(fx) || !all_finite(g)) throw SolverError("non-finite objective or gradient at start point", 0);
  result.initial_value = fx;
  result.value = fx;
  result.grad_inf_norm = inf_norm(g);
  if (result.grad_inf_norm < options.grad_tol) {
    result.converged = true;
    result.reason = StopReason::gradient;
    return result;
  }

  std::deque<Correction> history;
  std::vector<double> x_new(dim);
  std::vector<double> g_new(dim);

  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    std::vector<double> dir = search_direction(history, g);
    double slope = dot(g, dir);
    if (!(slope < 0.0)) {
      history.clear();
      dir = search_direction(history, g);
      slope = dot(g, dir);
    }

    bool accepted = false;
    double f_new = fx;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double step = history.empty() ? 1.0 / std::max(std::sqrt(dot(g, g)), 1e-300) : 1.0;
      for (std::size_t bt = 0; bt < options.max_backtracks; ++bt) {
        for (std::size_t i = 0; i < dim; ++i) x_new[i] = result.x[i] + step * dir[i];
        f_new = f(x_new, g_new);
        ++result.evaluations;
        if (!std::isfinite(f_new) || !all_finite(g_new))
          throw SolverError("non-finite objective or gradient during line search", it);
        if (f_new <= fx + options.armijo * step * slope && f_new < fx) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted && !history.empty()) {
        // Retry once along steepest descent.
        history.clear();
        dir = search_direction(history, g);
        slope = dot(g, dir);
      } else {
        break;
      }
    }
    if (!accepted) {
      result.reason = StopReason::line_search;
      break;
    }

    Correction c;
    c.s.resize(dim);
    c.y.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      c.s[i] = x_new[i] - result.x[i];
      c.y[i] = g_new[i] - g[i];
    }
    const double sy = dot(c.s, c.y);
    if (sy > 1e-12 * std::sqrt(dot(c.s, c.s) * dot(c.y, c.y))) {
      c.rho = 1.0 / sy;
      history.push_back(std::move(c));
      if (history.size() > options.history) history.pop_front();
    }

    const double decrease = fx - f_new;
    std::swap(result.x, x_new);
    std::swap(g, g_new);
    fx = f_new;
    result.value = fx;
    result.iterations = it;
    result.grad_inf_norm = inf_norm(g);
    if (options.record_trace) result.trace.push_back(fx);

    if (result.grad_inf_norm < options.grad_tol) {
      result.converged = true;
      result.reason = StopReason::gradient;
      break;
    }
    if (options.f_tol > 0.0 && decrease <= options.f_tol * std::max({std::abs(fx), std::abs(fx + decrease), 1.0})) {
      result.reason = StopReason::function_tolerance;
      break;
    }
    if (it == options.max_iterations) result.reason = StopReason::max_iterations;
  }
  return result;
}

} // namespace gridlay
