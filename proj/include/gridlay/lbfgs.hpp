#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gridlay {

/// Evaluates f(x), writing df/dx into the second argument.
using Objective = std::function<double(std::span<const double>, std::span<double>)>;

struct MinimizeOptions {
  std::size_t max_iterations = 500;
  double grad_tol = 1e-4;          ///< on the infinity norm of the gradient
  double f_tol = 2.2e-9;       ///< relative decrease below which the run stops (0 disables)
  std::size_t history = 10;
  double armijo = 1e-4;
  std::size_t max_backtracks = 50;
  bool record_trace = false;
};

enum class StopReason { gradient, function_tolerance, max_iterations, line_search };

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  double initial_value = 0.0;
  double grad_inf_norm = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false; ///< gradient infinity norm fell below grad_tol
  StopReason reason = StopReason::max_iterations;
  std::vector<double> trace; ///< objective after every accepted step, when record_trace is set
};

/// Limited-memory BFGS with a backtracking (sufficient decrease) line search.
///
/// Every accepted step strictly decreases the objective, so the returned value never
/// exceeds f(x0). Throws SolverError carrying the iteration index when f or its
/// gradient is not finite.
MinimizeResult minimize(const Objective& f, std::vector<double> x0, const MinimizeOptions& options = {});

} // namespace gridlay
