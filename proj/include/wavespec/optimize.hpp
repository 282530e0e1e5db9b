#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace wavespec {

struct SimplexOptions {
  double ftol = 1e-8;   // relative spread of objective values across the simplex
  double xtol = 1e-6;   // simplex diameter (infinity norm)
  std::size_t max_iterations = 2000;
  double initial_step = 0.25;
  /// Fresh simplexes started from the incumbent after convergence; guards
  /// against a collapsed simplex stalling off the optimum.
  std::size_t restarts = 1;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead minimisation inside the box [lower, upper]; every trial point is
/// clamped to the box. Non-finite objective values are treated as +inf.
SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> x0, const std::vector<double>& lower,
                               const std::vector<double>& upper, const SimplexOptions& opt = {});

}  // namespace wavespec
