#pragma once

// Root finding for strictly increasing scalar functions. Used per node by the
// phase update, where the residual r -> (1+h) r + h^2 beta(r) + h^2 pi(r) - G
// has a slope bounded below by (1+h) - h^2 Lpi > 0 for admissible h.

#include <functional>

namespace nlpf {

struct ScalarSolveOptions {
  double tol = 1e-12;     // accept when |f(r)| <= tol
  int max_iter = 200;
  double slope_min = 1e-12;  // clamp for the finite-difference Newton slope
  double slope_max = 1e300;
};

// Expanding bracket around the guess, then Newton steps with a clamped
// central-difference slope, falling back to bisection whenever the step
// leaves the bracket. Throws BracketFailure or NoConvergence.
double solve_scalar_increasing(const std::function<double(double)>& f,
                               double guess, const ScalarSolveOptions& opts);

}  // namespace nlpf
