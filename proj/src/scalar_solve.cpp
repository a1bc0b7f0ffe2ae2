#include "nlpf/scalar_solve.hpp"

#include <algorithm>
#include <cmath>

#include "nlpf/errors.hpp"

namespace nlpf {

double solve_scalar_increasing(const std::function<double(double)>& f,
                               double guess, const ScalarSolveOptions& opts) {
  if (!std::isfinite(guess)) throw BracketFailure("non-finite initial guess");

  double fg = f(guess);
  if (!std::isfinite(fg)) throw BracketFailure("non-finite residual at the guess");
  if (std::abs(fg) <= opts.tol) return guess;

  // Monotone residual: walk downhill from the guess until the sign flips.
  double lo = guess, hi = guess, flo = fg, fhi = fg;
  double step = 0.5 * std::max(1.0, std::abs(guess));
  for (int k = 0; flo > 0.0; ++k) {
    if (k >= 200) throw BracketFailure("no sign change below the guess");
    lo -= step;
    step *= 2.0;
    flo = f(lo);
  }
  step = 0.5 * std::max(1.0, std::abs(guess));
  for (int k = 0; fhi < 0.0; ++k) {
    if (k >= 200) throw BracketFailure("no sign change above the guess");
    hi += step;
    step *= 2.0;
    fhi = f(hi);
  }

  double r = std::clamp(guess, lo, hi);
  for (int it = 0; it < opts.max_iter; ++it) {
    const double fr = (r == guess) ? fg : f(r);
    if (std::abs(fr) <= opts.tol) return r;
    if (fr > 0.0) hi = r; else lo = r;

    const double delta = 1e-7 * std::max(1.0, std::abs(r));
    double slope = (f(r + delta) - f(r - delta)) / (2.0 * delta);
    slope = std::clamp(slope, opts.slope_min, std::max(opts.slope_min, opts.slope_max));

    double cand = r - fr / slope;
    if (!(cand > lo) || !(cand < hi)) cand = 0.5 * (lo + hi);
    r = cand;
  }
  throw NoConvergence("scalar root iteration exhausted its budget");
}

}  // namespace nlpf
