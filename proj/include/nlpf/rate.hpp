#pragma once

// Empirical Cauchy-rate study: runs trajectory pairs at steps (h, tau),
// measures the three-part gap
//   E_u  = sup_t H1 norm of the running integral of (u-bar_h - u-bar_tau),
//   E_phi, E_v = sup_t L2 norms of the hat-interpolant differences,
// fits E ~ M h^p across a ladder, and tracks the square-root envelope
// constant max E / (sqrt(h) + sqrt(tau)).

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "nlpf/problem.hpp"
#include "nlpf/stepper.hpp"

namespace nlpf {

enum class PiecewiseKind { constant, linear };

// Running time integral of a field sampled on a uniform grid with spacing dt:
// out[j] approximates the integral over [0, j*dt]; out[0] = 0. The constant
// kind is the right-endpoint rule, exact for left-open piecewise-constant
// fields sampled at cell right endpoints; linear is the trapezoid rule.
std::vector<Eigen::VectorXd> one_star(const std::vector<Eigen::VectorXd>& samples,
                                      double dt, PiecewiseKind kind);

struct RateRow {
  double h = 0.0, tau = 0.0;
  double E_u = 0.0, E_phi = 0.0, E_v = 0.0;
  double E_total = 0.0;
  double f_gap = 0.0, g_gap = 0.0;  // data discrepancies, L2 in time
};

// Evaluates both trajectories on the common refinement of their step grids
// (exact rational index mapping, no interpolation error in time).
RateRow cauchy_pair_from(const DiscreteTrajectory& coarse,
                         const DiscreteTrajectory& fine);

RateRow cauchy_pair(const ProblemSpec& p, int N_coarse, int N_fine,
                    const StepperOptions& opts = {});

struct FitResult {
  double p = 0.0;              // least-squares slope of log E vs log h
  double M = 0.0;              // exp(intercept)
  std::vector<double> ratios;  // adjacent E(h) / E(h/2), h descending
};

// Throws DegenerateFit on fewer than 3 rows, nonpositive E, or a single h.
FitResult fit_rate(const std::vector<std::pair<double, double>>& rows);

struct RateReport {
  std::vector<RateRow> rows;  // sorted by h descending
  double p = 0.0, M = 0.0;
  double envelope = 0.0;                   // max E / (sqrt h + sqrt tau)
  std::vector<double> row_envelopes;
  double lower_half_envelope_ratio = 0.0;  // max/min envelope, finest half
  std::vector<double> ratios;
  bool reference_mode = false;
};

// Ladder h = T/2^lo .. T/2^hi. Pairwise mode pairs each h with tau = h/2 and
// shares trajectory runs between rows; reference mode compares every h
// against the single grid T/2^reference_exp. Rows run concurrently.
RateReport run_ladder(const ProblemSpec& p, int lo, int hi,
                      const StepperOptions& opts = {},
                      bool reference_mode = false, int reference_exp = 12);

}  // namespace nlpf
