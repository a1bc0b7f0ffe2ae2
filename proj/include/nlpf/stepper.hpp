#pragma once

// One implicit time step of the coupled system and its Banach fixed point.
//
// Step n -> n+1 solves, with lagged nonlocal terms,
//   theta_{n+1} - theta_n + phi_{n+1} - phi_n + h Lu_{n+1} = h f_{n+1},
//   (1+h) phi_{n+1} + h^2 beta(phi_{n+1}) + h^2 pi(phi_{n+1})
//       = h^2 u_{n+1} + phi_n + h v_n + h phi_n - h^2 a phi_n + h^2 J*phi_n,
// by iterating phi -> psi_map(phi_map(phi)). phi_map is the singular elliptic
// solve for u given a phase guess, psi_map the per-node scalar phase update.
// Also provides trajectory integration, time-averaged step data, and the
// piecewise-linear (hat) / piecewise-constant (bar) interpolants in time.

#include <Eigen/Dense>
#include <memory>
#include <utility>
#include <vector>

#include "nlpf/elliptic.hpp"
#include "nlpf/problem.hpp"

namespace nlpf {

struct TimeGrid {
  double T = 1.0;
  int N = 1;
  double h() const { return T / N; }
};

TimeGrid make_time_grid(double T, int N);

// Step data: time averages of f over ((k-1)h, kh] at all nodes and of g at
// boundary nodes.
struct StepData {
  Eigen::VectorXd f;
  Eigen::VectorXd g;
};

struct StepperOptions {
  double fp_tol = 1e-10;       // successive-iterate distance in L2
  int fp_max_iter = 200;
  double elliptic_tol = 1e-10;
  int elliptic_max_iter = 100;
  double scalar_tol = 1e-12;
  double theta_min = 1e-8;
  double residual_factor = 100.0;  // accepted-step residual <= factor * tol
  int samples_per_step = 64;
  bool check_steps = true;
};

struct StepStats {
  int iterations = 0;
  std::vector<double> distances;  // d_k = |phi^k - phi^{k-1}|_L2
  std::vector<double> ratios;     // q_k = d_{k+1} / d_k
  double final_displacement = 0.0;
};

struct DiscreteTrajectory {
  std::shared_ptr<const SpatialMesh> mesh;
  TimeGrid grid;
  std::vector<FieldState> states;  // levels 0..N
  std::vector<StepData> data;      // steps 1..N, index k-1
  std::vector<StepStats> stats;    // one per step
};

// Composite-trapezoid means of f and g on each step, at least 8 samples per
// step (DataError below that).
std::vector<StepData> average_data(const ProblemSpec& p, const TimeGrid& grid,
                                   int samples_per_step);

// u = solve of -1/u - h lap u = -phi_guess + h f + phi_n + theta_n with Robin
// datum g. warm, if given, seeds the Newton iteration.
Eigen::VectorXd phi_map(const RobinOperator& op, const Eigen::VectorXd& phi_guess,
                        const FieldState& prev, const Eigen::VectorXd& f_step,
                        const Eigen::VectorXd& g_step, double h,
                        const EllipticOptions& eopts = {},
                        const Eigen::VectorXd* warm = nullptr,
                        EllipticStats* stats = nullptr);

// Per-node root of (1+h) r + h^2 beta(r) + h^2 pi(r) = G with G assembled
// from u and the lagged level-n terms. Requires h < min(1, 1/Lpi), else
// StepTooLarge: beyond that the scalar slope bound degenerates.
Eigen::VectorXd psi_map(const Eigen::VectorXd& u, const FieldState& prev,
                        const KernelTable& kernel, const NonlinearitySpec& nl,
                        double h, double scalar_tol = 1e-12);

std::pair<FieldState, StepStats> fixed_point_step(
    const ProblemSpec& p, const RobinOperator& op, const FieldState& prev,
    const StepData& data, double h, const StepperOptions& opts,
    const Eigen::VectorXd* phi_init = nullptr);

DiscreteTrajectory run(const ProblemSpec& p, int N,
                       const StepperOptions& opts = {});

// Same integration loop with caller-supplied step data instead of averages
// of p.f and p.g; used when data comes from an external recursion.
DiscreteTrajectory run_with_data(const ProblemSpec& p, const TimeGrid& grid,
                                 std::vector<StepData> data,
                                 const StepperOptions& opts = {});

enum class HatField { theta, phi, v };
// phi_prev is the one-level-lagged phase bar field; f is the averaged source.
enum class BarField { u, theta, phi, phi_prev, v, z, f };

// Piecewise-linear interpolant through the stored levels. t in [0, T].
Eigen::VectorXd eval_hat(const DiscreteTrajectory& traj, HatField field, double t);

// Piecewise-constant field, left-open convention: t in (nh, (n+1)h] maps to
// level n+1. At t = 0 the value is clamped to the first covered level and
// *clamped (if given) is set.
Eigen::VectorXd eval_bar(const DiscreteTrajectory& traj, BarField field, double t,
                         bool* clamped = nullptr);

// Residual and structure checks for one accepted step; throws NoConvergence
// when an equation residual exceeds residual_factor * tolerance.
void check_step(const ProblemSpec& p, const RobinOperator& op,
                const FieldState& prev, const FieldState& next,
                const StepData& data, double h, const StepperOptions& opts);

}  // namespace nlpf
