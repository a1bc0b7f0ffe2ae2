#pragma once

// Trajectory diagnostics:
//   - monitor: the bounded-quantity records (energies, entropy integrals,
//     cumulative H1/H2-proxy norms, sup norms) whose h-independence the
//     refinement study asserts.
//   - check_identities: the exact discrete identities and inequalities an
//     accepted trajectory must satisfy, as named pass/fail results.
//   - weak_residual: first equation tested against the nodal hat functions.
//   - bochner_norms: time-space norms of the interpolant fields.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nlpf/elliptic.hpp"
#include "nlpf/stepper.hpp"

namespace nlpf {

struct EstimateRecord {
  int step = 0;
  double t = 0.0;
  double phi_l2_sq = 0.0;
  double v_l2_sq = 0.0;
  double beta_potential_l1 = 0.0;
  double theta_l1 = 0.0;
  double log_theta_l1 = 0.0;
  double cum_u_h1_sq = 0.0;       // h * sum of |u_n|_H1^2 up to this level
  double theta_l2_sq = 0.0;
  double log_theta_h1_sq = 0.0;
  double theta_rate_dual_l2 = 0.0;  // running L2-in-time of the dual norm of d(theta-hat)/dt
  double u_cumsum_h2 = 0.0;         // H2 proxy of h * sum(-u_n): H1 plus interior Laplacian
  double phi_linf = 0.0;
  double v_linf = 0.0;
  double beta_phi_linf = 0.0;
  double z_l2l2 = 0.0;  // running L2-in-time of |z|_L2
};

// Column names for the estimate CSV, in struct order.
const std::vector<std::string>& estimate_columns();

std::vector<EstimateRecord> monitor(const DiscreteTrajectory& traj,
                                    const NonlinearitySpec& nl,
                                    const RieszMap& riesz);

// Max over steps and nodes of |w_j * r_j| where r is the step form of the
// temperature equation residual. Robin trace and boundary load included
// through the assembled operator.
double weak_residual(const DiscreteTrajectory& traj, const RobinOperator& op);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity (max error or min slack)
  double threshold = 0.0;  // bound it was compared against
  std::string detail;
};

std::vector<CheckResult> check_identities(const DiscreteTrajectory& traj,
                                          const NonlinearitySpec& nl,
                                          const RobinOperator& op,
                                          const RieszMap& riesz);

enum class TrajField {
  theta_hat, phi_hat, v_hat,                      // piecewise linear
  u_bar, theta_bar, phi_bar, phi_prev_bar, v_bar, z_bar,  // piecewise constant
  theta_hat_dt                                    // rate of theta_hat, piecewise constant
};

enum class SpaceNorm { l1, l2, linf, h1, dual };

struct BochnerNorms {
  double sup_time = 0.0;  // C([0,T]; X) for hat fields, L_inf(0,T; X) for bar
  double l2_time = 0.0;
};

// Bar fields: exact level sums and maxima. Hat fields: maxima over levels
// (exact) and time-trapezoid of squared level norms (quadrature choice).
BochnerNorms bochner_norms(const DiscreteTrajectory& traj, TrajField field,
                           SpaceNorm norm, const RieszMap* riesz = nullptr);

}  // namespace nlpf
