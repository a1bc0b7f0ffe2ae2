#pragma once

// Problem container for the coupled system
//
//   (-1/u)_t + phi_t - lap u = f,      du/dn + u = g on the boundary,
//   phi_tt + phi_t + a phi - J*phi + beta(phi) + pi(phi) = u,
//
// with theta = -1/u > 0, plus the admissibility checks the scheme relies on:
// even kernel, monotone beta with normalized potential, Lipschitz pi,
// nonpositive boundary datum, positive initial temperature.

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nlpf/kernel.hpp"
#include "nlpf/mesh.hpp"
#include "nlpf/nonlinearity.hpp"

namespace nlpf {

// Space-time data callbacks take (x, y, t); y is ignored on 1d meshes.
using SpaceTimeFn = std::function<double(double, double, double)>;

struct ProblemSpec {
  std::shared_ptr<const SpatialMesh> mesh;
  KernelTable kernel;
  NonlinearitySpec nonlin;
  Eigen::VectorXd theta0, phi0, v0;
  SpaceTimeFn f;  // interior source
  SpaceTimeFn g;  // boundary datum, must stay <= 0
  double T = 1.0;
  double theta_min = 1e-8;  // positivity floor for -1/u
};

// One time level of the discrete flow. z is the second difference quotient
// of phi and is empty at level 0 where no such quotient exists.
struct FieldState {
  int n = 0;
  Eigen::VectorXd u, theta, phi, v, z;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Pure admissibility scan: samples the nonlinearities on [-10, 10] and the
// boundary datum over [0, T], collects every violated assumption, never
// throws. Deterministic in its inputs.
ValidationReport validate_problem(const ProblemSpec& p, int samples = 1000);

// Level-0 state: u0 = -1/theta0, v = v0. Rejects theta0 below the positivity
// floor and non-finite data.
FieldState initial_state(const ProblemSpec& p);

}  // namespace nlpf
