#pragma once

// Shared fixtures for the unit suites: mesh makers, small well-posed problem
// specs, and exception-message capture.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include "nlpf/kernel.hpp"
#include "nlpf/mesh.hpp"
#include "nlpf/nonlinearity.hpp"
#include "nlpf/problem.hpp"

namespace testutil {

// Runs fn expecting it to throw E; returns the message, empty when nothing
// (or something else) was thrown.
template <class E>
std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  } catch (...) {
  }
  return {};
}

inline bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

inline std::shared_ptr<const nlpf::SpatialMesh> mesh1d(int n, double extent = 1.0) {
  return std::make_shared<const nlpf::SpatialMesh>(nlpf::make_mesh_1d(n, extent));
}

inline std::shared_ptr<const nlpf::SpatialMesh> mesh2d(int nx, int ny,
                                                       double ex = 1.0,
                                                       double ey = 1.0) {
  return std::make_shared<const nlpf::SpatialMesh>(
      nlpf::make_mesh_2d(nx, ny, ex, ey));
}

inline nlpf::KernelTable zero_kernel(std::shared_ptr<const nlpf::SpatialMesh> m) {
  return nlpf::build_kernel([](double, double) { return 0.0; }, std::move(m));
}

// Clean scenario: every admissibility assumption holds by inspection.
// g = -1, theta0 = 1, cubic beta, pi(r) = -r, phi0 = cos(pi x)/2, J = 0.
inline nlpf::ProblemSpec clean_problem(int nodes = 33, double T = 1.0) {
  nlpf::ProblemSpec p;
  auto m = mesh1d(nodes);
  p.mesh = m;
  p.kernel = zero_kernel(m);
  p.nonlin = nlpf::cubic_nonlinearity(1.0, -1.0);
  p.theta0 = Eigen::VectorXd::Ones(m->node_count());
  p.phi0 = (0.5 * (M_PI * m->xs.array()).cos()).matrix();
  p.v0 = Eigen::VectorXd::Zero(m->node_count());
  p.f = [](double, double, double) { return 0.0; };
  p.g = [](double, double, double) { return -1.0; };
  p.T = T;
  return p;
}

// Stationary scenario: phi = -1, u = -1/2 solves every equation exactly
// (cubic beta, pi(r) = -r/2, J = 0, f = 0, g = -1/2, theta0 = 2), so the
// discrete flow must reproduce the constants to solver precision.
inline nlpf::ProblemSpec stationary_problem(int nodes = 33, double T = 1.0) {
  nlpf::ProblemSpec p;
  auto m = mesh1d(nodes);
  p.mesh = m;
  p.kernel = zero_kernel(m);
  p.nonlin = nlpf::cubic_nonlinearity(1.0, -0.5);
  p.theta0 = Eigen::VectorXd::Constant(m->node_count(), 2.0);
  p.phi0 = Eigen::VectorXd::Constant(m->node_count(), -1.0);
  p.v0 = Eigen::VectorXd::Zero(m->node_count());
  p.f = [](double, double, double) { return 0.0; };
  p.g = [](double, double, double) { return -0.5; };
  p.T = T;
  return p;
}

}  // namespace testutil
