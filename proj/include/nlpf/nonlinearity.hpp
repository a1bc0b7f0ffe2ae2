#pragma once

// Scalar nonlinearities entering the order-parameter equation:
//   beta       maximal monotone (single-valued), beta = d/dr beta_hat,
//              beta_hat(0) = 0, beta_hat >= 0, locally Lipschitz
//   pi         globally Lipschitz perturbation with constant pi_lipschitz
// beta_lip(lo, hi) returns a Lipschitz bound for beta on [lo, hi]; the scalar
// solver uses it to cap Newton slopes.

#include <functional>

namespace nlpf {

struct NonlinearitySpec {
  std::function<double(double)> beta;
  std::function<double(double)> beta_hat;
  std::function<double(double, double)> beta_lip;
  std::function<double(double)> pi;
  double pi_lipschitz = 0.0;
};

// beta(r) = scale * r^3, beta_hat(r) = scale * r^4 / 4
NonlinearitySpec cubic_nonlinearity(double beta_scale = 1.0, double pi_slope = -1.0);

// beta vanishes on [-knee, knee] and grows linearly with `slope` outside
NonlinearitySpec deadzone_nonlinearity(double knee, double slope,
                                       double pi_slope = -1.0);

// pi(r) = slope * r attached to an existing beta triple
void set_linear_pi(NonlinearitySpec& spec, double slope);

}  // namespace nlpf
