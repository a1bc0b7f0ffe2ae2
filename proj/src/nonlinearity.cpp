#include "nlpf/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

namespace nlpf {

void set_linear_pi(NonlinearitySpec& spec, double slope) {
  spec.pi = [slope](double r) { return slope * r; };
  spec.pi_lipschitz = std::abs(slope);
}

NonlinearitySpec cubic_nonlinearity(double beta_scale, double pi_slope) {
  NonlinearitySpec s;
  s.beta = [beta_scale](double r) { return beta_scale * r * r * r; };
  s.beta_hat = [beta_scale](double r) { return 0.25 * beta_scale * r * r * r * r; };
  s.beta_lip = [beta_scale](double lo, double hi) {
    const double m = std::max(std::abs(lo), std::abs(hi));
    return 3.0 * beta_scale * m * m;
  };
  set_linear_pi(s, pi_slope);
  return s;
}

NonlinearitySpec deadzone_nonlinearity(double knee, double slope, double pi_slope) {
  NonlinearitySpec s;
  s.beta = [knee, slope](double r) {
    if (r > knee) return slope * (r - knee);
    if (r < -knee) return slope * (r + knee);
    return 0.0;
  };
  s.beta_hat = [knee, slope](double r) {
    if (r > knee) return 0.5 * slope * (r - knee) * (r - knee);
    if (r < -knee) return 0.5 * slope * (r + knee) * (r + knee);
    return 0.0;
  };
  s.beta_lip = [slope](double, double) { return slope; };
  set_linear_pi(s, pi_slope);
  return s;
}

}  // namespace nlpf
