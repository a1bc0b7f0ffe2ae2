#include "nlpf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlpf/errors.hpp"
#include "nlpf/norms.hpp"

namespace nlpf {
namespace {

// Two-point Gauss abscissae on the unit interval; exact for the quadratic
// integrands produced by bar-hat differences of piecewise-linear fields.
constexpr double kGaussA = 0.5 - 0.28867513459481287;
constexpr double kGaussB = 0.5 + 0.28867513459481287;

double weighted_inner(const SpatialMesh& m, const Eigen::VectorXd& a,
                      const Eigen::VectorXd& b) {
  return a.dot(m.quad_w.cwiseProduct(b));
}

double rel_gap(double lhs, double rhs) {
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

}  // namespace

const std::vector<std::string>& estimate_columns() {
  static const std::vector<std::string> cols = {
      "step", "t", "phi_l2_sq", "v_l2_sq", "beta_potential_l1", "theta_l1",
      "log_theta_l1", "cum_u_h1_sq", "theta_l2_sq", "log_theta_h1_sq",
      "theta_rate_dual_l2", "u_cumsum_h2", "phi_linf", "v_linf",
      "beta_phi_linf", "z_l2l2"};
  return cols;
}

std::vector<EstimateRecord> monitor(const DiscreteTrajectory& traj,
                                    const NonlinearitySpec& nl,
                                    const RieszMap& riesz) {
  const auto& m = *traj.mesh;
  const int N = traj.grid.N;
  const double h = traj.grid.h();

  std::vector<EstimateRecord> out;
  out.reserve(static_cast<size_t>(N) + 1);

  double cum_u_h1 = 0.0, rate_dual_sq = 0.0, z_sq = 0.0;
  Eigen::VectorXd u_cumsum = Eigen::VectorXd::Zero(m.node_count());

  for (int k = 0; k <= N; ++k) {
    const FieldState& st = traj.states[static_cast<size_t>(k)];
    EstimateRecord r;
    r.step = k;
    r.t = k * h;
    r.phi_l2_sq = std::pow(l2_norm(m, st.phi), 2);
    r.v_l2_sq = std::pow(l2_norm(m, st.v), 2);
    r.beta_potential_l1 =
        weighted_inner(m, st.phi.unaryExpr(nl.beta_hat), Eigen::VectorXd::Ones(m.node_count()));
    r.theta_l1 = l1_norm(m, st.theta);
    const Eigen::VectorXd log_theta = st.theta.array().log().matrix();
    r.log_theta_l1 = l1_norm(m, log_theta);
    r.theta_l2_sq = std::pow(l2_norm(m, st.theta), 2);
    r.log_theta_h1_sq = std::pow(h1_norm(m, log_theta), 2);
    r.phi_linf = linf_norm(st.phi);
    r.v_linf = linf_norm(st.v);
    r.beta_phi_linf = linf_norm(st.phi.unaryExpr(nl.beta));

    if (k >= 1) {
      const FieldState& prev = traj.states[static_cast<size_t>(k) - 1];
      cum_u_h1 += h * std::pow(h1_norm(m, st.u), 2);
      rate_dual_sq += std::pow(riesz.dual_norm(st.theta - prev.theta), 2) / h;
      u_cumsum -= h * st.u;
      z_sq += h * std::pow(l2_norm(m, st.z), 2);
    }
    r.cum_u_h1_sq = cum_u_h1;
    r.theta_rate_dual_l2 = std::sqrt(rate_dual_sq);
    r.u_cumsum_h2 = std::sqrt(std::pow(h1_norm(m, u_cumsum), 2) +
                              std::pow(l2_norm(m, interior_laplacian(m, u_cumsum)), 2));
    r.z_l2l2 = std::sqrt(z_sq);
    out.push_back(r);
  }
  return out;
}

double weak_residual(const DiscreteTrajectory& traj, const RobinOperator& op) {
  const auto& m = *traj.mesh;
  const double h = traj.grid.h();
  double worst = 0.0;
  for (int n = 0; n < traj.grid.N; ++n) {
    const FieldState& a = traj.states[static_cast<size_t>(n)];
    const FieldState& b = traj.states[static_cast<size_t>(n) + 1];
    const StepData& d = traj.data[static_cast<size_t>(n)];
    const Eigen::VectorXd res = b.theta - a.theta + b.phi - a.phi +
                                h * op.apply(b.u, d.g) - h * d.f;
    worst = std::max(worst, m.quad_w.cwiseProduct(res).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<CheckResult> check_identities(const DiscreteTrajectory& traj,
                                          const NonlinearitySpec& nl,
                                          const RobinOperator& op,
                                          const RieszMap& riesz) {
  const auto& m = *traj.mesh;
  const int N = traj.grid.N;
  const double h = traj.grid.h();
  std::vector<CheckResult> out;

  auto push_max = [&](const std::string& name, double value, double threshold,
                      const std::string& detail) {
    out.push_back({name, value <= threshold, value, threshold, detail});
  };
  auto push_min = [&](const std::string& name, double value, double threshold,
                      const std::string& detail) {
    out.push_back({name, value >= threshold, value, threshold, detail});
  };

  {  // Telescoped phase energy: the per-step square expansion is exact.
    double worst = 0.0;
    for (int n = 0; n < N; ++n) {
      const auto& p0 = traj.states[static_cast<size_t>(n)].phi;
      const auto& p1 = traj.states[static_cast<size_t>(n) + 1].phi;
      const auto& v1 = traj.states[static_cast<size_t>(n) + 1].v;
      const double lhs = 0.5 * weighted_inner(m, p1, p1) -
                         0.5 * weighted_inner(m, p0, p0) +
                         0.5 * weighted_inner(m, p1 - p0, p1 - p0);
      const double rhs = h * weighted_inner(m, p1, v1);
      worst = std::max(worst, rel_gap(lhs, rhs));
    }
    push_max("phi energy telescoping", worst, 1e-12, "per-step relative gap");
  }

  // Sup formulas: the time sup of an interpolant norm equals the max over
  // stored levels. Left side scans levels and midpoints through the eval
  // path; right side reads the arrays.
  {
    double lhs = 0.0, rhs = 0.0;
    for (int n = 0; n <= N; ++n) {
      lhs = std::max(lhs, l2_norm(m, eval_hat(traj, HatField::theta, n * h)));
      rhs = std::max(rhs, l2_norm(m, traj.states[static_cast<size_t>(n)].theta));
      if (n < N)
        lhs = std::max(lhs, l2_norm(m, eval_hat(traj, HatField::theta, (n + 0.5) * h)));
    }
    push_max("sup formula: theta L2", rel_gap(lhs, rhs), 1e-10,
             "interpolant sup vs level max");
  }
  {
    double lhs = 0.0, rhs = 0.0;
    for (int n = 0; n <= N; ++n) {
      lhs = std::max(lhs, linf_norm(eval_hat(traj, HatField::phi, n * h)));
      rhs = std::max(rhs, linf_norm(traj.states[static_cast<size_t>(n)].phi));
      if (n < N)
        lhs = std::max(lhs, linf_norm(eval_hat(traj, HatField::phi, (n + 0.5) * h)));
    }
    push_max("sup formula: phi Linf", rel_gap(lhs, rhs), 1e-10,
             "interpolant sup vs level max");
  }
  {
    double lhs = 0.0, rhs = 0.0;
    for (int n = 0; n <= N; ++n) {
      lhs = std::max(lhs, linf_norm(eval_hat(traj, HatField::v, n * h)));
      rhs = std::max(rhs, linf_norm(traj.states[static_cast<size_t>(n)].v));
      if (n < N)
        lhs = std::max(lhs, linf_norm(eval_hat(traj, HatField::v, (n + 0.5) * h)));
    }
    push_max("sup formula: v Linf", rel_gap(lhs, rhs), 1e-10,
             "interpolant sup vs level max");
  }

  {  // Dual-norm gap between constant and linear interpolants of theta.
    double lhs = 0.0, rhs = 0.0;
    for (int n = 0; n < N; ++n) {
      for (double s : {kGaussA, kGaussB}) {
        const double t = (n + s) * h;
        const Eigen::VectorXd diff = eval_bar(traj, BarField::theta, t) -
                                     eval_hat(traj, HatField::theta, t);
        lhs += 0.5 * h * std::pow(riesz.dual_norm(diff), 2);
      }
      const Eigen::VectorXd dth = traj.states[static_cast<size_t>(n) + 1].theta -
                                  traj.states[static_cast<size_t>(n)].theta;
      rhs += (h / 3.0) * std::pow(riesz.dual_norm(dth), 2);
    }
    push_max("bar-hat gap: theta dual norm", rel_gap(lhs, rhs), 1e-8,
             "Gauss quadrature vs level-difference formula");
  }

  {  // Sup gap between the two phase interpolants equals h times the sup of v.
    double lhs = 0.0, rhs = 0.0;
    for (int n = 0; n < N; ++n) {
      lhs = std::max(lhs, linf_norm(traj.states[static_cast<size_t>(n) + 1].phi -
                                    traj.states[static_cast<size_t>(n)].phi));
      rhs = std::max(rhs, h * linf_norm(traj.states[static_cast<size_t>(n) + 1].v));
    }
    push_max("bar-hat gap: phi sup", rel_gap(lhs, rhs), 1e-10,
             "interpolant gap vs h * sup of v");
  }

  {  // Squared L2-in-time gap of the v interpolants against the z levels.
    double lhs = 0.0, rhs = 0.0;
    for (int n = 0; n < N; ++n) {
      for (double s : {kGaussA, kGaussB}) {
        const double t = (n + s) * h;
        const Eigen::VectorXd diff = eval_bar(traj, BarField::v, t) -
                                     eval_hat(traj, HatField::v, t);
        lhs += 0.5 * h * std::pow(l2_norm(m, diff), 2);
      }
      rhs += (h * h / 3.0) * h *
             std::pow(l2_norm(m, traj.states[static_cast<size_t>(n) + 1].z), 2);
    }
    push_max("bar-hat gap: v L2", rel_gap(lhs, rhs), 1e-10,
             "Gauss quadrature vs z-level formula");
  }

  {  // Lagged phase field reconstructed from the current one and its rate.
    double worst = 0.0, scale = 1.0;
    for (int n = 0; n < N; ++n) {
      for (double s : {kGaussA, kGaussB}) {
        const double t = (n + s) * h;
        const Eigen::VectorXd lag = eval_bar(traj, BarField::phi_prev, t);
        const Eigen::VectorXd rec = eval_bar(traj, BarField::phi, t) -
                                    h * eval_bar(traj, BarField::v, t);
        worst = std::max(worst, linf_norm(lag - rec));
        scale = std::max(scale, linf_norm(lag));
      }
    }
    push_max("lag reconstruction", worst / scale, 1e-10,
             "phi_prev vs phi - h * v at interior times");
  }

  {  // Convexity of the beta potential along the update direction.
    double min_slack = std::numeric_limits<double>::infinity();
    for (int n = 0; n < N; ++n) {
      const auto& p0 = traj.states[static_cast<size_t>(n)].phi;
      const auto& p1 = traj.states[static_cast<size_t>(n) + 1].phi;
      const double lhs = weighted_inner(m, p1.unaryExpr(nl.beta), p1 - p0);
      const double rhs = weighted_inner(m, p1.unaryExpr(nl.beta_hat),
                                        Eigen::VectorXd::Ones(m.node_count())) -
                         weighted_inner(m, p0.unaryExpr(nl.beta_hat),
                                        Eigen::VectorXd::Ones(m.node_count()));
      min_slack = std::min(min_slack, lhs - rhs);
    }
    if (N == 0) min_slack = 0.0;
    push_min("beta convexity inequality", min_slack, -1e-10, "minimum step slack");
  }

  {  // Entropy-type lower bound per level.
    double min_slack = std::numeric_limits<double>::infinity();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.node_count());
    for (int k = 0; k <= N; ++k) {
      const Eigen::VectorXd& th = traj.states[static_cast<size_t>(k)].theta;
      const Eigen::VectorXd lth = th.array().log().matrix();
      const double lhs = weighted_inner(m, th - lth, ones);
      const double rhs = weighted_inner(m, th + lth.cwiseAbs(), ones) / 3.0;
      min_slack = std::min(min_slack, lhs - rhs);
    }
    push_min("entropy lower bound", min_slack, -1e-10, "minimum level slack");
  }

  {  // Sign structure of u and theta across all levels.
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& st : traj.states) {
      margin = std::min(margin, -st.u.maxCoeff());
      margin = std::min(margin, st.theta.minCoeff());
    }
    out.push_back({"sign structure", margin > 0.0, margin, 0.0,
                   "min over levels of (-u, theta)"});
  }

  {  // theta == -1/u nodewise.
    double worst = 0.0;
    for (const auto& st : traj.states) {
      const double scale = std::max(1.0, linf_norm(st.theta));
      worst = std::max(worst,
                       linf_norm(st.theta + st.u.cwiseInverse()) / scale);
    }
    push_max("reciprocal pairing", worst, 1e-13, "theta vs -1/u");
  }

  {  // Stored v and z agree with their defining quotients.
    double worst = 0.0;
    for (int n = 1; n <= N; ++n) {
      const auto& a = traj.states[static_cast<size_t>(n) - 1];
      const auto& b = traj.states[static_cast<size_t>(n)];
      const Eigen::VectorXd vq = (b.phi - a.phi) / h;
      const Eigen::VectorXd zq = (b.v - a.v) / h;
      worst = std::max(worst, linf_norm(b.v - vq) / std::max(1.0, linf_norm(vq)));
      worst = std::max(worst, linf_norm(b.z - zq) / std::max(1.0, linf_norm(zq)));
    }
    push_max("difference quotients", worst, 1e-12, "stored v, z vs quotients");
  }

  push_max("weak residual", weak_residual(traj, op), 1e-8,
           "temperature equation tested against nodal hats");

  {  // Every recorded fixed-point ratio must contract.
    double worst = 0.0;
    for (const auto& st : traj.stats)
      for (double q : st.ratios) worst = std::max(worst, q);
    out.push_back({"contraction ratios", worst < 1.0, worst, 1.0,
                   traj.stats.empty() ? "no step statistics recorded"
                                      : "max successive-distance ratio"});
  }

  return out;
}

namespace {

Eigen::VectorXd bar_level_field(const DiscreteTrajectory& traj, TrajField f, int k) {
  const auto& st = traj.states[static_cast<size_t>(k)];
  switch (f) {
    case TrajField::u_bar: return st.u;
    case TrajField::theta_bar: return st.theta;
    case TrajField::phi_bar: return st.phi;
    case TrajField::phi_prev_bar: return traj.states[static_cast<size_t>(k) - 1].phi;
    case TrajField::v_bar: return st.v;
    case TrajField::z_bar: return st.z;
    case TrajField::theta_hat_dt:
      return (st.theta - traj.states[static_cast<size_t>(k) - 1].theta) /
             traj.grid.h();
    default: throw DomainError("not a piecewise-constant trajectory field");
  }
}

}  // namespace

BochnerNorms bochner_norms(const DiscreteTrajectory& traj, TrajField field,
                           SpaceNorm norm, const RieszMap* riesz) {
  const auto& m = *traj.mesh;
  if (norm == SpaceNorm::dual && !riesz)
    throw DomainError("dual space norm needs a Riesz map");

  auto space = [&](const Eigen::VectorXd& w) -> double {
    switch (norm) {
      case SpaceNorm::l1: return l1_norm(m, w);
      case SpaceNorm::l2: return l2_norm(m, w);
      case SpaceNorm::linf: return linf_norm(w);
      case SpaceNorm::h1: return h1_norm(m, w);
      default: return riesz->dual_norm(w);
    }
  };

  const double h = traj.grid.h();
  const int N = traj.grid.N;
  BochnerNorms out;

  const bool hat = (field == TrajField::theta_hat || field == TrajField::phi_hat ||
                    field == TrajField::v_hat);
  if (hat) {
    auto level = [&](int k) -> const Eigen::VectorXd& {
      const auto& st = traj.states[static_cast<size_t>(k)];
      if (field == TrajField::theta_hat) return st.theta;
      if (field == TrajField::phi_hat) return st.phi;
      return st.v;
    };
    double l2t = 0.0;
    double prev_sq = std::pow(space(level(0)), 2);
    out.sup_time = std::sqrt(prev_sq);
    for (int k = 1; k <= N; ++k) {
      const double sq = std::pow(space(level(k)), 2);
      out.sup_time = std::max(out.sup_time, std::sqrt(sq));
      l2t += 0.5 * h * (prev_sq + sq);
      prev_sq = sq;
    }
    out.l2_time = std::sqrt(l2t);
    return out;
  }

  double l2t = 0.0;
  for (int k = 1; k <= N; ++k) {
    const double val = space(bar_level_field(traj, field, k));
    out.sup_time = std::max(out.sup_time, val);
    l2t += h * val * val;
  }
  out.l2_time = std::sqrt(l2t);
  return out;
}

}  // namespace nlpf
