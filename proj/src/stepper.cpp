#include "nlpf/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nlpf/errors.hpp"
#include "nlpf/norms.hpp"
#include "nlpf/scalar_solve.hpp"

namespace nlpf {
namespace {

// Contraction of the composed map needs (1+h) - h^2 Lpi bounded away from
// zero and an O(h) prefactor; both hold strictly below min(1, 1/Lpi).
void ensure_admissible_h(const NonlinearitySpec& nl, double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw GridError("step size must be positive and finite");
  if (!(h < 1.0) || !(h * nl.pi_lipschitz < 1.0))
    throw StepTooLarge("step size reaches the admissibility bound min(1, 1/Lpi)");
}

Eigen::VectorXd psi_rhs_base(const FieldState& prev, const KernelTable& kernel,
                             double h) {
  const double h2 = h * h;
  return prev.phi + h * prev.v + h * prev.phi -
         h2 * kernel.a.cwiseProduct(prev.phi) + h2 * convolve(kernel, prev.phi);
}

Eigen::VectorXd psi_solve(const Eigen::VectorXd& base, const Eigen::VectorXd& u,
                          const NonlinearitySpec& nl, double h, double tol) {
  const double h2 = h * h;
  ScalarSolveOptions sopts;
  sopts.tol = tol;
  sopts.slope_min = (1.0 + h) - h2 * nl.pi_lipschitz;
  Eigen::VectorXd out(base.size());
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    const double G = base(i) + h2 * u(i);
    auto f = [&](double r) {
      return (1.0 + h) * r + h2 * nl.beta(r) + h2 * nl.pi(r) - G;
    };
    out(i) = solve_scalar_increasing(f, /*guess=*/G / (1.0 + h), sopts);
  }
  return out;
}

std::string step_msg(int n, const char* what) {
  return "step " + std::to_string(n + 1) + ": " + what;
}

}  // namespace

TimeGrid make_time_grid(double T, int N) {
  if (!(T > 0.0) || !std::isfinite(T))
    throw GridError("horizon T must be positive and finite");
  if (N < 1) throw GridError("need at least one time step");
  return TimeGrid{T, N};
}

std::vector<StepData> average_data(const ProblemSpec& p, const TimeGrid& grid,
                                   int samples_per_step) {
  if (samples_per_step < 8)
    throw DataError("data averaging needs at least 8 samples per step");
  const auto& m = *p.mesh;
  const Eigen::Index nn = m.node_count();
  const Eigen::Index nb = m.boundary_count();
  const double h = grid.h();
  const int s = samples_per_step;

  std::vector<StepData> out(static_cast<size_t>(grid.N));
  for (int k = 0; k < grid.N; ++k) {
    Eigen::VectorXd fk = Eigen::VectorXd::Zero(nn);
    Eigen::VectorXd gk = Eigen::VectorXd::Zero(nb);
    for (int j = 0; j <= s; ++j) {
      const double t = k * h + h * j / s;
      const double wj = ((j == 0 || j == s) ? 0.5 : 1.0) / s;
      for (Eigen::Index i = 0; i < nn; ++i) {
        const double y = (m.dim == 2) ? m.ys(i) : 0.0;
        fk(i) += wj * p.f(m.xs(i), y, t);
      }
      for (Eigen::Index b = 0; b < nb; ++b) {
        const int node = m.boundary[static_cast<size_t>(b)];
        const double y = (m.dim == 2) ? m.ys(node) : 0.0;
        gk(b) += wj * p.g(m.xs(node), y, t);
      }
    }
    if (!fk.allFinite() || !gk.allFinite())
      throw DataError("source or boundary data evaluated to non-finite values");
    out[static_cast<size_t>(k)] = StepData{std::move(fk), std::move(gk)};
  }
  return out;
}

Eigen::VectorXd phi_map(const RobinOperator& op, const Eigen::VectorXd& phi_guess,
                        const FieldState& prev, const Eigen::VectorXd& f_step,
                        const Eigen::VectorXd& g_step, double h,
                        const EllipticOptions& eopts, const Eigen::VectorXd* warm,
                        EllipticStats* stats) {
  const Eigen::VectorXd G = -phi_guess + h * f_step + prev.phi + prev.theta;
  return solve_singular_elliptic(op, G, g_step, h, eopts, warm, stats);
}

Eigen::VectorXd psi_map(const Eigen::VectorXd& u, const FieldState& prev,
                        const KernelTable& kernel, const NonlinearitySpec& nl,
                        double h, double scalar_tol) {
  ensure_admissible_h(nl, h);
  if (u.size() != prev.phi.size())
    throw ShapeError("field does not match the trajectory state");
  return psi_solve(psi_rhs_base(prev, kernel, h), u, nl, h, scalar_tol);
}

std::pair<FieldState, StepStats> fixed_point_step(
    const ProblemSpec& p, const RobinOperator& op, const FieldState& prev,
    const StepData& data, double h, const StepperOptions& opts,
    const Eigen::VectorXd* phi_init) {
  ensure_admissible_h(p.nonlin, h);
  const auto& m = *p.mesh;

  EllipticOptions eopts{opts.elliptic_tol, opts.elliptic_max_iter};
  const Eigen::VectorXd base = psi_rhs_base(prev, p.kernel, h);

  Eigen::VectorXd phi = phi_init ? *phi_init : prev.phi;
  Eigen::VectorXd u = prev.u;

  StepStats st;
  double d_prev = -1.0;
  int stalled = 0;
  bool converged = false;
  for (int k = 1; k <= opts.fp_max_iter; ++k) {
    u = phi_map(op, phi, prev, data.f, data.g, h, eopts, &u);
    Eigen::VectorXd phi_next = psi_solve(base, u, p.nonlin, h, opts.scalar_tol);
    const double d = l2_norm(m, phi_next - phi);
    st.distances.push_back(d);
    st.iterations = k;
    if (d_prev > 0.0) {
      const double q = d / d_prev;
      st.ratios.push_back(q);
      stalled = (q >= 1.0) ? stalled + 1 : 0;
      if (stalled >= 3)
        throw StepTooLarge("fixed-point distances stopped contracting");
    }
    d_prev = d;
    phi = std::move(phi_next);
    if (d <= opts.fp_tol) {
      st.final_displacement = d;
      converged = true;
      break;
    }
  }
  if (!converged)
    throw StepTooLarge("fixed-point iteration budget exhausted before convergence");

  // Close the step on the converged phase: its own elliptic solve defines
  // u_{n+1}, and the difference quotients define v and z.
  u = phi_map(op, phi, prev, data.f, data.g, h, eopts, &u);

  FieldState next;
  next.n = prev.n + 1;
  next.u = u;
  next.theta = (-u.array().inverse()).matrix();
  next.phi = phi;
  next.v = (phi - prev.phi) / h;
  next.z = (next.v - prev.v) / h;
  return {std::move(next), std::move(st)};
}

void check_step(const ProblemSpec& p, const RobinOperator& op,
                const FieldState& prev, const FieldState& next,
                const StepData& data, double h, const StepperOptions& opts) {
  const auto& m = *p.mesh;
  if (next.u.maxCoeff() >= 0.0)
    throw NegativityLoss("accepted step lost the sign of u");
  if (next.theta.minCoeff() <= 0.0)
    throw NegativityLoss("accepted step lost positivity of theta");

  const double recip = (next.theta + next.u.cwiseInverse()).cwiseAbs().maxCoeff();
  if (recip > 1e-13 * std::max(1.0, next.theta.cwiseAbs().maxCoeff()))
    throw NoConvergence("theta and u fell out of reciprocal pairing");

  const Eigen::VectorXd v_q = (next.phi - prev.phi) / h;
  if ((next.v - v_q).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, v_q.cwiseAbs().maxCoeff()))
    throw NoConvergence("first difference quotient drifted from stored v");
  const Eigen::VectorXd z_q = (next.v - prev.v) / h;
  if ((next.z - z_q).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, z_q.cwiseAbs().maxCoeff()))
    throw NoConvergence("second difference quotient drifted from stored z");

  const Eigen::VectorXd res1 = next.theta - prev.theta + next.phi - prev.phi +
                               h * op.apply(next.u, data.g) - h * data.f;
  if (l2_norm(m, res1) > opts.residual_factor * opts.elliptic_tol)
    throw NoConvergence("temperature equation residual out of tolerance");

  const double h2 = h * h;
  const Eigen::VectorXd base = psi_rhs_base(prev, p.kernel, h);
  Eigen::VectorXd res2(m.node_count());
  for (Eigen::Index i = 0; i < res2.size(); ++i)
    res2(i) = (1.0 + h) * next.phi(i) + h2 * p.nonlin.beta(next.phi(i)) +
              h2 * p.nonlin.pi(next.phi(i)) - base(i) - h2 * next.u(i);
  if (l2_norm(m, res2) >
      opts.residual_factor * std::max(opts.scalar_tol, opts.fp_tol))
    throw NoConvergence("phase equation residual out of tolerance");
}

DiscreteTrajectory run_with_data(const ProblemSpec& p, const TimeGrid& grid,
                                 std::vector<StepData> data,
                                 const StepperOptions& opts) {
  if (!p.mesh) throw DomainError("run needs a mesh");
  if (static_cast<int>(data.size()) != grid.N)
    throw ShapeError("step data does not cover every step");
  const auto& m = *p.mesh;
  for (const auto& d : data)
    if (d.f.size() != m.node_count() || d.g.size() != m.boundary_count())
      throw ShapeError("step data does not match the mesh");

  const RobinOperator op = assemble_robin(p.mesh);
  const double h = grid.h();

  DiscreteTrajectory traj;
  traj.mesh = p.mesh;
  traj.grid = grid;
  traj.data = std::move(data);
  traj.states.reserve(static_cast<size_t>(grid.N) + 1);
  traj.stats.reserve(static_cast<size_t>(grid.N));
  traj.states.push_back(initial_state(p));

  for (int n = 0; n < grid.N; ++n) {
    const FieldState& prev = traj.states.back();
    const StepData& d = traj.data[static_cast<size_t>(n)];
    try {
      auto [next, st] = fixed_point_step(p, op, prev, d, h, opts);
      if (opts.check_steps) check_step(p, op, prev, next, d, h, opts);
      traj.states.push_back(std::move(next));
      traj.stats.push_back(std::move(st));
    } catch (const StepTooLarge& e) {
      throw StepTooLarge(step_msg(n, e.what()));
    } catch (const NegativityLoss& e) {
      throw NegativityLoss(step_msg(n, e.what()));
    } catch (const BracketFailure& e) {
      throw BracketFailure(step_msg(n, e.what()));
    } catch (const NoConvergence& e) {
      throw NoConvergence(step_msg(n, e.what()));
    }
  }
  return traj;
}

DiscreteTrajectory run(const ProblemSpec& p, int N, const StepperOptions& opts) {
  const ValidationReport rep = validate_problem(p);
  if (!rep.ok()) {
    std::string msg = "problem rejected:";
    for (const auto& v : rep.violations) msg += " [" + v + "]";
    throw DomainError(msg);
  }
  const TimeGrid grid = make_time_grid(p.T, N);
  return run_with_data(p, grid, average_data(p, grid, opts.samples_per_step), opts);
}

namespace {

// Level index for the left-open bar convention: t in ((k-1)h, kh] -> k.
int bar_level(const DiscreteTrajectory& traj, double t, bool* clamped) {
  const double T = traj.grid.T;
  const double tol = 1e-12 * std::max(1.0, T);
  if (t < -tol || t > T + tol)
    throw RangeError("time outside the trajectory horizon");
  if (clamped) *clamped = false;
  const double h = traj.grid.h();
  if (t <= tol) {
    if (clamped) *clamped = true;
    return 1;
  }
  int k = static_cast<int>(std::ceil(t / h - 1e-9));
  return std::clamp(k, 1, traj.grid.N);
}

}  // namespace

Eigen::VectorXd eval_hat(const DiscreteTrajectory& traj, HatField field, double t) {
  const double T = traj.grid.T;
  const double tol = 1e-12 * std::max(1.0, T);
  if (t < -tol || t > T + tol)
    throw RangeError("time outside the trajectory horizon");
  const double h = traj.grid.h();
  const double s = std::clamp(t / h, 0.0, static_cast<double>(traj.grid.N));
  const int n = std::min(static_cast<int>(s), traj.grid.N - 1);
  const double lam = std::clamp(s - n, 0.0, 1.0);

  auto pick = [&](const FieldState& st) -> const Eigen::VectorXd& {
    switch (field) {
      case HatField::theta: return st.theta;
      case HatField::phi: return st.phi;
      default: return st.v;
    }
  };
  const auto& a = pick(traj.states[static_cast<size_t>(n)]);
  const auto& b = pick(traj.states[static_cast<size_t>(n) + 1]);
  return (1.0 - lam) * a + lam * b;
}

Eigen::VectorXd eval_bar(const DiscreteTrajectory& traj, BarField field, double t,
                         bool* clamped) {
  const int k = bar_level(traj, t, clamped);
  const auto& st = traj.states[static_cast<size_t>(k)];
  switch (field) {
    case BarField::u: return st.u;
    case BarField::theta: return st.theta;
    case BarField::phi: return st.phi;
    case BarField::phi_prev: return traj.states[static_cast<size_t>(k) - 1].phi;
    case BarField::v: return st.v;
    case BarField::z: return st.z;
    default: return traj.data[static_cast<size_t>(k) - 1].f;
  }
}

}  // namespace nlpf
