#include "nlpf/problem.hpp"

#include <cmath>

#include "nlpf/errors.hpp"

namespace nlpf {
namespace {

bool all_finite(const Eigen::VectorXd& v) {
  return v.allFinite();
}

// Evenness of the stored lattice: J(-x) must equal J(x) sample for sample.
bool kernel_even(const KernelTable& k) {
  const double scale = k.samples.size() ? k.samples.cwiseAbs().maxCoeff() : 0.0;
  const double tol = 1e-12 * std::max(scale, 1e-300);
  const int cx = k.lat_nx / 2, cy = k.lat_ny / 2;
  for (int q = -cy; q <= cy; ++q)
    for (int p = -cx; p <= cx; ++p) {
      const double fwd = k.samples((p + cx) + k.lat_nx * (q + cy));
      const double rev = k.samples((-p + cx) + k.lat_nx * (-q + cy));
      if (std::abs(fwd - rev) > tol) return false;
    }
  return true;
}

}  // namespace

ValidationReport validate_problem(const ProblemSpec& p, int samples) {
  ValidationReport rep;
  if (!p.mesh) {
    rep.violations.push_back("structure violation: no mesh attached");
    return rep;
  }
  const auto& m = *p.mesh;
  const Eigen::Index nn = m.node_count();

  auto shape = [&](const Eigen::VectorXd& v, const char* name) {
    if (v.size() != nn) {
      rep.violations.push_back(std::string("field shape violation: ") + name);
      return false;
    }
    if (!all_finite(v)) {
      rep.violations.push_back(std::string("finiteness violation: ") + name);
      return false;
    }
    return true;
  };
  const bool theta_ok = shape(p.theta0, "theta0");
  shape(p.phi0, "phi0");
  shape(p.v0, "v0");

  if (p.kernel.mesh.get() != p.mesh.get())
    rep.violations.push_back("structure violation: kernel built on a different mesh");
  else if (!kernel_even(p.kernel))
    rep.violations.push_back("kernel symmetry violation A1");

  // Monotonicity of beta and the Lipschitz bound on pi are checked by brute
  // force on a uniform grid over [-10, 10]: every ordered pair must respect
  // the declared structure.
  const int ns = std::max(samples, 2);
  Eigen::VectorXd r(ns), bv(ns), pv(ns), hv(ns);
  for (int i = 0; i < ns; ++i) {
    r(i) = -10.0 + 20.0 * i / (ns - 1);
    bv(i) = p.nonlin.beta(r(i));
    pv(i) = p.nonlin.pi(r(i));
    hv(i) = p.nonlin.beta_hat(r(i));
  }
  if (!all_finite(bv) || !all_finite(hv))
    rep.violations.push_back("finiteness violation: beta samples");
  if (!all_finite(pv))
    rep.violations.push_back("finiteness violation: pi samples");

  bool mono_bad = false, lip_bad = false;
  for (int i = 0; i < ns && !(mono_bad && lip_bad); ++i)
    for (int j = i + 1; j < ns; ++j) {
      if (bv(i) > bv(j) + 1e-10) { mono_bad = true; }
      const double gap = p.nonlin.pi_lipschitz * (r(j) - r(i));
      if (std::abs(pv(j) - pv(i)) > gap * (1.0 + 1e-10) + 1e-12) lip_bad = true;
      if (mono_bad && lip_bad) break;
    }
  if (mono_bad) rep.violations.push_back("monotonicity violation A2");
  if (std::abs(p.nonlin.beta_hat(0.0)) > 1e-12 || hv.minCoeff() < -1e-12)
    rep.violations.push_back("potential normalization violation A2");
  if (lip_bad || !(p.nonlin.pi_lipschitz >= 0.0) ||
      !std::isfinite(p.nonlin.pi_lipschitz))
    rep.violations.push_back("Lipschitz violation A3");

  if (theta_ok && p.theta0.minCoeff() <= 0.0)
    rep.violations.push_back("positivity violation A4");

  if (!(p.T > 0.0) || !std::isfinite(p.T))
    rep.violations.push_back("structure violation: horizon T must be positive");

  // Boundary datum sign, sampled at every boundary node over 33 instants.
  bool g_bad = false;
  for (int k = 0; k <= 32 && !g_bad; ++k) {
    const double t = p.T * k / 32.0;
    for (int b : m.boundary) {
      const double y = (m.dim == 2) ? m.ys(b) : 0.0;
      const double val = p.g(m.xs(b), y, t);
      if (!std::isfinite(val) || val > 1e-12) { g_bad = true; break; }
    }
  }
  if (g_bad) rep.violations.push_back("boundary sign violation A4");

  return rep;
}

FieldState initial_state(const ProblemSpec& p) {
  if (!p.mesh) throw DomainError("initial state needs a mesh");
  const Eigen::Index nn = p.mesh->node_count();
  if (p.theta0.size() != nn || p.phi0.size() != nn || p.v0.size() != nn)
    throw ShapeError("initial fields do not match the mesh");
  if (!all_finite(p.theta0) || !all_finite(p.phi0) || !all_finite(p.v0))
    throw DataError("initial fields contain non-finite entries");
  for (Eigen::Index i = 0; i < nn; ++i)
    if (p.theta0(i) <= p.theta_min)
      throw DomainError("initial temperature at or below the positivity floor");

  FieldState s;
  s.n = 0;
  s.theta = p.theta0;
  s.u = (-p.theta0.array().inverse()).matrix();
  s.phi = p.phi0;
  s.v = p.v0;
  return s;
}

}  // namespace nlpf
