#include "nlpf/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlpf/errors.hpp"
#include "nlpf/norms.hpp"

namespace nlpf {

Eigen::VectorXd RobinOperator::load(const Eigen::VectorXd& g_boundary) const {
  const auto& m = *mesh;
  if (g_boundary.size() != m.boundary_count())
    throw ShapeError("boundary datum does not match the boundary node set");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m.node_count());
  for (Eigen::Index k = 0; k < g_boundary.size(); ++k)
    out(m.boundary[static_cast<size_t>(k)]) = m.boundary_w(k) * g_boundary(k);
  return out;
}

Eigen::VectorXd RobinOperator::apply(const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& g_boundary) const {
  const auto& m = *mesh;
  if (u.size() != m.node_count())
    throw ShapeError("field does not match the mesh");
  return (A * u - load(g_boundary)).cwiseQuotient(m.quad_w);
}

RobinOperator assemble_robin(std::shared_ptr<const SpatialMesh> mesh) {
  if (!mesh) throw MeshError("operator assembly needs a mesh");
  RobinOperator op;
  op.mesh = mesh;
  op.K = build_stiffness(*mesh);
  op.bmass = Eigen::VectorXd::Zero(mesh->node_count());
  for (Eigen::Index k = 0; k < mesh->boundary_w.size(); ++k)
    op.bmass(mesh->boundary[static_cast<size_t>(k)]) += mesh->boundary_w(k);
  Eigen::SparseMatrix<double> D(mesh->node_count(), mesh->node_count());
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index i = 0; i < op.bmass.size(); ++i)
    if (op.bmass(i) != 0.0) trip.emplace_back(i, i, op.bmass(i));
  D.setFromTriplets(trip.begin(), trip.end());
  op.A = op.K + D;
  op.A.makeCompressed();
  return op;
}

Eigen::VectorXd solve_singular_elliptic(const RobinOperator& op,
                                        const Eigen::VectorXd& G,
                                        const Eigen::VectorXd& g_boundary,
                                        double h, const EllipticOptions& opts,
                                        const Eigen::VectorXd* init,
                                        EllipticStats* stats) {
  const auto& m = *op.mesh;
  const Eigen::Index nn = m.node_count();
  if (G.size() != nn) throw ShapeError("right-hand side does not match the mesh");
  if (!(h > 0.0)) throw DomainError("step weight h must be positive");
  for (Eigen::Index k = 0; k < g_boundary.size(); ++k)
    if (g_boundary(k) > 1e-12)
      throw DomainError("boundary datum must be nonpositive");

  const Eigen::VectorXd& w = m.quad_w;
  const Eigen::VectorXd ld = op.load(g_boundary);

  Eigen::VectorXd u(nn);
  if (init) {
    if (init->size() != nn) throw ShapeError("initial guess does not match the mesh");
    u = init->cwiseMin(-1e-12);
  } else {
    // G_i > 0 forces -1/u ~ G there; elsewhere start at -1.
    for (Eigen::Index i = 0; i < nn; ++i)
      u(i) = (G(i) > 0.0) ? -1.0 / std::max(G(i), 1e-2) : -1.0;
  }

  // Weighted residual F(u) = W alpha(u) + h (A u - load) - W G and its
  // pointwise counterpart; convergence is judged on the latter in L2(w).
  auto weighted_residual = [&](const Eigen::VectorXd& uu) -> Eigen::VectorXd {
    return w.cwiseProduct((-uu.array().inverse()).matrix() - G) +
           h * (op.A * uu - ld);
  };
  auto pointwise_norm = [&](const Eigen::VectorXd& F) {
    return l2_norm(m, F.cwiseQuotient(w));
  };

  Eigen::VectorXd F = weighted_residual(u);
  double res = pointwise_norm(F);
  if (stats) { stats->iterations = 0; stats->residuals = {res}; }

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analyzed = false;

  for (int it = 0; it < opts.max_iter; ++it) {
    if (res <= opts.tol) return u;

    Eigen::SparseMatrix<double> J = h * op.A;
    for (Eigen::Index i = 0; i < nn; ++i)
      J.coeffRef(i, i) += w(i) / (u(i) * u(i));
    if (!analyzed) { ldlt.analyzePattern(J); analyzed = true; }
    ldlt.factorize(J);
    if (ldlt.info() != Eigen::Success)
      throw NoConvergence("elliptic Newton system could not be factorized");
    const Eigen::VectorXd d = ldlt.solve(-F);

    // Largest feasible fraction of the step keeping u strictly negative;
    // unbounded when no component pushes toward zero, so that full Newton
    // steps survive near the solution.
    double lam_max = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < nn; ++i)
      if (d(i) > 0.0) lam_max = std::min(lam_max, -u(i) / d(i));
    if (lam_max < 1e-13)
      throw NegativityLoss("elliptic iterate pinned against the sign constraint");

    double lam = std::min(1.0, 0.9 * lam_max);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd cand = u + lam * d;
      if (cand.maxCoeff() < 0.0) {
        const Eigen::VectorXd Fc = weighted_residual(cand);
        const double rc = pointwise_norm(Fc);
        if (rc <= (1.0 - 1e-4 * lam) * res) {
          u = cand;
          F = Fc;
          res = rc;
          accepted = true;
          break;
        }
      }
      lam *= 0.5;
    }
    if (!accepted)
      throw NoConvergence("elliptic line search failed to reduce the residual");
    if (stats) { stats->iterations = it + 1; stats->residuals.push_back(res); }
  }
  if (res <= opts.tol) return u;
  throw NoConvergence("elliptic Newton iteration exhausted its budget");
}

RieszMap::RieszMap(std::shared_ptr<const SpatialMesh> mesh) : mesh_(std::move(mesh)) {
  if (!mesh_) throw MeshError("Riesz map needs a mesh");
  Eigen::SparseMatrix<double> K = build_stiffness(*mesh_);
  Eigen::SparseMatrix<double> W(mesh_->node_count(), mesh_->node_count());
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index i = 0; i < mesh_->quad_w.size(); ++i)
    trip.emplace_back(i, i, mesh_->quad_w(i));
  W.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<double> M = K + W;
  M.makeCompressed();
  solver_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
  solver_->compute(M);
  if (solver_->info() != Eigen::Success)
    throw SolveError("Riesz system could not be factorized");
}

Eigen::VectorXd RieszMap::representer(const Eigen::VectorXd& w) const {
  if (w.size() != mesh_->node_count())
    throw ShapeError("field does not match the mesh");
  return solver_->solve(mesh_->quad_w.cwiseProduct(w));
}

double RieszMap::dual_norm(const Eigen::VectorXd& w) const {
  const Eigen::VectorXd z = representer(w);
  const double sq = w.dot(mesh_->quad_w.cwiseProduct(z));
  return std::sqrt(std::max(sq, 0.0));
}

}  // namespace nlpf
