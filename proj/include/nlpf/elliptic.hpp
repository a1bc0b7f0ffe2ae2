#pragma once

// Spatial operator pieces for the temperature equation:
//   - RobinOperator: stiffness + boundary mass, with the Robin load vector,
//     so that (A u - load(g)) / w is the pointwise form of -lap u with
//     du/dn + u = g closed to second order at the boundary.
//   - solve_singular_elliptic: damped Newton for -1/u - h lap u = G with the
//     same boundary closure; iterates stay strictly negative.
//   - RieszMap: discrete Riesz representer for the dual norm used by the
//     theta-rate estimate, (K + W) z = W w, |w|_* = sqrt(w' W z).

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "nlpf/mesh.hpp"

namespace nlpf {

struct RobinOperator {
  std::shared_ptr<const SpatialMesh> mesh;
  Eigen::SparseMatrix<double> K;   // gradient Gram (Neumann stiffness)
  Eigen::VectorXd bmass;           // boundary trace mass, full-size diagonal
  Eigen::SparseMatrix<double> A;   // K + diag(bmass), symmetric positive definite

  // Load vector of the boundary datum: nonzero only at boundary nodes,
  // entries boundary_w(b) * g(b). Input aligned with mesh.boundary.
  Eigen::VectorXd load(const Eigen::VectorXd& g_boundary) const;

  // Pointwise operator value (A u - load) / quad_w at every node.
  Eigen::VectorXd apply(const Eigen::VectorXd& u,
                        const Eigen::VectorXd& g_boundary) const;
};

RobinOperator assemble_robin(std::shared_ptr<const SpatialMesh> mesh);

struct EllipticOptions {
  double tol = 1e-10;  // on the weighted L2 norm of the pointwise residual
  int max_iter = 100;
};

struct EllipticStats {
  int iterations = 0;
  std::vector<double> residuals;  // accepted-iterate history, first = initial
};

// Solves -1/u + h * (pointwise Robin operator) u = G for u < 0. The Newton
// direction comes from the weighted form W alpha(u) + h A u = W G + load;
// steps are shortened to keep every node strictly negative and accepted only
// on residual decrease. Throws NegativityLoss / NoConvergence / DomainError.
Eigen::VectorXd solve_singular_elliptic(const RobinOperator& op,
                                        const Eigen::VectorXd& G,
                                        const Eigen::VectorXd& g_boundary,
                                        double h, const EllipticOptions& opts,
                                        const Eigen::VectorXd* init = nullptr,
                                        EllipticStats* stats = nullptr);

class RieszMap {
 public:
  explicit RieszMap(std::shared_ptr<const SpatialMesh> mesh);

  // Representer z solving (K + diag(w_quad)) z = W w.
  Eigen::VectorXd representer(const Eigen::VectorXd& w) const;
  double dual_norm(const Eigen::VectorXd& w) const;

  const SpatialMesh& mesh() const { return *mesh_; }

 private:
  std::shared_ptr<const SpatialMesh> mesh_;
  std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> solver_;
};

}  // namespace nlpf
