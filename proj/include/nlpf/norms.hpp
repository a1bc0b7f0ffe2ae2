#pragma once

#include <Eigen/Dense>

#include "nlpf/mesh.hpp"

namespace nlpf {

struct FieldNorms {
  double l1 = 0, l2 = 0, linf = 0, h1 = 0;
};

double l1_norm(const SpatialMesh& mesh, const Eigen::VectorXd& w);
double l2_norm(const SpatialMesh& mesh, const Eigen::VectorXd& w);
double linf_norm(const Eigen::VectorXd& w);
// squared gradient seminorm with central differences inside and one-sided
// differences on boundary faces
double grad_l2_sq(const SpatialMesh& mesh, const Eigen::VectorXd& w);
double h1_norm(const SpatialMesh& mesh, const Eigen::VectorXd& w);
FieldNorms norms(const SpatialMesh& mesh, const Eigen::VectorXd& w);

// L2 norm over the boundary trace; `wb` is aligned with mesh.boundary.
double boundary_l2_norm(const SpatialMesh& mesh, const Eigen::VectorXd& wb);

// Second-difference Laplacian evaluated at interior nodes (zero on boundary
// rows); used by the accumulated-flux second-order monitor.
Eigen::VectorXd interior_laplacian(const SpatialMesh& mesh, const Eigen::VectorXd& w);

}  // namespace nlpf
