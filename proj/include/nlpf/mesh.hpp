#pragma once

// Uniform tensor-product mesh on a 1D interval or 2D rectangle with trapezoid
// quadrature. 2D nodes are flattened x-fastest: idx = ix + nx*iy.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <vector>

namespace nlpf {

struct SpatialMesh {
  int dim = 1;
  std::array<int, 2> shape{0, 1};        // nodes per axis; shape[1] == 1 in 1D
  std::array<double, 2> spacing{0, 0};
  std::array<double, 2> extent{0, 0};

  Eigen::VectorXd xs, ys;                // node coordinates (ys all zero in 1D)
  Eigen::VectorXd quad_w;                // interior quadrature weights, sum = |Omega|
  std::vector<int> boundary;             // boundary node indices, ascending
  Eigen::VectorXd boundary_w;            // aligned with `boundary`, sum = |bdry|

  int node_count() const { return static_cast<int>(quad_w.size()); }
  int boundary_count() const { return static_cast<int>(boundary.size()); }
  int index(int ix, int iy) const { return ix + shape[0] * iy; }
};

SpatialMesh make_mesh_1d(int nodes, double extent = 1.0);
SpatialMesh make_mesh_2d(int nodes_x, int nodes_y, double extent_x = 1.0,
                         double extent_y = 1.0);

// Gram matrix of piecewise-linear gradients under the mesh quadrature
// (the pure-Neumann stiffness; shared by the Robin operator and the Riesz map).
Eigen::SparseMatrix<double> build_stiffness(const SpatialMesh& mesh);

}  // namespace nlpf
