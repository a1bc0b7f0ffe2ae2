#include "nlpf/mesh.hpp"

#include <cmath>
#include <string>

#include "nlpf/errors.hpp"

namespace nlpf {
namespace {

// 1D trapezoid weights: dx inside, dx/2 at the two endpoints.
Eigen::VectorXd axis_weights(int n, double dx) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, dx);
  w(0) = w(n - 1) = 0.5 * dx;
  return w;
}

void check_axis(int nodes, double extent, const char* what) {
  if (nodes < 3)
    throw MeshError(std::string(what) + ": need at least 3 nodes per axis, got " +
                    std::to_string(nodes));
  if (!(extent > 0.0))
    throw MeshError(std::string(what) + ": extent must be positive");
}

}  // namespace

SpatialMesh make_mesh_1d(int nodes, double extent) {
  check_axis(nodes, extent, "make_mesh_1d");
  SpatialMesh m;
  m.dim = 1;
  m.shape = {nodes, 1};
  m.extent = {extent, 0.0};
  m.spacing = {extent / (nodes - 1), 0.0};
  m.xs.resize(nodes);
  for (int i = 0; i < nodes; ++i) m.xs(i) = i * m.spacing[0];
  m.xs(nodes - 1) = extent;
  m.ys = Eigen::VectorXd::Zero(nodes);
  m.quad_w = axis_weights(nodes, m.spacing[0]);
  m.boundary = {0, nodes - 1};
  // boundary of an interval carries the counting measure: weight 1 per endpoint
  m.boundary_w = Eigen::VectorXd::Ones(2);
  return m;
}

SpatialMesh make_mesh_2d(int nodes_x, int nodes_y, double extent_x, double extent_y) {
  check_axis(nodes_x, extent_x, "make_mesh_2d x-axis");
  check_axis(nodes_y, extent_y, "make_mesh_2d y-axis");
  SpatialMesh m;
  m.dim = 2;
  m.shape = {nodes_x, nodes_y};
  m.extent = {extent_x, extent_y};
  m.spacing = {extent_x / (nodes_x - 1), extent_y / (nodes_y - 1)};
  const int n = nodes_x * nodes_y;
  m.xs.resize(n);
  m.ys.resize(n);
  m.quad_w.resize(n);
  const Eigen::VectorXd wx = axis_weights(nodes_x, m.spacing[0]);
  const Eigen::VectorXd wy = axis_weights(nodes_y, m.spacing[1]);
  for (int iy = 0; iy < nodes_y; ++iy) {
    const double y = (iy == nodes_y - 1) ? extent_y : iy * m.spacing[1];
    for (int ix = 0; ix < nodes_x; ++ix) {
      const int id = m.index(ix, iy);
      m.xs(id) = (ix == nodes_x - 1) ? extent_x : ix * m.spacing[0];
      m.ys(id) = y;
      m.quad_w(id) = wx(ix) * wy(iy);
    }
  }
  // boundary trace weights: trapezoid along each edge; corners pick up both edges
  std::vector<double> bw;
  for (int iy = 0; iy < nodes_y; ++iy)
    for (int ix = 0; ix < nodes_x; ++ix) {
      const bool on_x = (ix == 0 || ix == nodes_x - 1);
      const bool on_y = (iy == 0 || iy == nodes_y - 1);
      if (!on_x && !on_y) continue;
      double s = 0.0;
      if (on_x) s += wy(iy);
      if (on_y) s += wx(ix);
      m.boundary.push_back(m.index(ix, iy));
      bw.push_back(s);
    }
  m.boundary_w = Eigen::Map<Eigen::VectorXd>(bw.data(), static_cast<int>(bw.size()));
  return m;
}

Eigen::SparseMatrix<double> build_stiffness(const SpatialMesh& mesh) {
  using T = Eigen::Triplet<double>;
  std::vector<T> trip;
  const int nx = mesh.shape[0], ny = mesh.shape[1];
  const double dx = mesh.spacing[0];
  const Eigen::VectorXd wy =
      mesh.dim == 2 ? axis_weights(ny, mesh.spacing[1]) : Eigen::VectorXd::Ones(1);
  // x-direction cell gradients, weighted by the transverse trapezoid weight
  for (int iy = 0; iy < ny; ++iy) {
    const double c = wy(mesh.dim == 2 ? iy : 0) / dx;
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const int a = mesh.index(ix, iy), b = mesh.index(ix + 1, iy);
      trip.emplace_back(a, a, c);
      trip.emplace_back(b, b, c);
      trip.emplace_back(a, b, -c);
      trip.emplace_back(b, a, -c);
    }
  }
  if (mesh.dim == 2) {
    const double dy = mesh.spacing[1];
    const Eigen::VectorXd wx = axis_weights(nx, dx);
    for (int ix = 0; ix < nx; ++ix) {
      const double c = wx(ix) / dy;
      for (int iy = 0; iy + 1 < ny; ++iy) {
        const int a = mesh.index(ix, iy), b = mesh.index(ix, iy + 1);
        trip.emplace_back(a, a, c);
        trip.emplace_back(b, b, c);
        trip.emplace_back(a, b, -c);
        trip.emplace_back(b, a, -c);
      }
    }
  }
  Eigen::SparseMatrix<double> K(mesh.node_count(), mesh.node_count());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

}  // namespace nlpf
