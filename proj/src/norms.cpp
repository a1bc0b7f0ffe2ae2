#include "nlpf/norms.hpp"

#include <cmath>

#include "nlpf/errors.hpp"

namespace nlpf {
namespace {

void check_size(const SpatialMesh& mesh, const Eigen::VectorXd& w) {
  if (w.size() != mesh.node_count())
    throw ShapeError("field size does not match mesh node count");
}

}  // namespace

double l1_norm(const SpatialMesh& mesh, const Eigen::VectorXd& w) {
  check_size(mesh, w);
  return mesh.quad_w.dot(w.cwiseAbs());
}

double l2_norm(const SpatialMesh& mesh, const Eigen::VectorXd& w) {
  check_size(mesh, w);
  return std::sqrt(mesh.quad_w.dot(w.cwiseAbs2()));
}

double linf_norm(const Eigen::VectorXd& w) {
  return w.size() == 0 ? 0.0 : w.cwiseAbs().maxCoeff();
}

double grad_l2_sq(const SpatialMesh& mesh, const Eigen::VectorXd& w) {
  check_size(mesh, w);
  const int nx = mesh.shape[0], ny = mesh.shape[1];
  double acc = 0.0;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const int id = mesh.index(ix, iy);
      double gx;
      if (ix == 0)
        gx = (w(mesh.index(1, iy)) - w(id)) / mesh.spacing[0];
      else if (ix == nx - 1)
        gx = (w(id) - w(mesh.index(nx - 2, iy))) / mesh.spacing[0];
      else
        gx = (w(mesh.index(ix + 1, iy)) - w(mesh.index(ix - 1, iy))) /
             (2.0 * mesh.spacing[0]);
      double g2 = gx * gx;
      if (mesh.dim == 2) {
        double gy;
        if (iy == 0)
          gy = (w(mesh.index(ix, 1)) - w(id)) / mesh.spacing[1];
        else if (iy == ny - 1)
          gy = (w(id) - w(mesh.index(ix, ny - 2))) / mesh.spacing[1];
        else
          gy = (w(mesh.index(ix, iy + 1)) - w(mesh.index(ix, iy - 1))) /
               (2.0 * mesh.spacing[1]);
        g2 += gy * gy;
      }
      acc += mesh.quad_w(id) * g2;
    }
  return acc;
}

double h1_norm(const SpatialMesh& mesh, const Eigen::VectorXd& w) {
  const double l2 = l2_norm(mesh, w);
  return std::sqrt(l2 * l2 + grad_l2_sq(mesh, w));
}

FieldNorms norms(const SpatialMesh& mesh, const Eigen::VectorXd& w) {
  FieldNorms out;
  out.l1 = l1_norm(mesh, w);
  out.l2 = l2_norm(mesh, w);
  out.linf = linf_norm(w);
  out.h1 = std::sqrt(out.l2 * out.l2 + grad_l2_sq(mesh, w));
  return out;
}

double boundary_l2_norm(const SpatialMesh& mesh, const Eigen::VectorXd& wb) {
  if (wb.size() != mesh.boundary_count())
    throw ShapeError("boundary field size does not match boundary node count");
  return std::sqrt(mesh.boundary_w.dot(wb.cwiseAbs2()));
}

Eigen::VectorXd interior_laplacian(const SpatialMesh& mesh, const Eigen::VectorXd& w) {
  check_size(mesh, w);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(w.size());
  const int nx = mesh.shape[0], ny = mesh.shape[1];
  const double ix2 = 1.0 / (mesh.spacing[0] * mesh.spacing[0]);
  const double iy2 = mesh.dim == 2 ? 1.0 / (mesh.spacing[1] * mesh.spacing[1]) : 0.0;
  for (int iy = (mesh.dim == 2 ? 1 : 0); iy < (mesh.dim == 2 ? ny - 1 : 1); ++iy)
    for (int ix = 1; ix + 1 < nx; ++ix) {
      const int id = mesh.index(ix, iy);
      double v = (w(mesh.index(ix - 1, iy)) - 2.0 * w(id) + w(mesh.index(ix + 1, iy))) * ix2;
      if (mesh.dim == 2)
        v += (w(mesh.index(ix, iy - 1)) - 2.0 * w(id) + w(mesh.index(ix, iy + 1))) * iy2;
      out(id) = v;
    }
  return out;
}

}  // namespace nlpf
