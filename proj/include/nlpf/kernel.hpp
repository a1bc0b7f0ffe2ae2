#pragma once

// Interaction kernel data: samples of J on the mesh difference lattice, the
// node vector a(x) = integral of J(x - .) over the domain, and the sup bound
// S = sup_x integral |J(x - .)|. Convolutions run either as direct quadrature
// sums (reference) or through a zero-padded cyclic FFT of length >= 2N-1 per
// axis (fast path, uniform meshes).

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "nlpf/mesh.hpp"

namespace nlpf {

enum class ConvStrategy { direct, fast };

struct KernelTable {
  std::shared_ptr<const SpatialMesh> mesh;
  Eigen::VectorXd samples;  // lattice values, x-offset fastest
  Eigen::VectorXd a;
  double S = 0.0;
  ConvStrategy strategy = ConvStrategy::fast;

  int lat_nx = 0, lat_ny = 1;  // lattice dims: 2*nx-1 by 2*ny-1 (1 in 1D)
  int pad_x = 0, pad_y = 1;    // cyclic transform sizes
  Eigen::VectorXcd khat;       // transform of the cyclically embedded kernel

  double sample(int off_x, int off_y = 0) const {
    return samples((off_x + lat_nx / 2) + lat_nx * (off_y + lat_ny / 2));
  }
};

using KernelFn = std::function<double(double, double)>;

KernelTable build_kernel(const KernelFn& J, std::shared_ptr<const SpatialMesh> mesh);
// Same table from raw lattice samples (size (2nx-1)*(2ny-1), x fastest).
KernelTable build_kernel_from_samples(const Eigen::VectorXd& samples,
                                      std::shared_ptr<const SpatialMesh> mesh);

Eigen::VectorXd convolve(const KernelTable& table, const Eigen::VectorXd& phi);
// Reference path: plain O(N^2) quadrature sum, independent of the FFT route.
Eigen::VectorXd convolve_direct(const KernelTable& table, const Eigen::VectorXd& phi);

}  // namespace nlpf
