#include "nlpf/kernel.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <vector>

#include "nlpf/errors.hpp"

namespace nlpf {
namespace {

int next_pow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

// In-place row-column transform of a dense Lx-by-Ly complex grid, x fastest.
// A local FFT instance keeps the routine safe under concurrent callers.
void fft_grid(Eigen::VectorXcd& data, int lx, int ly, bool inverse) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(lx), out(lx);
  for (int iy = 0; iy < ly; ++iy) {
    for (int ix = 0; ix < lx; ++ix) in[ix] = data(ix + lx * iy);
    if (inverse) fft.inv(out, in); else fft.fwd(out, in);
    for (int ix = 0; ix < lx; ++ix) data(ix + lx * iy) = out[ix];
  }
  if (ly == 1) return;
  in.resize(ly);
  out.resize(ly);
  for (int ix = 0; ix < lx; ++ix) {
    for (int iy = 0; iy < ly; ++iy) in[iy] = data(ix + lx * iy);
    if (inverse) fft.inv(out, in); else fft.fwd(out, in);
    for (int iy = 0; iy < ly; ++iy) data(ix + lx * iy) = out[iy];
  }
}

void check_symmetry(const Eigen::VectorXd& samples, int lat_nx, int lat_ny) {
  const double scale = samples.size() ? samples.cwiseAbs().maxCoeff() : 0.0;
  const double tol = 1e-12 * std::max(scale, 1e-300);
  const int cx = lat_nx / 2, cy = lat_ny / 2;
  for (int q = -cy; q <= cy; ++q)
    for (int p = -cx; p <= cx; ++p) {
      const double fwd = samples((p + cx) + lat_nx * (q + cy));
      const double rev = samples((-p + cx) + lat_nx * (-q + cy));
      if (std::abs(fwd - rev) > tol)
        throw KernelError("kernel samples are not even under offset reversal");
    }
}

void finish_table(KernelTable& t) {
  check_symmetry(t.samples, t.lat_nx, t.lat_ny);

  const auto& m = *t.mesh;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.node_count());
  t.a = convolve_direct(t, ones);

  {
    // S reuses the direct path on |J|; swap the samples in temporarily.
    KernelTable abs_t = t;
    abs_t.samples = t.samples.cwiseAbs();
    t.S = convolve_direct(abs_t, ones).maxCoeff();
  }

  t.pad_x = next_pow2(t.lat_nx);
  t.pad_y = (t.lat_ny > 1) ? next_pow2(t.lat_ny) : 1;
  Eigen::VectorXcd kc = Eigen::VectorXcd::Zero(t.pad_x * t.pad_y);
  const int cx = t.lat_nx / 2, cy = t.lat_ny / 2;
  for (int q = -cy; q <= cy; ++q)
    for (int p = -cx; p <= cx; ++p) {
      const int ix = ((p % t.pad_x) + t.pad_x) % t.pad_x;
      const int iy = ((q % t.pad_y) + t.pad_y) % t.pad_y;
      kc(ix + t.pad_x * iy) = t.samples((p + cx) + t.lat_nx * (q + cy));
    }
  fft_grid(kc, t.pad_x, t.pad_y, /*inverse=*/false);
  t.khat = std::move(kc);
}

}  // namespace

KernelTable build_kernel(const KernelFn& J, std::shared_ptr<const SpatialMesh> mesh) {
  if (!mesh) throw KernelError("kernel needs a mesh");
  const auto& m = *mesh;
  KernelTable t;
  t.mesh = std::move(mesh);
  t.lat_nx = 2 * m.shape[0] - 1;
  t.lat_ny = (m.dim == 2) ? 2 * m.shape[1] - 1 : 1;
  t.samples.resize(static_cast<Eigen::Index>(t.lat_nx) * t.lat_ny);
  const int cx = t.lat_nx / 2, cy = t.lat_ny / 2;
  for (int q = -cy; q <= cy; ++q)
    for (int p = -cx; p <= cx; ++p) {
      const double dx = p * m.spacing[0];
      const double dy = (m.dim == 2) ? q * m.spacing[1] : 0.0;
      const double val = J(dx, dy);
      if (!std::isfinite(val)) throw KernelError("kernel sample is not finite");
      t.samples((p + cx) + t.lat_nx * (q + cy)) = val;
    }
  finish_table(t);
  return t;
}

KernelTable build_kernel_from_samples(const Eigen::VectorXd& samples,
                                      std::shared_ptr<const SpatialMesh> mesh) {
  if (!mesh) throw KernelError("kernel needs a mesh");
  const auto& m = *mesh;
  KernelTable t;
  t.mesh = std::move(mesh);
  t.lat_nx = 2 * m.shape[0] - 1;
  t.lat_ny = (m.dim == 2) ? 2 * m.shape[1] - 1 : 1;
  if (samples.size() != static_cast<Eigen::Index>(t.lat_nx) * t.lat_ny)
    throw ShapeError("kernel sample table does not match the difference lattice");
  for (Eigen::Index i = 0; i < samples.size(); ++i)
    if (!std::isfinite(samples(i))) throw KernelError("kernel sample is not finite");
  t.samples = samples;
  finish_table(t);
  return t;
}

Eigen::VectorXd convolve_direct(const KernelTable& t, const Eigen::VectorXd& phi) {
  const auto& m = *t.mesh;
  if (phi.size() != m.node_count())
    throw ShapeError("convolution input does not match the mesh");
  const Eigen::VectorXd wphi = m.quad_w.cwiseProduct(phi);
  Eigen::VectorXd out(m.node_count());
  const int nx = m.shape[0];
  const int ny = (m.dim == 2) ? m.shape[1] : 1;
  const int cx = t.lat_nx / 2, cy = t.lat_ny / 2;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      double acc = 0.0;
      for (int jy = 0; jy < ny; ++jy) {
        const int qy = iy - jy + cy;
        for (int jx = 0; jx < nx; ++jx)
          acc += t.samples((ix - jx + cx) + t.lat_nx * qy) * wphi(jx + nx * jy);
      }
      out(ix + nx * iy) = acc;
    }
  return out;
}

Eigen::VectorXd convolve(const KernelTable& t, const Eigen::VectorXd& phi) {
  if (t.strategy == ConvStrategy::direct) return convolve_direct(t, phi);
  const auto& m = *t.mesh;
  if (phi.size() != m.node_count())
    throw ShapeError("convolution input does not match the mesh");
  const int nx = m.shape[0];
  const int ny = (m.dim == 2) ? m.shape[1] : 1;

  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(t.pad_x * t.pad_y);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      b(ix + t.pad_x * iy) = m.quad_w(ix + nx * iy) * phi(ix + nx * iy);
  fft_grid(b, t.pad_x, t.pad_y, /*inverse=*/false);
  b.array() *= t.khat.array();
  fft_grid(b, t.pad_x, t.pad_y, /*inverse=*/true);

  Eigen::VectorXd out(m.node_count());
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      out(ix + nx * iy) = b(ix + t.pad_x * iy).real();
  return out;
}

}  // namespace nlpf
