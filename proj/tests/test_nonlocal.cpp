#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "nlpf/errors.hpp"
#include "nlpf/kernel.hpp"
#include "nlpf/norms.hpp"

using namespace nlpf;

namespace {

// Fine-quadrature reference for a(x0) = integral over (0,1) of J(x0 - y) dy,
// composite trapezoid with 10^6 intervals, long double accumulation. Kept
// independent of the KernelTable machinery.
double a_oracle_gauss(double x0) {
  const long long n = 1'000'000;
  const long double dy = 1.0L / n;
  long double acc = 0.0L;
  for (long long i = 0; i <= n; ++i) {
    const long double y = static_cast<long double>(i) / n;
    const long double r = static_cast<long double>(x0) - y;
    const long double w = (i == 0 || i == n) ? 0.5L : 1.0L;
    acc += w * std::exp(-r * r);
  }
  return static_cast<double>(acc * dy);
}

Eigen::VectorXd random_field(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(gen);
  return v;
}

}  // namespace

TEST_CASE("zero kernel: a = 0, S = 0, convolution vanishes") {
  auto m = testutil::mesh1d(33);
  const KernelTable k = testutil::zero_kernel(m);
  CHECK(k.a.cwiseAbs().maxCoeff() == 0.0);
  CHECK(k.S == 0.0);
  const Eigen::VectorXd phi = random_field(33, 7);
  CHECK(convolve(k, phi).cwiseAbs().maxCoeff() == 0.0);
  CHECK(convolve_direct(k, phi).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constant kernel integrates to the domain measure") {
  auto m = testutil::mesh1d(65);
  const KernelTable k = build_kernel([](double, double) { return 1.0; }, m);
  CHECK((k.a.array() - 1.0).abs().maxCoeff() <= 1e-13);
  CHECK(k.S == doctest::Approx(1.0).epsilon(1e-13));

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(65);
  const Eigen::VectorXd conv = convolve(k, ones);
  CHECK((conv.array() - 1.0).abs().maxCoeff() <= 1e-13);
  // the nonlocal operator a*phi - J*phi annihilates constants
  CHECK((k.a.cwiseProduct(ones) - conv).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("a(x) near 0.5 matches a fine-quadrature oracle at two resolutions") {
  // Coarse mesh: 0.5 is not a node, so compare at the nearest node. The gap
  // to the oracle is the trapezoid quadrature error, a few 1e-5 here.
  {
    auto m = testutil::mesh1d(64);
    const KernelTable k =
        build_kernel([](double dx, double) { return std::exp(-dx * dx); }, m);
    int best = 0;
    for (int i = 1; i < 64; ++i)
      if (std::abs(m->xs(i) - 0.5) < std::abs(m->xs(best) - 0.5)) best = i;
    const double oracle = a_oracle_gauss(m->xs(best));
    CHECK(std::abs(k.a(best) - oracle) <= 5e-5);
    // frozen regression values for this exact configuration
    CHECK(std::abs(k.a(best) - 0.922480259865) <= 2e-9);
    CHECK(std::abs(oracle - 0.922512958886) <= 2e-9);
  }
  // Dense mesh: node at 0.5 exactly; quadrature error drops below 1e-6.
  {
    auto m = testutil::mesh1d(2049);
    const KernelTable k =
        build_kernel([](double dx, double) { return std::exp(-dx * dx); }, m);
    const int mid = 1024;
    REQUIRE(m->xs(mid) == doctest::Approx(0.5).epsilon(1e-15));
    const double oracle = a_oracle_gauss(0.5);
    CHECK(std::abs(k.a(mid) - oracle) <= 1e-6);
    CHECK(std::abs(oracle - 0.922562012825) <= 2e-9);
  }
}

TEST_CASE("asymmetric kernels are rejected") {
  auto m = testutil::mesh1d(9);
  CHECK_THROWS_AS(build_kernel([](double dx, double) { return dx; }, m),
                  KernelError);

  Eigen::VectorXd samples(17);  // difference lattice of a 9-node axis
  for (int i = 0; i < 17; ++i) {
    const double off = (i - 8) * m->spacing[0];
    samples(i) = std::exp(-off * off);
  }
  samples(12) += 1e-3;  // break evenness at one offset
  CHECK_THROWS_AS(build_kernel_from_samples(samples, m), KernelError);

  CHECK_THROWS_AS(build_kernel_from_samples(Eigen::VectorXd::Ones(5), m),
                  ShapeError);
}

TEST_CASE("fast transform path agrees with the direct sum") {
  auto m = testutil::mesh1d(64);
  KernelTable k = build_kernel(
      [](double dx, double) { return std::exp(-dx * dx / 0.02); }, m);
  for (unsigned s = 0; s < 20; ++s) {
    const Eigen::VectorXd phi = random_field(64, 100 + s);
    const Eigen::VectorXd fast = convolve(k, phi);
    const Eigen::VectorXd direct = convolve_direct(k, phi);
    const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
    CHECK((fast - direct).cwiseAbs().maxCoeff() / scale <= 1e-12);
  }
  // the strategy tag switches convolve() to the direct route
  k.strategy = ConvStrategy::direct;
  const Eigen::VectorXd phi = random_field(64, 55);
  CHECK((convolve(k, phi) - convolve_direct(k, phi)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("2d kernel table: symmetry, agreement, bound") {
  auto m = testutil::mesh2d(17, 13);
  const KernelTable k = build_kernel(
      [](double dx, double dy) { return std::exp(-(dx * dx + 2.0 * dy * dy)); },
      m);
  CHECK(k.lat_nx == 33);
  CHECK(k.lat_ny == 25);
  for (unsigned s = 0; s < 5; ++s) {
    const Eigen::VectorXd phi = random_field(m->node_count(), 900 + s);
    const Eigen::VectorXd fast = convolve(k, phi);
    const Eigen::VectorXd direct = convolve_direct(k, phi);
    const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
    CHECK((fast - direct).cwiseAbs().maxCoeff() / scale <= 1e-12);
    CHECK(linf_norm(fast) <= k.S * linf_norm(phi) + 1e-10);
  }
  CHECK(k.a.cwiseAbs().maxCoeff() <= k.S + 1e-12);
}

TEST_CASE("convolution is self-adjoint, linear, and bounded") {
  auto mp = testutil::mesh1d(64);
  const SpatialMesh& m = *mp;
  const KernelTable k = build_kernel(
      [](double dx, double) { return std::exp(-dx * dx / 0.02); }, mp);

  for (unsigned s = 0; s < 10; ++s) {
    const Eigen::VectorXd phi = random_field(64, 300 + s);
    const Eigen::VectorXd psi = random_field(64, 400 + s);
    const double lhs = m.quad_w.dot(convolve(k, phi).cwiseProduct(psi));
    const double rhs = m.quad_w.dot(phi.cwiseProduct(convolve(k, psi)));
    CHECK(std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30}) <=
          1e-12);

    const Eigen::VectorXd lin =
        convolve(k, (2.5 * phi + psi).eval()) -
        (2.5 * convolve(k, phi) + convolve(k, psi));
    CHECK(lin.cwiseAbs().maxCoeff() <= 1e-13);

    CHECK(linf_norm(convolve(k, phi)) <= k.S * linf_norm(phi) + 1e-10);
  }
  CHECK(k.a.cwiseAbs().maxCoeff() <= k.S + 1e-12);

  CHECK_THROWS_AS(convolve(k, Eigen::VectorXd::Ones(63)), ShapeError);
}
