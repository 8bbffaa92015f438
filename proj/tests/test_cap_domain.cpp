#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "capillary/body.hpp"
#include "capillary/cap_domain.hpp"

using namespace capillary;

namespace {

constexpr double kPi = std::numbers::pi;

Mat ellipsoid3() {
  Mat M(3, 3);
  M << 1.3, 0.1, 0.0, 0.1, 0.8, 0.0, 0.0, 0.0, 1.1;
  return M;
}

double max_entry(const std::vector<Mat>& t, const CapGrid& g, bool interior_only) {
  double e = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!interior_only || !g.boundary[i]) e = std::max(e, t[i].cwiseAbs().maxCoeff());
  return e;
}

// Largest |Hess f - (-sin theta)| over interior nodes, isotropic n = 1.
double sine_hessian_error(int N) {
  const CapillaryCap cap = build_cap(MinkowskiNorm::isotropic(2), -0.4);
  const SetupPtr S = CapSetup::make(cap, {N, 0});
  const CapGrid& g = S->grid();
  std::vector<double> f(S->size());
  for (int i = 0; i < S->size(); ++i) f[i] = std::sin(g.chart[i][0]);
  const std::vector<Mat> H = covariant_hessian(S->metric(), f);
  double e = 0.0;
  for (int i = 0; i < S->size(); ++i)
    if (!g.boundary[i]) e = std::max(e, std::abs(H[i](0, 0) + std::sin(g.chart[i][0])));
  return e;
}

}  // namespace

TEST(CapDomain, QuarterArcGrid) {
  const CapillaryCap cap = build_cap(MinkowskiNorm::isotropic(2), 0.0);
  const CapGrid g = build_grid(cap, {4, 0});
  ASSERT_EQ(g.size, 5);
  EXPECT_NEAR(g.h, kPi / 4, 1e-12);
  for (int i = 0; i < 5; ++i) {
    const double t = -kPi / 2 + i * kPi / 4;
    EXPECT_NEAR(g.point[i][0], std::sin(t), 1e-12);
    EXPECT_NEAR(g.point[i][1], std::cos(t), 1e-12);
  }
  EXPECT_TRUE(g.boundary[0] && g.boundary[4]);
}

TEST(CapDomain, BoundaryNodesOnThePlane) {
  const CapillaryCap cap = build_cap(MinkowskiNorm::ellipsoidal(ellipsoid3()), -0.3);
  const CapGrid g = build_grid(cap, {16, 32});
  int nb = 0;
  for (int i : g.boundary_nodes()) {
    EXPECT_LT(std::abs(g.point[i][2]), 1e-10);
    ++nb;
  }
  EXPECT_EQ(nb, 32);
  for (int i = 0; i < g.size; ++i)
    if (!g.boundary[i]) EXPECT_GT(g.point[i][2], 1e-6);
}

TEST(CapDomain, HemisphereArea) {
  const SetupPtr S = CapSetup::make(build_cap(MinkowskiNorm::isotropic(3), 0.0), {128, 128});
  std::vector<double> one(S->size(), 1.0);
  EXPECT_NEAR(integrate(S->metric(), one), 2.0 * kPi, 1e-3);
}

TEST(CapDomain, HalfCircleLengthAndLinearity) {
  const SetupPtr S = CapSetup::make(build_cap(MinkowskiNorm::isotropic(2), 0.0), {400, 0});
  std::vector<double> one(S->size(), 1.0), f(S->size()), cf(S->size());
  EXPECT_NEAR(integrate(S->metric(), one), kPi, 1e-6);
  for (int i = 0; i < S->size(); ++i) {
    f[i] = std::exp(S->grid().point[i][0]);
    cf[i] = 3.5 * f[i];
  }
  EXPECT_DOUBLE_EQ(integrate(S->metric(), cf), 3.5 * integrate(S->metric(), f));
}

TEST(CapDomain, IsotropicMetricIsRound) {
  const SetupPtr S = CapSetup::make(build_cap(MinkowskiNorm::isotropic(2), -0.5), {64, 0});
  for (const NodeMetric& m : S->metric().node) {
    EXPECT_NEAR(m.g(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(m.Q(0, 0, 0), 0.0, 1e-12);
    EXPECT_GT(m.weight, 0.0);
  }
}

TEST(CapDomain, EllipsoidalMetricIsPullback) {
  const Mat M = ellipsoid3();
  const SetupPtr S = CapSetup::make(build_cap(MinkowskiNorm::ellipsoidal(M), -0.3), {16, 32});
  const Mat Minv = M.inverse();
  for (const NodeMetric& m : S->metric().node) {
    EXPECT_LT((m.g - m.dxi.transpose() * Minv * m.dxi).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(m.Q.max_abs(), 1e-8);
    EXPECT_GT(m.g.determinant(), 0.0);
  }
}

TEST(CapDomain, PerturbedQIsSymmetric) {
  const MinkowskiNorm N = MinkowskiNorm::perturbed(ellipsoid3(), 0.05, {{1.0, {4, 0, 0}}, {1.0, {0, 2, 2}}});
  const SetupPtr S = CapSetup::make(build_cap(N, -0.3), {16, 32});
  for (const NodeMetric& m : S->metric().node)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          EXPECT_NEAR(m.Q(i, j, k), m.Q(j, i, k), 1e-12);
          EXPECT_NEAR(m.Q(i, j, k), m.Q(i, k, j), 1e-12);
        }
}

TEST(CapDomain, ConstantFieldHasZeroHessian) {
  const SetupPtr S = CapSetup::make(build_cap(MinkowskiNorm::ellipsoidal(ellipsoid3()), -0.3), {16, 32});
  std::vector<double> c(S->size(), 2.5);
  EXPECT_LT(max_entry(covariant_hessian(S->metric(), c), S->grid(), false), 1e-9);
}

TEST(CapDomain, SineHessianConvergesAtSecondOrder) {
  const double e1 = sine_hessian_error(50), e2 = sine_hessian_error(100), e3 = sine_hessian_error(200);
  EXPECT_LT(e3, 1e-3);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.3);
  EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.3);
}

TEST(CapDomain, KernelTauVanishesAtSecondOrder) {
  const CapillaryCap cap = build_cap(MinkowskiNorm::ellipsoidal(ellipsoid3()), -0.3);
  std::vector<double> err;
  for (int N : {24, 48}) {
    const SetupPtr S = CapSetup::make(cap, {N, 2 * N});
    double e = 0.0;
    for (int a = 0; a < 2; ++a) e = std::max(e, max_entry(tau_field(S->metric(), S->kernel(a)), S->grid(), false));
    err.push_back(e);
  }
  EXPECT_GT(std::log2(err[0] / err[1]), 1.7);
}

TEST(CapDomain, GaussResidualConverges) {
  const MinkowskiNorm N = MinkowskiNorm::perturbed(ellipsoid3(), 0.05, {{1.0, {4, 0, 0}}, {1.0, {0, 2, 2}}});
  const CapillaryCap cap = build_cap(N, -0.3);
  const GaussCheck a = gauss_check(assemble_metric(cap, build_grid(cap, {12, 24})));
  const GaussCheck b = gauss_check(assemble_metric(cap, build_grid(cap, {24, 48})));
  EXPECT_GT(std::log2(a.gauss_max / b.gauss_max), 1.7);
  EXPECT_GT(std::log2(a.compat_max / b.compat_max), 1.7);
}

TEST(CapDomain, RobinResidualOfEllAndKernel) {
  const MinkowskiNorm N = MinkowskiNorm::ellipsoidal(ellipsoid3());
  const CapillaryCap cap = build_cap(N, -0.3);
  std::vector<double> r_ell, r_ker;
  for (int n_rho : {12, 24}) {
    const SetupPtr S = CapSetup::make(cap, {n_rho, 2 * n_rho});
    const RobinReport a = robin_residual(S->metric(), S->ell());
    const RobinReport b = robin_residual(S->metric(), S->kernel(0));
    r_ell.push_back(a.max_abs);
    r_ker.push_back(b.max_abs);
    EXPECT_LT(a.max_form_gap, 1e-8);
  }
  EXPECT_LT(r_ell[1], r_ell[0] / 3.0);
  EXPECT_LT(r_ker[1], r_ker[0] / 3.0);
  EXPECT_LT(r_ell[1], 5e-3);
}

TEST(CapDomain, NeumannCaseDetectsOddField) {
  const SetupPtr S = CapSetup::make(build_cap(MinkowskiNorm::isotropic(2), 0.0), {64, 0});
  std::vector<double> height(S->size());
  for (int i = 0; i < S->size(); ++i) height[i] = S->grid().point[i][1];
  EXPECT_GT(robin_residual(S->metric(), height).max_abs, 0.5);
  EXPECT_LT(robin_residual(S->metric(), S->ell()).max_abs, 1e-10);
}
