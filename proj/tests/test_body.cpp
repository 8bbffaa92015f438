#include <gtest/gtest.h>

#include <cmath>

#include "capillary/body.hpp"
#include "capillary/errors.hpp"

using namespace capillary;

namespace {

Mat ellipsoid3() {
  Mat M(3, 3);
  M << 1.3, 0.1, 0.0, 0.1, 0.8, 0.0, 0.0, 0.0, 1.1;
  return M;
}

Mat ellipse2() {
  Mat M(2, 2);
  M << 1.3, 0.0, 0.0, 0.8;
  return M;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

SetupPtr setup_n1(int N = 200) { return CapSetup::make(build_cap(MinkowskiNorm::ellipsoidal(ellipse2()), -0.4), {N, 0}); }
SetupPtr setup_n2(int N = 16) {
  return CapSetup::make(build_cap(MinkowskiNorm::ellipsoidal(ellipsoid3()), -0.3), {N, 2 * N});
}

}  // namespace

TEST(CapillaryBody, TauOfEllIsIdentity) {
  std::vector<double> err;
  for (int N : {12, 24}) {
    const SetupPtr S = setup_n2(N);
    const TauField T = tau(cap_body(S));
    double e = 0.0;
    for (const Mat& t : T.tau) e = std::max(e, (t - Mat::Identity(2, 2)).cwiseAbs().maxCoeff());
    err.push_back(e);
    EXPECT_TRUE(T.positive);
  }
  EXPECT_LT(err[1], err[0] / 3.0);
}

TEST(CapillaryBody, TauIsLinearAndScales) {
  const SetupPtr S = setup_n2();
  const CapBody A = random_body(S, 0.4, 1), B = random_body(S, 0.4, 2);
  CapBody C{S, std::vector<double>(S->size())}, D{S, std::vector<double>(S->size())};
  for (int i = 0; i < S->size(); ++i) {
    C.s[i] = 2.0 * A.s[i] - 0.5 * B.s[i];
    D.s[i] = 3.0 * A.s[i];
  }
  const TauField ta = tau(A), tb = tau(B), tc = tau(C), td = tau(D);
  for (int i = 0; i < S->size(); ++i) {
    EXPECT_LT((tc.tau[i] - (2.0 * ta.tau[i] - 0.5 * tb.tau[i])).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(td.tau[i].determinant(), 9.0 * ta.tau[i].determinant(), 1e-9 * std::abs(ta.tau[i].determinant()) + 1e-9);
  }
}

TEST(CapillaryBody, KernelProjection) {
  const SetupPtr S = setup_n2();
  const CapBody base = kernel_project(cap_body(S)).body;
  CapBody shifted = cap_body(S);
  for (int i = 0; i < S->size(); ++i) shifted.s[i] += 0.1 * S->kernel(0)[i];
  const KernelProjection kp = kernel_project(shifted);
  EXPECT_LT(max_diff(kp.body.s, base.s), 1e-10);
  // Projected body is orthogonal to the kernel.
  for (double m : kernel_moments(*S, kp.body.s)) EXPECT_LT(std::abs(m), 1e-12);
  // Already orthogonal: unchanged.
  EXPECT_LT(max_diff(kernel_project(kp.body).body.s, kp.body.s), 1e-13);
  // The discrete ell carries only an O(h^2) kernel part.
  EXPECT_LT(max_diff(base.s, S->ell()), 1e-3);
  const TauField t1 = tau(shifted), t2 = tau(kp.body);
  for (int i = 0; i < S->size(); ++i) EXPECT_LT(std::abs(t1.tau[i].determinant() - t2.tau[i].determinant()), 1e-10);
}

TEST(CapillaryBody, ReconstructCapAndScaledCap) {
  const SetupPtr S = setup_n1(400);
  const CapillaryCap& cap = S->cap();
  const Reconstruction R = reconstruct(cap_body(S));
  double e = 0.0;
  for (int i = 0; i < S->size(); ++i) e = std::max(e, (R.points[i] - S->grid().point[i]).norm());
  EXPECT_LT(e, 1e-4);
  const double c = 1.7;
  const Reconstruction Rc = reconstruct(cap_body(S, c));
  double m = 0.0;
  for (const Vec& X : Rc.points) m = std::max(m, std::abs(dual_norm(cap.norm(), X - c * cap.omega0() * cap.ef()) - c));
  EXPECT_LT(m, 1e-4);
  EXPECT_LT(Rc.boundary_height, 1e-4);
  EXPECT_LT(Rc.capillary_defect, 1e-2);
}

TEST(CapillaryBody, KernelShiftTranslatesSurface) {
  const SetupPtr S = setup_n2(24);
  const CapBody B = random_body(S, 0.4, 5);
  CapBody B2 = B;
  const double eps = 0.05;
  for (int i = 0; i < S->size(); ++i) B2.s[i] += eps * S->kernel(1)[i];
  const Reconstruction r1 = reconstruct(B), r2 = reconstruct(B2);
  const Vec shift = (Vec(3) << 0.0, eps, 0.0).finished();
  double e = 0.0;
  for (int i = 0; i < S->size(); ++i) e = std::max(e, (r2.points[i] - r1.points[i] - shift).norm());
  EXPECT_LT(e, 5e-3);
}

TEST(CapillaryBody, SupportRoundTrip) {
  std::vector<double> err;
  for (int N : {100, 200}) {
    const SetupPtr S = setup_n1(N);
    const CapBody B = random_body(S, 0.4, 3);
    err.push_back(max_diff(support_of_points(*S, reconstruct(B).points), B.s));
  }
  // Each node's own point attains the maximum, so this is exact up to round-off.
  EXPECT_LT(err[0], 1e-12);
  EXPECT_LT(err[1], 1e-12);
}

TEST(CapillaryBody, NotAdmissibleIsRejected) {
  const SetupPtr S = setup_n1(64);
  CapBody B = cap_body(S);
  for (int i = 0; i < S->size(); ++i) B.s[i] = -B.s[i];
  EXPECT_THROW(reconstruct(B), NotAdmissible);
}

TEST(CapillaryBody, PsumBasics) {
  const SetupPtr S = setup_n2();
  const CapBody K = random_body(S, 0.4, 7), L = random_body(S, 0.4, 8);
  for (double p : {1.0, 2.0, 4.0}) EXPECT_LT(max_diff(psum(0.5, K, 0.5, K, p).s, K.s), 1e-13);
  const CapBody sum = psum(1.0, K, 1.0, L, 1.0);
  for (int i = 0; i < S->size(); ++i) EXPECT_DOUBLE_EQ(sum.s[i], K.s[i] + L.s[i]);
  for (double p : {1.0, 2.0, 4.0}) EXPECT_TRUE(admissibility(psum(0.7, K, 1.3, L, p)).admissible) << "p = " << p;
  CapBody neg = K;
  neg.s[0] = -1.0;
  EXPECT_THROW(psum(1.0, neg, 1.0, L, 2.0), NotPositive);
}

TEST(CapillaryBody, PointCloudOracle) {
  const SetupPtr S = setup_n1(100);
  const std::vector<Vec> X1 = surface_samples(random_body(S, 0.3, 1));
  const std::vector<Vec> X2 = surface_samples(cap_body(S, 0.5));
  const std::vector<Vec> direct = pointcloud_psum_oracle(1.0, X1, 1.0, X2, 1.0);
  EXPECT_EQ(direct.size(), X1.size() * X2.size());
  EXPECT_LT((direct[0] - (X1[0] + X2[0])).norm(), 1e-15);
  // Inputs dip below the plane only by the reconstruction error; nonnegative
  // combinations cannot go further than that.
  double low = 0.0;
  for (const Vec& x : X1) low = std::min(low, x[1]);
  for (const Vec& x : X2) low = std::min(low, x[1]);
  const double reach = 1.0 + std::sqrt(2.0);
  for (const Vec& y : pointcloud_psum_oracle(1.0, X1, 2.0, X2, 2.0)) EXPECT_GE(y[1], reach * low - 1e-12);
  EXPECT_GT(low, -1e-3);
}

TEST(CapillaryBody, TildeOfCapIsOne) {
  const SetupPtr S = setup_n2();
  const TildeData td = to_tilde(cap_body(S));
  for (double v : td.s) EXPECT_NEAR(v, 1.0, 1e-14);
  const CapBody B = random_body(S, 0.4, 9);
  const TildeData tb = to_tilde(B);
  EXPECT_TRUE(tb.positivity_agrees);
  EXPECT_LT(max_diff(from_tilde(S, tb.s).s, B.s), 1e-14);
}

TEST(CapillaryBody, TildeBoundaryIsNeumann) {
  std::vector<double> err;
  for (int N : {12, 24}) {
    const SetupPtr S = setup_n2(N);
    const TildeData td = to_tilde(random_body(S, 0.4, 9));
    const MetricData& tm = S->metric(Form::Tilde);
    err.push_back(robin_residual(tm, tm.remove_kernel(td.s)).max_abs);
  }
  EXPECT_LT(err[1], 0.05);
  EXPECT_LT(err[1], err[0]);
}

TEST(CapillaryBody, EvenSymmetrize) {
  const SetupPtr S = setup_n2();
  const CapBody B = random_body(S, 0.4, 11);
  const std::vector<double> e = even_symmetrize(*S, B.s);
  for (int i = 0; i < S->size(); ++i) EXPECT_EQ(e[i], e[S->grid().mirror[i]]);
  EXPECT_EQ(even_symmetrize(*S, e), e);
  for (double v : even_symmetrize(*S, S->kernel(0))) EXPECT_LT(std::abs(v), 1e-14);

  Mat M = Mat::Identity(3, 3);
  M(0, 2) = M(2, 0) = 0.3;
  const SetupPtr T = CapSetup::make(build_cap(MinkowskiNorm::ellipsoidal(M), -0.3), {16, 32});
  EXPECT_THROW(even_symmetrize(*T, T->ell()), NotSymmetricNorm);
}
