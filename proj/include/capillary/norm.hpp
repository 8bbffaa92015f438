#pragma once

#include <string>
#include <vector>

#include "capillary/dual.hpp"
#include "capillary/tensor.hpp"

namespace capillary {

enum class NormFamily { Isotropic, Ellipsoidal, Perturbed };

// coeff * prod_i u_i^exponents[i], evaluated at u = y/|y|.
struct Monomial {
  double coeff = 1.0;
  std::vector<int> exponents;
};

// Smooth 1-homogeneous norm on R^{n+1}: isotropic, sqrt(y^T M y), or
// sqrt(y^T M y) * (1 + eps * P(y/|y|)) with P a polynomial of even degree.
class MinkowskiNorm {
 public:
  static MinkowskiNorm isotropic(int ambient_dim);
  static MinkowskiNorm ellipsoidal(const Mat& M);
  static MinkowskiNorm perturbed(const Mat& M, double eps, std::vector<Monomial> terms);

  int dim() const { return dim_; }
  NormFamily family() const { return family_; }
  std::string family_name() const;
  const Mat& matrix() const { return M_; }
  const Mat& matrix_inverse() const { return Minv_; }
  double amplitude() const { return eps_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  bool even_horizontal() const { return even_h_; }
  bool even_vertical() const { return even_v_; }
  bool symmetric() const { return even_h_ && even_v_; }

  // Smallest eigenvalue of A_F seen on the construction sample.
  double min_af_eigenvalue() const { return min_af_; }

  template <class T>
  T eval(const T* y) const {
    T q(0.0);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        if (M_(i, j) != 0.0) q = q + M_(i, j) * (y[i] * y[j]);
    using std::sqrt;
    T base = sqrt(q);
    if (family_ != NormFamily::Perturbed) return base;
    T r2(0.0);
    for (int i = 0; i < dim_; ++i) r2 = r2 + y[i] * y[i];
    T r = sqrt(r2);
    T u[3];
    for (int i = 0; i < dim_; ++i) u[i] = y[i] / r;
    T p(0.0);
    for (const Monomial& m : terms_) {
      T t(m.coeff);
      for (int i = 0; i < dim_; ++i)
        if (m.exponents[i] > 0) t = t * ipow(u[i], m.exponents[i]);
      p = p + t;
    }
    return base * (1.0 + eps_ * p);
  }

 private:
  MinkowskiNorm() = default;
  void validate();

  int dim_ = 0;
  NormFamily family_ = NormFamily::Isotropic;
  Mat M_, Minv_;
  double eps_ = 0.0;
  std::vector<Monomial> terms_;
  bool even_h_ = true, even_v_ = true;
  double min_af_ = 0.0;
};

// Derivatives of F at a point, up to third order.
struct NormJet {
  double F = 0.0;
  Vec DF;
  Mat D2F;
  Tensor3 D3F;
};

NormJet norm_jet(const MinkowskiNorm& norm, const Vec& x, int order = 3);

// Jet of y -> F(y) + <w, y> at x. Second and third derivatives are unchanged.
NormJet translate_jet(const NormJet& jet, const Vec& x, const Vec& w);

// Value, gradient and G, Q of 1/2 (F^0)^2 at y.
struct DualJet {
  Vec y;
  double value = 0.0;
  Vec grad;
  Mat G;
  Tensor3 Q;
};

double eval_norm(const MinkowskiNorm& norm, const Vec& y);
Vec cahn_hoffman(const MinkowskiNorm& norm, const Vec& x);
// D^2F restricted to the tangent space of the sphere, in the frame tangent_frame(x).
Mat a_f(const MinkowskiNorm& norm, const Vec& x);
double dual_norm(const MinkowskiNorm& norm, const Vec& zeta);
DualJet dual_jet(const MinkowskiNorm& norm, const Vec& y);
DualJet fd_oracle_jet(const MinkowskiNorm& norm, const Vec& y);

// Orthonormal basis of x^perp (columns), x a unit vector.
Mat tangent_frame(const Vec& x);

// Deterministic quasi-uniform sample of the unit sphere in R^d.
std::vector<Vec> sphere_sample(int d, int count);

// Legendre data at a sphere normal x: z = DF(x) on the Wulff shape, G(z) and Q(z),
// computed from the derivatives of F^2/2 at x.
struct LegendreData {
  Vec z;
  Mat G;
  Tensor3 Q;
};
LegendreData legendre_from_normal(const NormJet& jet);

}  // namespace capillary
