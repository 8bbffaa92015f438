#include "capillary/norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "capillary/errors.hpp"

namespace capillary {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Derivatives of a scalar function of m variables by nested forward duals.
// `fn` is a generic callable taking const T* and returning T.
template <class Fn>
NormJet jet_of(const Fn& fn, int m, const Vec& x, int order) {
  NormJet jet;
  jet.DF = Vec::Zero(m);
  jet.D2F = Mat::Zero(m, m);
  if (order >= 3) jet.D3F = Tensor3(m);
  if (order <= 0) {
    jet.F = fn(x.data());
    return jet;
  }
  if (order == 1) {
    D1 y[3];
    for (int i = 0; i < m; ++i) {
      for (int a = 0; a < m; ++a) y[a] = D1(x[a], a == i ? 1.0 : 0.0);
      D1 r = fn(static_cast<const D1*>(y));
      jet.F = r.a;
      jet.DF[i] = r.b;
    }
    return jet;
  }
  if (order == 2) {
    D2 y[3];
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        for (int a = 0; a < m; ++a)
          y[a] = D2(D1(x[a], a == j ? 1.0 : 0.0), D1(a == i ? 1.0 : 0.0, 0.0));
        D2 r = fn(static_cast<const D2*>(y));
        jet.F = r.a.a;
        jet.DF[j] = r.a.b;
        jet.DF[i] = r.b.a;
        jet.D2F(i, j) = jet.D2F(j, i) = r.b.b;
      }
    return jet;
  }
  D3 y[3];
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      for (int k = j; k < m; ++k) {
        for (int a = 0; a < m; ++a)
          y[a] = D3(D2(D1(x[a], a == k ? 1.0 : 0.0), D1(a == j ? 1.0 : 0.0, 0.0)),
                    D2(D1(a == i ? 1.0 : 0.0, 0.0), D1(0.0, 0.0)));
        D3 r = fn(static_cast<const D3*>(y));
        jet.F = r.a.a.a;
        jet.DF[k] = r.a.a.b;
        jet.DF[j] = r.a.b.a;
        jet.DF[i] = r.b.a.a;
        jet.D2F(j, k) = jet.D2F(k, j) = r.a.b.b;
        jet.D2F(i, k) = jet.D2F(k, i) = r.b.a.b;
        jet.D2F(i, j) = jet.D2F(j, i) = r.b.b.a;
        const double v = r.b.b.b;
        jet.D3F(i, j, k) = jet.D3F(i, k, j) = jet.D3F(j, i, k) = v;
        jet.D3F(j, k, i) = jet.D3F(k, i, j) = jet.D3F(k, j, i) = v;
      }
  return jet;
}

// Multi-start maximization of <y, zeta>/F(y) over the sphere.
double sup_ratio(const MinkowskiNorm& norm, const Vec& zeta) {
  const int d = norm.dim();
  const std::vector<Vec>& starts = [&]() -> const std::vector<Vec>& {
    static const std::vector<Vec> s2 = sphere_sample(2, 2000);
    static const std::vector<Vec> s3 = sphere_sample(3, 6000);
    return d == 2 ? s2 : s3;
  }();
  std::vector<std::pair<double, int>> ranked;
  ranked.reserve(starts.size());
  for (size_t i = 0; i < starts.size(); ++i)
    ranked.emplace_back(starts[i].dot(zeta) / norm.eval(starts[i].data()), static_cast<int>(i));
  std::partial_sort(ranked.begin(), ranked.begin() + 4, ranked.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });

  double best = ranked[0].first;
  for (int c = 0; c < 4; ++c) {
    Vec y = starts[ranked[c].second];
    double val = ranked[c].first;
    for (int it = 0; it < 60; ++it) {
      const Mat T = tangent_frame(y);
      // Homogeneity removes the normalization: g(s) = <y+Ts, zeta>/F(y+Ts).
      auto g = [&](const auto* s) {
        using T_ = std::remove_cv_t<std::remove_reference_t<decltype(s[0])>>;
        T_ p[3];
        T_ num(0.0);
        for (int a = 0; a < d; ++a) {
          p[a] = T_(y[a]);
          for (int b = 0; b < d - 1; ++b) p[a] = p[a] + T(a, b) * s[b];
          num = num + zeta[a] * p[a];
        }
        return num / norm.eval(static_cast<const T_*>(p));
      };
      const NormJet j = jet_of(g, d - 1, Vec::Zero(d - 1), 2);
      Vec step;
      Eigen::SelfAdjointEigenSolver<Mat> es(j.D2F);
      if (es.eigenvalues().maxCoeff() < 0.0)
        step = -j.D2F.ldlt().solve(j.DF);
      else
        step = 0.1 * j.DF / std::max(1.0, j.DF.norm());
      double t = 1.0;
      bool moved = false;
      for (int k = 0; k < 30; ++k) {
        Vec yn = (y + T * (t * step)).normalized();
        const double vn = yn.dot(zeta) / norm.eval(yn.data());
        if (vn >= val) {
          moved = vn > val;
          y = yn;
          val = vn;
          break;
        }
        t *= 0.5;
      }
      if (!moved || step.norm() < 1e-15) break;
    }
    best = std::max(best, val);
  }
  return best;
}

}  // namespace

std::vector<Vec> sphere_sample(int d, int count) {
  std::vector<Vec> pts;
  pts.reserve(count);
  if (d == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * std::numbers::pi * (i + 0.5) / count;
      Vec v(2);
      v << std::cos(t), std::sin(t);
      pts.push_back(v);
    }
    return pts;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    Vec v(3);
    v << r * std::cos(golden * i), r * std::sin(golden * i), z;
    pts.push_back(v);
  }
  return pts;
}

Mat tangent_frame(const Vec& x) {
  const int d = static_cast<int>(x.size());
  Mat T(d, d - 1);
  int col = 0;
  // Use the coordinate axes least aligned with x.
  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(x[a]) < std::abs(x[b]); });
  for (int idx = 0; idx < d && col < d - 1; ++idx) {
    Vec v = Vec::Unit(d, order[idx]);
    v -= v.dot(x) * x;
    for (int c = 0; c < col; ++c) v -= v.dot(T.col(c)) * T.col(c);
    const double nv = v.norm();
    if (nv < 1e-8) continue;
    T.col(col++) = v / nv;
  }
  return T;
}

MinkowskiNorm MinkowskiNorm::isotropic(int ambient_dim) {
  if (ambient_dim != 2 && ambient_dim != 3) throw ConfigError("norm dimension must be 2 or 3");
  MinkowskiNorm n;
  n.dim_ = ambient_dim;
  n.family_ = NormFamily::Isotropic;
  n.M_ = Mat::Identity(ambient_dim, ambient_dim);
  n.validate();
  return n;
}

MinkowskiNorm MinkowskiNorm::ellipsoidal(const Mat& M) {
  if (M.rows() != M.cols() || (M.rows() != 2 && M.rows() != 3))
    throw ConfigError("norm matrix must be 2x2 or 3x3");
  MinkowskiNorm n;
  n.dim_ = static_cast<int>(M.rows());
  n.family_ = NormFamily::Ellipsoidal;
  n.M_ = M;
  n.validate();
  return n;
}

MinkowskiNorm MinkowskiNorm::perturbed(const Mat& M, double eps, std::vector<Monomial> terms) {
  if (M.rows() != M.cols() || (M.rows() != 2 && M.rows() != 3))
    throw ConfigError("norm matrix must be 2x2 or 3x3");
  MinkowskiNorm n;
  n.dim_ = static_cast<int>(M.rows());
  n.family_ = NormFamily::Perturbed;
  n.M_ = M;
  n.eps_ = eps;
  for (Monomial& m : terms) {
    if (static_cast<int>(m.exponents.size()) != n.dim_)
      throw ConfigError("monomial exponent count must equal the ambient dimension");
    for (int e : m.exponents)
      if (e < 0) throw ConfigError("monomial exponents must be nonnegative");
  }
  n.terms_ = std::move(terms);
  n.validate();
  return n;
}

std::string MinkowskiNorm::family_name() const {
  switch (family_) {
    case NormFamily::Isotropic: return "isotropic";
    case NormFamily::Ellipsoidal: return "ellipsoidal";
    case NormFamily::Perturbed: return "perturbed";
  }
  return "";
}

void MinkowskiNorm::validate() {
  const int d = dim_;
  if ((M_ - M_.transpose()).cwiseAbs().maxCoeff() > 1e-14 * M_.cwiseAbs().maxCoeff())
    throw NonConvexNorm("matrix is not symmetric");
  Eigen::LLT<Mat> llt(M_);
  if (llt.info() != Eigen::Success) throw NonConvexNorm("matrix is not positive definite");
  Minv_ = llt.solve(Mat::Identity(d, d));
  Minv_ = 0.5 * (Minv_ + Minv_.transpose());

  // Symmetry flags follow from the structure of the family.
  bool coupled = false;
  for (int a = 0; a < d - 1; ++a) coupled = coupled || M_(a, d - 1) != 0.0;
  even_h_ = !coupled;
  even_v_ = !coupled;
  if (family_ == NormFamily::Perturbed && eps_ != 0.0) {
    for (const Monomial& m : terms_) {
      if (m.coeff == 0.0) continue;
      int hsum = 0;
      for (int a = 0; a < d - 1; ++a) hsum += m.exponents[a];
      if (hsum % 2) even_h_ = false;
      if (m.exponents[d - 1] % 2) even_v_ = false;
    }
  }

  min_af_ = std::numeric_limits<double>::infinity();
  for (const Vec& x : sphere_sample(d, 10000)) {
    const NormJet j = norm_jet(*this, x, 2);
    if (!(j.F > 0.0)) throw NonConvexNorm("norm is not positive on the sphere");
    const Mat T = tangent_frame(x);
    const Mat A = T.transpose() * j.D2F * T;
    const double lmin = Eigen::SelfAdjointEigenSolver<Mat>(A).eigenvalues().minCoeff();
    min_af_ = std::min(min_af_, lmin);
  }
  if (!(min_af_ > 0.0))
    throw NonConvexNorm("A_F has a nonpositive eigenvalue (min " + std::to_string(min_af_) + ")");

  // Declared symmetries are confirmed on a sample.
  for (const Vec& x : sphere_sample(d, 500)) {
    const double f = eval(x.data());
    Vec xh = -x, xv = x;
    xh[d - 1] = x[d - 1];
    xv[d - 1] = -x[d - 1];
    if (even_h_ && std::abs(eval(xh.data()) - f) > 1e-13 * f)
      throw std::logic_error("declared horizontal evenness does not hold");
    if (even_v_ && std::abs(eval(xv.data()) - f) > 1e-13 * f)
      throw std::logic_error("declared vertical evenness does not hold");
  }
}

NormJet norm_jet(const MinkowskiNorm& norm, const Vec& x, int order) {
  if (x.norm() == 0.0) throw DegeneratePoint("norm jet at the origin");
  return jet_of([&](const auto* y) { return norm.eval(y); }, norm.dim(), x, order);
}

NormJet translate_jet(const NormJet& jet, const Vec& x, const Vec& w) {
  NormJet r = jet;
  r.F += w.dot(x);
  r.DF += w;
  return r;
}

double eval_norm(const MinkowskiNorm& norm, const Vec& y) {
  if (y.norm() == 0.0) return 0.0;
  return norm.eval(y.data());
}

Vec cahn_hoffman(const MinkowskiNorm& norm, const Vec& x) { return norm_jet(norm, x, 1).DF; }

Mat a_f(const MinkowskiNorm& norm, const Vec& x) {
  const NormJet j = norm_jet(norm, x, 2);
  const Mat T = tangent_frame(x);
  Mat A = T.transpose() * j.D2F * T;
  A = 0.5 * (A + A.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<Mat>(A).eigenvalues().minCoeff();
  if (!(lmin > 0.0)) throw NonConvexNorm("A_F not positive definite at a sample point");
  return A;
}

double dual_norm(const MinkowskiNorm& norm, const Vec& zeta) {
  if (zeta.norm() == 0.0) return 0.0;
  if (norm.family() != NormFamily::Perturbed || norm.amplitude() == 0.0)
    return std::sqrt(zeta.dot(norm.matrix_inverse() * zeta));
  return sup_ratio(norm, zeta);
}

LegendreData legendre_from_normal(const NormJet& jet) {
  const int d = static_cast<int>(jet.DF.size());
  const Mat H = jet.DF * jet.DF.transpose() + jet.F * jet.D2F;
  Tensor3 T3(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        T3(i, j, k) = jet.DF[i] * jet.D2F(j, k) + jet.DF[j] * jet.D2F(i, k) +
                      jet.DF[k] * jet.D2F(i, j) + jet.F * jet.D3F(i, j, k);
  // The Legendre map sends x to F(x) DF(x); Q is (-1)-homogeneous, so the
  // value at DF(x) carries an extra factor F(x).
  LegendreData L;
  L.z = jet.DF;
  L.G = H.inverse();
  L.G = 0.5 * (L.G + L.G.transpose());
  L.Q = T3.pullback(L.G);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) L.Q(i, j, k) = -jet.F * L.Q(i, j, k);
  return L;
}

DualJet dual_jet(const MinkowskiNorm& norm, const Vec& y) {
  const int d = norm.dim();
  if (!(y.norm() > 1e-14)) throw DegeneratePoint("dual jet requested at |y| ~ 0");
  DualJet out;
  out.y = y;
  if (norm.family() != NormFamily::Perturbed || norm.amplitude() == 0.0) {
    // Closed form F0 = sqrt(y^T M^{-1} y), differentiated by duals.
    const Mat& Mi = norm.matrix_inverse();
    auto f0 = [&](const auto* v) {
      using T_ = std::remove_cv_t<std::remove_reference_t<decltype(v[0])>>;
      T_ q(0.0);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) q = q + Mi(i, j) * (v[i] * v[j]);
      using std::sqrt;
      return sqrt(q);
    };
    const NormJet j = jet_of(f0, d, y, 3);
    out.value = j.F;
    out.grad = j.DF;
    out.G = j.DF * j.DF.transpose() + j.F * j.D2F;
    out.Q = Tensor3(d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          out.Q(a, b, c) = j.DF[a] * j.D2F(b, c) + j.DF[b] * j.D2F(a, c) + j.DF[c] * j.D2F(a, b) +
                           j.F * j.D3F(a, b, c);
    return out;
  }

  // Invert the Legendre relation F(x) DF(x) = y by Newton's method.
  Vec x = norm.matrix_inverse() * y;
  double rnorm = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 100; ++it) {
    const NormJet j = norm_jet(norm, x, 2);
    const Vec r = j.F * j.DF - y;
    rnorm = r.norm();
    if (rnorm <= 4.0 * kEps * y.norm()) break;
    const Mat H = j.DF * j.DF.transpose() + j.F * j.D2F;
    const Vec dx = H.ldlt().solve(r);
    double t = 1.0;
    for (int k = 0; k < 40; ++k) {
      const Vec xn = x - t * dx;
      const NormJet jn = norm_jet(norm, xn, 1);
      if ((jn.F * jn.DF - y).norm() < rnorm || k == 39) {
        x = xn;
        break;
      }
      t *= 0.5;
    }
    if (dx.norm() * t <= 2.0 * kEps * x.norm()) break;
  }
  if (!(rnorm <= 1e-10 * y.norm())) throw NoConvergence("Legendre inversion failed");
  const NormJet j = norm_jet(norm, x, 3);
  const LegendreData L = legendre_from_normal(j);
  out.value = j.F;
  out.grad = x / j.F;
  out.G = L.G;
  out.Q = L.Q;
  // L describes the point DF(x) = y / F(x); rescale Q back to y.
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) out.Q(a, b, c) /= j.F;
  return out;
}

DualJet fd_oracle_jet(const MinkowskiNorm& norm, const Vec& y) {
  const int d = norm.dim();
  if (!(y.norm() > 1e-14)) throw DegeneratePoint("oracle jet requested at |y| ~ 0");
  const double scale = y.norm();
  auto phi = [&](const Vec& v) {
    const double f = dual_norm(norm, v);
    return 0.5 * f * f;
  };
  auto second = [&](const Vec& c, int i, int j, double h) {
    const Vec ei = Vec::Unit(d, i) * h, ej = Vec::Unit(d, j) * h;
    if (i == j) return (phi(c + ei) - 2.0 * phi(c) + phi(c - ei)) / (h * h);
    return (phi(c + ei + ej) - phi(c + ei - ej) - phi(c - ei + ej) + phi(c - ei - ej)) / (4.0 * h * h);
  };

  DualJet out;
  out.y = y;
  out.value = dual_norm(norm, y);
  const double h1 = std::pow(kEps, 0.2) * scale;
  out.grad = Vec::Zero(d);
  for (int i = 0; i < d; ++i) {
    const Vec e = Vec::Unit(d, i) * h1;
    const double f1 = dual_norm(norm, y + e), fm1 = dual_norm(norm, y - e);
    const double f2 = dual_norm(norm, y + 2.0 * e), fm2 = dual_norm(norm, y - 2.0 * e);
    out.grad[i] = (8.0 * (f1 - fm1) - (f2 - fm2)) / (12.0 * h1);
  }
  const double h2 = std::pow(kEps, 0.25) * scale;
  out.G = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) out.G(i, j) = out.G(j, i) = second(y, i, j, h2);

  const double h3 = std::pow(kEps, 0.2) * scale;
  out.Q = Tensor3(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      for (int k = j; k < d; ++k) {
        const Vec ek = Vec::Unit(d, k) * h3;
        const double v = (second(y + ek, i, j, h3) - second(y - ek, i, j, h3)) / (2.0 * h3);
        out.Q(i, j, k) = out.Q(i, k, j) = out.Q(j, i, k) = v;
        out.Q(j, k, i) = out.Q(k, i, j) = out.Q(k, j, i) = v;
      }
  return out;
}

}  // namespace capillary
