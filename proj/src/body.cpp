#include "capillary/body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "capillary/errors.hpp"

namespace capillary {

std::shared_ptr<const CapSetup> CapSetup::make(const CapillaryCap& cap, GridResolution res) {
  std::shared_ptr<CapSetup> s(new CapSetup(cap));
  s->grid_ = build_grid(s->cap_, res);
  s->hat_ = assemble_metric(s->cap_, s->grid_, Form::Hat);
  s->tilde_ = assemble_metric(s->cap_, s->grid_, Form::Tilde);
  double sp = 0.0;
  for (int i = 0; i < s->grid_.size; ++i) {
    const NodeStencil& st = s->grid_.stencil[i];
    double nearest = std::numeric_limits<double>::infinity();
    for (int q = 0; q < st.m; ++q)
      if (st.nbr[q] != i) nearest = std::min(nearest, (s->grid_.point[st.nbr[q]] - s->grid_.point[i]).norm());
    if (std::isfinite(nearest)) sp = std::max(sp, nearest);
  }
  s->spacing_ = sp;
  return s;
}

CapBody cap_body(const SetupPtr& setup, double c) {
  CapBody b{setup, setup->ell()};
  for (double& v : b.s) v *= c;
  return b;
}

TauField tau_of(const MetricData& metric, const std::vector<double>& field) {
  TauField t;
  t.tau = tau_field(metric, metric.remove_kernel(field));
  t.min_all = std::numeric_limits<double>::infinity();
  t.max_all = -std::numeric_limits<double>::infinity();
  for (const Mat& m : t.tau) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    t.min_eig.push_back(lo);
    t.max_eig.push_back(hi);
    t.min_all = std::min(t.min_all, lo);
    t.max_all = std::max(t.max_all, hi);
  }
  t.positive = t.min_all > 0.0;
  return t;
}

TauField tau(const CapBody& body) { return tau_of(body.setup->metric(Form::Hat), body.s); }

Admissibility admissibility(const CapBody& body, double robin_tol) {
  Admissibility a;
  const MetricData& md = body.setup->metric(Form::Hat);
  const TauField t = tau(body);
  a.tau_min = t.min_all;
  a.convex = t.positive;
  a.robin_max = robin_residual(md, md.remove_kernel(body.s)).max_abs;
  a.s_min = *std::min_element(body.s.begin(), body.s.end());
  double scale = 0.0;
  for (double v : body.s) scale = std::max(scale, std::abs(v));
  a.robin_ok = a.robin_max <= robin_tol * std::max(scale, 1e-300);
  a.admissible = a.convex && a.robin_ok;
  return a;
}

Reconstruction reconstruct(const CapBody& body) {
  const CapSetup& S = *body.setup;
  const MetricData& md = S.metric(Form::Hat);
  const CapGrid& g = S.grid();
  const int n = g.n, d = n + 1;
  if (!tau(body).positive) throw NotAdmissible("tau is not positive definite; the body cannot be reconstructed");
  Reconstruction r;
  r.points.resize(g.size);
  for (int i = 0; i < g.size; ++i) {
    const NodeMetric& nm = md.node[i];
    Vec d1(n);
    for (int k = 0; k < n; ++k) d1[k] = md.deriv(i, k, body.s);
    r.points[i] = nm.dxi * (nm.ginv * d1) + body.s[i] * nm.z;
  }
  // Normals from discrete tangents of X.
  r.normals.resize(g.size);
  for (int i = 0; i < g.size; ++i) {
    const NodeStencil& st = md.stencil[i];
    Mat T = Mat::Zero(d, n);
    for (int k = 0; k < n; ++k)
      for (int q = 0; q < st.m; ++q) T.col(k) += st.w[k][q] * r.points[st.nbr[q]];
    Vec nu(d);
    if (n == 1) {
      nu << T(1, 0), -T(0, 0);
    } else {
      nu = Eigen::Vector3d(T.col(0)).cross(Eigen::Vector3d(T.col(1)));
    }
    nu.normalize();
    if (nu.dot(g.normal[i]) < 0.0) nu = -nu;
    r.normals[i] = nu;
  }
  const Vec E = S.cap().pole();
  for (int i : g.boundary_nodes()) {
    r.boundary_height = std::max(r.boundary_height, std::abs(r.points[i][d - 1]));
    const Vec psi = cahn_hoffman(S.cap().norm(), r.normals[i]);
    r.capillary_defect = std::max(r.capillary_defect, std::abs(-psi.dot(E) - S.cap().omega0()));
  }
  return r;
}

std::vector<double> support_of_points(const CapSetup& setup, const std::vector<Vec>& points) {
  const CapGrid& g = setup.grid();
  std::vector<double> out(g.size, -std::numeric_limits<double>::infinity());
  for (int i = 0; i < g.size; ++i) {
    const Vec& x = g.normal[i];
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec& y : points) best = std::max(best, x.dot(y));
    out[i] = best / eval_norm(setup.cap().norm(), x);
  }
  return out;
}

std::vector<Vec> surface_samples(const CapBody& body, int bottom_density) {
  const CapGrid& g = body.setup->grid();
  const Reconstruction r = reconstruct(body);
  std::vector<Vec> pts = r.points;
  const std::vector<int> bnd = g.boundary_nodes();
  if (g.n == 1) {
    const Vec& a = r.points[bnd.front()];
    const Vec& b = r.points[bnd.back()];
    for (int j = 1; j < bottom_density; ++j) pts.push_back(a + (b - a) * (double(j) / bottom_density));
  } else {
    Vec c = Vec::Zero(3);
    for (int i : bnd) c += r.points[i];
    c /= static_cast<double>(bnd.size());
    for (int i : bnd)
      for (int j = 0; j < bottom_density; ++j) pts.push_back(c + (r.points[i] - c) * (double(j) / bottom_density));
  }
  return pts;
}

CapBody psum(double a, const CapBody& K, double b, const CapBody& L, double p) {
  if (a < 0.0 || b < 0.0 || (a == 0.0 && b == 0.0)) throw std::invalid_argument("psum needs a, b >= 0, not both zero");
  if (p < 1.0) throw std::invalid_argument("psum needs p >= 1");
  if (K.setup != L.setup) throw std::invalid_argument("psum needs bodies on the same grid");
  CapBody out{K.setup, std::vector<double>(K.s.size())};
  if (p == 1.0) {
    for (int i = 0; i < K.size(); ++i) out.s[i] = a * K.s[i] + b * L.s[i];
    return out;
  }
  const double mk = *std::min_element(K.s.begin(), K.s.end());
  const double ml = *std::min_element(L.s.begin(), L.s.end());
  if (mk <= 0.0 || ml <= 0.0) throw NotPositive("p-sum with p > 1 needs positive support functions");
  for (int i = 0; i < K.size(); ++i) out.s[i] = std::pow(a * std::pow(K.s[i], p) + b * std::pow(L.s[i], p), 1.0 / p);
  return out;
}

std::vector<Vec> pointcloud_psum_oracle(double a, const std::vector<Vec>& X1, double b, const std::vector<Vec>& X2,
                                        double p, int t_count) {
  std::vector<Vec> out;
  if (p == 1.0) {
    out.reserve(X1.size() * X2.size());
    for (const Vec& u : X1)
      for (const Vec& v : X2) out.push_back(a * u + b * v);
    return out;
  }
  const double q = p / (p - 1.0);
  out.reserve(X1.size() * X2.size() * t_count);
  for (int j = 0; j < t_count; ++j) {
    const double t = double(j) / (t_count - 1);
    const double ca = std::pow(a, 1.0 / p) * std::pow(1.0 - t, 1.0 / q);
    const double cb = std::pow(b, 1.0 / p) * std::pow(t, 1.0 / q);
    for (const Vec& u : X1)
      for (const Vec& v : X2) out.push_back(ca * u + cb * v);
  }
  return out;
}

TildeData to_tilde(const CapBody& body) {
  const CapSetup& S = *body.setup;
  TildeData td;
  td.s.resize(body.size());
  for (int i = 0; i < body.size(); ++i) td.s[i] = body.s[i] / S.ell()[i];
  td.tau = tau_of(S.metric(Form::Tilde), td.s);
  const TauField th = tau(body);
  td.positivity_agrees = td.tau.positive == th.positive;
  for (int i = 0; i < body.size(); ++i)
    td.det_gap = std::max(td.det_gap, std::abs(td.tau.tau[i].determinant() - th.tau[i].determinant()));
  return td;
}

CapBody from_tilde(const SetupPtr& setup, const std::vector<double>& s_tilde) {
  CapBody b{setup, s_tilde};
  for (int i = 0; i < b.size(); ++i) b.s[i] *= setup->ell()[i];
  return b;
}

std::vector<double> kernel_moments(const CapSetup& setup, const std::vector<double>& field) {
  const MetricData& md = setup.metric(Form::Hat);
  std::vector<double> m(setup.n(), 0.0);
  for (int a = 0; a < setup.n(); ++a)
    for (int i = 0; i < setup.size(); ++i) m[a] += md.kmoment[a][i] * field[i];
  return m;
}

KernelProjection kernel_project(const CapBody& body) {
  const MetricData& md = body.setup->metric(Form::Hat);
  const Vec c = md.kernel_coeffs(body.s);
  KernelProjection kp{CapBody{body.setup, md.remove_kernel(body.s)}, std::vector<double>(c.data(), c.data() + c.size())};
  return kp;
}

std::vector<double> even_symmetrize(const CapSetup& setup, const std::vector<double>& field) {
  if (!setup.cap().norm().symmetric()) throw NotSymmetricNorm("even symmetrization needs a symmetric norm");
  const CapGrid& g = setup.grid();
  std::vector<double> out(field.size());
  for (int i = 0; i < g.size; ++i) {
    if (g.mirror[i] < 0) throw NotSymmetricNorm("grid has no mirrored node; the cap is not symmetric");
    out[i] = 0.5 * (field[i] + field[g.mirror[i]]);
  }
  return out;
}

CapBody even_symmetrize(const CapBody& body) { return CapBody{body.setup, even_symmetrize(*body.setup, body.s)}; }

std::vector<double> random_bump(const CapSetup& setup, std::uint64_t seed, bool even) {
  const CapGrid& g = setup.grid();
  const int n = g.n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  // Monomials in the horizontal components of x up to degree two.
  std::vector<std::vector<int>> mono;
  mono.push_back(std::vector<int>(n, 0));
  for (int a = 0; a < n; ++a) {
    std::vector<int> e(n, 0);
    e[a] = 1;
    if (!even) mono.push_back(e);
  }
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      std::vector<int> e(n, 0);
      e[a] += 1;
      e[b] += 1;
      mono.push_back(e);
    }
  std::vector<double> coef(mono.size());
  for (double& c : coef) c = U(rng);
  const double h0 = setup.cap().height(setup.cap().pole());
  std::vector<double> psi(g.size);
  for (int i = 0; i < g.size; ++i) {
    const Vec& x = g.normal[i];
    double P = 0.0;
    for (std::size_t m = 0; m < mono.size(); ++m) {
      double v = coef[m];
      for (int a = 0; a < n; ++a) v *= std::pow(x[a], mono[m][a]);
      P += v;
    }
    const double hh = std::max(0.0, setup.cap().height(x)) / h0;
    psi[i] = P * hh * hh;
  }
  return psi;
}

CapBody random_body(const SetupPtr& setup, double amplitude, std::uint64_t seed, bool even) {
  const std::vector<double> psi = random_bump(*setup, seed, even);
  double eps = amplitude;
  for (int attempt = 0; attempt < 40; ++attempt, eps *= 0.5) {
    CapBody b{setup, setup->ell()};
    for (int i = 0; i < b.size(); ++i) b.s[i] *= 1.0 + eps * psi[i];
    if (*std::min_element(b.s.begin(), b.s.end()) > 0.0 && tau(b).min_all > 0.05) return b;
  }
  return cap_body(setup);
}

}  // namespace capillary
