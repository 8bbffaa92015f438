#include "capillary/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "capillary/errors.hpp"

namespace capillary {

namespace {

std::vector<double> sigma_field(const TauField& t, int k) {
  std::vector<double> out(t.tau.size());
  for (std::size_t i = 0; i < t.tau.size(); ++i) out[i] = sigma_k(t.tau[i], k);
  return out;
}

const TauField& require_convex(const TauField& t) {
  if (!t.positive) throw NotAdmissible("tau is not positive definite");
  return t;
}

double weighted_sum(const CapSetup& S, const std::vector<double>& f) { return integrate(S.metric(Form::Hat), f); }

}  // namespace

double sigma_k(const Mat& A, int k) {
  const int n = static_cast<int>(A.rows());
  if (k < 0 || k > n) return 0.0;
  if (k == 0) return 1.0;
  if (n == 1) return A(0, 0);
  if (n == 2) return k == 1 ? A(0, 0) + A(1, 1) : A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
  std::vector<double> e(n + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j >= 1; --j) e[j] += es.eigenvalues()[i] * e[j - 1];
  return e[k];
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

std::vector<double> hk_curvature(const CapBody& body, int k) {
  const int n = body.setup->n();
  const TauField t = tau(body);
  require_convex(t);
  std::vector<double> out(body.size());
  for (int i = 0; i < body.size(); ++i) out[i] = sigma_k(t.tau[i], n - k) / (binomial(n, k) * sigma_k(t.tau[i], n));
  return out;
}

double quermassintegral(const CapBody& body, int k) {
  const CapSetup& S = *body.setup;
  const int n = S.n();
  if (k < 0 || k > n + 1) throw std::invalid_argument("quermassintegral index out of range");
  const TauField t = tau(body);
  require_convex(t);
  std::vector<double> f(body.size());
  if (k == 0) {
    for (int i = 0; i < body.size(); ++i) f[i] = body.s[i] * sigma_k(t.tau[i], n);
  } else {
    for (int i = 0; i < body.size(); ++i) f[i] = S.ell()[i] * sigma_k(t.tau[i], n - k + 1) / binomial(n, k - 1);
  }
  return weighted_sum(S, f) / (n + 1);
}

std::vector<double> area_measure_density(const CapBody& body, double p, int k) {
  const int n = body.setup->n();
  if (p != 1.0 && *std::min_element(body.s.begin(), body.s.end()) <= 0.0)
    throw NotPositive("p-area measure with p != 1 needs a positive support function");
  const TauField t = tau(body);
  require_convex(t);
  std::vector<double> out(body.size());
  for (int i = 0; i < body.size(); ++i) out[i] = std::pow(body.s[i], 1.0 - p) * sigma_k(t.tau[i], n - k);
  return out;
}

MDensity m_density(const CapBody& body) {
  const CapSetup& S = *body.setup;
  const MetricData& md = S.metric(Form::Hat);
  const int n = S.n();
  const TauField t = tau(body);
  const Reconstruction r = reconstruct(body);
  MDensity m;
  m.from_tau.resize(body.size());
  m.from_surface.resize(body.size());
  for (int i = 0; i < body.size(); ++i) {
    m.from_tau[i] = S.ell()[i] * t.tau[i].determinant();
    const NodeStencil& st = md.stencil[i];
    Mat T = Mat::Zero(n + 1, n);
    for (int k = 0; k < n; ++k)
      for (int q = 0; q < st.m; ++q) T.col(k) += st.w[k][q] * r.points[st.nbr[q]];
    const Mat& D = md.node[i].dxi;
    const double ratio = std::sqrt((T.transpose() * T).determinant() / (D.transpose() * D).determinant());
    m.from_surface[i] = S.ell()[i] * ratio;
    const double gap = std::abs(m.from_surface[i] - m.from_tau[i]) / std::abs(m.from_tau[i]);
    bool near = false;
    for (int q = 0; q < st.m; ++q) near = near || S.grid().boundary[st.nbr[q]];
    double& slot = near ? m.boundary_rel_gap : m.interior_rel_gap;
    slot = std::max(slot, gap);
  }
  return m;
}

double mixed_quermassintegral(const CapBody& K, const CapBody& L, double p, int k) {
  const int n = K.setup->n();
  const std::vector<double> dens = area_measure_density(K, p, k);
  if (p != 1.0 && *std::min_element(L.s.begin(), L.s.end()) <= 0.0)
    throw NotPositive("mixed quermassintegral with p != 1 needs a positive support function");
  std::vector<double> f(K.size());
  for (int i = 0; i < K.size(); ++i) f[i] = std::pow(L.s[i], p) * dens[i];
  return (n - k + 1) / (p * (n + 1) * binomial(n, k)) * weighted_sum(*K.setup, f);
}

double inradius(const CapBody& body) {
  const CapSetup& S = *body.setup;
  const int n = S.n(), N = body.size();
  auto t_of = [&](double y1, double y2) {
    double t = std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i) {
      double v = body.s[i] - y1 * S.kernel(0)[i];
      if (n == 2) v -= y2 * S.kernel(1)[i];
      t = std::min(t, v / S.ell()[i]);
    }
    return t;
  };
  double R = 0.0;
  for (double v : body.s) R = std::max(R, std::abs(v));
  R *= 4.0;
  // Maximize a concave function of one variable by golden-section search.
  auto maximize = [](auto&& fn, double lo, double hi) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi, c = b - g * (b - a), d = a + g * (b - a);
    double fc = fn(c), fd = fn(d);
    for (int it = 0; it < 90 && b - a > 1e-12 * (1.0 + std::abs(a)); ++it) {
      if (fc < fd) {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = fn(d);
      } else {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = fn(c);
      }
    }
    return std::max(fc, fd);
  };
  if (n == 1) return maximize([&](double y) { return t_of(y, 0.0); }, -R, R);
  return maximize([&](double y1) { return maximize([&](double y2) { return t_of(y1, y2); }, -R, R); }, -R, R);
}

VariationalResult variational_check(const CapBody& body, const std::vector<double>& f, int k, double dt) {
  const int n = body.setup->n();
  CapBody plus = body, minus = body;
  for (int i = 0; i < body.size(); ++i) {
    plus.s[i] += dt * f[i];
    minus.s[i] -= dt * f[i];
  }
  VariationalResult r;
  r.lhs = (quermassintegral(plus, k + 1) - quermassintegral(minus, k + 1)) / (2.0 * dt);
  const TauField t = tau(body);
  std::vector<double> g(body.size());
  if (k < n) {
    for (int i = 0; i < body.size(); ++i) g[i] = f[i] * sigma_k(t.tau[i], n - k - 1) / binomial(n, k + 1);
    r.rhs = (n - k) / double(n + 1) * weighted_sum(*body.setup, g);
  }
  const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
  r.relerr = scale > 0.0 ? std::abs(r.lhs - r.rhs) / scale : 0.0;
  return r;
}

McVolume mc_volume(const CapBody& body, long samples, std::uint64_t seed) {
  const CapSetup& S = *body.setup;
  const int d = S.n() + 1, N = body.size();
  const Reconstruction rec = reconstruct(body);
  Vec lo = Vec::Constant(d, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (const Vec& p : rec.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec pad = 0.25 * (hi - lo);
  lo -= pad;
  hi += pad;
  lo[d - 1] = 0.0;
  std::vector<double> nx(static_cast<std::size_t>(N) * d), rhs(N);
  for (int i = 0; i < N; ++i) {
    const Vec& x = S.grid().normal[i];
    for (int c = 0; c < d; ++c) nx[i * d + c] = x[c];
    rhs[i] = eval_norm(S.cap().norm(), x) * body.s[i];
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  long inside = 0;
  double y[3];
  for (long s = 0; s < samples; ++s) {
    for (int c = 0; c < d; ++c) y[c] = lo[c] + (hi[c] - lo[c]) * U(rng);
    bool in = true;
    for (int i = 0; i < N && in; ++i) {
      double v = 0.0;
      for (int c = 0; c < d; ++c) v += nx[i * d + c] * y[c];
      in = v <= rhs[i];
    }
    inside += in;
  }
  double box = 1.0;
  for (int c = 0; c < d; ++c) box *= hi[c] - lo[c];
  const double frac = double(inside) / samples;
  McVolume m;
  m.samples = samples;
  m.volume = box * frac;
  m.std_error = box * std::sqrt(frac * (1.0 - frac) / samples);
  return m;
}

double minkowski_slack(const CapBody& K, const CapBody& L, double p) {
  const int n = K.setup->n();
  const std::vector<double> dens = area_measure_density(K, p, 0);
  std::vector<double> f(K.size());
  for (int i = 0; i < K.size(); ++i) f[i] = std::pow(L.s[i], p) * dens[i];
  const double lhs = weighted_sum(*K.setup, f) / (n + 1);
  const double vk = quermassintegral(K, 0), vl = quermassintegral(L, 0);
  return lhs - std::pow(vk, (n + 1 - p) / (n + 1)) * std::pow(vl, p / (n + 1));
}

double brunn_minkowski_slack(const CapBody& K, const CapBody& L, double p, double t) {
  const int n = K.setup->n();
  const double e = p / (n + 1);
  const CapBody M = psum(1.0 - t, K, t, L, p);
  return std::pow(quermassintegral(M, 0), e) -
         ((1.0 - t) * std::pow(quermassintegral(K, 0), e) + t * std::pow(quermassintegral(L, 0), e));
}

// s >= r ell + kernel_y and the kernel integrates to zero against det tau, so
// Vol >= r V_1; the reverse bound fails already for small perturbations of
// the cap.
double volume_inradius_slack(const CapBody& body) {
  return quermassintegral(body, 0) / quermassintegral(body, 1) - inradius(body);
}

double v1_inradius_slack(const CapBody& body) {
  const int n = body.setup->n();
  const double v1 = quermassintegral(body, 1), vol = quermassintegral(body, 0);
  const double vc = quermassintegral(cap_body(body.setup), 0);
  const double r = inradius(body);
  const double lhs = std::pow(v1, (n + 1.0) / n) - vol * std::pow(vc, 1.0 / n);
  const double rhs = std::pow(std::pow(v1, 1.0 / n) - r * std::pow(vc, 1.0 / n), n + 1);
  return lhs - rhs;
}

double bottom_area(const CapBody& body) {
  const CapGrid& g = body.setup->grid();
  const Reconstruction r = reconstruct(body);
  const std::vector<int> b = g.boundary_nodes();
  if (g.n == 1) return std::abs(r.points[b.back()][0] - r.points[b.front()][0]);
  double a = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Vec& p = r.points[b[i]];
    const Vec& q = r.points[b[(i + 1) % b.size()]];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * std::abs(a);
}

double anisotropic_area(const CapBody& body) {
  const TauField t = tau(body);
  return weighted_sum(*body.setup, sigma_field(t, body.setup->n()));
}

double isoperimetric_slack(const CapBody& body) {
  const int n = body.setup->n();
  const double w0 = body.setup->cap().omega0();
  const CapBody C = cap_body(body.setup);
  const double a2 = (anisotropic_area(C) + w0 * bottom_area(C)) / std::pow(quermassintegral(C, 0), n / (n + 1.0));
  return anisotropic_area(body) + w0 * bottom_area(body) - std::pow(quermassintegral(body, 0), n / (n + 1.0)) * a2;
}

MeasureReport measure_report(const CapBody& body, long mc_samples, std::uint64_t seed) {
  const int n = body.setup->n();
  MeasureReport r;
  for (int k = 0; k <= n + 1; ++k) r.V.push_back(quermassintegral(body, k));
  r.volume_divergence = r.V[0];
  r.volume_mc = mc_volume(body, mc_samples, seed);
  r.inradius = inradius(body);
  r.minkowski_volume_gap = std::abs((n + 1) * r.V[0] - (n + 1) * r.volume_mc.volume) / ((n + 1) * r.volume_mc.volume);
  r.volume_inradius_slack = volume_inradius_slack(body);
  r.v1_inradius_slack = v1_inradius_slack(body);
  r.isoperimetric_slack = isoperimetric_slack(body);
  const double w0 = body.setup->cap().omega0();
  r.boundary_form_gap = std::abs((anisotropic_area(body) + w0 * bottom_area(body)) / (n + 1) - r.V[1]) / r.V[1];
  return r;
}

}  // namespace capillary
