#include "capillary/cap_domain.hpp"

#include <cmath>
#include <numbers>

#include "capillary/errors.hpp"

namespace capillary {

namespace {

constexpr int kPairI[3] = {0, 0, 1};
constexpr int kPairJ[3] = {0, 1, 1};

int pair_index(int n, int i, int j) {
  if (n == 1) return 0;
  if (i > j) std::swap(i, j);
  return i == 0 ? (j == 0 ? 0 : 1) : 2;
}

// Slot of the first derivative d/du_i and of the second derivative pair p.
int first_slot(int i) { return i; }
int second_slot(int n, int p) { return n + p; }

Vec reflect_horizontal(const Vec& v) {
  Vec r = -v;
  r[v.size() - 1] = v[v.size() - 1];
  return r;
}

void fill_mirror(CapGrid& g) {
  g.mirror.assign(g.size, -1);
  for (int i = 0; i < g.size; ++i) {
    int cand;
    if (g.n == 1) {
      cand = g.size - 1 - i;
    } else {
      const int M = g.res.n_phi;
      const int j = i / M + 1, k = i % M;
      cand = g.index(j, k + M / 2);
    }
    if ((g.normal[cand] - reflect_horizontal(g.normal[i])).norm() < 1e-9) g.mirror[i] = cand;
  }
}

CapGrid build_grid_1d(const CapillaryCap& cap, int N) {
  if (N < 4) throw ConfigError("n = 1 grid needs at least 4 intervals");
  CapGrid g;
  g.n = 1;
  g.res.n_rho = N;
  g.res.n_phi = 0;
  g.size = N + 1;
  const Vec e1 = Vec::Unit(2, 0);
  g.theta_hi = cap.boundary_angle(e1);
  g.theta_lo = -cap.boundary_angle(-e1);
  g.h = (g.theta_hi - g.theta_lo) / N;
  for (int j = 0; j <= N; ++j) {
    const double t = j == N ? g.theta_hi : g.theta_lo + j * g.h;
    Vec x(2), xt(2);
    x << std::sin(t), std::cos(t);
    xt << std::cos(t), -std::sin(t);
    g.chart.push_back(Vec::Constant(1, t));
    g.normal.push_back(x);
    g.point.push_back(cap.point_from_normal(x));
    g.boundary.push_back(j == 0 || j == N);
    g.dx.push_back(xt);
    g.ddx.push_back({-x, Vec::Zero(2), Vec::Zero(2)});

    NodeStencil s;
    const double h = g.h;
    if (j == 0 || j == N) {
      const int dir = j == 0 ? 1 : -1;
      s.m = 4;
      s.center = 0;
      for (int a = 0; a < 4; ++a) s.nbr[a] = j + dir * a;
      const double d1[4] = {-3.0, 4.0, -1.0, 0.0}, d2[4] = {2.0, -5.0, 4.0, -1.0};
      for (int a = 0; a < 4; ++a) {
        s.w[0][a] = dir * d1[a] / (2.0 * h);
        s.w[1][a] = d2[a] / (h * h);
      }
    } else {
      s.m = 3;
      s.center = 1;
      s.nbr[0] = j - 1;
      s.nbr[1] = j;
      s.nbr[2] = j + 1;
      s.w[0][0] = -0.5 / h;
      s.w[0][2] = 0.5 / h;
      s.w[1][0] = s.w[1][2] = 1.0 / (h * h);
      s.w[1][1] = -2.0 / (h * h);
    }
    g.stencil.push_back(s);
  }
  fill_mirror(g);
  return g;
}

CapGrid build_grid_2d(const CapillaryCap& cap, int N, int M) {
  if (N < 5 || M < 8 || M % 2) throw ConfigError("n = 2 grid needs >= 5 rings and an even number >= 8 of angles");
  CapGrid g;
  g.n = 2;
  g.res.n_rho = N;
  g.res.n_phi = M;
  g.size = N * M;
  g.h = 1.0 / (N - 0.5);
  g.h_phi = 2.0 * std::numbers::pi / M;
  const Vec E = cap.pole();

  // Boundary angle and its phi-derivatives by implicit differentiation of
  // <DF(x), E> + omega0 = 0 along the boundary.
  std::vector<double> pb(M), pb1(M), pb2(M);
  for (int k = 0; k < M; ++k) {
    const double phi = k * g.h_phi;
    Vec v(3), vp(3);
    v << std::cos(phi), std::sin(phi), 0.0;
    vp << -std::sin(phi), std::cos(phi), 0.0;
    const double r = cap.boundary_angle(v);
    const Vec x = std::cos(r) * E + std::sin(r) * v;
    const NormJet j = norm_jet(cap.norm(), x, 3);
    const Vec Xr = -std::sin(r) * E + std::cos(r) * v;
    const Vec Xp = std::sin(r) * vp;
    const Vec Xrr = -x, Xrp = std::cos(r) * vp, Xpp = -std::sin(r) * v;
    auto h1 = [&](const Vec& a) { return (j.D2F * a).dot(E); };
    auto h2 = [&](const Vec& a, const Vec& b, const Vec& ab) { return j.D3F.apply(a, b, E) + h1(ab); };
    const double hr = h1(Xr), hp = h1(Xp);
    if (!(hr < 0.0)) throw ChartFailure("boundary is not transversal to a meridian");
    const double d1 = -hp / hr;
    const double d2 = -(h2(Xr, Xr, Xrr) * d1 * d1 + 2.0 * h2(Xr, Xp, Xrp) * d1 + h2(Xp, Xp, Xpp)) / hr;
    pb[k] = r;
    pb1[k] = d1;
    pb2[k] = d2;
  }

  for (int jr = 1; jr <= N; ++jr) {
    const double rho = jr == N ? 1.0 : (jr - 0.5) * g.h;
    for (int k = 0; k < M; ++k) {
      const int ko = (k + M / 2) % M;
      const double pe = 0.5 * (pb[k] + pb[ko]), po = 0.5 * (pb[k] - pb[ko]);
      const double pe1 = 0.5 * (pb1[k] + pb1[ko]), po1 = 0.5 * (pb1[k] - pb1[ko]);
      const double pe2 = 0.5 * (pb2[k] + pb2[ko]), po2 = 0.5 * (pb2[k] - pb2[ko]);
      const double r = rho * pe + rho * rho * po;
      const double r_p = pe + 2.0 * rho * po;
      const double r_f = rho * pe1 + rho * rho * po1;
      const double r_pp = 2.0 * po;
      const double r_pf = pe1 + 2.0 * rho * po1;
      const double r_ff = rho * pe2 + rho * rho * po2;
      if (!(r_p > 0.0) || !(r < std::numbers::pi)) throw ChartFailure("polar chart is not monotone in rho");

      const double phi = k * g.h_phi;
      Vec v(3), vp(3);
      v << std::cos(phi), std::sin(phi), 0.0;
      vp << -std::sin(phi), std::cos(phi), 0.0;
      const Vec x = std::cos(r) * E + std::sin(r) * v;
      const Vec Xr = -std::sin(r) * E + std::cos(r) * v;
      const Vec Xf = std::sin(r) * vp;
      const Vec Xrr = -x, Xrf = std::cos(r) * vp, Xff = -std::sin(r) * v;

      Mat dx(3, 2);
      dx.col(0) = Xr * r_p;
      dx.col(1) = Xr * r_f + Xf;
      const Vec x_pp = Xrr * r_p * r_p + Xr * r_pp;
      const Vec x_pf = Xrr * r_p * r_f + Xrf * r_p + Xr * r_pf;
      const Vec x_ff = Xrr * r_f * r_f + 2.0 * Xrf * r_f + Xff + Xr * r_ff;

      Vec c(2);
      c << rho, phi;
      g.chart.push_back(c);
      g.normal.push_back(x);
      g.point.push_back(cap.point_from_normal(x));
      g.boundary.push_back(jr == N);
      g.dx.push_back(dx);
      g.ddx.push_back({x_pp, x_pf, x_ff});
    }
  }

  // Fourth order in both directions away from the boundary: the frame
  // components of tau divide chart derivatives by powers of rho, so plain
  // central differences would lose an order on the innermost rings.
  const double h = g.h, hf = g.h_phi;
  const double c1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  const double c2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  for (int jr = 1; jr <= N; ++jr)
    for (int k = 0; k < M; ++k) {
      NodeStencil s;
      std::vector<int> rings;
      std::vector<double> r1, r2;
      int r0;
      if (jr <= N - 2) {
        rings = {jr - 2, jr - 1, jr, jr + 1, jr + 2};
        r1.assign(c1, c1 + 5);
        r2.assign(c2, c2 + 5);
        r0 = 2;
      } else if (jr == N - 1) {
        rings = {jr - 1, jr, jr + 1};
        r1 = {-0.5, 0.0, 0.5};
        r2 = {1.0, -2.0, 1.0};
        r0 = 1;
      } else {
        rings = {N, N - 1, N - 2, N - 3};
        r1 = {1.5, -2.0, 0.5, 0.0};
        r2 = {2.0, -5.0, 4.0, -1.0};
        r0 = 0;
      }
      const int nr = static_cast<int>(rings.size());
      s.m = nr * 5;
      s.center = r0 * 5 + 2;
      for (int a = 0; a < nr; ++a)
        for (int b = 0; b < 5; ++b) {
          const int q = a * 5 + b, kk = k - 2 + b;
          if (rings[a] >= 1) {
            s.nbr[q] = g.index(rings[a], kk);
          } else {
            // Continue the chart through the pole: (rho, phi) -> (-rho, phi + pi).
            s.nbr[q] = g.index(1 - rings[a], kk + M / 2);
            s.flip[q] = 1;
          }
          s.w[3][q] = r1[a] * c1[b] / (h * hf);
        }
      for (int a = 0; a < nr; ++a) {
        s.w[0][a * 5 + 2] = r1[a] / h;
        s.w[2][a * 5 + 2] = r2[a] / (h * h);
      }
      for (int b = 0; b < 5; ++b) {
        s.w[1][r0 * 5 + b] = c1[b] / hf;
        s.w[4][r0 * 5 + b] = c2[b] / (hf * hf);
      }
      g.stencil.push_back(s);
    }
  fill_mirror(g);
  return g;
}

}  // namespace

int CapGrid::index(int j, int k) const {
  const int M = res.n_phi;
  k %= M;
  if (k < 0) k += M;
  return (j - 1) * M + k;
}

std::vector<int> CapGrid::boundary_nodes() const {
  std::vector<int> b;
  for (int i = 0; i < size; ++i)
    if (boundary[i]) b.push_back(i);
  return b;
}

CapGrid build_grid(const CapillaryCap& cap, GridResolution res) {
  if (cap.n() == 1) return build_grid_1d(cap, res.n_rho);
  return build_grid_2d(cap, res.n_rho, res.n_phi > 0 ? res.n_phi : res.n_rho);
}

double MetricData::apply(const std::array<double, kMaxNbr>& w, int i, const std::vector<double>& f) const {
  const NodeStencil& s = stencil[i];
  double acc = 0.0;
  for (int a = 0; a < s.m; ++a) acc += w[a] * f[s.nbr[a]];
  return acc;
}

double MetricData::deriv(int i, int slot, const std::vector<double>& f) const {
  return apply(stencil[i].w[slot], i, f);
}

Vec MetricData::kernel_coeffs(const std::vector<double>& f) const {
  const int n = static_cast<int>(kernel.size());
  Vec m = Vec::Zero(n);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < size(); ++i) m[a] += kmoment[a][i] * f[i];
  return kgram.ldlt().solve(m);
}

std::vector<double> MetricData::remove_kernel(const std::vector<double>& f) const {
  const Vec c = kernel_coeffs(f);
  std::vector<double> out = f;
  for (int a = 0; a < c.size(); ++a)
    for (int i = 0; i < size(); ++i) out[i] -= c[a] * kernel[a][i];
  return out;
}

MetricData assemble_metric(const CapillaryCap& cap, const CapGrid& grid, Form form) {
  const int n = grid.n, d = n + 1;
  const Vec E = cap.pole();
  const Vec shift = cap.omega0() * cap.ef();
  MetricData md;
  md.form = form;
  md.cap = &cap;
  md.grid = &grid;
  md.stencil = grid.stencil;
  md.node.resize(grid.size);
  md.kernel.assign(n, std::vector<double>(grid.size));
  md.ell.resize(grid.size);

  for (int i = 0; i < grid.size; ++i) {
    const Vec& x = grid.normal[i];
    const NormJet fj = norm_jet(cap.norm(), x, 3);
    const NormJet sj = form == Form::Hat ? fj : translate_jet(fj, x, shift);
    const LegendreData L = legendre_from_normal(sj);
    NodeMetric& nm = md.node[i];
    nm.S = sj.F;
    nm.z = L.z;
    nm.dxi = fj.D2F * grid.dx[i];
    for (int p = 0; p < grid.n_pairs(); ++p) {
      const Vec a = grid.dx[i].col(kPairI[p]), b = grid.dx[i].col(kPairJ[p]);
      nm.ddxi[p] = fj.D3F.contract2(a, b) + fj.D2F * grid.ddx[i][p];
    }
    nm.g = nm.dxi.transpose() * L.G * nm.dxi;
    nm.g = 0.5 * (nm.g + nm.g.transpose());
    Eigen::LLT<Mat> llt(nm.g);
    if (llt.info() != Eigen::Success || !(nm.g.determinant() > 0.0))
      throw SingularMetric("metric not positive definite at node " + std::to_string(i));
    nm.chol = llt.matrixL();
    nm.ginv = nm.g.inverse();
    nm.Q = L.Q.pullback(nm.dxi);
    nm.Gamma = Tensor3(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const Vec& dd = nm.ddxi[pair_index(n, a, b)];
        Vec proj(n);
        for (int m = 0; m < n; ++m) proj[m] = dd.dot(L.G * nm.dxi.col(m)) + 0.5 * nm.Q(a, b, m);
        const Vec gk = nm.ginv * proj;
        for (int k = 0; k < n; ++k) nm.Gamma(k, a, b) = gk[k];
      }
    double area;
    if (n == 1) {
      area = nm.dxi.col(0).norm();
    } else {
      area = Eigen::Vector3d(nm.dxi.col(0)).cross(Eigen::Vector3d(nm.dxi.col(1))).norm();
    }
    double qw;
    if (n == 1) {
      qw = grid.boundary[i] ? 0.5 * grid.h : grid.h;
    } else {
      qw = (grid.boundary[i] ? 0.5 * grid.h : grid.h) * grid.h_phi;
    }
    nm.weight = fj.F * area * qw;
    for (int a = 0; a < n; ++a) md.kernel[a][i] = x[a] / sj.F;
    md.ell[i] = cap.ell_at_normal(x);
    (void)d;
  }

  md.kmoment.assign(n, std::vector<double>(grid.size));
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < grid.size; ++i) {
      const double hat_kernel = form == Form::Hat ? md.kernel[a][i] : md.kernel[a][i] * md.ell[i];
      md.kmoment[a][i] = md.node[i].weight * hat_kernel * (form == Form::Hat ? 1.0 : md.ell[i]);
    }
  md.kgram = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < grid.size; ++i) md.kgram(a, b) += md.kmoment[a][i] * md.kernel[b][i];

  // Linear forms for chart tau and the boundary condition.
  for (int i = 0; i < grid.size; ++i) {
    NodeMetric& nm = md.node[i];
    const NodeStencil& s = md.stencil[i];
    for (int p = 0; p < grid.n_pairs(); ++p) {
      const int a = kPairI[p], b = kPairJ[p];
      // T_ab = d_ab u - (Gamma^k_ab + 1/2 Q_abl g^lk) d_k u + g_ab u
      Vec coef(n);
      for (int k = 0; k < n; ++k) {
        double c = nm.Gamma(k, a, b);
        for (int l = 0; l < n; ++l) c += 0.5 * nm.Q(a, b, l) * nm.ginv(l, k);
        coef[k] = c;
      }
      auto& tw = nm.tw[p];
      tw.fill(0.0);
      for (int q = 0; q < s.m; ++q) {
        double v = s.w[second_slot(n, p)][q];
        for (int k = 0; k < n; ++k) v -= coef[k] * s.w[first_slot(k)][q];
        tw[q] = v;
      }
      tw[s.center] += nm.g(a, b);
    }
    nm.rw.fill(0.0);
    if (grid.boundary[i]) {
      // <grad u, E> with the gradient of this form's metric.
      Vec c = nm.ginv * nm.dxi.row(d - 1).transpose();
      if (form == Form::Tilde) c *= md.ell[i];
      for (int q = 0; q < s.m; ++q)
        for (int k = 0; k < n; ++k) nm.rw[q] += c[k] * s.w[first_slot(k)][q];
      if (form == Form::Hat) nm.rw[s.center] -= cap.omega0();
    }
  }
  (void)E;
  return md;
}

void corrupt_q(MetricData& metric, double amount) {
  const int n = metric.grid->n;
  for (NodeMetric& nm : metric.node)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) nm.Q(a, b, c) *= 1.0 + amount;
  // Also shift a component so that a vanishing Q is corrupted too.
  for (NodeMetric& nm : metric.node) nm.Q(0, 0, 0) += amount;
}

std::vector<Mat> tau_field(const MetricData& md, const std::vector<double>& f) {
  const int n = md.grid->n;
  std::vector<Mat> out(md.size());
  for (int i = 0; i < md.size(); ++i) {
    const NodeMetric& nm = md.node[i];
    Mat T(n, n);
    for (int p = 0; p < md.grid->n_pairs(); ++p) T(kPairI[p], kPairJ[p]) = T(kPairJ[p], kPairI[p]) = md.apply(nm.tw[p], i, f);
    const Mat Li = nm.chol.triangularView<Eigen::Lower>().solve(Mat::Identity(n, n));
    Mat t = Li * T * Li.transpose();
    out[i] = 0.5 * (t + t.transpose());
  }
  return out;
}

std::vector<Mat> covariant_hessian(const MetricData& md, const std::vector<double>& f) {
  const int n = md.grid->n;
  std::vector<Mat> out(md.size());
  for (int i = 0; i < md.size(); ++i) {
    const NodeMetric& nm = md.node[i];
    Vec d1(n);
    for (int k = 0; k < n; ++k) d1[k] = md.deriv(i, first_slot(k), f);
    Mat H(n, n);
    for (int p = 0; p < md.grid->n_pairs(); ++p) {
      const int a = kPairI[p], b = kPairJ[p];
      double v = md.deriv(i, second_slot(n, p), f);
      for (int k = 0; k < n; ++k) v -= nm.Gamma(k, a, b) * d1[k];
      H(a, b) = H(b, a) = v;
    }
    const Mat Li = nm.chol.triangularView<Eigen::Lower>().solve(Mat::Identity(n, n));
    out[i] = Li * H * Li.transpose();
  }
  return out;
}

RobinReport robin_residual(const MetricData& md, const std::vector<double>& f) {
  const CapGrid& g = *md.grid;
  const int n = g.n, d = n + 1;
  const double w = md.form == Form::Hat ? md.cap->omega0() : 0.0;
  const Vec E = md.cap->pole();
  RobinReport rep;
  for (int i : g.boundary_nodes()) {
    const NodeMetric& nm = md.node[i];
    Vec d1(n);
    for (int k = 0; k < n; ++k) d1[k] = md.deriv(i, first_slot(k), f);
    Vec grad = nm.dxi * (nm.ginv * d1);
    if (md.form == Form::Tilde) grad *= md.ell[i];
    const NormJet j = norm_jet(md.cap->norm(), g.normal[i], 2);
    const BoundaryFrame fr = boundary_frame(*md.cap, g.point[i]);
    const double mu_e = fr.mu.dot(E);
    const Vec m = nm.dxi.colPivHouseholderQr().solve(fr.mu_f);
    const double fe = grad.dot(E) - w * f[i];
    const double fmu = grad.dot(fr.mu) - w * f[i] / mu_e;
    const double fmf = m.dot(d1) - w * f[i] / (j.F * mu_e);
    rep.nodes.push_back(i);
    rep.form_e.push_back(fe);
    rep.form_mu.push_back(fmu);
    rep.form_muf.push_back(fmf);
    rep.max_abs = std::max(rep.max_abs, std::abs(fe));
    rep.max_form_gap = std::max({rep.max_form_gap, std::abs(fe - mu_e * fmu), std::abs(fmf - fmu / nm.S)});
    (void)d;
  }
  return rep;
}

double integrate(const MetricData& md, const std::vector<double>& f) {
  double s = 0.0;
  for (int i = 0; i < md.size(); ++i) s += md.node[i].weight * f[i];
  return s;
}

GaussCheck gauss_check(const MetricData& md) {
  const CapGrid& g = *md.grid;
  const int n = g.n;
  // Nodal metric components as fields.
  std::vector<std::vector<double>> gf(g.n_pairs(), std::vector<double>(md.size()));
  for (int i = 0; i < md.size(); ++i)
    for (int p = 0; p < g.n_pairs(); ++p) gf[p][i] = md.node[i].g(kPairI[p], kPairJ[p]);
  GaussCheck out;
  for (int i = 0; i < md.size(); ++i) {
    if (g.boundary[i]) continue;
    const NodeMetric& nm = md.node[i];
    // dg(k, a, b) = d_k g_ab
    Tensor3 dg(n);
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const int p = pair_index(n, a, b);
          const NodeStencil& s = md.stencil[i];
          double v = 0.0;
          for (int q = 0; q < s.m; ++q) v += s.w[first_slot(k)][q] * gf[p][s.nbr[q]] * (p == 1 && s.flip[q] ? -1.0 : 1.0);
          dg(k, a, b) = v;
        }
    Tensor3 lc(n);
    for (int m = 0; m < n; ++m)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          double v = 0.0;
          for (int k = 0; k < n; ++k) v += 0.5 * nm.ginv(m, k) * (dg(a, b, k) + dg(b, a, k) - dg(k, a, b));
          lc(m, a, b) = v;
        }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Vec res = nm.ddxi[pair_index(n, a, b)] + nm.g(a, b) * nm.z;
        for (int k = 0; k < n; ++k) {
          double c = lc(k, a, b);
          for (int l = 0; l < n; ++l) c -= 0.5 * nm.ginv(k, l) * nm.Q(a, b, l);
          res -= c * nm.dxi.col(k);
        }
        out.gauss_max = std::max(out.gauss_max, res.norm());
        for (int k = 0; k < n; ++k) {
          double comp = dg(k, a, b);
          for (int m = 0; m < n; ++m) comp -= nm.Gamma(m, k, a) * nm.g(m, b) + nm.Gamma(m, k, b) * nm.g(m, a);
          out.compat_max = std::max(out.compat_max, std::abs(comp));
        }
      }
  }
  return out;
}

}  // namespace capillary
