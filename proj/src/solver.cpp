#include "capillary/solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "capillary/errors.hpp"

namespace capillary {

namespace {

constexpr int kPI[3] = {0, 0, 1};
constexpr int kPJ[3] = {0, 1, 1};

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Derivative of det tau at node i with respect to the chart tau components,
// pulled back to weights on the neighbourhood values.
std::array<double, kMaxNbr> det_weights(const MetricData& md, int i, const Mat& tau) {
  const NodeMetric& nm = md.node[i];
  const int n = static_cast<int>(tau.rows());
  Mat cof(n, n);
  if (n == 1) {
    cof(0, 0) = 1.0;
  } else {
    cof << tau(1, 1), -tau(0, 1), -tau(1, 0), tau(0, 0);
  }
  const Mat Li = nm.chol.triangularView<Eigen::Lower>().solve(Mat::Identity(n, n));
  const Mat C = Li.transpose() * cof * Li;
  std::array<double, kMaxNbr> a{};
  const int pairs = n == 1 ? 1 : 3;
  for (int p = 0; p < pairs; ++p) {
    const double mult = kPI[p] == kPJ[p] ? 1.0 : 2.0;
    const double c = mult * C(kPI[p], kPJ[p]);
    for (int q = 0; q < md.stencil[i].m; ++q) a[q] += c * nm.tw[p][q];
  }
  return a;
}

class Problem {
 public:
  explicit Problem(const SolveSpec& spec)
      : spec_(spec), S_(*spec.setup), md_(S_.metric(spec.form)), n_(S_.n()), N_(S_.size()), p_(spec.p) {
    tilde_ = spec.form == Form::Tilde;
    p1_ = p_ == 1.0;
    eig_ = std::abs(p_ - (n_ + 1)) < 1e-14;
    even_ = spec.even;
    use_c_ = !p1_ && !even_;
    fdata_.resize(N_);
    for (int i = 0; i < N_; ++i) fdata_[i] = tilde_ ? spec.f[i] * std::pow(S_.ell()[i], p_ - 1.0) : spec.f[i];
    if (even_) {
      pair_of_.assign(N_, -1);
      for (int i = 0; i < N_; ++i) {
        const int m = S_.grid().mirror[i];
        if (pair_of_[i] >= 0) continue;
        pair_of_[i] = static_cast<int>(rep_.size());
        if (m >= 0) pair_of_[m] = pair_of_[i];
        rep_.push_back(i);
      }
    }
    // Round-off floor of the residual: second differences lose
    // eps * (stencil weight) * |u|.
    double wmax = 0.0;
    for (int i = 0; i < N_; ++i) {
      double w = 0.0;
      for (int q = 0; q < md_.stencil[i].m; ++q) {
        w += std::abs(md_.node[i].rw[q]);
        for (int pr = 0; pr < S_.grid().n_pairs(); ++pr) w += std::abs(md_.node[i].tw[pr][q]);
      }
      wmax = std::max(wmax, w);
    }
    double umax = 0.0;
    for (double l : S_.ell()) umax = std::max(umax, tilde_ ? 1.0 : l);
    tol_ = std::max(spec.tol, 64.0 * std::numeric_limits<double>::epsilon() * wmax * umax);
    for (int i = 0; i < N_; ++i) t_free_ = t_free_ && std::abs(ft(i, 0.0) - ft(i, 1.0)) < 1e-14;
  }

  double effective_tol() const { return tol_; }

  double ft(int i, double t) const {
    const double base = tilde_ ? 1.0 : std::pow(S_.ell()[i], 1.0 - p_);
    return (1.0 - t) * base + t * fdata_[i];
  }

  std::vector<double> to_unknown(const std::vector<double>& hat) const {
    std::vector<double> u = hat;
    if (tilde_)
      for (int i = 0; i < N_; ++i) u[i] /= S_.ell()[i];
    return u;
  }
  std::vector<double> to_hat(const std::vector<double>& u) const {
    std::vector<double> s = u;
    if (tilde_)
      for (int i = 0; i < N_; ++i) s[i] *= S_.ell()[i];
    return s;
  }

  struct State {
    std::vector<double> u;
    double eta = 1.0;
    std::vector<double> lambda;
  };

  struct Eval {
    std::vector<double> node;   // PDE and Robin rows
    std::vector<double> extra;  // constraint rows, normalization row
    std::vector<Mat> tau;
    double sup = 0.0;
    double tau_min = 0.0, tau_max = 0.0;
    bool finite = true;
  };

  Eval evaluate(const State& st, double t) const {
    Eval e;
    const std::vector<double> v = md_.remove_kernel(st.u);
    e.tau = tau_field(md_, v);
    e.node.resize(N_);
    e.tau_min = std::numeric_limits<double>::infinity();
    e.tau_max = -e.tau_min;
    for (int i = 0; i < N_; ++i) {
      Eigen::SelfAdjointEigenSolver<Mat> es(e.tau[i], Eigen::EigenvaluesOnly);
      e.tau_min = std::min(e.tau_min, es.eigenvalues().minCoeff());
      e.tau_max = std::max(e.tau_max, es.eigenvalues().maxCoeff());
      if (S_.grid().boundary[i]) {
        e.node[i] = md_.apply(md_.node[i].rw, i, v);
      } else {
        double r = e.tau[i].determinant() - st.eta * ft(i, t) * std::pow(st.u[i], p_ - 1.0);
        if (p1_ && !even_)
          for (int a = 0; a < n_; ++a) r -= st.lambda[a] * S_.kernel(a)[i];
        e.node[i] = r;
      }
    }
    if (p1_ && !even_)
      for (int a = 0; a < n_; ++a) {
        double c = 0.0;
        for (int i = 0; i < N_; ++i) c += md_.kmoment[a][i] * st.u[i];
        e.extra.push_back(c);
      }
    if (eig_) e.extra.push_back(normalization(st.u));
    e.sup = std::max(sup_abs(e.node), sup_abs(e.extra));
    e.finite = std::isfinite(e.sup);
    return e;
  }

  // Newton step for the current state.
  State step(const State& st, const Eval& ev, double t) const {
    using Trip = Eigen::Triplet<double>;
    const int nu = even_ ? static_cast<int>(rep_.size()) : N_;
    const int nc = use_c_ ? n_ : 0;
    const int nl = p1_ && !even_ ? n_ : 0;
    const int ne = eig_ ? 1 : 0;
    const int dim = nu + nc + nl + ne;
    const int c0 = nu, l0 = nu + nc, e0 = nu + nc + nl;
    auto col = [&](int j) { return even_ ? pair_of_[j] : j; };
    auto keep_row = [&](int i) { return !even_ || rep_[pair_of_[i]] == i; };
    auto row = [&](int i) { return even_ ? pair_of_[i] : i; };

    std::vector<Trip> trips;
    trips.reserve(static_cast<std::size_t>(N_) * 26);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    // Dense columns -J_v K for the kernel coordinates.
    Mat JK = Mat::Zero(N_, n_);
    for (int i = 0; i < N_; ++i) {
      const NodeStencil& s = md_.stencil[i];
      std::array<double, kMaxNbr> a{};
      double diag = 0.0;
      if (S_.grid().boundary[i]) {
        a = md_.node[i].rw;
      } else {
        a = det_weights(md_, i, ev.tau[i]);
        if (p_ != 1.0) diag = -st.eta * ft(i, t) * (p_ - 1.0) * std::pow(st.u[i], p_ - 2.0);
      }
      for (int q = 0; q < s.m; ++q)
        for (int b = 0; b < n_; ++b) JK(i, b) += a[q] * md_.kernel[b][s.nbr[q]];
      if (!keep_row(i)) continue;
      const int r = row(i);
      for (int q = 0; q < s.m; ++q) trips.emplace_back(r, col(s.nbr[q]), a[q]);
      if (diag != 0.0) trips.emplace_back(r, col(i), diag);
      if (!S_.grid().boundary[i]) {
        for (int b = 0; b < nl; ++b) trips.emplace_back(r, l0 + b, -S_.kernel(b)[i]);
        if (ne) trips.emplace_back(r, e0, -ft(i, t) * std::pow(st.u[i], p_ - 1.0));
      }
      for (int b = 0; b < nc; ++b) trips.emplace_back(r, c0 + b, -JK(i, b));
      rhs[r] = -ev.node[i];
    }
    // Kernel coordinates: kgram c = kmoment . u.
    for (int a = 0; a < nc; ++a) {
      for (int j = 0; j < N_; ++j) trips.emplace_back(c0 + a, col(j), md_.kmoment[a][j]);
      for (int b = 0; b < n_; ++b) trips.emplace_back(c0 + a, c0 + b, -md_.kgram(a, b));
    }
    std::size_t ex = 0;
    for (int a = 0; a < nl; ++a, ++ex) {
      for (int j = 0; j < N_; ++j) trips.emplace_back(l0 + a, col(j), md_.kmoment[a][j]);
      rhs[l0 + a] = -ev.extra[ex];
    }
    if (ne) {
      for (int j = 0; j < N_; ++j) trips.emplace_back(e0, col(j), norm_weight(j));
      rhs[e0] = -ev.extra[ex];
    }
    Eigen::SparseMatrix<double> J(dim, dim);
    J.setFromTriplets(trips.begin(), trips.end());
    J.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw NoConvergence("Jacobian factorization failed");
    const Eigen::VectorXd d = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !d.allFinite()) throw NoConvergence("Newton linear solve failed");

    State out;
    out.u.resize(N_);
    out.eta = 0.0;
    out.lambda.assign(st.lambda.size(), 0.0);
    for (int j = 0; j < N_; ++j) out.u[j] = d[col(j)];
    for (int a = 0; a < nl; ++a) out.lambda[a] = d[l0 + a];
    if (ne) out.eta = d[e0];
    return out;  // holds the increment
  }

  double norm_weight(int j) const { return md_.node[j].weight * (tilde_ ? S_.ell()[j] : 1.0); }
  double normalization(const std::vector<double>& u) const {
    double a = 0.0, b = 0.0;
    for (int j = 0; j < N_; ++j) {
      a += norm_weight(j) * u[j];
      b += md_.node[j].weight * S_.ell()[j];
    }
    return a - b;
  }

  // Damped Newton at fixed t. Returns false on failure; st is updated on success.
  bool newton(State& st, double t, HomotopyStep& rec, std::vector<double>& history, bool& tau_hit) const {
    Eval ev = evaluate(st, t);
    history.assign(1, ev.sup);
    tau_hit = false;
    for (int it = 0; it <= spec_.max_newton; ++it) {
      if (ev.sup < tol_) {
        rec.iterations = it;
        rec.residual = ev.sup;
        rec.tau_min = ev.tau_min;
        return true;
      }
      if (it == spec_.max_newton) break;
      State inc;
      try {
        inc = step(st, ev, t);
      } catch (const NoConvergence&) {
        return false;
      }
      double alpha = 1.0;
      bool accepted = false;
      for (; alpha >= 1.0 / 1024; alpha *= 0.5) {
        State trial = st;
        for (int j = 0; j < N_; ++j) trial.u[j] += alpha * inc.u[j];
        for (std::size_t a = 0; a < trial.lambda.size(); ++a) trial.lambda[a] += alpha * inc.lambda[a];
        trial.eta += alpha * inc.eta;
        if (p_ != 1.0 && *std::min_element(trial.u.begin(), trial.u.end()) <= 0.0) continue;
        Eval te = evaluate(trial, t);
        if (!te.finite) continue;
        if (!(te.tau_min > spec_.tau_floor * std::max(te.tau_max, 1e-300))) {
          tau_hit = true;
          continue;
        }
        if (te.sup <= (1.0 - 1e-4 * alpha) * ev.sup || te.sup < tol_) {
          st = std::move(trial);
          ev = std::move(te);
          accepted = true;
          break;
        }
      }
      history.push_back(ev.sup);
      if (!accepted) {
        // Stagnation at round-off level counts as converged.
        if (ev.sup < 100.0 * tol_) {
          rec.iterations = it;
          rec.residual = ev.sup;
          rec.tau_min = ev.tau_min;
          return true;
        }
        return false;
      }
    }
    return false;
  }

  SolveResult run() const {
    State st;
    st.u = to_unknown(spec_.initial ? *spec_.initial : S_.ell());
    if (even_) st.u = even_symmetrize(S_, st.u);
    if (p1_ && !even_) {
      st.u = md_.remove_kernel(st.u);
      st.lambda.assign(n_, 0.0);
    }
    SolveResult res;
    std::vector<double> history;
    bool tau_hit = false;
    HomotopyStep rec;
    rec.t = t_free_ ? 1.0 : 0.0;
    if (!newton(st, 0.0, rec, history, tau_hit))
      throw NoConvergence("Newton failed on the starting problem");
    res.trace.push_back(rec);
    // Data that does not move with t needs no continuation.
    double t = t_free_ ? 1.0 : 0.0, dt = spec_.t_step;
    while (t < 1.0) {
      const double tt = std::min(1.0, t + dt);
      State trial = st;
      HomotopyStep r;
      r.t = tt;
      if (newton(trial, tt, r, history, tau_hit)) {
        st = std::move(trial);
        t = tt;
        res.trace.push_back(r);
        dt = std::min(2.0 * dt, 0.5);
      } else {
        dt *= 0.5;
        if (dt < spec_.t_step_min) {
          if (tau_hit) throw AdmissibilityLost("tau positivity floor reached; homotopy step exhausted at t = " + std::to_string(t));
          throw NoConvergence("homotopy step exhausted at t = " + std::to_string(t));
        }
      }
    }
    res.newton_residuals = history;
    res.final_residual = res.trace.back().residual;
    res.body = CapBody{spec_.setup, to_hat(st.u)};
    if (eig_) res.eta = st.eta;
    if (p1_ && !even_) res.lambda = st.lambda;
    res.robin_residual = robin_residual(S_.metric(Form::Hat), S_.metric(Form::Hat).remove_kernel(res.body.s)).max_abs;
    return res;
  }

 private:
  const SolveSpec& spec_;
  const CapSetup& S_;
  const MetricData& md_;
  int n_, N_;
  double p_;
  bool tilde_ = false, p1_ = false, eig_ = false, even_ = false, use_c_ = false;
  std::vector<double> fdata_;
  std::vector<int> pair_of_, rep_;
  double tol_ = 0.0;
  bool t_free_ = true;
};

void validate(const SolveSpec& spec) {
  if (!spec.setup) throw ConfigError("solve needs a cap setup");
  const CapSetup& S = *spec.setup;
  const int n = S.n();
  if (!(spec.p >= 1.0)) throw ConfigError("p must be at least 1");
  if (static_cast<int>(spec.f.size()) != S.size()) throw ConfigError("data f has the wrong number of nodes");
  for (double v : spec.f)
    if (!(v > 0.0)) throw NotPositive("data f must be positive at every node");
  if (spec.initial && static_cast<int>(spec.initial->size()) != S.size())
    throw ConfigError("initial body has the wrong number of nodes");
  const bool mid = spec.p > 1.0 && spec.p < n + 1;
  if (mid && !spec.even) throw ConfigError("1 < p < n+1 is only solved in the even-restricted class");
  if (spec.even) {
    if (!S.cap().norm().symmetric()) throw NotSymmetricNorm("even-restricted solve needs a symmetric norm");
    if (mid && S.cap().omega0() > 0.0) throw ConfigError("1 < p < n+1 needs omega0 <= 0");
    const std::vector<double> fs = even_symmetrize(S, spec.f);
    double gap = 0.0, scale = 0.0;
    for (int i = 0; i < S.size(); ++i) {
      gap = std::max(gap, std::abs(fs[i] - spec.f[i]));
      scale = std::max(scale, std::abs(spec.f[i]));
    }
    if (gap > 1e-12 * scale) throw ConfigError("even-restricted solve needs even data f");
  }
  if (spec.check_condition) {
    const ConditionReport cr = condition_check(S.cap());
    if (!cr.holds)
      throw ConditionFailed("boundary convexity condition fails for this cap; the a-priori estimates do not apply");
  }
}

}  // namespace

ResidualField residual(const SolveSpec& spec, const CapBody& body, double t, double eta) {
  Problem pb(spec);
  Problem::State st;
  st.u = pb.to_unknown(body.s);
  st.eta = eta;
  st.lambda.assign(spec.setup->n(), 0.0);
  const Problem::Eval ev = pb.evaluate(st, t);
  ResidualField r;
  r.values = ev.node;
  for (int i = 0; i < body.size(); ++i) {
    double& slot = spec.setup->grid().boundary[i] ? r.boundary_sup : r.interior_sup;
    slot = std::max(slot, std::abs(ev.node[i]));
  }
  return r;
}

Mat linearize(const SolveSpec& spec, const CapBody& body, double t) {
  const CapSetup& S = *spec.setup;
  const MetricData& md = S.metric(Form::Hat);
  const int N = S.size();
  const double p = spec.p;
  const std::vector<Mat> tau = tau_field(md, md.remove_kernel(body.s));
  Mat L = Mat::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    const NodeStencil& s = md.stencil[i];
    if (S.grid().boundary[i]) {
      for (int q = 0; q < s.m; ++q) L(i, s.nbr[q]) += md.node[i].rw[q];
      continue;
    }
    const auto a = det_weights(md, i, tau[i]);
    for (int q = 0; q < s.m; ++q) L(i, s.nbr[q]) += a[q];
    if (p != 1.0) {
      const double ftv = (1.0 - t) * std::pow(S.ell()[i], 1.0 - p) + t * spec.f[i];
      L(i, i) -= (p - 1.0) * ftv * std::pow(body.s[i], p - 2.0);
    }
  }
  return L;
}

std::vector<double> apply_linearized(const SolveSpec& spec, const CapBody& body, const std::vector<double>& v,
                                     double t) {
  const CapSetup& S = *spec.setup;
  const MetricData& md = S.metric(Form::Hat);
  const int N = S.size();
  if (static_cast<int>(v.size()) != N) throw std::invalid_argument("field has the wrong number of nodes");
  const double p = spec.p;
  const std::vector<Mat> tau = tau_field(md, md.remove_kernel(body.s));
  std::vector<double> out(N);
  for (int i = 0; i < N; ++i) {
    const auto a = det_weights(md, i, tau[i]);
    out[i] = md.apply(a, i, v);
    if (p != 1.0) {
      const double ftv = (1.0 - t) * std::pow(S.ell()[i], 1.0 - p) + t * spec.f[i];
      out[i] -= (p - 1.0) * ftv * std::pow(body.s[i], p - 2.0) * v[i];
    }
  }
  return out;
}

SolveResult solve_homotopy(const SolveSpec& spec) {
  validate(spec);
  const int n = spec.setup->n();
  if (std::abs(spec.p - (n + 1)) < 1e-14) return solve_eigen(spec);
  SolveSpec sp = spec;
  std::vector<double> defect;
  bool applied = false;
  if (spec.p == 1.0 && !spec.even) {
    const CompatProjection cp = compat_project(*spec.setup, spec.f);
    defect = cp.defect;
    // A defect at the level of the quadrature error says the data is
    // compatible; projecting it would only move the discrete solution.
    const double h = spec.setup->spacing();
    const double fmax = *std::max_element(spec.f.begin(), spec.f.end());
    double worst = 0.0;
    for (double d : defect) worst = std::max(worst, std::abs(d));
    if (worst > 50.0 * h * h * fmax) {
      sp.f = cp.f;
      applied = true;
    }
  }
  Problem pb(sp);
  SolveResult r = pb.run();
  r.compat_defect = defect;
  r.compat_applied = applied;
  if (spec.p == 1.0) {
    const KernelProjection kp = kernel_project(r.body);
    r.body = kp.body;
    r.kernel_removed = kp.coeffs;
  }
  return r;
}

SolveResult solve_eigen(const SolveSpec& spec) {
  const int n = spec.setup->n();
  if (std::abs(spec.p - (n + 1)) > 1e-14) throw ConfigError("solve_eigen needs p = n + 1");
  validate(spec);
  Problem pb(spec);
  return pb.run();
}

SolveResult solve(const SolveSpec& spec) { return solve_homotopy(spec); }

CompatProjection compat_project(const CapSetup& setup, const std::vector<double>& f) {
  const MetricData& md = setup.metric(Form::Hat);
  const Vec c = md.kernel_coeffs(f);
  CompatProjection cp;
  cp.f = md.remove_kernel(f);
  cp.defect.assign(c.data(), c.data() + c.size());
  for (double v : cp.f)
    if (!(v > 0.0)) throw ProjectionBreaksPositivity("data is not positive after removing its kernel component");
  return cp;
}

C0Report c0_diagnostics(const SolveSpec& spec, const SolveResult& result) {
  const CapSetup& S = *spec.setup;
  const int n = S.n();
  const double p = spec.p;
  const auto [lmin, lmax] = std::minmax_element(S.ell().begin(), S.ell().end());
  const auto [fmin, fmax] = std::minmax_element(spec.f.begin(), spec.f.end());
  C0Report r;
  const double e = p - n - 1.0;
  r.lower = std::pow(*lmin, e) / (*fmax * std::pow(*lmax, p - 1.0));
  r.upper = std::pow(*lmax, e) / (*fmin * std::pow(*lmin, p - 1.0));
  r.min_value = std::numeric_limits<double>::infinity();
  r.max_value = -r.min_value;
  for (double s : result.body.s) {
    const double v = std::pow(s, e);
    r.min_value = std::min(r.min_value, v);
    r.max_value = std::max(r.max_value, v);
  }
  r.slack = std::min(r.min_value - r.lower, r.upper - r.max_value);
  r.holds = r.slack >= 0.0;
  return r;
}

}  // namespace capillary
