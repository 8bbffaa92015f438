#include "capillary/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "capillary/errors.hpp"
#include "capillary/expr.hpp"
#include "capillary/measures.hpp"
#include "capillary/solver.hpp"

namespace capillary {

namespace fs = std::filesystem;

namespace {

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double dmu(const CapSetup& S, int i) { return S.metric(Form::Hat).node[i].weight; }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text, RunResult& out) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  out.files.push_back(path.filename().string());
}

std::vector<double> read_csv_column(const std::string& path, int expected) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::vector<double> v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find_last_of(',');
    const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      v.push_back(std::stod(cell));
    } catch (const std::exception&) {
      if (v.empty()) continue;  // header
      throw ConfigError("bad number in " + path + ": " + cell);
    }
  }
  if (static_cast<int>(v.size()) != expected)
    throw ConfigError(path + " has " + std::to_string(v.size()) + " values, the grid has " + std::to_string(expected));
  return v;
}

Json cap_json(const CapSetup& S) {
  Json j;
  const CapillaryCap& cap = S.cap();
  j["n"] = S.n();
  j["norm_family"] = cap.norm().family_name();
  j["omega0"] = cap.omega0();
  j["e_f"] = vec_json(cap.ef());
  j["grid"] = {{"n_rho", S.grid().res.n_rho}, {"n_phi", S.grid().res.n_phi}, {"nodes", S.size()}};
  j["spacing"] = S.spacing();
  return j;
}

Json admissibility_json(const CapBody& b) {
  const Admissibility a = admissibility(b);
  return {{"robin_max", a.robin_max}, {"tau_min", a.tau_min}, {"s_min", a.s_min},
          {"convex", a.convex},       {"robin_ok", a.robin_ok}, {"admissible", a.admissible}};
}

std::string solution_csv(const CapBody& body, const std::vector<double>* f) {
  const CapSetup& S = *body.setup;
  const CapGrid& g = S.grid();
  const int n = S.n();
  const TauField T = tau(body);
  std::ostringstream os;
  os << "node,boundary";
  for (int k = 0; k < n; ++k) os << ",chart" << k + 1;
  for (int k = 0; k <= n; ++k) os << ",xi" << k + 1;
  os << ",ell,s,det_tau,tau_min";
  if (f) os << ",f";
  os << "\n";
  for (int i = 0; i < S.size(); ++i) {
    os << i << "," << int(g.boundary[i]);
    for (int k = 0; k < n; ++k) os << "," << fmt(g.chart[i][k]);
    for (int k = 0; k <= n; ++k) os << "," << fmt(g.point[i][k]);
    os << "," << fmt(S.ell()[i]) << "," << fmt(body.s[i]) << "," << fmt(T.tau[i].determinant()) << ","
       << fmt(T.min_eig[i]);
    if (f) os << "," << fmt((*f)[i]);
    os << "\n";
  }
  return os.str();
}

// n = 1: the reconstructed curve. n = 2: a triangulated surface with one
// extra vertex at the pole.
void write_geometry(const fs::path& dir, const CapBody& body, RunResult& out) {
  const CapSetup& S = *body.setup;
  const Reconstruction R = reconstruct(body);
  std::ostringstream os;
  if (S.n() == 1) {
    os << "node,X1,X2\n";
    for (int i = 0; i < S.size(); ++i) os << i << "," << fmt(R.points[i][0]) << "," << fmt(R.points[i][1]) << "\n";
    write_text(dir / "curve.csv", os.str(), out);
    return;
  }
  const CapGrid& g = S.grid();
  const int N = g.res.n_rho, M = g.res.n_phi;
  Vec pole = Vec::Zero(3);
  for (int k = 0; k < M; ++k) pole += R.points[g.index(1, k)] / M;
  for (const Vec& p : R.points) os << "v " << fmt(p[0]) << " " << fmt(p[1]) << " " << fmt(p[2]) << "\n";
  os << "v " << fmt(pole[0]) << " " << fmt(pole[1]) << " " << fmt(pole[2]) << "\n";
  const int pv = S.size() + 1;  // obj indices are 1-based
  for (int k = 0; k < M; ++k) os << "f " << pv << " " << g.index(1, k) + 1 << " " << g.index(1, k + 1) + 1 << "\n";
  for (int j = 1; j < N; ++j)
    for (int k = 0; k < M; ++k) {
      const int a = g.index(j, k) + 1, b = g.index(j, k + 1) + 1, c = g.index(j + 1, k + 1) + 1,
                d = g.index(j + 1, k) + 1;
      os << "f " << a << " " << d << " " << c << "\n";
      os << "f " << a << " " << c << " " << b << "\n";
    }
  write_text(dir / "surface.obj", os.str(), out);
}

Json measures_json(const CapBody& body, long samples, std::uint64_t seed) {
  const MeasureReport m = measure_report(body, samples, seed);
  const MDensity md = m_density(body);
  Json j;
  j["V"] = m.V;
  j["volume_divergence"] = m.volume_divergence;
  j["volume_mc"] = {{"volume", m.volume_mc.volume}, {"std_error", m.volume_mc.std_error},
                    {"samples", m.volume_mc.samples}};
  j["inradius"] = m.inradius;
  j["minkowski_volume_gap"] = m.minkowski_volume_gap;
  j["anisotropic_area"] = anisotropic_area(body);
  j["bottom_area"] = bottom_area(body);
  j["boundary_form_gap"] = m.boundary_form_gap;
  j["slacks"] = {{"volume_inradius", m.volume_inradius_slack},
                 {"v1_inradius", m.v1_inradius_slack},
                 {"isoperimetric", m.isoperimetric_slack}};
  j["m_density"] = {{"interior_rel_gap", md.interior_rel_gap}, {"boundary_rel_gap", md.boundary_rel_gap}};
  return j;
}

// ---- tasks ----

Json task_solve(const RunConfig& c, const SetupPtr& S, RunResult& out) {
  const int n = S->n();
  SolveSpec spec;
  spec.setup = S;
  spec.p = c.solve.p;
  spec.f = c.solve.f_csv.empty() ? field_from_expr(*S, c.solve.f)
                                 : read_csv_column((fs::path(c.base_dir) / c.solve.f_csv).string(), S->size());
  spec.form = c.solve.form == "hat" ? Form::Hat : Form::Tilde;
  spec.even = c.solve.even;
  spec.tol = c.solve.tol;
  spec.max_newton = c.solve.max_newton;
  spec.t_step = c.solve.t_step;
  spec.check_condition = c.solve.check_condition;
  if (!c.solve.initial.empty()) spec.initial = field_from_expr(*S, c.solve.initial);

  const SolveResult r = solve(spec);
  Json j;
  j["p"] = spec.p;
  j["form"] = c.solve.form;
  j["even"] = spec.even;
  j["f"] = c.solve.f_csv.empty() ? c.solve.f : c.solve.f_csv;
  if (r.eta) j["eta"] = *r.eta;
  j["final_residual"] = r.final_residual;
  j["robin_residual"] = r.robin_residual;
  SolveSpec hat_spec = spec;
  hat_spec.form = Form::Hat;
  const ResidualField hat = residual(hat_spec, r.body, 1.0, r.eta.value_or(1.0));
  j["hat_residual"] = {{"interior_sup", hat.interior_sup}, {"boundary_sup", hat.boundary_sup}};
  // For p = 1 both sides are compared after removing kernel components.
  j["sup_error_vs_ell"] =
      max_abs_diff(r.body.s, spec.p == 1.0 ? kernel_project(cap_body(S)).body.s : S->ell());
  j["admissibility"] = admissibility_json(r.body);
  Json trace = Json::array();
  for (const HomotopyStep& h : r.trace)
    trace.push_back({{"t", h.t}, {"iterations", h.iterations}, {"residual", h.residual}, {"tau_min", h.tau_min}});
  j["homotopy"] = trace;
  j["newton_residuals"] = r.newton_residuals;
  if (!r.lambda.empty()) j["lambda"] = r.lambda;
  if (!r.compat_defect.empty()) {
    j["compat_defect"] = r.compat_defect;
    j["compat_applied"] = r.compat_applied;
  }
  if (!r.kernel_removed.empty()) j["kernel_removed"] = r.kernel_removed;
  if (spec.p > n + 1) {
    const C0Report c0 = c0_diagnostics(spec, r);
    j["c0_bounds"] = {{"lower", c0.lower},         {"upper", c0.upper}, {"min", c0.min_value},
                      {"max", c0.max_value},       {"slack", c0.slack}, {"holds", c0.holds}};
  }
  std::vector<double> V;
  for (int k = 0; k <= n + 1; ++k) V.push_back(quermassintegral(r.body, k));
  j["V"] = V;
  write_text(fs::path(c.output) / "solution.csv", solution_csv(r.body, &spec.f), out);
  write_geometry(c.output, r.body, out);
  return j;
}

Json task_measures(const RunConfig& c, const SetupPtr& S, RunResult& out) {
  const CapBody b = make_body(S, c.measures.body);
  Json j;
  j["admissibility"] = admissibility_json(b);
  const Json m = measures_json(b, c.measures.mc_samples, c.seed);
  j.update(m);
  write_text(fs::path(c.output) / "solution.csv", solution_csv(b, nullptr), out);
  write_geometry(c.output, b, out);
  return j;
}

struct PsumCheck {
  CapBody sum;
  double support_gap = 0.0;
  double spacing = 0.0;  // of the grid the oracle ran on
  int oracle_nodes = 0;
};

// The oracle hull has |X_K| |X_L| t_count points, so it runs on a coarse copy
// of the grid when the configured one is large.
SetupPtr oracle_setup(const SetupPtr& S) {
  if (S->size() <= 400) return S;
  const GridResolution r = S->n() == 1 ? GridResolution{100, 0} : GridResolution{10, 20};
  return CapSetup::make(S->cap(), r);
}

PsumCheck psum_with_oracle(const SetupPtr& S, const BodyConfig& kc, const BodyConfig& lc, double a, double b,
                           double p) {
  const SetupPtr C = oracle_setup(S);
  const CapBody K = make_body(C, kc), L = make_body(C, lc);
  PsumCheck r{psum(a, K, b, L, p), 0.0, C->spacing(), C->size()};
  const std::vector<Vec> cloud = pointcloud_psum_oracle(a, surface_samples(K), b, surface_samples(L), p);
  r.support_gap = max_abs_diff(r.sum.s, support_of_points(*C, cloud));
  return r;
}

Json task_psum(const RunConfig& c, const SetupPtr& S, RunResult& out) {
  const CapBody K = make_body(S, c.psum.K), L = make_body(S, c.psum.L);
  const CapBody sum = psum(c.psum.a, K, c.psum.b, L, c.psum.p);
  const PsumCheck pc = psum_with_oracle(S, c.psum.K, c.psum.L, c.psum.a, c.psum.b, c.psum.p);
  Json j;
  j["p"] = c.psum.p;
  j["a"] = c.psum.a;
  j["b"] = c.psum.b;
  j["admissibility"] = admissibility_json(sum);
  j["oracle"] = {{"nodes", pc.oracle_nodes},
                 {"grid_spacing", pc.spacing},
                 {"support_gap", pc.support_gap},
                 {"gap_in_spacings", pc.support_gap / pc.spacing}};
  std::vector<double> V;
  for (int k = 0; k <= S->n() + 1; ++k) V.push_back(quermassintegral(sum, k));
  j["V"] = V;
  write_text(fs::path(c.output) / "solution.csv", solution_csv(sum, nullptr), out);
  write_geometry(c.output, sum, out);
  return j;
}

struct NormStats {
  double oracle_G = 0.0, oracle_Q = 0.0;
  double iso_G = 0.0, iso_Q = 0.0;
  double wulff_level = 0.0;
};

NormStats norm_stats(const MinkowskiNorm& norm, int samples) {
  NormStats s;
  const bool iso = norm.family() == NormFamily::Isotropic;
  const int d = norm.dim();
  for (const Vec& x : sphere_sample(d, samples)) {
    const Vec y = cahn_hoffman(norm, x);
    s.wulff_level = std::max(s.wulff_level, std::abs(dual_norm(norm, y) - 1.0));
    const DualJet dj = dual_jet(norm, y);
    if (iso) {
      s.iso_G = std::max(s.iso_G, (dj.G - Mat::Identity(d, d)).cwiseAbs().maxCoeff());
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          for (int e = 0; e < d; ++e) s.iso_Q = std::max(s.iso_Q, std::abs(dj.Q(a, b, e)));
    }
    const DualJet fd = fd_oracle_jet(norm, y);
    s.oracle_G = std::max(s.oracle_G, (dj.G - fd.G).cwiseAbs().maxCoeff());
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int e = 0; e < d; ++e) s.oracle_Q = std::max(s.oracle_Q, std::abs(dj.Q(a, b, e) - fd.Q(a, b, e)));
  }
  return s;
}

Json task_check_norm(const RunConfig& c) {
  const MinkowskiNorm norm = make_norm(c.norm);
  const NormStats s = norm_stats(norm, c.check.samples);
  Json j;
  j["family"] = norm.family_name();
  j["dim"] = norm.dim();
  j["min_af_eigenvalue"] = norm.min_af_eigenvalue();
  j["even_horizontal"] = norm.even_horizontal();
  j["even_vertical"] = norm.even_vertical();
  j["symmetric"] = norm.symmetric();
  j["samples"] = c.check.samples;
  j["wulff_level_max"] = s.wulff_level;
  j["oracle_gap_G"] = s.oracle_G;
  j["oracle_gap_Q"] = s.oracle_Q;
  if (norm.family() == NormFamily::Isotropic) j["isotropic_collapse"] = {{"G_minus_I", s.iso_G}, {"Q", s.iso_Q}};
  return j;
}

Json task_check_condition(const RunConfig& c) {
  const CapillaryCap cap = build_cap(make_norm(c.norm), c.omega0);
  const ConditionReport r = condition_check(cap, c.check.samples);
  return {{"holds", r.holds},
          {"margin", r.margin},
          {"margin_tilde", r.margin_tilde},
          {"max_form_gap", r.max_form_gap},
          {"samples", r.samples},
          {"sign_disagreements", r.sign_disagreements}};
}

Json entries_json(const std::vector<VerifyEntry>& es) {
  Json a = Json::array();
  for (const VerifyEntry& e : es) {
    Json j{{"name", e.name}, {"pass", e.pass}, {"value", e.value}, {"threshold", e.threshold}};
    if (!e.note.empty()) j["note"] = e.note;
    a.push_back(j);
  }
  return a;
}

Json error_report(const std::string& kind, const std::string& message) {
  return {{"class", kind}, {"message", message}};
}

}  // namespace

SetupPtr make_setup(const RunConfig& c) { return CapSetup::make(build_cap(make_norm(c.norm), c.omega0), c.resolution()); }

std::vector<double> field_from_expr(const CapSetup& S, const std::string& text) {
  const int n = S.n();
  const Expr e = Expr::compile(text, cap_variables(n));
  std::vector<double> vals(2 * (n + 1) + 1), out(S.size());
  for (int i = 0; i < S.size(); ++i) {
    for (int k = 0; k <= n; ++k) {
      vals[k] = S.grid().point[i][k];
      vals[n + 1 + k] = S.grid().normal[i][k];
    }
    vals.back() = S.ell()[i];
    out[i] = e.eval(vals);
    if (!std::isfinite(out[i])) throw ConfigError("expression \"" + text + "\" is not finite at node " + std::to_string(i));
  }
  return out;
}

CapBody make_body(const SetupPtr& S, const BodyConfig& b) {
  if (b.kind == "cap") return cap_body(S, b.scale);
  if (b.kind == "random") return random_body(S, b.amplitude, b.seed, b.even);
  return CapBody{S, field_from_expr(*S, b.s)};
}

std::vector<VerifyEntry> verify_suite(const RunConfig& c) {
  std::vector<VerifyEntry> out;
  auto add = [&](std::string name, double value, double threshold, std::string note = "") {
    out.push_back({std::move(name), value, threshold, std::isfinite(value) && value <= threshold, std::move(note)});
  };
  // A check that throws is recorded as failed rather than aborting the suite.
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      out.push_back({name, std::numeric_limits<double>::quiet_NaN(), 0.0, false, e.what()});
    }
  };

  const MinkowskiNorm norm = make_norm(c.norm);
  const SetupPtr S = make_setup(c);
  const int n = S->n();
  const double h = S->spacing();
  const double h2 = 50.0 * h * h;  // budget for second-order discretization errors
  const MetricData& hat = S->metric(Form::Hat);

  guarded("dual_jet_vs_fd_oracle", [&] {
    const NormStats s = norm_stats(norm, 200);
    add("dual_jet_vs_fd_oracle_G", s.oracle_G, 1e-6);
    add("dual_jet_vs_fd_oracle_Q", s.oracle_Q, 1e-4);
    if (norm.family() == NormFamily::Isotropic) add("isotropic_collapse", std::max(s.iso_G, s.iso_Q), 1e-10);
  });
  guarded("metric_gauss_formula", [&] {
    MetricData md = hat;
    if (c.verify.corrupt_q) corrupt_q(md, c.verify.corrupt_amount);
    const GaussCheck g = gauss_check(md);
    add("metric_gauss_formula", g.gauss_max, h2, c.verify.corrupt_q ? "Q corrupted by the test hook" : "");
    add("metric_compatibility", g.compat_max, h2);
  });
  guarded("tau_of_ell_identity", [&] {
    const std::vector<Mat> t = tau_field(hat, S->ell());
    double e = 0.0;
    for (const Mat& m : t) e = std::max(e, (m - Mat::Identity(n, n)).cwiseAbs().maxCoeff());
    add("tau_of_ell_identity", e, h2);
  });
  guarded("robin_of_ell", [&] { add("robin_of_ell", robin_residual(hat, S->ell()).max_abs, h2); });
  guarded("kernel_tau_vanishes", [&] {
    double e = 0.0;
    for (int a = 0; a < n; ++a)
      for (const Mat& m : tau_field(hat, S->kernel(a))) e = std::max(e, m.cwiseAbs().maxCoeff());
    add("kernel_tau_vanishes", e, h2);
    const CapBody B = random_body(S, 0.5, c.seed);
    CapBody B2 = B;
    for (int i = 0; i < S->size(); ++i) B2.s[i] += 0.3 * S->kernel(0)[i];
    const TauField t1 = tau(B), t2 = tau(B2);
    double d = 0.0;
    for (int i = 0; i < S->size(); ++i) d = std::max(d, std::abs(t1.tau[i].determinant() - t2.tau[i].determinant()));
    // Two different nodal fields can only agree to round-off, which the
    // polar stencils amplify strongly near the pole. The floor is the det
    // change caused by perturbing every node of B by two ulps.
    CapBody B3 = B;
    for (int i = 0; i < S->size(); ++i)
      B3.s[i] *= 1.0 + ((i * 2654435761u) >> 31 ? 2.0 : -2.0) * std::numeric_limits<double>::epsilon();
    const TauField t3 = tau(B3);
    double noise = 0.0;
    for (int i = 0; i < S->size(); ++i)
      noise = std::max(noise, std::abs(t1.tau[i].determinant() - t3.tau[i].determinant()));
    const double floor = 2.0 * noise;
    add("kernel_leaves_det_tau", d, std::max(1e-10, floor), floor > 1e-10 ? "threshold at the stencil round-off floor" : "");
  });
  guarded("trivial_solve", [&] {
    SolveSpec sp;
    sp.setup = S;
    sp.p = 1.0;
    sp.f.assign(S->size(), 1.0);
    sp.form = Form::Tilde;
    sp.check_condition = false;
    const SolveResult r = solve(sp);
    add("trivial_solve", max_abs_diff(r.body.s, kernel_project(cap_body(S)).body.s), 1e-6);
  });
  guarded("compatibility_integral", [&] {
    const CapBody B = random_body(S, 0.5, c.seed + 1);
    const TauField T = tau(B);
    std::vector<double> d(S->size());
    double tot = 0.0;
    for (int i = 0; i < S->size(); ++i) {
      d[i] = T.tau[i].determinant();
      tot += dmu(*S, i) * d[i];
    }
    double worst = 0.0;
    for (double m : kernel_moments(*S, d)) worst = std::max(worst, std::abs(m) / tot);
    add("compatibility_integral", worst, h2);
  });
  guarded("minkowski_formula", [&] {
    const CapBody B = random_body(S, 0.5, c.seed + 2);
    const McVolume mc = mc_volume(B, c.verify.mc_samples, c.seed);
    const double vol = quermassintegral(B, 0);
    const double gap = std::abs((n + 1) * vol - (n + 1) * mc.volume) / ((n + 1) * mc.volume);
    add("minkowski_formula", gap, std::max({1e-3, 3.0 * mc.std_error / mc.volume, 10.0 * h * h}));
  });
  guarded("quermassintegral_chain", [&] {
    const CapBody C = cap_body(S);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 0; k <= n + 1; ++k) {
      const double v = quermassintegral(C, k);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    add("quermassintegral_chain", (hi - lo) / hi, std::max(1e-3, 10.0 * h * h));
  });
  guarded("variational_formula", [&] {
    const CapBody B = random_body(S, 0.4, c.seed + 3);
    const std::vector<double> psi = random_bump(*S, c.seed + 4);
    std::vector<double> f(S->size());
    for (int i = 0; i < S->size(); ++i) f[i] = S->ell()[i] * (1.0 + psi[i]);
    double worst = 0.0;
    for (int k = -1; k < n; ++k) worst = std::max(worst, variational_check(B, f, k).relerr);
    add("variational_formula", worst, std::max(1e-3, 10.0 * h * h));
  });
  guarded("mixed_quermassintegral_identity", [&] {
    const CapBody B = random_body(S, 0.4, c.seed + 5);
    double worst = 0.0;
    for (double p : {1.0, 2.0})
      for (int k = 0; k <= n; ++k) {
        const double W = mixed_quermassintegral(B, B, p, k), V = quermassintegral(B, k);
        worst = std::max(worst, std::abs(W - (n + 1 - k) / p * V) / std::abs(V));
      }
    add("mixed_quermassintegral_identity", worst, h2);
  });
  guarded("self_adjointness", [&] {
    const CapBody B = random_body(S, 0.4, c.seed + 6);
    SolveSpec sp;
    sp.setup = S;
    sp.p = 1.0;
    sp.f.assign(S->size(), 1.0);
    const CapBody V1 = random_body(S, 0.5, c.seed + 7), V2 = random_body(S, 0.5, c.seed + 8);
    std::vector<double> v(S->size()), w(S->size());
    for (int i = 0; i < S->size(); ++i) {
      v[i] = V1.s[i] - S->ell()[i];
      w[i] = V2.s[i] - 1.1 * S->ell()[i];
    }
    const std::vector<double> Lv = apply_linearized(sp, B, v), Lw = apply_linearized(sp, B, w);
    double a = 0.0, b = 0.0, nv = 0.0, nw = 0.0;
    for (int i = 0; i < S->size(); ++i) {
      a += dmu(*S, i) * w[i] * Lv[i];
      b += dmu(*S, i) * v[i] * Lw[i];
      nv += dmu(*S, i) * v[i] * v[i];
      nw += dmu(*S, i) * w[i] * w[i];
    }
    add("self_adjointness", std::abs(a - b) / std::sqrt(nv * nw), 4.0 * h2);
  });
  guarded("psum_vs_point_cloud", [&] {
    BodyConfig K;
    K.kind = "random";
    K.amplitude = 0.3;
    K.seed = c.seed + 9;
    K.even = norm.symmetric();
    BodyConfig L;
    L.scale = 0.5;
    double worst = 0.0;
    int nodes = 0;
    for (double p : {1.0, 2.0}) {
      const PsumCheck pc = psum_with_oracle(S, K, L, 1.0, 1.0, p);
      worst = std::max(worst, pc.support_gap / pc.spacing);
      nodes = pc.oracle_nodes;
    }
    add("psum_vs_point_cloud", worst, 2.0, "in grid spacings, oracle grid of " + std::to_string(nodes) + " nodes");
  });
  guarded("inequality_slacks", [&] {
    double worst = 0.0;
    const bool even = norm.symmetric();
    for (int t = 0; t < 3; ++t) {
      const CapBody K = random_body(S, 0.4, c.seed + 10 + 2 * t, even);
      const CapBody L = random_body(S, 0.4, c.seed + 11 + 2 * t, even);
      const double scale = quermassintegral(K, 0);
      for (double p : even ? std::vector<double>{1.0, 2.0} : std::vector<double>{1.0}) {
        worst = std::max(worst, -minkowski_slack(K, L, p) / scale);
        worst = std::max(worst, -brunn_minkowski_slack(K, L, p, 0.5) / scale);
      }
      worst = std::max(worst, -volume_inradius_slack(K) / scale);
    }
    add("inequality_slacks", worst, 1e-3, "largest negative slack relative to the volume");
  });
  guarded("condition_forms_agree", [&] {
    const ConditionReport r = condition_check(S->cap(), 720);
    add("condition_forms_agree", r.sign_disagreements, 0.0);
    if (norm.family() == NormFamily::Isotropic && n == 2)
      add("condition_isotropic_sign", (r.holds == (c.omega0 < 0.0)) ? 0.0 : 1.0, 0.0);
  });
  guarded("hat_tilde_equivalence", [&] {
    const TildeData td = to_tilde(random_body(S, 0.4, c.seed + 20));
    add("hat_tilde_equivalence", td.det_gap + (td.positivity_agrees ? 0.0 : 1.0), h2);
  });
  guarded("reconstruction_capillary_defect", [&] {
    const Reconstruction R = reconstruct(random_body(S, 0.4, c.seed + 21));
    add("reconstruction_boundary_height", R.boundary_height, h2);
    add("reconstruction_capillary_defect", R.capillary_defect, h2);
  });
  return out;
}

RunResult run(const RunConfig& c) {
  RunResult out;
  Json report;
  report["schema"] = "capillary-report";
  report["version"] = kReportVersion;
  report["task"] = task_name(c.task);
  report["config"] = serialize(c);
  try {
    fs::create_directories(c.output);
  } catch (const std::exception& e) {
    out.exit_code = kExitConfig;
    report["status"] = "error";
    report["error"] = error_report("ConfigError", std::string("cannot create output directory: ") + e.what());
    out.report = report;
    return out;
  }
  try {
    validate(c);
    Json result;
    switch (c.task) {
      case Task::Solve: {
        const SetupPtr S = make_setup(c);
        report["cap"] = cap_json(*S);
        result = task_solve(c, S, out);
        break;
      }
      case Task::Measures: {
        const SetupPtr S = make_setup(c);
        report["cap"] = cap_json(*S);
        result = task_measures(c, S, out);
        break;
      }
      case Task::Psum: {
        const SetupPtr S = make_setup(c);
        report["cap"] = cap_json(*S);
        result = task_psum(c, S, out);
        break;
      }
      case Task::CheckNorm:
        result = task_check_norm(c);
        break;
      case Task::CheckCondition:
        result = task_check_condition(c);
        break;
      case Task::Verify: {
        const std::vector<VerifyEntry> es = verify_suite(c);
        bool all = true;
        for (const VerifyEntry& e : es) all = all && e.pass;
        result["all_pass"] = all;
        result["checks"] = entries_json(es);
        if (!all) out.exit_code = kExitCheckFailed;
        break;
      }
    }
    report["status"] = out.exit_code == kExitOk ? "ok" : "checks_failed";
    report["result"] = result;
  } catch (const ConfigError& e) {
    out.exit_code = kExitConfig;
    report["status"] = "error";
    report["error"] = error_report(e.kind(), e.what());
  } catch (const Error& e) {
    out.exit_code = kExitModule;
    report["status"] = "error";
    report["error"] = error_report(e.kind(), e.what());
  }
  out.report = report;
  write_text(fs::path(c.output) / "report.json", report.dump(2) + "\n", out);
  return out;
}

RunResult run_file(const std::string& path, const std::string& out_dir, const std::string& resolution,
                   long long seed, const std::string& task) {
  RunConfig c;
  try {
    c = load_config(path);
    if (!out_dir.empty()) c.output = out_dir;
    if (!resolution.empty()) c.grid = parse_resolution(resolution);
    if (seed >= 0) c.seed = static_cast<std::uint64_t>(seed);
    if (!task.empty()) c.task = parse_task(task);
    validate(c);
  } catch (const ConfigError& e) {
    RunResult out;
    out.exit_code = kExitConfig;
    out.report = {{"schema", "capillary-report"},
                  {"version", kReportVersion},
                  {"status", "error"},
                  {"error", error_report(e.kind(), e.what())}};
    const std::string dir = out_dir.empty() ? std::string("out") : out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!ec) {
      std::ofstream f(fs::path(dir) / "report.json");
      f << out.report.dump(2) << "\n";
      if (f) out.files.push_back("report.json");
    }
    return out;
  }
  return run(c);
}

}  // namespace capillary
