#include "capillary/wulff.hpp"

#include <cmath>
#include <numbers>

#include "capillary/errors.hpp"

namespace capillary {

Vec WulffShape::point(const Vec& x) const { return center + radius * cahn_hoffman(norm, x); }

double WulffShape::level(const Vec& y) const { return dual_norm(norm, y - center) - radius; }

Vec e_f_vector(const MinkowskiNorm& norm, double omega0) {
  const int d = norm.dim();
  const Vec E = Vec::Unit(d, d - 1);
  const double f_up = eval_norm(norm, E), f_down = eval_norm(norm, -E);
  if (!(omega0 > -f_up && omega0 < f_down))
    throw InvalidContactAngle("omega0 = " + std::to_string(omega0) + " outside (" +
                              std::to_string(-f_up) + ", " + std::to_string(f_down) + ")");
  if (omega0 < 0.0) return cahn_hoffman(norm, E) / f_up;
  if (omega0 > 0.0) return -cahn_hoffman(norm, -E) / f_down;
  return E;
}

CapillaryCap::CapillaryCap(MinkowskiNorm norm, double omega0)
    : norm_(std::move(norm)), omega0_(omega0), ef_(e_f_vector(norm_, omega0)) {}

Vec CapillaryCap::point_from_normal(const Vec& x) const {
  return cahn_hoffman(norm_, x) + omega0_ * ef_;
}

Vec CapillaryCap::normal_from_point(const Vec& xi) const {
  const Vec z = xi - omega0_ * ef_;
  const DualJet j = dual_jet(norm_, z);
  if (std::abs(j.value - 1.0) > 1e-8 * (1.0 + xi.norm()))
    throw PointOffCap("F0(xi - omega0 E^F) = " + std::to_string(j.value));
  return j.grad.normalized();
}

double CapillaryCap::height(const Vec& x) const {
  return cahn_hoffman(norm_, x)[dim() - 1] + omega0_;
}

NormJet CapillaryCap::tilde_jet(const Vec& x, int order) const {
  return translate_jet(norm_jet(norm_, x, order), x, omega0_ * ef_);
}

double CapillaryCap::ell_at_normal(const Vec& x) const {
  return 1.0 + omega0_ * ef_.dot(x) / eval_norm(norm_, x);
}

double CapillaryCap::boundary_angle(const Vec& dir) const {
  const Vec E = pole();
  auto at = [&](double r) -> Vec { return std::cos(r) * E + std::sin(r) * dir; };
  constexpr int kScan = 512;
  double prev = height(E);
  double lo = 0.0, hi = -1.0;
  for (int i = 1; i <= kScan; ++i) {
    const double r = std::numbers::pi * i / kScan;
    const double h = height(at(r));
    if (h > prev) throw ChartFailure("height not monotone along a meridian; cap preimage is not star-shaped");
    if (h <= 0.0) {
      hi = r;
      break;
    }
    lo = r;
    prev = h;
  }
  if (hi < 0.0) throw ChartFailure("meridian never leaves the cap preimage");
  // Bisection to full precision.
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (height(at(mid)) > 0.0 ? lo : hi) = mid;
  }
  const double hlo = height(at(lo)), hhi = height(at(hi));
  return hlo == hhi ? lo : lo + (hi - lo) * hlo / (hlo - hhi);
}

Vec CapillaryCap::boundary_normal(const Vec& dir) const {
  const double r = boundary_angle(dir);
  return std::cos(r) * pole() + std::sin(r) * dir;
}

CapillaryCap build_cap(const MinkowskiNorm& norm, double omega0) {
  CapillaryCap cap(norm, omega0);
  const int d = cap.dim();
  if (std::abs(cap.ef()[d - 1] - 1.0) > 1e-12) throw std::logic_error("E^F has wrong vertical component");
  // Every meridian must reach the boundary monotonically; ell must stay positive.
  const int count = d == 2 ? 2 : 64;
  for (int k = 0; k < count; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / count;
    Vec dir = Vec::Zero(d);
    dir[0] = std::cos(phi);
    if (d == 3) dir[1] = std::sin(phi);
    const Vec xb = cap.boundary_normal(dir);
    if (!(cap.ell_at_normal(xb) > 0.0)) throw InvalidContactAngle("ell is not positive on the cap");
    const Vec xi = cap.point_from_normal(xb);
    if (std::abs(xi[d - 1]) > 1e-10) throw ChartFailure("boundary point off the plane");
  }
  // D^2F~ = D^2F holds by construction of the translated jets.
  return cap;
}

double ell(const CapillaryCap& cap, const Vec& xi) {
  return cap.ell_at_normal(cap.normal_from_point(xi));
}

namespace {

BoundaryFrame frame_at_normal(const CapillaryCap& cap, const Vec& x, const NormJet& j) {
  const Vec E = cap.pole();
  BoundaryFrame f;
  f.nu = x;
  Vec pe = E - E.dot(x) * x;
  f.mu = -pe / pe.norm();
  f.mu_f = j.D2F * f.mu;
  f.e_n = std::sqrt(j.F) * f.mu_f / std::sqrt(f.mu_f.dot(f.mu));
  return f;
}

}  // namespace

BoundaryFrame boundary_frame(const CapillaryCap& cap, const Vec& xi) {
  const int d = cap.dim();
  if (std::abs(xi[d - 1]) > 1e-8 * (1.0 + xi.norm())) throw NotBoundaryPoint("xi_{n+1} != 0");
  const Vec x = cap.normal_from_point(xi);
  return frame_at_normal(cap, x, norm_jet(cap.norm(), x, 2));
}

ConditionReport condition_check(const CapillaryCap& cap, int samples) {
  ConditionReport rep;
  if (cap.n() == 1) {
    rep.holds = true;
    rep.margin = rep.margin_tilde = std::numeric_limits<double>::infinity();
    return rep;
  }
  const double w = cap.omega0();
  const Vec E = cap.pole();
  constexpr double kStrict = 1e-12;
  rep.margin = rep.margin_tilde = std::numeric_limits<double>::infinity();
  rep.samples = samples;
  for (int k = 0; k < samples; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / samples;
    Vec dir(3);
    dir << std::cos(phi), std::sin(phi), 0.0;
    const Vec x = cap.boundary_normal(dir);
    const NormJet j = norm_jet(cap.norm(), x, 3);
    const LegendreData L = legendre_from_normal(j);
    const BoundaryFrame fr = frame_at_normal(cap, x, j);
    const double ell_v = cap.ell_at_normal(x);
    const double mu_e = fr.mu.dot(E);

    // Boundary tangent: orthogonal to x and horizontal.
    Vec Y = Eigen::Vector3d(x).cross(Eigen::Vector3d(E));
    Y.normalize();

    // Inequality form with mu_F = A_F(nu) mu.
    const double rhs = L.Q.apply(Y, Y, fr.mu_f) * mu_e * j.F / Y.dot(L.G * Y);
    const double slack1 = rhs - w;

    // Q~ form. e~ is g~-unit, g~ = g/ell; the normal slot carries mu_F itself,
    // which is the scaling under which the Q/Q~ relation is exact.
    const Vec et = Y * std::sqrt(ell_v / Y.dot(L.G * Y));
    const double qt = (L.Q.apply(et, et, fr.mu_f) - w * et.dot(L.G * et) / (j.F * mu_e)) / ell_v;

    // Direct evaluation from the translated support function.
    const LegendreData Lt = legendre_from_normal(cap.tilde_jet(x, 3));
    const double qt_direct = Lt.Q.apply(et, et, fr.mu_f);
    rep.max_form_gap = std::max(rep.max_form_gap, std::abs(qt - qt_direct));

    // Report -Q~(e~, e~, e~_n) with e~_n the g~-unit conormal.
    const double kn = std::sqrt(ell_v * j.F / fr.mu_f.dot(fr.mu));
    rep.margin = std::min(rep.margin, slack1);
    rep.margin_tilde = std::min(rep.margin_tilde, -kn * qt_direct);
    const bool h1 = slack1 > kStrict, h2 = -qt > kStrict;
    if (h1 != h2 && std::abs(slack1) > kStrict && std::abs(qt) > kStrict) ++rep.sign_disagreements;
  }
  if (rep.sign_disagreements > 0 || rep.max_form_gap > 1e-8)
    throw FormMismatch("condition forms disagree at " + std::to_string(rep.sign_disagreements) +
                       " samples, formula gap " + std::to_string(rep.max_form_gap));
  rep.holds = rep.margin > kStrict && rep.margin_tilde > kStrict;
  return rep;
}

}  // namespace capillary
