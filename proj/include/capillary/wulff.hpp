#pragma once

#include "capillary/norm.hpp"

namespace capillary {

// The set {y : F0(y - center) = radius}.
struct WulffShape {
  MinkowskiNorm norm;
  Vec center;
  double radius = 1.0;

  // Point with outward unit normal x, i.e. center + radius * DF(x).
  Vec point(const Vec& x) const;
  // F0(y - center) - radius.
  double level(const Vec& y) const;
};

// Translation direction with <E^F, E_{n+1}> = 1.
Vec e_f_vector(const MinkowskiNorm& norm, double omega0);

// The capillary Wulff cap: the part of W + omega0 E^F in the closed upper
// half-space. Points are addressed through their unit normal x, with
// xi = DF(x) + omega0 E^F. The pole of the chart is E_{n+1}.
class CapillaryCap {
 public:
  CapillaryCap(MinkowskiNorm norm, double omega0);

  const MinkowskiNorm& norm() const { return norm_; }
  int n() const { return norm_.dim() - 1; }
  int dim() const { return norm_.dim(); }
  double omega0() const { return omega0_; }
  const Vec& ef() const { return ef_; }
  Vec pole() const { return Vec::Unit(dim(), dim() - 1); }

  Vec point_from_normal(const Vec& x) const;
  // Inverse of the above; PointOffCap if xi is not on the translated shape.
  Vec normal_from_point(const Vec& xi) const;

  // <DF(x), E_{n+1}> + omega0, nonnegative exactly on the spherical preimage.
  double height(const Vec& x) const;
  // Jets of the translated support function F~(y) = F(y) + omega0 <E^F, y>.
  NormJet tilde_jet(const Vec& x, int order) const;
  // ell at the cap point with normal x: F~(x)/F(x).
  double ell_at_normal(const Vec& x) const;

  // Geodesic distance from the pole to the boundary along the meridian
  // through the horizontal unit vector dir. ChartFailure if the height is not
  // monotone along that meridian before it vanishes.
  double boundary_angle(const Vec& dir) const;
  // Normal at the boundary on the meridian through dir.
  Vec boundary_normal(const Vec& dir) const;

 private:
  MinkowskiNorm norm_;
  double omega0_;
  Vec ef_;
};

CapillaryCap build_cap(const MinkowskiNorm& norm, double omega0);

double ell(const CapillaryCap& cap, const Vec& xi);

struct BoundaryFrame {
  Vec nu;    // outward unit normal of the cap
  Vec mu;    // Euclidean unit outward conormal of the boundary
  Vec mu_f;  // A_F(nu) mu
  Vec e_n;   // mu_f scaled to unit length in the metric G(z)
};
BoundaryFrame boundary_frame(const CapillaryCap& cap, const Vec& xi);

struct ConditionReport {
  bool holds = false;
  double margin = 0.0;           // worst slack of the omega0 inequality
  double margin_tilde = 0.0;     // worst value of -Q~(e_a, e_a, e_n)
  double max_form_gap = 0.0;     // worst gap between the Q~ formula and direct F~ jets
  int samples = 0;
  int sign_disagreements = 0;
};

// Anisotropic convexity of the cap boundary, evaluated in two independent
// ways. FormMismatch if they disagree. Vacuous (holds) for n = 1.
ConditionReport condition_check(const CapillaryCap& cap, int samples = 720);

}  // namespace capillary
