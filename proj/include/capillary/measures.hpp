#pragma once

#include <cstdint>
#include <vector>

#include "capillary/body.hpp"

namespace capillary {

// Elementary symmetric function of the eigenvalues of a symmetric matrix.
double sigma_k(const Mat& A, int k);
double binomial(int n, int k);

// Normalized anisotropic mean curvatures sigma_{n-k}(tau) / (C(n,k) sigma_n(tau)).
std::vector<double> hk_curvature(const CapBody& body, int k);

// V_k for k = 0..n+1. V_0 is the enclosed volume (1/(n+1)) int s det tau;
// the others use the bulk form (1/(n+1)) int ell sigma_{n-k+1}(tau) / C(n,k-1).
double quermassintegral(const CapBody& body, int k);

// Density of dS_{p,k} with respect to dmu_F on the cap.
std::vector<double> area_measure_density(const CapBody& body, double p, int k);

// The measure m_{omega0}: density ell det tau with respect to dmu_F, and the
// same quantity from the Euclidean area ratio of the reconstructed surface.
struct MDensity {
  std::vector<double> from_tau;
  std::vector<double> from_surface;
  // The surface version differentiates reconstructed points, so it is only
  // first order at nodes whose stencil reaches the boundary; those go into
  // boundary_rel_gap.
  double interior_rel_gap = 0.0;
  double boundary_rel_gap = 0.0;
};
MDensity m_density(const CapBody& body);

double mixed_quermassintegral(const CapBody& K, const CapBody& L, double p, int k);

// Largest t with t ell + kernel_y <= s for some horizontal y.
double inradius(const CapBody& body);

struct VariationalResult {
  double lhs = 0.0, rhs = 0.0, relerr = 0.0;
};
// d/dt V_{k+1}(s + t f) by central differences against the integral formula;
// k ranges over -1..n.
VariationalResult variational_check(const CapBody& body, const std::vector<double>& f, int k, double dt = 1e-3);

struct McVolume {
  double volume = 0.0, std_error = 0.0;
  long samples = 0;
};
// Half-space containment test against every node, seeded.
McVolume mc_volume(const CapBody& body, long samples, std::uint64_t seed);

// Slacks of the inequalities; all are nonnegative in exact arithmetic.
double minkowski_slack(const CapBody& K, const CapBody& L, double p);
double brunn_minkowski_slack(const CapBody& K, const CapBody& L, double p, double t);
double volume_inradius_slack(const CapBody& body);    // Vol / V_1 - r
double v1_inradius_slack(const CapBody& body);        // V_1 inequality with the inradius term
double isoperimetric_slack(const CapBody& body);      // |S|_F + w0 |bottom| - Vol^{n/(n+1)} A_2

// Area of the flat bottom face of the reconstructed body.
double bottom_area(const CapBody& body);
// |Sigma|_F as int det tau dmu_F.
double anisotropic_area(const CapBody& body);

struct MeasureReport {
  std::vector<double> V;  // V_0 .. V_{n+1}
  double volume_divergence = 0.0;
  McVolume volume_mc;
  double inradius = 0.0;
  double minkowski_volume_gap = 0.0;  // |int s det tau - (n+1) Vol_MC| / Vol_MC
  double volume_inradius_slack = 0.0;
  double v1_inradius_slack = 0.0;
  double isoperimetric_slack = 0.0;
  double boundary_form_gap = 0.0;     // |(|S|_F + w0 |bottom|)/(n+1) - V_1| / V_1
};
MeasureReport measure_report(const CapBody& body, long mc_samples, std::uint64_t seed);

}  // namespace capillary
