#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "capillary/cap_domain.hpp"

namespace capillary {

// A cap together with its grid and both metric forms. MetricData keeps
// pointers into this object, so it is only handed out behind a shared_ptr.
class CapSetup {
 public:
  static std::shared_ptr<const CapSetup> make(const CapillaryCap& cap, GridResolution res);

  CapSetup(const CapSetup&) = delete;
  CapSetup& operator=(const CapSetup&) = delete;

  const CapillaryCap& cap() const { return cap_; }
  const CapGrid& grid() const { return grid_; }
  const MetricData& metric(Form f = Form::Hat) const { return f == Form::Hat ? hat_ : tilde_; }
  int n() const { return grid_.n; }
  int size() const { return grid_.size; }
  // Hat kernel functions x_a / F(x).
  const std::vector<double>& kernel(int a) const { return hat_.kernel[a]; }
  const std::vector<double>& ell() const { return hat_.ell; }
  // Typical distance between neighbouring nodes on the cap.
  double spacing() const { return spacing_; }

 private:
  explicit CapSetup(const CapillaryCap& cap) : cap_(cap) {}
  CapillaryCap cap_;
  CapGrid grid_;
  MetricData hat_, tilde_;
  double spacing_ = 0.0;
};
using SetupPtr = std::shared_ptr<const CapSetup>;

// Capillary convex body given by its capillary support function at the nodes.
struct CapBody {
  SetupPtr setup;
  std::vector<double> s;

  int size() const { return static_cast<int>(s.size()); }
};

// c times the cap itself (s = c * ell).
CapBody cap_body(const SetupPtr& setup, double c = 1.0);

struct TauField {
  std::vector<Mat> tau;  // g-orthonormal frame
  std::vector<double> min_eig, max_eig;
  double min_all = 0.0, max_all = 0.0;
  bool positive = false;
};
// tau of a field, applied to its kernel-free part so that adding kernel
// functions (horizontal translations) leaves tau unchanged exactly.
TauField tau_of(const MetricData& metric, const std::vector<double>& field);
TauField tau(const CapBody& body);

struct Admissibility {
  double robin_max = 0.0;  // sup of the Robin residual
  double tau_min = 0.0;
  double s_min = 0.0;
  bool convex = false;      // tau > 0 everywhere
  bool robin_ok = false;    // Robin residual below tolerance
  bool admissible = false;  // both
};
// Robin tolerance is relative to max |s|.
Admissibility admissibility(const CapBody& body, double robin_tol = 1e-2);

struct Reconstruction {
  std::vector<Vec> points;       // X at every node
  std::vector<Vec> normals;      // from discrete tangents of X
  double boundary_height = 0.0;  // max |X_{n+1}| on the boundary
  double capillary_defect = 0.0; // max |<DF(nu), -E_{n+1}> - omega0| on the boundary
};
// Throws NotAdmissible unless tau > 0.
Reconstruction reconstruct(const CapBody& body);

// Capillary support function of a point set: max_y <x, y> / F(x) per node.
std::vector<double> support_of_points(const CapSetup& setup, const std::vector<Vec>& points);

// Surface points plus samples of the flat bottom face.
std::vector<Vec> surface_samples(const CapBody& body, int bottom_density = 8);

CapBody psum(double a, const CapBody& K, double b, const CapBody& L, double p);
std::vector<Vec> pointcloud_psum_oracle(double a, const std::vector<Vec>& X1, double b,
                                        const std::vector<Vec>& X2, double p, int t_count = 33);

struct TildeData {
  std::vector<double> s;  // s / ell
  TauField tau;
  bool positivity_agrees = false;
  double det_gap = 0.0;   // max |det tau~ - det tau|
};
TildeData to_tilde(const CapBody& body);
// Inverse of to_tilde on values.
CapBody from_tilde(const SetupPtr& setup, const std::vector<double>& s_tilde);

struct KernelProjection {
  CapBody body;
  std::vector<double> coeffs;  // removed multiples of the kernel functions
};
// L2(dmu_F)-orthogonal projection off the kernel functions.
KernelProjection kernel_project(const CapBody& body);
// Integrals of kernel_a * field against dmu_F.
std::vector<double> kernel_moments(const CapSetup& setup, const std::vector<double>& field);

// Average with the mirrored node. Throws NotSymmetricNorm.
std::vector<double> even_symmetrize(const CapSetup& setup, const std::vector<double>& field);
CapBody even_symmetrize(const CapBody& body);

// Smooth test bodies s = ell (1 + eps psi) with psi = P(x) h(x)^2, where h
// vanishes on the boundary, so psi and its gradient vanish there and the
// Robin condition is inherited from ell. eps is halved until tau > 0.
CapBody random_body(const SetupPtr& setup, double amplitude, std::uint64_t seed, bool even = false);
// The perturbation psi itself, for the coefficients drawn from seed.
std::vector<double> random_bump(const CapSetup& setup, std::uint64_t seed, bool even = false);

}  // namespace capillary
