#pragma once

#include <array>
#include <memory>
#include <vector>

#include "capillary/wulff.hpp"

namespace capillary {

// Chart derivative slots. n = 1 uses {0: d/dtheta, 1: d2/dtheta2};
// n = 2 uses {0: d/drho, 1: d/dphi, 2: rho-rho, 3: rho-phi, 4: phi-phi}.
constexpr int kMaxNbr = 25;

struct NodeStencil {
  int m = 0;                 // neighbourhood size
  int center = 0;            // position of the node itself in nbr
  std::array<int, kMaxNbr> nbr{};
  std::array<char, kMaxNbr> flip{};  // neighbour reached through the pole (n = 2)
  std::array<std::array<double, kMaxNbr>, 5> w{};  // per derivative slot
};

struct GridResolution {
  int n_rho = 200;  // n = 1: number of intervals; n = 2: number of rings
  int n_phi = 0;    // n = 2 only; must be even
};

// Structured grid on the cap. n = 1: nodes theta_0..theta_N along the arc
// x = (sin theta, cos theta). n = 2: rings rho_j = (j - 1/2) h, j = 1..N with
// rho_N = 1 on the boundary, and angles phi_k = 2 pi k / M; no pole node.
struct CapGrid {
  int n = 1;
  GridResolution res;
  int size = 0;
  double h = 0.0;      // spacing in theta (n = 1) or rho (n = 2)
  double h_phi = 0.0;  // n = 2
  double theta_lo = 0.0, theta_hi = 0.0;  // n = 1

  std::vector<Vec> chart;   // (theta) or (rho, phi)
  std::vector<Vec> normal;  // x on the sphere
  std::vector<Vec> point;   // xi on the cap
  std::vector<char> boundary;
  std::vector<Mat> dx;                  // d x n: chart partials of x
  std::vector<std::array<Vec, 3>> ddx;  // second partials (11, 12, 22)
  std::vector<NodeStencil> stencil;     // plain second-order stencils
  std::vector<int> mirror;              // node at the horizontally reflected position

  int index(int j, int k) const;  // n = 2: ring j in 1..N, angle k (wrapped)
  int n_slots() const { return n == 1 ? 2 : 5; }
  int n_pairs() const { return n == 1 ? 1 : 3; }
  std::vector<int> boundary_nodes() const;
};

CapGrid build_grid(const CapillaryCap& cap, GridResolution res);

// Which support function the metric is built from: F on the cap (hat
// quantities) or the translated F~ (tilde quantities).
enum class Form { Hat, Tilde };

struct NodeMetric {
  Mat g, ginv, chol;           // chart metric, inverse, lower Cholesky factor
  Tensor3 Q;                   // chart components of Q
  Tensor3 Gamma;               // Gamma(k, i, j) = Gamma^k_ij
  Mat dxi;                     // d x n chart partials of xi
  std::array<Vec, 3> ddxi;     // second partials of xi
  Vec z;                       // G-normal point DS(x)
  double S = 0.0;              // support function value S(x)
  double weight = 0.0;         // quadrature weight of dmu_F
  // Linear-form weights over the node's neighbourhood.
  std::array<std::array<double, kMaxNbr>, 3> tw{};  // chart tau components
  std::array<double, kMaxNbr> rw{};                 // Robin functional (boundary)
};

struct MetricData {
  Form form = Form::Hat;
  const CapillaryCap* cap = nullptr;
  const CapGrid* grid = nullptr;
  std::vector<NodeStencil> stencil;  // derivative stencils
  std::vector<NodeMetric> node;
  std::vector<std::vector<double>> kernel;  // kernel functions x_a / S(x), a = 1..n
  std::vector<double> ell;                  // ell at every node
  // Rows of the L2(dmu_F) projection onto the kernel span, expressed in this
  // form's unknowns: coefficients c = kgram^-1 (kmoment . f), and the kernel
  // part of f is sum_a c_a kernel[a]. Both forms remove the same horizontal
  // translation from the body.
  std::vector<std::vector<double>> kmoment;
  Mat kgram;

  int size() const { return static_cast<int>(node.size()); }
  double apply(const std::array<double, kMaxNbr>& w, int i, const std::vector<double>& f) const;
  // Chart derivative slot s of f at node i.
  double deriv(int i, int slot, const std::vector<double>& f) const;
  Vec kernel_coeffs(const std::vector<double>& f) const;
  // f minus its kernel part.
  std::vector<double> remove_kernel(const std::vector<double>& f) const;
};

MetricData assemble_metric(const CapillaryCap& cap, const CapGrid& grid, Form form = Form::Hat);

// Scale every chart Q entry by (1 + amount) and shift Q_111 by amount.
// Only for negative controls.
void corrupt_q(MetricData& metric, double amount);

// tau in the g-orthonormal frame: Hess f - 1/2 Q(grad f) + f g.
std::vector<Mat> tau_field(const MetricData& metric, const std::vector<double>& f);
// Covariant Hessian of f in the g-orthonormal frame.
std::vector<Mat> covariant_hessian(const MetricData& metric, const std::vector<double>& f);

struct RobinReport {
  std::vector<int> nodes;
  std::vector<double> form_e;   // <grad f, E_{n+1}> - omega0 f
  std::vector<double> form_muf; // df(mu_F) - omega0 f / (F <mu, E_{n+1}>)
  std::vector<double> form_mu;  // <grad f, mu> - omega0 f / <mu, E_{n+1}>
  double max_abs = 0.0;         // of form_e
  double max_form_gap = 0.0;    // after dividing out the known factors
};
// Robin residuals of a hat-form field. For the tilde form the condition is
// the Neumann one, <grad~ f, E_{n+1}> = 0, reported in form_e.
RobinReport robin_residual(const MetricData& metric, const std::vector<double>& f);

double integrate(const MetricData& metric, const std::vector<double>& f);

// Gauss formula and metric-compatibility residuals, using Christoffel symbols
// of the metric obtained by differencing g (independent of Q).
struct GaussCheck {
  double gauss_max = 0.0;
  double compat_max = 0.0;
};
GaussCheck gauss_check(const MetricData& metric);

}  // namespace capillary
