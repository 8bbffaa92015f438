#pragma once

#include <optional>
#include <vector>

#include "capillary/body.hpp"

namespace capillary {

struct SolveSpec {
  SetupPtr setup;
  double p = 1.0;
  std::vector<double> f;          // nodal data on the cap, positive
  Form form = Form::Hat;          // unknown s (Hat) or s~ = s / ell (Tilde)
  bool even = false;              // restrict to fields even under the mirror
  double t_step = 0.1;            // initial homotopy step
  double t_step_min = 1e-4;
  double tol = 1e-10;             // sup-norm of the residual
  int max_newton = 30;
  double tau_floor = 1e-8;        // relative to the largest tau eigenvalue
  std::optional<std::vector<double>> initial;  // hat values; default ell
  bool check_condition = true;
};

struct HomotopyStep {
  double t = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double tau_min = 0.0;
};

struct SolveResult {
  CapBody body;                      // hat values
  std::optional<double> eta;         // p = n + 1 only
  std::vector<HomotopyStep> trace;
  std::vector<double> newton_residuals;  // residual history of the final step
  std::vector<double> lambda;        // p = 1 multipliers of the kernel constraints
  std::vector<double> compat_defect; // p = 1: kernel component of f
  bool compat_applied = false;       // whether it was removed before solving
  std::vector<double> kernel_removed;
  double final_residual = 0.0;
  double robin_residual = 0.0;
};

// Interior rows det tau[s] - f_t s^{p-1}, boundary rows the Robin functional,
// for the hat form with f_t = (1 - t) ell^{1-p} + t f. ell solves the t = 0
// problem; in the tilde form this is f~_t = (1 - t) + t f~.
struct ResidualField {
  std::vector<double> values;
  double interior_sup = 0.0;
  double boundary_sup = 0.0;
};
ResidualField residual(const SolveSpec& spec, const CapBody& body, double t = 1.0, double eta = 1.0);

// Matrix of v -> cof(tau[s])^{ij} tau_ij[v] - (p - 1) f_t s^{p-2} v with
// Robin boundary rows, on hat fields. Row-major dense; meant for checks.
Mat linearize(const SolveSpec& spec, const CapBody& body, double t = 1.0);
// The same interior operator applied to v at every node, boundary nodes
// included (no Robin rows). Matrix free, for integrals of v L w.
std::vector<double> apply_linearized(const SolveSpec& spec, const CapBody& body, const std::vector<double>& v,
                                     double t = 1.0);

SolveResult solve_homotopy(const SolveSpec& spec);
// p = n + 1: solves for (s, eta) with int s dmu_F = int ell dmu_F.
SolveResult solve_eigen(const SolveSpec& spec);
// Dispatches on p.
SolveResult solve(const SolveSpec& spec);

struct CompatProjection {
  std::vector<double> f;
  std::vector<double> defect;  // removed multiples of the kernel functions
};
// Throws ProjectionBreaksPositivity if the projected data is not positive.
CompatProjection compat_project(const CapSetup& setup, const std::vector<double>& f);

struct C0Report {
  double lower = 0.0, upper = 0.0;  // bounds on s^{p-n-1}
  double min_value = 0.0, max_value = 0.0;
  double slack = 0.0;               // min distance to the bounds, negative if violated
  bool holds = false;
};
C0Report c0_diagnostics(const SolveSpec& spec, const SolveResult& result);

}  // namespace capillary
