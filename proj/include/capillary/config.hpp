#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "capillary/cap_domain.hpp"
#include "capillary/norm.hpp"

namespace capillary {

enum class Task { Solve, Measures, Psum, CheckNorm, CheckCondition, Verify };

std::string task_name(Task t);
Task parse_task(const std::string& name);  // ConfigError on unknown names

struct NormConfig {
  std::string family = "isotropic";  // isotropic | ellipsoidal | perturbed
  int n = 1;                         // isotropic only; otherwise from the matrix
  std::vector<std::vector<double>> matrix;
  double amplitude = 0.0;            // perturbed only
  std::vector<Monomial> terms;
};

// A body on the cap: the cap itself scaled, a seeded random smooth body, or
// a closed-form capillary support function.
struct BodyConfig {
  std::string kind = "cap";  // cap | random | expr
  double scale = 1.0;        // cap
  double amplitude = 0.3;    // random
  std::uint64_t seed = 1;    // random
  bool even = false;         // random
  std::string s;             // expr, over xi*, x*, ell
};

struct SolveConfig {
  double p = 1.0;
  std::string f = "1";        // expression; ignored if f_csv is set
  std::string f_csv;          // one value per node, node order of solution.csv
  std::string form = "tilde"; // hat | tilde
  bool even = false;
  double tol = 1e-10;
  int max_newton = 30;
  double t_step = 0.1;
  std::string initial;        // expression for the starting s; empty means ell
  bool check_condition = true;
};

struct MeasuresConfig {
  BodyConfig body;
  long mc_samples = 200000;
};

struct PsumConfig {
  BodyConfig K;
  BodyConfig L;
  double p = 1.0, a = 1.0, b = 1.0;
};

struct CheckConfig {
  int samples = 1000;
};

struct VerifyConfig {
  long mc_samples = 200000;
  bool corrupt_q = false;  // test hook: perturb Q before the Gauss check
  double corrupt_amount = 0.2;
};

struct RunConfig {
  Task task = Task::Verify;
  NormConfig norm;
  double omega0 = -0.5;
  GridResolution grid{0, 0};  // zero means the default for n
  std::uint64_t seed = 1;
  std::string output = "out";
  std::string base_dir = ".";  // relative paths in the config resolve here; not serialized

  SolveConfig solve;
  MeasuresConfig measures;
  PsumConfig psum;
  CheckConfig check;
  VerifyConfig verify;

  int n() const;
  GridResolution resolution() const;  // defaults filled in
};

// YAML text with nested blocks. Unknown keys, bad ranges and missing files
// raise ConfigError.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);
std::string serialize(const RunConfig& config);

// Throws ConfigError if the grid does not fit the dimension.
void validate(const RunConfig& config);

MinkowskiNorm make_norm(const NormConfig& config);

// "N" or "NxM".
GridResolution parse_resolution(const std::string& text);

}  // namespace capillary
