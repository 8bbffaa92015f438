#include "capillary/config.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "capillary/errors.hpp"

namespace capillary {

namespace {

constexpr const char* kTaskNames[] = {"solve", "measures", "psum", "check-norm", "check-condition", "verify"};

void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ConfigError(where + " must be a block of key: value pairs");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
  if (!node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

BodyConfig read_body(const YAML::Node& node, const std::string& where) {
  BodyConfig b;
  if (!node) return b;
  check_keys(node, where, {"kind", "scale", "amplitude", "seed", "even", "s"});
  read(node, "kind", b.kind, where);
  read(node, "scale", b.scale, where);
  read(node, "amplitude", b.amplitude, where);
  read(node, "seed", b.seed, where);
  read(node, "even", b.even, where);
  read(node, "s", b.s, where);
  if (b.kind != "cap" && b.kind != "random" && b.kind != "expr")
    throw ConfigError(where + ".kind must be cap, random or expr");
  if (b.kind == "cap" && !(b.scale > 0.0)) throw ConfigError(where + ".scale must be positive");
  if (b.kind == "random" && !(b.amplitude >= 0.0)) throw ConfigError(where + ".amplitude must be nonnegative");
  if (b.kind == "expr" && b.s.empty()) throw ConfigError(where + ".s is required for kind expr");
  return b;
}

YAML::Node write_body(const BodyConfig& b) {
  YAML::Node n;
  n["kind"] = b.kind;
  if (b.kind == "cap") n["scale"] = b.scale;
  if (b.kind == "random") {
    n["amplitude"] = b.amplitude;
    n["seed"] = b.seed;
    n["even"] = b.even;
  }
  if (b.kind == "expr") n["s"] = b.s;
  return n;
}

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base) / p).string();
}

}  // namespace

std::string task_name(Task t) { return kTaskNames[static_cast<int>(t)]; }

Task parse_task(const std::string& name) {
  for (int i = 0; i < 6; ++i)
    if (name == kTaskNames[i]) return static_cast<Task>(i);
  throw ConfigError("unknown task '" + name + "'");
}

int RunConfig::n() const {
  if (norm.family == "isotropic") return norm.n;
  return static_cast<int>(norm.matrix.size()) - 1;
}

GridResolution RunConfig::resolution() const {
  GridResolution r = grid;
  if (n() == 1) {
    if (r.n_rho <= 0) r.n_rho = 200;
    r.n_phi = 0;
  } else {
    if (r.n_rho <= 0) r.n_rho = 32;
    if (r.n_phi <= 0) r.n_phi = 2 * r.n_rho;
  }
  return r;
}

GridResolution parse_resolution(const std::string& text) {
  GridResolution r{0, 0};
  const auto x = text.find('x');
  try {
    std::size_t used = 0;
    r.n_rho = std::stoi(text.substr(0, x), &used);
    if (used != (x == std::string::npos ? text.size() : x)) throw std::invalid_argument(text);
    if (x != std::string::npos) {
      const std::string m = text.substr(x + 1);
      r.n_phi = std::stoi(m, &used);
      if (used != m.size()) throw std::invalid_argument(text);
    }
  } catch (const std::exception&) {
    throw ConfigError("resolution must look like N or NxM, got '" + text + "'");
  }
  if (r.n_rho <= 0 || r.n_phi < 0) throw ConfigError("resolution must be positive");
  return r;
}

MinkowskiNorm make_norm(const NormConfig& c) {
  if (c.family == "isotropic") return MinkowskiNorm::isotropic(c.n + 1);
  const int d = static_cast<int>(c.matrix.size());
  Mat M(d, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(c.matrix[i].size()) != d) throw ConfigError("norm.matrix must be square");
    for (int j = 0; j < d; ++j) M(i, j) = c.matrix[i][j];
  }
  if (c.family == "ellipsoidal") return MinkowskiNorm::ellipsoidal(M);
  if (c.family == "perturbed") {
    for (const Monomial& m : c.terms)
      if (static_cast<int>(m.exponents.size()) != d)
        throw ConfigError("every perturbation term needs one exponent per coordinate");
    return MinkowskiNorm::perturbed(M, c.amplitude, c.terms);
  }
  throw ConfigError("norm.family must be isotropic, ellipsoidal or perturbed");
}

void validate(const RunConfig& c) {
  const int n = c.n();
  if (n != 1 && n != 2) throw ConfigError("dimension n must be 1 or 2");
  if (c.norm.family != "isotropic" && c.norm.matrix.empty()) throw ConfigError("norm.matrix is required");
  if (!(c.omega0 > -1.0 && c.omega0 < 1.0)) throw ConfigError("omega0 must lie in (-1, 1)");
  const GridResolution r = c.resolution();
  if (n == 1 && r.n_rho < 4) throw ConfigError("n = 1 needs at least 4 grid intervals");
  if (n == 2 && (r.n_rho < 5 || r.n_phi < 8 || r.n_phi % 2))
    throw ConfigError("n = 2 needs at least 5 rings and an even number of at least 8 angles");
  if (!(c.solve.p >= 1.0)) throw ConfigError("solve.p must be at least 1");
  if (c.solve.form != "hat" && c.solve.form != "tilde") throw ConfigError("solve.form must be hat or tilde");
  if (!(c.solve.tol > 0.0) || c.solve.max_newton <= 0 || !(c.solve.t_step > 0.0 && c.solve.t_step <= 1.0))
    throw ConfigError("solve tolerances must be positive and t_step in (0, 1]");
  if (!c.solve.f_csv.empty() && !std::filesystem::exists(resolve(c.base_dir, c.solve.f_csv)))
    throw ConfigError("solve.f_csv not found: " + c.solve.f_csv);
  if (c.measures.mc_samples <= 0 || c.verify.mc_samples <= 0) throw ConfigError("mc_samples must be positive");
  if (!(c.psum.p >= 1.0) || !(c.psum.a >= 0.0) || !(c.psum.b >= 0.0) || c.psum.a + c.psum.b <= 0.0)
    throw ConfigError("psum needs p >= 1 and nonnegative a, b, not both zero");
  if (c.check.samples <= 0) throw ConfigError("check.samples must be positive");
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("unparseable config: ") + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError("empty config");
  check_keys(root, "config",
             {"task", "norm", "omega0", "grid", "seed", "output", "solve", "measures", "psum", "check", "verify"});
  RunConfig c;
  c.base_dir = base_dir;
  if (root["task"]) c.task = parse_task(root["task"].as<std::string>());
  if (!root["norm"]) throw ConfigError("norm block is required");
  {
    const YAML::Node nn = root["norm"];
    check_keys(nn, "norm", {"family", "n", "matrix", "amplitude", "terms"});
    read(nn, "family", c.norm.family, "norm");
    read(nn, "n", c.norm.n, "norm");
    read(nn, "matrix", c.norm.matrix, "norm");
    read(nn, "amplitude", c.norm.amplitude, "norm");
    if (nn["terms"]) {
      if (!nn["terms"].IsSequence()) throw ConfigError("norm.terms must be a list");
      for (const auto& t : nn["terms"]) {
        check_keys(t, "norm.terms", {"coeff", "exponents"});
        Monomial m;
        read(t, "coeff", m.coeff, "norm.terms");
        read(t, "exponents", m.exponents, "norm.terms");
        c.norm.terms.push_back(m);
      }
    }
  }
  read(root, "omega0", c.omega0, "config");
  read(root, "seed", c.seed, "config");
  read(root, "output", c.output, "config");
  if (root["grid"]) {
    check_keys(root["grid"], "grid", {"n_rho", "n_phi"});
    read(root["grid"], "n_rho", c.grid.n_rho, "grid");
    read(root["grid"], "n_phi", c.grid.n_phi, "grid");
  }
  if (const YAML::Node s = root["solve"]) {
    check_keys(s, "solve",
               {"p", "f", "f_csv", "form", "even", "tol", "max_newton", "t_step", "initial", "check_condition"});
    read(s, "p", c.solve.p, "solve");
    read(s, "f", c.solve.f, "solve");
    read(s, "f_csv", c.solve.f_csv, "solve");
    read(s, "form", c.solve.form, "solve");
    read(s, "even", c.solve.even, "solve");
    read(s, "tol", c.solve.tol, "solve");
    read(s, "max_newton", c.solve.max_newton, "solve");
    read(s, "t_step", c.solve.t_step, "solve");
    read(s, "initial", c.solve.initial, "solve");
    read(s, "check_condition", c.solve.check_condition, "solve");
  }
  if (const YAML::Node m = root["measures"]) {
    check_keys(m, "measures", {"body", "mc_samples"});
    c.measures.body = read_body(m["body"], "measures.body");
    read(m, "mc_samples", c.measures.mc_samples, "measures");
  }
  if (const YAML::Node p = root["psum"]) {
    check_keys(p, "psum", {"K", "L", "p", "a", "b"});
    c.psum.K = read_body(p["K"], "psum.K");
    c.psum.L = read_body(p["L"], "psum.L");
    read(p, "p", c.psum.p, "psum");
    read(p, "a", c.psum.a, "psum");
    read(p, "b", c.psum.b, "psum");
  }
  if (const YAML::Node k = root["check"]) {
    check_keys(k, "check", {"samples"});
    read(k, "samples", c.check.samples, "check");
  }
  if (const YAML::Node v = root["verify"]) {
    check_keys(v, "verify", {"mc_samples", "corrupt_q", "corrupt_amount"});
    read(v, "mc_samples", c.verify.mc_samples, "verify");
    read(v, "corrupt_q", c.verify.corrupt_q, "verify");
    read(v, "corrupt_amount", c.verify.corrupt_amount, "verify");
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), parent.empty() ? "." : parent.string());
}

std::string serialize(const RunConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  YAML::Node root;
  root["task"] = task_name(c.task);
  YAML::Node norm;
  norm["family"] = c.norm.family;
  if (c.norm.family == "isotropic") {
    norm["n"] = c.norm.n;
  } else {
    norm["matrix"] = c.norm.matrix;
  }
  if (c.norm.family == "perturbed") {
    norm["amplitude"] = c.norm.amplitude;
    for (const Monomial& m : c.norm.terms) {
      YAML::Node t;
      t["coeff"] = m.coeff;
      t["exponents"] = m.exponents;
      norm["terms"].push_back(t);
    }
  }
  root["norm"] = norm;
  root["omega0"] = c.omega0;
  const GridResolution r = c.resolution();
  root["grid"]["n_rho"] = r.n_rho;
  root["grid"]["n_phi"] = r.n_phi;
  root["seed"] = c.seed;
  root["output"] = c.output;
  YAML::Node s;
  s["p"] = c.solve.p;
  s["f"] = c.solve.f;
  if (!c.solve.f_csv.empty()) s["f_csv"] = c.solve.f_csv;
  s["form"] = c.solve.form;
  s["even"] = c.solve.even;
  s["tol"] = c.solve.tol;
  s["max_newton"] = c.solve.max_newton;
  s["t_step"] = c.solve.t_step;
  if (!c.solve.initial.empty()) s["initial"] = c.solve.initial;
  s["check_condition"] = c.solve.check_condition;
  root["solve"] = s;
  root["measures"]["body"] = write_body(c.measures.body);
  root["measures"]["mc_samples"] = c.measures.mc_samples;
  root["psum"]["K"] = write_body(c.psum.K);
  root["psum"]["L"] = write_body(c.psum.L);
  root["psum"]["p"] = c.psum.p;
  root["psum"]["a"] = c.psum.a;
  root["psum"]["b"] = c.psum.b;
  root["check"]["samples"] = c.check.samples;
  root["verify"]["mc_samples"] = c.verify.mc_samples;
  root["verify"]["corrupt_q"] = c.verify.corrupt_q;
  root["verify"]["corrupt_amount"] = c.verify.corrupt_amount;
  out << root;
  return std::string(out.c_str()) + "\n";
}

}  // namespace capillary
