#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "capillary/body.hpp"
#include "capillary/config.hpp"

namespace capillary {

using Json = nlohmann::ordered_json;

inline constexpr int kReportVersion = 1;

// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitModule = 3;

struct RunResult {
  int exit_code = kExitOk;
  Json report;
  std::vector<std::string> files;  // written artifacts
};

// Executes the configured task and writes report.json plus the task's
// artifacts into config.output. Errors become report entries with their
// class name; nothing escapes except I/O failures.
RunResult run(const RunConfig& config);

// Same, starting from a config file; a config that does not load still
// produces a report (in out_dir) and exit code 2.
RunResult run_file(const std::string& path, const std::string& out_dir_override = "",
                   const std::string& resolution_override = "", long long seed_override = -1,
                   const std::string& task_override = "");

SetupPtr make_setup(const RunConfig& config);
std::vector<double> field_from_expr(const CapSetup& setup, const std::string& text);
CapBody make_body(const SetupPtr& setup, const BodyConfig& config);

// Invariant suite at the configured resolution: one entry per check with
// name, measured value, threshold and pass flag.
struct VerifyEntry {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};
std::vector<VerifyEntry> verify_suite(const RunConfig& config);

}  // namespace capillary
