#include <CLI11.hpp>

#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "capillary/pipeline.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string resolution;
  long long seed = -1;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "run-config file (YAML)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "output directory, overrides the config");
  sub->add_option("--seed", f.seed, "seed, overrides the config")->check(CLI::NonNegativeNumber);
  sub->add_option("--resolution", f.resolution, "grid N or NxM, overrides the config");
}

int report(const capillary::RunResult& r) {
  const auto& rep = r.report;
  if (rep.contains("error")) {
    std::cerr << rep["error"].dump() << "\n";
  } else {
    std::cout << rep.value("task", std::string()) << ": " << rep.value("status", std::string());
    for (const auto& f : r.files) std::cout << " " << f;
    std::cout << "\n";
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic capillary convex bodies: L_p Minkowski solver and measures"};
  app.require_subcommand(1);

  const std::vector<std::string> tasks = {"solve", "measures", "psum", "check-norm", "check-condition", "verify"};
  std::vector<Flags> flags(tasks.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    subs.push_back(app.add_subcommand(tasks[i], "run the " + tasks[i] + " task"));
    add_flags(subs.back(), flags[i]);
  }

  std::vector<std::string> batch_configs;
  int jobs = 2;
  std::string batch_task;
  CLI::App* batch = app.add_subcommand("batch", "run several configs concurrently, each with its own output");
  batch->add_option("--config", batch_configs, "config files")->required()->check(CLI::ExistingFile);
  batch->add_option("--jobs", jobs, "worker count")->check(CLI::PositiveNumber);
  batch->add_option("--task", batch_task, "task for every config, overrides the configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : capillary::kExitConfig;
  }

  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (subs[i]->parsed()) {
      const Flags& f = flags[i];
      return report(capillary::run_file(f.config, f.out, f.resolution, f.seed, tasks[i]));
    }

  // Batch: a small pool of futures; results are reported in input order.
  int worst = 0;
  std::size_t next = 0;
  while (next < batch_configs.size()) {
    std::vector<std::future<capillary::RunResult>> running;
    for (int j = 0; j < jobs && next < batch_configs.size(); ++j, ++next)
      running.push_back(std::async(std::launch::async, capillary::run_file, batch_configs[next], std::string(),
                                   std::string(), -1LL, batch_task));
    for (auto& fut : running) worst = std::max(worst, report(fut.get()));
  }
  return worst;
}
