#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "conformal/cli.hpp"

namespace {

struct Common {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  int jobs = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_jobs) {
  cmd->add_option("--config", c.config_path, "JSON configuration file");
  cmd->add_option("--out", c.out_dir, "Directory for output files");
  cmd->add_option("--seed", c.seed, "Base random seed");
  cmd->add_option("--set", c.overrides, "Override a config field, key.path=value")->take_all();
  if (with_jobs) cmd->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace conformal::cli;
  CLI::App app{"Conformal metric laboratory"};
  app.require_subcommand(1);
  Common common;
  struct Entry {
    const char* name;
    const char* help;
    RunResult (*run)(const Json&, const RunOptions&);
    bool jobs;
  };
  const Entry entries[] = {
      {"metric-eval", "Evaluate a density and its numeric curvature at sample points (CSV)", run_metric_eval, false},
      {"solve", "Solve the prescribed-curvature Dirichlet problem on an annulus", run_solve, false},
      {"verify", "Run numerical checks and emit JSON Lines verdicts", run_verify, true},
      {"bounds", "Evaluate gamma, generalized binomial and three-puncture bounds", run_bounds, false},
  };
  std::vector<CLI::App*> cmds;
  for (const auto& e : entries) {
    auto* cmd = app.add_subcommand(e.name, e.help);
    add_common(cmd, common, e.jobs);
    cmds.push_back(cmd);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  for (std::size_t k = 0; k < cmds.size(); ++k) {
    if (!cmds[k]->parsed()) continue;
    try {
      Json config = common.config_path.empty() ? Json::object() : load_config(common.config_path);
      for (const auto& o : common.overrides) apply_override(config, o);
      RunOptions opt;
      if (!common.out_dir.empty()) opt.out_dir = common.out_dir;
      opt.jobs = common.jobs;
      if (cmds[k]->count("--seed") > 0) {
        config["seed"] = common.seed;
        opt.seed = common.seed;
      }
      const auto result = entries[k].run(config, opt);
      std::cout << result.output << std::flush;
      return result.exit_code;
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kConfigError;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kRuntimeError;
    }
  }
  return kConfigError;
}
