#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "nlslab/error.hpp"
#include "nlslab/harness.hpp"

namespace {

using namespace nlslab;

// "d=4,M=1024,R=30"; missing keys keep the operator-suite defaults.
GridParams parse_grid_spec(const std::string& spec) {
  GridParams g = ExperimentConfig::defaults(Scenario::operator_suite).grid;
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("grid spec entry without '=': " + item);
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    try {
      if (key == "d")
        g.d = std::stoi(value);
      else if (key == "M")
        g.nodes = std::stoul(value);
      else if (key == "R" || key == "Rmax")
        g.rmax = std::stod(value);
      else
        throw InvalidArgument("unknown grid spec key: " + key);
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad grid spec value: " + item);
    }
  }
  return g;
}

void report(const RunManifest& m, const std::filesystem::path& dir) {
  std::cout << m.headline.dump(2) << '\n'
            << "manifest: " << (dir / "manifest.json").string() << '\n'
            << "content hash: " << m.content_hash << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlslab: numerical lab for the radial mass-critical NLS"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run the experiment described by a JSON config");
  run_cmd->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);

  int gs_d = 4;
  std::size_t gs_m = 1024;
  double gs_r = 30.0;
  std::string gs_out;
  auto* gs_cmd = app.add_subcommand("ground-state", "compute and certify Q");
  gs_cmd->add_option("--d", gs_d, "dimension")->required();
  gs_cmd->add_option("--out", gs_out, "output directory")->required();
  gs_cmd->add_option("--M", gs_m, "grid nodes");
  gs_cmd->add_option("--R", gs_r, "grid radius");

  std::string grid_spec = "d=4,M=1024,R=40";
  std::string ops_cert, ops_out = "nlslab-ops";
  std::uint64_t ops_seed = 1;
  auto* ops_cmd = app.add_subcommand("verify-ops", "run the operator probe suite");
  ops_cmd->add_option("--grid", grid_spec, "grid spec, e.g. d=4,M=1024,R=40")->required();
  ops_cmd->add_option("--certificate", ops_cert, "ground-state certificate (computed by shooting if absent)");
  ops_cmd->add_option("--out", ops_out, "output directory");
  ops_cmd->add_option("--seed", ops_seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto cfg = ExperimentConfig::load(config_path);
      report(run(cfg), cfg.output_dir);
    } else if (*gs_cmd) {
      auto cfg = ExperimentConfig::defaults(Scenario::ground_state);
      cfg.grid = {gs_d, gs_m, gs_r};
      cfg.output_dir = gs_out;
      report(run(cfg), cfg.output_dir);
    } else if (*ops_cmd) {
      auto cfg = ExperimentConfig::defaults(Scenario::operator_suite);
      cfg.grid = parse_grid_spec(grid_spec);
      cfg.output_dir = ops_out;
      cfg.seed = ops_seed;
      if (!ops_cert.empty()) {
        cfg.certificate = ops_cert;
        report(run(cfg), cfg.output_dir);
      } else {
        report(run_with_ground_state(cfg, solve_shooting(cfg.grid.make())), cfg.output_dir);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
