// Copyright 2026 The relaysel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// relaysel command-line front end: `solve` and `experiment`.

#include "relaysel/experiments.hpp"
#include "relaysel/io.hpp"
#include "relaysel/selection.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace relaysel;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct SolveArgs {
  std::string instance;
  std::string objective = "sum";
  std::string codebook = "repetition";
  std::vector<double> targets;
  std::string refine = "default";
  std::string out;
};

struct ExperimentArgs {
  std::string name;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int threads = 0;
  bool oracle = false;
  bool full = false;
};

int run_solve(const SolveArgs& args) {
  InstanceFile file = read_instance(args.instance);
  Objective objective;
  objective.kind = parse_objective(args.objective);
  const Codebook codebook = parse_codebook(args.codebook);
  if (objective.kind == ObjectiveKind::sum_min) {
    if (!args.targets.empty()) {
      file.targets = MinRateTargets{Eigen::Map<const Eigen::VectorXd>(args.targets.data(),
                                                                      static_cast<Eigen::Index>(args.targets.size()))};
    }
    if (!file.targets) throw InvalidInput("sum_min needs targets (instance key 'targets' or --targets)");
    objective.targets = file.targets;
  }
  std::optional<bool> refine;
  if (args.refine == "on") refine = true;
  if (args.refine == "off") refine = false;

  const BoundPair result = bound_pair(file.instance, objective, {}, codebook, refine);
  const std::string text = solution_to_json(result, objective, codebook, file.instance).dump(2) + "\n";
  if (args.out.empty())
    std::cout << text;
  else
    write_file(args.out, text);
  return kExitOk;
}

std::string csv_for(const std::string& name, const ExperimentConfig& config, std::uint64_t seed, int threads,
                    bool oracle, ordered_json& audit) {
  if (name == "assumption-table") return to_table(run_assumption_table(config, seed, threads)).to_csv();
  if (name == "bound-tightness") return to_table(run_bound_tightness(config, seed, threads, oracle)).to_csv();
  if (name == "oracle-check") return to_table(run_oracle_check(config, seed, threads)).to_csv();
  const CellResult cell = run_cell_comparison(config, seed, threads);
  audit["location_sets"] = cell.audit.location_sets;
  audit["fades"] = cell.audit.fades;
  audit["large_scale_mismatches"] = cell.audit.mismatches;
  return to_table(cell.rows).to_csv();
}

int run_experiment(const ExperimentArgs& args) {
  ExperimentConfig config = args.config.empty() ? ExperimentConfig{} : read_config(args.config);
  if (args.seed) config.scenario.seed = *args.seed;
  if (args.full) config.table_samples = 3'000'000;
  config.validate();
  const int threads =
      args.threads > 0 ? args.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  const auto start = std::chrono::steady_clock::now();
  ordered_json audit = ordered_json::object();
  const std::string csv = csv_for(args.name, config, config.scenario.seed, threads, args.oracle, audit);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::filesystem::create_directories(args.out_dir);
  const std::filesystem::path dir(args.out_dir);
  write_file((dir / (args.name + ".csv")).string(), csv);

  ordered_json manifest;
  manifest["experiment"] = args.name;
  manifest["seed"] = config.scenario.seed;
  manifest["threads"] = threads;
  manifest["git_describe"] = RELAYSEL_GIT_DESCRIBE;
  manifest["wall_time_s"] = wall;
  manifest["oracle"] = args.oracle;
  ordered_json echo = ordered_json::object();
  for (const auto& [key, value] : echo_config(config)) echo[key] = value;
  manifest["config"] = echo;
  if (!audit.empty()) manifest["draw_audit"] = audit;
  write_file((dir / (args.name + ".manifest.json")).string(), manifest.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay selection and power allocation for cooperative cellular downlinks"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance and print the solution JSON");
  solve_cmd->add_option("instance", solve.instance, "Instance JSON file")->required();
  solve_cmd->add_option("--objective", solve.objective, "sum | sum_min | max_min")
      ->check(CLI::IsMember({"sum", "sum_min", "max_min"}));
  solve_cmd->add_option("--codebook", solve.codebook, "repetition | independent")
      ->check(CLI::IsMember({"repetition", "independent"}));
  solve_cmd->add_option("--targets", solve.targets, "Per-user minimum rates (sum_min)")->delimiter(',');
  solve_cmd->add_option("--refine", solve.refine, "Per-relay refinement: default | on | off")
      ->check(CLI::IsMember({"default", "on", "off"}));
  solve_cmd->add_option("-o,--out", solve.out, "Write the JSON here instead of standard output");

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a named experiment and write CSV plus manifest");
  exp_cmd->add_option("name", exp.name, "assumption-table | bound-tightness | cell-comparison | oracle-check")
      ->required()
      ->check(CLI::IsMember({"assumption-table", "bound-tightness", "cell-comparison", "oracle-check"}));
  exp_cmd->add_option("--config", exp.config, "Flat key = value config file");
  exp_cmd->add_option("--seed", exp.seed, "Root seed (overrides the config)");
  exp_cmd->add_option("--out-dir", exp.out_dir, "Output directory");
  exp_cmd->add_option("--threads", exp.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  exp_cmd->add_flag("--oracle", exp.oracle, "bound-tightness: add the exhaustive optimum where it fits");
  exp_cmd->add_flag("--full", exp.full, "assumption-table: 3e6 samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*solve_cmd) return run_solve(solve);
    return run_experiment(exp);
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InfeasibleLowerBounds& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
