#include "polinflux/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace polinflux;

Mode parse_mode(const std::string& s) { return s == "affective" ? Mode::affective : Mode::baseline; }

int emit(const CommandResult& result, const std::string& format, const std::string& out_path) {
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return kExitInput;
    }
    write_csv(result.table, out);
  }
  if (format == "csv")
    write_csv(result.table, std::cout);
  else
    write_text(result.table, std::cout);
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lobbying and influence in legislative networks"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string mode = "baseline";
  std::string format = "table";
  std::string out_path;
  std::string sigma_grid;
  std::string alpha_grid;
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 1;

  auto common = [&](CLI::App* sub, bool with_mode) {
    sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    if (with_mode) sub->add_option("--mode", mode, "baseline or affective")->check(CLI::IsMember({"baseline", "affective"}));
    sub->add_option("--format", format, "stdout format")->check(CLI::IsMember({"csv", "table"}));
    sub->add_option("--out", out_path, "also write CSV to this file");
  };

  auto* influence = app.add_subcommand("influence", "influence vector and spectral diagnostics");
  common(influence, true);
  auto* equilibrium = app.add_subcommand("equilibrium", "optimal investments and voting probabilities");
  common(equilibrium, true);
  auto* compare = app.add_subcommand("compare", "effect of the scenario's comparison edges");
  common(compare, false);
  compare->add_option("--sigma-grid", sigma_grid, "sigma values: a,b,c or lo:hi:steps");
  auto* sweep = app.add_subcommand("sweep", "vote share along a sigma or alpha grid");
  common(sweep, true);
  auto* sweep_var = sweep->add_option_group("variable");
  sweep_var->add_option("--sigma-grid", sigma_grid, "sigma values: a,b,c or lo:hi:steps");
  sweep_var->add_option("--alpha-grid", alpha_grid, "alpha values: a,b,c or lo:hi:steps");
  sweep_var->require_option(1);
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo check of equilibrium probabilities");
  common(simulate, true);
  simulate->add_option("--trials", trials, "number of simulated votes");
  simulate->add_option("--seed", seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    const Scenario scenario = load_scenario(scenario_path);
    const Mode m = parse_mode(mode);
    CommandResult result;
    if (*influence)
      result = cmd_influence(scenario, m);
    else if (*equilibrium)
      result = cmd_equilibrium(scenario, m);
    else if (*compare)
      result = cmd_compare(scenario, sigma_grid.empty() ? std::vector<double>{} : parse_grid(sigma_grid));
    else if (*sweep)
      result = alpha_grid.empty() ? cmd_sweep(scenario, m, SweepVariable::sigma, parse_grid(sigma_grid))
                                  : cmd_sweep(scenario, m, SweepVariable::alpha, parse_grid(alpha_grid));
    else
      result = cmd_simulate(scenario, m, trials, seed);
    return emit(result, format, out_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}
