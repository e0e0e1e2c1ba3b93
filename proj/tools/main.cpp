// pnpfem command-line runner.
//
//   pnpfem run <config.cfg> [--out DIR] [--lambda-sweep [--lambdas ...]]
//   pnpfem case <name> [--override section.key=value]... [--out DIR]
//   pnpfem list
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pnpfem/config.hpp"
#include "pnpfem/run_case.hpp"
#include "pnpfem/solvers.hpp"

namespace {

void print_transient_outcome(const pnpfem::CaseConfig& config,
                             const pnpfem::RunResult& result,
                             const std::string& out_dir) {
  std::printf("case %s: %d steps, %s, %ld block iterations, t = %g\n",
              config.name.c_str(), result.steps_taken,
              result.reached_steady ? "steady" : "not steady",
              result.total_block_iterations, result.state.t);
  for (const pnpfem::FluxEntry& e : result.flux.entries) {
    std::printf("  flux tag %d c%d (%s): %.6g\n", e.tag, e.species,
                e.mode == pnpfem::FluxMode::weak ? "weak" : "strong", e.total);
  }
  for (std::size_t s = 0; s < result.net_flux.size(); ++s) {
    std::printf("  net boundary flux c%zu: %.6g\n", s, result.net_flux[s]);
  }
  std::printf("artifacts in %s\n", out_dir.c_str());
}

void print_mms_outcome(const pnpfem::RunResult& result,
                       const std::string& out_dir) {
  for (const auto& [field, orders] : result.mms_orders) {
    std::printf("  %-8s observed order %.3f\n", field.c_str(), orders.back());
  }
  std::printf("artifacts in %s\n", out_dir.c_str());
}

void print_sweep(const std::vector<pnpfem::SweepRow>& rows,
                 const std::string& out_dir) {
  std::printf("%12s %-9s %12s %8s %7s %14s %14s %10s\n", "lambda", "mode",
              "dt", "steps", "steady", "membrane_flux", "far_flux",
              "mismatch");
  for (const pnpfem::SweepRow& row : rows) {
    std::printf("%12g %-9s %12g %8d %7s %14.6g %14.6g %9.4f%%\n", row.lambda,
                row.mode == pnpfem::ScalingMode::Membrane ? "membrane"
                                                          : "bulk",
                row.dt, row.steps_taken, row.reached_steady ? "yes" : "no",
                row.membrane_flux, row.far_flux, 100.0 * row.mismatch);
  }
  std::printf("artifacts in %s\n", out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pnpfem: finite-element solver for coupled Navier-Stokes / "
      "Poisson-Nernst-Planck transport with weakly imposed boundary "
      "conditions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string case_name;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  bool lambda_sweep = false;
  std::vector<double> lambdas = {1e-2, 5e-3, 1e-3, 5e-4};

  CLI::App* run_cmd = app.add_subcommand("run", "Run a case config file");
  run_cmd->add_option("config", config_path, "Path to a .cfg case file")
      ->required();

  CLI::App* case_cmd =
      app.add_subcommand("case", "Run a built-in case by name");
  case_cmd->add_option("name", case_name, "Built-in case name (see `list`)")
      ->required();
  case_cmd->add_option("--override", overrides,
                       "Config override as section.key=value (repeatable)");

  for (CLI::App* cmd : {run_cmd, case_cmd}) {
    cmd->add_option("--out", out_dir, "Output directory (default: out)");
    cmd->add_flag("--lambda-sweep", lambda_sweep,
                  "Re-run the case across a list of Debye lengths and "
                  "tabulate the weak/strong boundary-flux mismatch");
    cmd->add_option("--lambdas", lambdas,
                    "Debye lengths for --lambda-sweep (default: 1e-2 5e-3 "
                    "1e-3 5e-4)");
  }

  app.add_subcommand("list", "List built-in cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const pnpfem::CaseInfo& info : pnpfem::list_cases()) {
        std::printf("%-14s %s\n", info.name.c_str(),
                    info.description.c_str());
      }
      return 0;
    }

    pnpfem::CaseConfig config;
    if (app.got_subcommand(run_cmd)) {
      config = pnpfem::parse_config_file(config_path);
    } else {
      config = pnpfem::parse_config_file(pnpfem::find_case_file(case_name));
      for (const std::string& assignment : overrides) {
        pnpfem::apply_override(config, assignment);
      }
    }

    if (lambda_sweep) {
      print_sweep(pnpfem::run_lambda_sweep(config, lambdas, out_dir),
                  out_dir);
      return 0;
    }

    const pnpfem::RunResult result = pnpfem::run_case(config, out_dir);
    if (config.type == pnpfem::CaseType::mms_convergence) {
      print_mms_outcome(result, out_dir);
    } else {
      print_transient_outcome(config, result, out_dir);
    }
    return 0;
  } catch (const pnpfem::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pnpfem::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
