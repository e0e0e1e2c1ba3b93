#include "pnpfem/run_case.hpp"

#include "pnpfem/stepping.hpp"
#include "pnpfem/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

namespace pnpfem {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_stream(const std::ofstream& out, const std::string& path) {
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

std::string tag_label(const Mesh& mesh, int tag) {
  const auto it = mesh.tag_names.find(tag);
  if (it != mesh.tag_names.end() && !it->second.empty()) return it->second;
  return "tag" + std::to_string(tag);
}

void write_snapshot(const Mesh& mesh, const SolutionState& state,
                    const NondimParams& params, bool flow,
                    const std::string& path) {
  std::map<std::string, const std::vector<double>*> scalars;
  std::vector<std::string> species_names(state.species_count());
  for (int s = 0; s < state.species_count(); ++s) {
    species_names[s] = "c" + std::to_string(s);
    scalars[species_names[s]] = &state.c[s];
  }
  scalars["phi"] = &state.phi;
  const DerivedField rho = charge_density(state, params);
  scalars["rho_e"] = &rho.values;
  std::map<std::string, std::array<const std::vector<double>*, 2>> vectors;
  if (flow) {
    scalars["p"] = &state.p;
    vectors["velocity"] = {&state.vel[0], &state.vel[1]};
  }
  write_vtk(mesh, path, scalars, vectors);
}

void write_flux_csv(const Mesh& mesh, const FluxReport& report,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "tag,name,species,mode,consistency,penalty,total\n";
  for (const FluxEntry& e : report.entries) {
    out << e.tag << "," << tag_label(mesh, e.tag) << ",c" << e.species << ","
        << (e.mode == FluxMode::weak ? "weak" : "strong") << ","
        << fmt(e.consistency_term) << "," << fmt(e.penalty_term) << ","
        << fmt(e.total) << "\n";
  }
  check_stream(out, path);
}

void append_range_rows(std::ofstream& out, const std::string& key,
                       const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  out << key << "_min," << fmt(*lo) << "\n";
  out << key << "_max," << fmt(*hi) << "\n";
}

RunResult run_mms_case(const CaseConfig& config, const std::string& out_dir) {
  const ConvergenceReport report = convergence_study(
      config.mms.sizes, config.mms.dt, config.mms.t_final, config.params);
  write_convergence_csv(report, out_dir + "/convergence.csv");

  RunResult result;
  result.mms_orders = report.orders;

  const std::string path = out_dir + "/summary.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "key,value\n";
  out << "case," << config.name << "\n";
  out << "type,mms_convergence\n";
  out << "meshes," << config.mms.sizes.size() << "\n";
  for (const auto& [field, errs] : report.errors) {
    out << "error_" << field << "_finest," << fmt(errs.back()) << "\n";
  }
  for (const auto& [field, orders] : report.orders) {
    out << "order_" << field << "," << fmt(orders.back()) << "\n";
  }
  check_stream(out, path);
  return result;
}

}  // namespace

RunResult run_case(const CaseConfig& config, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  if (config.type == CaseType::mms_convergence) {
    return run_mms_case(config, out_dir);
  }

  const Mesh mesh = build_configured_mesh(config.mesh);
  const Problem problem = make_problem(config, mesh);
  SolverSuite solvers = make_solver_suite(config.solver);
  const TransientConfig tcfg = make_transient_config(config);

  StepObserver observer;
  if (config.output.vtk_every > 0) {
    const int every = config.output.vtk_every;
    const NondimParams params = config.params;
    const bool flow = config.flow;
    observer = [&mesh, every, params, flow, out_dir](
                   int step, const SolutionState& state, const StepStats&) {
      if (step % every != 0) return;
      char name[32];
      std::snprintf(name, sizeof(name), "step_%06d.vtk", step);
      write_snapshot(mesh, state, params, flow, out_dir + "/" + name);
    };
  }

  TransientResult run =
      run_transient(problem,
                    make_state(mesh, config.params.species_count(), 1.0), tcfg,
                    solvers, observer);

  RunResult result;
  result.steps_taken = run.steps_taken;
  result.reached_steady = run.reached_steady;
  result.total_block_iterations = run.total_block_iterations;
  result.state = std::move(run.state);

  if (config.output.vtk_final) {
    write_snapshot(mesh, result.state, config.params, config.flow,
                   out_dir + "/final.vtk");
  }

  if (config.output.flux) {
    result.flux = flux_report(mesh, result.state, config.params,
                              problem.coeffs, problem.bc);
    result.net_flux = conservation_audit(mesh, result.state, config.params,
                                         problem.coeffs, problem.bc);
    write_flux_csv(mesh, result.flux, out_dir + "/flux.csv");
  }

  if (config.output.profile) {
    const ProfileSpec& prof = *config.output.profile;
    std::vector<std::pair<std::string, const std::vector<double>*>> fields;
    for (int s = 0; s < result.state.species_count(); ++s) {
      fields.emplace_back("c" + std::to_string(s), &result.state.c[s]);
    }
    fields.emplace_back("phi", &result.state.phi);
    if (config.flow) {
      fields.emplace_back("ux", &result.state.vel[0]);
      fields.emplace_back("uy", &result.state.vel[1]);
      fields.emplace_back("p", &result.state.p);
    }
    write_csv_profile(mesh, {prof.x0, prof.y0}, {prof.x1, prof.y1}, prof.n,
                      fields, out_dir + "/profile.csv");
  }

  const std::string path = out_dir + "/summary.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "key,value\n";
  out << "case," << config.name << "\n";
  out << "type,transient\n";
  out << "nodes," << mesh.node_count() << "\n";
  out << "elements," << mesh.element_count() << "\n";
  out << "steps_taken," << result.steps_taken << "\n";
  out << "reached_steady," << (result.reached_steady ? 1 : 0) << "\n";
  out << "total_block_iterations," << result.total_block_iterations << "\n";
  out << "t_final," << fmt(result.state.t) << "\n";
  for (int s = 0; s < result.state.species_count(); ++s) {
    append_range_rows(out, "c" + std::to_string(s), result.state.c[s]);
  }
  append_range_rows(out, "phi", result.state.phi);
  if (config.flow) {
    double u_max = 0.0;
    for (std::size_t n = 0; n < result.state.vel[0].size(); ++n) {
      u_max = std::max(u_max, std::hypot(result.state.vel[0][n],
                                         result.state.vel[1][n]));
    }
    out << "velocity_max," << fmt(u_max) << "\n";
    append_range_rows(out, "p", result.state.p);
  }
  for (std::size_t s = 0; s < result.net_flux.size(); ++s) {
    out << "net_flux_c" << s << "," << fmt(result.net_flux[s]) << "\n";
  }
  check_stream(out, path);
  return result;
}

std::vector<SweepRow> run_lambda_sweep(const CaseConfig& base,
                                       const std::vector<double>& lambdas,
                                       const std::string& out_dir,
                                       double membrane_below) {
  if (base.type != CaseType::transient) {
    throw ConfigError("lambda sweep needs a transient case");
  }
  if (lambdas.empty()) {
    throw ConfigError("lambda sweep needs at least one lambda");
  }

  // The weak (membrane) and strong (far) boundaries for the cation, read off
  // the case's own boundary table.
  std::string weak_suffix, strong_suffix;
  for (const auto& [suffix, section] : base.bc) {
    const auto it = section.scalars.find("c0");
    if (it == section.scalars.end()) continue;
    if (it->second.kind == ScalarBcKind::weak) weak_suffix = suffix;
    if (it->second.kind == ScalarBcKind::strong) strong_suffix = suffix;
  }
  if (weak_suffix.empty() || strong_suffix.empty()) {
    throw ConfigError(
        "lambda sweep needs one weak and one strong c0 boundary");
  }

  std::filesystem::create_directories(out_dir);

  const double lambda_base = base.params.lambda;
  const double horizon = base.time.dt * base.time.n_steps;  // bulk time units

  std::vector<SweepRow> rows;
  SolutionState warm;  // previous steady state; empty before the first run
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lambda = lambdas[i];
    CaseConfig config = base;
    config.params.lambda = lambda;
    config.params.mode = lambda < membrane_below ? ScalingMode::Membrane
                                                 : ScalingMode::Bulk;

    // Segregated-coupling stability: the block iteration's ambipolar gain is
    // ~ dt_bulk·(c₊+c₋)/(2Λ²), so the bulk-equivalent step shrinks with Λ².
    const double scale = (lambda / lambda_base) * (lambda / lambda_base);
    double dt = base.time.dt * scale;
    double steady_tol = base.time.steady_tol;
    if (config.params.mode == ScalingMode::Membrane) {
      // Same physics on the t_bulk = Λ·t_mem clock.
      dt /= lambda;
      steady_tol *= lambda;
    }
    // Warm-started runs only re-equilibrate the boundary layer and the tail
    // of the bulk transient; cold runs cover the full horizon.
    const double factor = warm.phi.empty() ? 1.0 : 0.5;
    const double bulk_dt = base.time.dt * scale;
    config.time.dt = dt;
    config.time.n_steps = std::max(
        1, static_cast<int>(std::llround(horizon * factor / bulk_dt)));
    config.time.steady_tol = steady_tol;

    const Mesh mesh = build_configured_mesh(config.mesh);
    const Problem problem = make_problem(config, mesh);
    SolverSuite solvers = make_solver_suite(config.solver);
    const TransientConfig tcfg = make_transient_config(config);

    SolutionState initial =
        warm.phi.empty()
            ? make_state(mesh, config.params.species_count(), 1.0)
            : warm;
    initial.t = 0.0;
    TransientResult run = run_transient(problem, initial, tcfg, solvers);

    const FluxReport report = flux_report(mesh, run.state, config.params,
                                          problem.coeffs, problem.bc);

    const auto tag_of = [&](const std::string& suffix) {
      // Numeric suffixes name the tag directly; otherwise match tag names.
      if (suffix.find_first_not_of("0123456789") == std::string::npos) {
        return std::stoi(suffix);
      }
      for (const auto& [id, name] : mesh.tag_names) {
        if (name == suffix) return id;
      }
      throw ConfigError("bc." + suffix + ": unknown boundary tag");
    };

    SweepRow row;
    row.lambda = lambda;
    row.mode = config.params.mode;
    row.dt = dt;
    row.steps_taken = run.steps_taken;
    row.reached_steady = run.reached_steady;
    const FluxEntry* weak_entry = report.find(tag_of(weak_suffix), 0);
    const FluxEntry* strong_entry = report.find(tag_of(strong_suffix), 0);
    if (weak_entry == nullptr || strong_entry == nullptr) {
      throw ConfigError("lambda sweep: flux entries missing");
    }
    row.membrane_flux = weak_entry->total;
    row.far_flux = strong_entry->total;
    row.mismatch =
        std::abs(std::abs(row.membrane_flux) - std::abs(row.far_flux)) /
        std::abs(row.far_flux);
    rows.push_back(row);

    warm = run.state;
  }

  const std::string path = out_dir + "/sweep.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "lambda,mode,dt,steps_taken,reached_steady,membrane_flux,far_flux,"
         "mismatch\n";
  for (const SweepRow& row : rows) {
    out << fmt(row.lambda) << ","
        << (row.mode == ScalingMode::Membrane ? "membrane" : "bulk") << ","
        << fmt(row.dt) << "," << row.steps_taken << ","
        << (row.reached_steady ? 1 : 0) << "," << fmt(row.membrane_flux)
        << "," << fmt(row.far_flux) << "," << fmt(row.mismatch) << "\n";
  }
  check_stream(out, path);
  return rows;
}

}  // namespace pnpfem
