#include "pnpfem/verification.hpp"

#include "pnpfem/assembly.hpp"
#include "pnpfem/postprocess.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pnpfem {

namespace {

constexpr double kOmega = 2.0 * M_PI;

/// Spatial building blocks A = sin(ωx)cos(ωy) and B = cos(ωx)sin(ωy) with
/// first derivatives; both satisfy ∇²f = −2ω²f.
struct Harmonics {
  double T, Td;          // cos(ωt) and its time derivative
  double A, Ax, Ay;      // sin(ωx)cos(ωy)
  double B, Bx, By;      // cos(ωx)sin(ωy)

  explicit Harmonics(double t, double x, double y) {
    const double sx = std::sin(kOmega * x), cx = std::cos(kOmega * x);
    const double sy = std::sin(kOmega * y), cy = std::cos(kOmega * y);
    T = std::cos(kOmega * t);
    Td = -kOmega * std::sin(kOmega * t);
    A = sx * cy;
    Ax = kOmega * cx * cy;
    Ay = -kOmega * sx * sy;
    B = cx * sy;
    Bx = -kOmega * sx * sy;
    By = kOmega * cx * cy;
  }
};

void require_binary_electrolyte(const NondimParams& params) {
  if (params.species_count() != 2) {
    throw std::invalid_argument(
        "manufactured solution requires exactly two species");
  }
}

/// Fourth-order central-difference stencils of a scalar (t, x, y) function.
/// The high order matters: the body-force coefficient grows like 1/(2Λ²), so
/// derivative errors are amplified by >10³ at small Debye lengths and
/// second-order stencils cannot reach the comparison tolerances in double
/// precision at any step size.
template <class F>
struct FdOps {
  F f;
  double h;
  double val(double t, double x, double y) const { return f(t, x, y); }
  double d1(double m2, double m1, double p1, double p2) const {
    return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
  }
  double d2(double m2, double m1, double c, double p1, double p2) const {
    return (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
  }
  double dt(double t, double x, double y) const {
    return d1(f(t - 2 * h, x, y), f(t - h, x, y), f(t + h, x, y),
              f(t + 2 * h, x, y));
  }
  double dx(double t, double x, double y) const {
    return d1(f(t, x - 2 * h, y), f(t, x - h, y), f(t, x + h, y),
              f(t, x + 2 * h, y));
  }
  double dy(double t, double x, double y) const {
    return d1(f(t, x, y - 2 * h), f(t, x, y - h), f(t, x, y + h),
              f(t, x, y + 2 * h));
  }
  double lap(double t, double x, double y) const {
    const double c = f(t, x, y);
    return d2(f(t, x - 2 * h, y), f(t, x - h, y), c, f(t, x + h, y),
              f(t, x + 2 * h, y)) +
           d2(f(t, x, y - 2 * h), f(t, x, y - h), c, f(t, x, y + h),
              f(t, x, y + 2 * h));
  }
};

template <class F>
FdOps<F> fd_ops(F f, double h) {
  return FdOps<F>{f, h};
}

}  // namespace

MmsPoint mms_exact(double t, double x, double y) {
  const Harmonics hm(t, x, y);
  MmsPoint q;
  q.u = hm.T * hm.A;
  q.v = -hm.T * hm.B;
  q.p = hm.T * hm.A;
  q.c_plus = hm.T * hm.B;
  q.c_minus = hm.T * hm.A;
  q.phi = -hm.T * hm.B;
  return q;
}

MmsForcing mms_forcing(double t, double x, double y, const NondimParams& params,
                       const EquationCoefficients& coeffs) {
  require_binary_electrolyte(params);
  const Harmonics hm(t, x, y);
  const double z0 = params.valences[0];
  const double z1 = params.valences[1];
  const double a = coeffs.np_advection_factor;
  const double d = coeffs.np_diffusion_factor;
  const double w2 = 2.0 * kOmega * kOmega;  // −∇²f = 2ω²·f for A and B

  const double T = hm.T, Td = hm.Td;
  const double A = hm.A, Ax = hm.Ax, Ay = hm.Ay;
  const double B = hm.B, Bx = hm.Bx, By = hm.By;

  // Fields: u = TA, v = −TB, p = TA, c₊ = TB, c₋ = TA, φ = −TB.
  // ∇φ = −T(Bx, By), ∇²φ = 2ω²·T·B.
  const double lap_phi = w2 * T * B;
  const double rho_e = z0 * T * B + z1 * T * A;

  MmsForcing f;

  // c₊ = TB: u·∇c = T²(A·Bx − B·By), ∇²c = −2ω²TB,
  // ∇c·∇φ = −T²(Bx²+By²), c∇²φ = 2ω²T²B².
  f.c_plus = Td * B + a * T * T * (A * Bx - B * By) -
             d * (-w2 * T * B +
                  z0 * (-T * T * (Bx * Bx + By * By) + T * B * lap_phi));

  // c₋ = TA: u·∇c = T²(A·Ax − B·Ay), ∇²c = −2ω²TA,
  // ∇c·∇φ = −T²(AxBx+AyBy), c∇²φ = 2ω²T²AB.
  f.c_minus = Td * A + a * T * T * (A * Ax - B * Ay) -
              d * (-w2 * T * A +
                   z1 * (-T * T * (Ax * Bx + Ay * By) + T * A * lap_phi));

  f.phi = -coeffs.poisson_factor * lap_phi - rho_e;

  // u = TA: u·∇u = T²(A·Ax − B·Ay), ∇²u = −2ω²TA, ∂p/∂x = T·Ax.
  f.u = coeffs.ns_time_factor * Td * A +
        coeffs.ns_convection_factor * T * T * (A * Ax - B * Ay) + T * Ax +
        w2 * T * A + coeffs.body_force_factor * rho_e * (-T * Bx);

  // v = −TB: u·∇v = T²(B·By − A·Bx), ∇²v = 2ω²TB, ∂p/∂y = T·Ay.
  f.v = -coeffs.ns_time_factor * Td * B +
        coeffs.ns_convection_factor * T * T * (B * By - A * Bx) + T * Ay -
        w2 * T * B + coeffs.body_force_factor * rho_e * (-T * By);

  return f;
}

MmsForcing mms_fd_forcing(double t, double x, double y,
                          const NondimParams& params,
                          const EquationCoefficients& coeffs, double h) {
  require_binary_electrolyte(params);
  if (h <= 0.0) throw std::invalid_argument("FD step must be positive");

  const auto u_f = [](double t_, double x_, double y_) {
    return mms_exact(t_, x_, y_).u;
  };
  const auto v_f = [](double t_, double x_, double y_) {
    return mms_exact(t_, x_, y_).v;
  };
  const auto p_f = [](double t_, double x_, double y_) {
    return mms_exact(t_, x_, y_).p;
  };
  const auto cp_f = [](double t_, double x_, double y_) {
    return mms_exact(t_, x_, y_).c_plus;
  };
  const auto cm_f = [](double t_, double x_, double y_) {
    return mms_exact(t_, x_, y_).c_minus;
  };
  const auto phi_f = [](double t_, double x_, double y_) {
    return mms_exact(t_, x_, y_).phi;
  };

  const auto u = fd_ops(u_f, h);
  const auto v = fd_ops(v_f, h);
  const auto p = fd_ops(p_f, h);
  const auto cp = fd_ops(cp_f, h);
  const auto cm = fd_ops(cm_f, h);
  const auto phi = fd_ops(phi_f, h);

  const double z0 = params.valences[0];
  const double z1 = params.valences[1];
  const double ux = u.val(t, x, y), vx = v.val(t, x, y);
  const double phix = phi.dx(t, x, y), phiy = phi.dy(t, x, y);
  const double lap_phi = phi.lap(t, x, y);
  const double rho_e = z0 * cp.val(t, x, y) + z1 * cm.val(t, x, y);

  const auto species = [&](const auto& c, double z) {
    const double cx = c.dx(t, x, y), cy = c.dy(t, x, y);
    return c.dt(t, x, y) +
           coeffs.np_advection_factor * (ux * cx + vx * cy) -
           coeffs.np_diffusion_factor *
               (c.lap(t, x, y) +
                z * (cx * phix + cy * phiy + c.val(t, x, y) * lap_phi));
  };

  MmsForcing f;
  f.c_plus = species(cp, z0);
  f.c_minus = species(cm, z1);
  f.phi = -coeffs.poisson_factor * lap_phi - rho_e;
  f.u = coeffs.ns_time_factor * u.dt(t, x, y) +
        coeffs.ns_convection_factor *
            (ux * u.dx(t, x, y) + vx * u.dy(t, x, y)) +
        p.dx(t, x, y) - u.lap(t, x, y) +
        coeffs.body_force_factor * rho_e * phix;
  f.v = coeffs.ns_time_factor * v.dt(t, x, y) +
        coeffs.ns_convection_factor *
            (ux * v.dx(t, x, y) + vx * v.dy(t, x, y)) +
        p.dy(t, x, y) - v.lap(t, x, y) +
        coeffs.body_force_factor * rho_e * phiy;
  return f;
}

SolutionState mms_interpolant(const Mesh& mesh, double t) {
  SolutionState state = make_state(mesh, 2, 0.0);
  state.t = t;
  for (int n = 0; n < mesh.node_count(); ++n) {
    const double x = mesh.nodes[n][0], y = mesh.nodes[n][1];
    const MmsPoint q = mms_exact(t, x, y);
    state.c[0][n] = q.c_plus;
    state.c[1][n] = q.c_minus;
    state.phi[n] = q.phi;
    state.vel[0][n] = q.u;
    state.vel[1][n] = q.v;
    state.p[n] = q.p;
  }
  return state;
}

Problem make_mms_problem(const Mesh& mesh, const NondimParams& params) {
  require_binary_electrolyte(params);

  Problem problem;
  problem.mesh = &mesh;
  problem.params = params;
  problem.coeffs = equation_coefficients(params);
  problem.solve_flow = true;

  BoundaryDatum cp_bc, cm_bc, phi_bc, u_bc, v_bc;
  cp_bc.fn = [](double t, double x, double y) {
    return mms_exact(t, x, y).c_plus;
  };
  cm_bc.fn = [](double t, double x, double y) {
    return mms_exact(t, x, y).c_minus;
  };
  phi_bc.fn = [](double t, double x, double y) {
    return mms_exact(t, x, y).phi;
  };
  u_bc.fn = [](double t, double x, double y) { return mms_exact(t, x, y).u; };
  v_bc.fn = [](double t, double x, double y) { return mms_exact(t, x, y).v; };

  for (int tag : {kTagBottom, kTagRight, kTagTop, kTagLeft}) {
    problem.bc.set_scalar(tag, ScalarVar::concentration(0),
                          {ScalarBcKind::strong, cp_bc});
    problem.bc.set_scalar(tag, ScalarVar::concentration(1),
                          {ScalarBcKind::strong, cm_bc});
    problem.bc.set_scalar(tag, ScalarVar::potential(),
                          {ScalarBcKind::strong, phi_bc});
    problem.bc.set_velocity(tag, 0, {true, u_bc});
    problem.bc.set_velocity(tag, 1, {true, v_bc});
  }

  const NondimParams p = params;
  const EquationCoefficients coeffs = problem.coeffs;
  problem.species_forcing.resize(2);
  problem.species_forcing[0] = [p, coeffs](double t, double x, double y) {
    return mms_forcing(t, x, y, p, coeffs).c_plus;
  };
  problem.species_forcing[1] = [p, coeffs](double t, double x, double y) {
    return mms_forcing(t, x, y, p, coeffs).c_minus;
  };
  problem.phi_forcing = [p, coeffs](double t, double x, double y) {
    return mms_forcing(t, x, y, p, coeffs).phi;
  };
  problem.ns_forcing = [p, coeffs](double t, double x,
                                   double y) -> std::array<double, 2> {
    const MmsForcing f = mms_forcing(t, x, y, p, coeffs);
    return {f.u, f.v};
  };

  // Gauge: pin the pressure at node 0 to its exact value.
  const double x0 = mesh.nodes[0][0], y0 = mesh.nodes[0][1];
  problem.pressure_pin = [x0, y0](double t) { return mms_exact(t, x0, y0).p; };

  return problem;
}

std::map<std::string, double> mms_run_errors(int n, double dt, double t_final,
                                             const NondimParams& params) {
  if (n < 2) throw std::invalid_argument("mesh size must be at least 2");
  if (dt <= 0.0 || t_final <= 0.0) {
    throw std::invalid_argument("dt and t_final must be positive");
  }

  const Mesh mesh = build_rect_mesh(n, n, 1.0, 1.0, ElementKind::quad4);
  const Problem problem = make_mms_problem(mesh, params);

  TransientConfig cfg;
  cfg.dt = dt;
  cfg.n_steps = static_cast<int>(std::llround(t_final / dt));
  cfg.steady_tol = 0.0;  // fixed horizon
  // Tight block tolerance so the coupling error does not pollute the
  // spatial discretization error being measured.
  cfg.block.tol = 1e-10;
  cfg.block.max_iterations = 200;

  SolverSuite solvers = SolverSuite::all_direct();
  TransientResult result =
      run_transient(problem, mms_interpolant(mesh, 0.0), cfg, solvers);

  const double t = result.state.t;
  std::map<std::string, double> errors;
  errors["c_plus"] = l2_error(mesh, result.state.c[0], [t](double x, double y) {
    return mms_exact(t, x, y).c_plus;
  });
  errors["c_minus"] =
      l2_error(mesh, result.state.c[1], [t](double x, double y) {
        return mms_exact(t, x, y).c_minus;
      });
  errors["phi"] = l2_error(mesh, result.state.phi, [t](double x, double y) {
    return mms_exact(t, x, y).phi;
  });
  const double eu = l2_error(mesh, result.state.vel[0],
                             [t](double x, double y) {
                               return mms_exact(t, x, y).u;
                             });
  const double ev = l2_error(mesh, result.state.vel[1],
                             [t](double x, double y) {
                               return mms_exact(t, x, y).v;
                             });
  errors["u"] = std::sqrt(eu * eu + ev * ev);
  return errors;
}

ConvergenceReport convergence_study(const std::vector<int>& mesh_sizes,
                                    double dt, double t_final,
                                    const NondimParams& params) {
  if (mesh_sizes.size() < 2) {
    throw std::invalid_argument("convergence study needs at least two meshes");
  }

  ConvergenceReport report;
  for (int n : mesh_sizes) {
    report.h.push_back(1.0 / n);
    const auto errors = mms_run_errors(n, dt, t_final, params);
    for (const auto& [field, err] : errors) {
      report.errors[field].push_back(err);
    }
  }

  for (const auto& [field, errs] : report.errors) {
    auto& orders = report.orders[field];
    for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
      const double ratio = report.h[k] / report.h[k + 1];
      orders.push_back(std::log(errs[k] / errs[k + 1]) / std::log(ratio));
    }
  }
  return report;
}

void write_convergence_csv(const ConvergenceReport& report,
                           const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);

  out << "h";
  for (const auto& [field, errs] : report.errors) {
    (void)errs;
    out << "," << field << "_error," << field << "_order";
  }
  out << "\n";

  char buf[64];
  const auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t row = 0; row < report.h.size(); ++row) {
    out << fmt(report.h[row]);
    for (const auto& [field, errs] : report.errors) {
      out << "," << fmt(errs[row]) << ",";
      if (row > 0) out << fmt(report.orders.at(field)[row - 1]);
    }
    out << "\n";
  }
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

}  // namespace pnpfem
