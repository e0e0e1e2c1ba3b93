#include "pnpfem/assembly.hpp"

#include "pnpfem/element.hpp"
#include "pnpfem/nitsche.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace pnpfem {

double tau_supg(double h_el, double effective_speed, double dt,
                double diffusivity) {
  if (!(h_el > 0.0)) throw std::invalid_argument("tau_supg: h_el must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("tau_supg: dt must be positive");
  if (diffusivity < 0.0) {
    throw std::invalid_argument("tau_supg: diffusivity must be non-negative");
  }
  const double t_time = 2.0 / dt;
  const double t_adv = 2.0 * effective_speed / h_el;
  const double t_diff = 4.0 * diffusivity / (h_el * h_el);
  return 1.0 / std::sqrt(t_time * t_time + t_adv * t_adv + t_diff * t_diff);
}

SystemCache make_system_cache(const Mesh& mesh, bool with_flow) {
  SystemCache cache;
  {
    std::vector<std::vector<int>> dofs(mesh.element_count());
    for (int e = 0; e < mesh.element_count(); ++e) {
      const Element& el = mesh.elements[e];
      const int nn = nodes_per_element(el.kind);
      dofs[e].assign(el.nodes.begin(), el.nodes.begin() + nn);
    }
    cache.scalar = CsrPattern::from_element_dofs(mesh.node_count(), dofs);
  }
  if (with_flow && mesh.dim == 2) {
    std::vector<std::vector<int>> dofs(mesh.element_count());
    for (int e = 0; e < mesh.element_count(); ++e) {
      const Element& el = mesh.elements[e];
      const int nn = nodes_per_element(el.kind);
      dofs[e].reserve(3 * nn);
      for (int a = 0; a < nn; ++a) {
        for (int k = 0; k < 3; ++k) dofs[e].push_back(ns_dof(el.nodes[a], k));
      }
    }
    cache.ns = CsrPattern::from_element_dofs(3 * mesh.node_count(), dofs);
  }
  return cache;
}

namespace {

const double* centroid_ref(ElementKind kind) {
  static const double origin[2] = {0.0, 0.0};
  static const double tri[2] = {1.0 / 3.0, 1.0 / 3.0};
  return kind == ElementKind::tri3 ? tri : origin;
}

void scatter_facet_block(const FacetBlock& blk, CsrMatrix& A,
                         std::vector<double>& rhs) {
  for (int a = 0; a < blk.nn; ++a) {
    rhs[blk.nodes[a]] += blk.F[a];
    for (int b = 0; b < blk.nn; ++b) {
      if (blk.K[a][b] != 0.0) A.add(blk.nodes[a], blk.nodes[b], blk.K[a][b]);
    }
  }
}

void add_weak_facets(const Mesh& mesh, const BoundaryTable& bc, ScalarVar var,
                     const SolutionState& state, const NondimParams& params,
                     const EquationCoefficients& coeffs, LinearSystem& sys) {
  for (const BoundaryFacet& facet : mesh.boundary_facets) {
    const ScalarCondition* cond = bc.scalar(facet.tag, var);
    if (!cond || cond->kind != ScalarBcKind::weak) continue;
    const FacetBlock blk = nitsche_scalar_facet(mesh, facet, var, state, params,
                                                coeffs, {cond->datum, cond->penalty});
    scatter_facet_block(blk, sys.A, sys.rhs);
  }
}

void apply_strong_scalar(const Mesh& mesh, const BoundaryTable& bc,
                         ScalarVar var, double t, LinearSystem& sys) {
  std::vector<int> dofs;
  std::vector<double> values;
  collect_strong_scalar_nodes(mesh, bc, var, t, dofs, values);
  apply_strong_dirichlet(sys, dofs, values);
}

double velocity_at(const MappedBasis& mb, const Element& el,
                   const SolutionState& state, int comp) {
  const auto& u = state.vel[comp];
  return u.empty() ? 0.0 : interpolate(mb, el, u);
}

}  // namespace

void collect_strong_scalar_nodes(const Mesh& mesh, const BoundaryTable& bc,
                                 ScalarVar var, double t,
                                 std::vector<int>& dofs,
                                 std::vector<double>& values) {
  std::map<int, double> pinned;
  for (const BoundaryFacet& facet : mesh.boundary_facets) {
    const ScalarCondition* cond = bc.scalar(facet.tag, var);
    if (!cond || cond->kind != ScalarBcKind::strong) continue;
    for (int j = 0; j < facet.n_nodes; ++j) {
      const int node = facet.nodes[j];
      const auto& x = mesh.nodes[node];
      pinned[node] = cond->datum(t, x[0], x[1]);
    }
  }
  dofs.clear();
  values.clear();
  dofs.reserve(pinned.size());
  values.reserve(pinned.size());
  for (const auto& [node, value] : pinned) {
    dofs.push_back(node);
    values.push_back(value);
  }
}

LinearSystem assemble_poisson(const Mesh& mesh, const SolutionState& state,
                              const NondimParams& params,
                              const EquationCoefficients& coeffs,
                              const BoundaryTable& bc, const SystemCache& cache,
                              const ScalarForcing& forcing) {
  if (!cache.scalar) throw std::invalid_argument("assemble_poisson: cache lacks scalar pattern");
  LinearSystem sys;
  sys.A = CsrMatrix(cache.scalar);
  sys.rhs.assign(mesh.node_count(), 0.0);

  const int n_species = params.species_count();
  const double pf = coeffs.poisson_factor;

  for (int e = 0; e < mesh.element_count(); ++e) {
    const Element& el = mesh.elements[e];
    const int nn = nodes_per_element(el.kind);
    const QuadratureRule rule = volume_rule(el.kind);
    double K[4][4] = {};
    double F[4] = {};
    for (int q = 0; q < rule.n; ++q) {
      const MappedBasis mb = map_basis(mesh, e, rule.points[q]);
      const double w = rule.weights[q] * mb.detJ;
      double source = 0.0;
      for (int s = 0; s < n_species; ++s) {
        source += params.valences[s] * interpolate(mb, el, state.c[s]);
      }
      if (forcing) source += forcing(state.t, mb.x[0], mb.x[1]);
      for (int a = 0; a < nn; ++a) {
        F[a] += w * mb.N[a] * source;
        for (int b = 0; b < nn; ++b) {
          K[a][b] += w * pf *
                     (mb.grad[a][0] * mb.grad[b][0] + mb.grad[a][1] * mb.grad[b][1]);
        }
      }
    }
    for (int a = 0; a < nn; ++a) {
      sys.rhs[el.nodes[a]] += F[a];
      for (int b = 0; b < nn; ++b) sys.A.add(el.nodes[a], el.nodes[b], K[a][b]);
    }
  }

  add_weak_facets(mesh, bc, ScalarVar::potential(), state, params, coeffs, sys);
  apply_strong_scalar(mesh, bc, ScalarVar::potential(), state.t, sys);
  return sys;
}

LinearSystem assemble_nernst_planck(const Mesh& mesh, int species,
                                    const SolutionState& state,
                                    const SolutionState& prev, double dt,
                                    const NondimParams& params,
                                    const EquationCoefficients& coeffs,
                                    const BoundaryTable& bc,
                                    const SystemCache& cache,
                                    const ScalarForcing& forcing) {
  if (!(dt > 0.0)) throw std::invalid_argument("assemble_nernst_planck: dt must be positive");
  if (species < 0 || species >= params.species_count()) {
    throw std::invalid_argument("assemble_nernst_planck: species index out of range");
  }
  if (!cache.scalar) {
    throw std::invalid_argument("assemble_nernst_planck: cache lacks scalar pattern");
  }
  LinearSystem sys;
  sys.A = CsrMatrix(cache.scalar);
  sys.rhs.assign(mesh.node_count(), 0.0);

  const double z = params.valences[species];
  const double adv = coeffs.np_advection_factor;
  const double dif = coeffs.np_diffusion_factor;
  const std::vector<double>& c_old = prev.c[species];

  for (int e = 0; e < mesh.element_count(); ++e) {
    const Element& el = mesh.elements[e];
    const int nn = nodes_per_element(el.kind);
    const QuadratureRule rule = volume_rule(el.kind);

    // Stabilization coefficient from centroid data: effective speed
    // a·|u + z∇φ|, diffusivity = the diffusion factor, h = element diameter.
    const MappedBasis cb = map_basis(mesh, e, centroid_ref(el.kind));
    const auto gphi_c = gradient(cb, el, state.phi);
    const double vcx = adv * (velocity_at(cb, el, state, 0) + z * gphi_c[0]);
    const double vcy = adv * (velocity_at(cb, el, state, 1) + z * gphi_c[1]);
    const double tau = tau_supg(element_diameter(mesh, e),
                                std::sqrt(vcx * vcx + vcy * vcy), dt, dif);

    double K[4][4] = {};
    double F[4] = {};
    for (int q = 0; q < rule.n; ++q) {
      const MappedBasis mb = map_basis(mesh, e, rule.points[q]);
      const double w = rule.weights[q] * mb.detJ;
      const double ux = velocity_at(mb, el, state, 0);
      const double uy = velocity_at(mb, el, state, 1);
      const auto gphi = gradient(mb, el, state.phi);
      const double cn = interpolate(mb, el, c_old);
      const double fval = forcing ? forcing(state.t, mb.x[0], mb.x[1]) : 0.0;
      const double vx = adv * (ux + z * gphi[0]);
      const double vy = adv * (uy + z * gphi[1]);
      for (int a = 0; a < nn; ++a) {
        const double supg_a = tau * (vx * mb.grad[a][0] + vy * mb.grad[a][1]);
        F[a] += w * ((mb.N[a] + supg_a) * cn / dt + mb.N[a] * fval);
        for (int b = 0; b < nn; ++b) {
          const double u_grad_b = ux * mb.grad[b][0] + uy * mb.grad[b][1];
          const double gg =
              mb.grad[a][0] * mb.grad[b][0] + mb.grad[a][1] * mb.grad[b][1];
          const double gphi_grad_a =
              mb.grad[a][0] * gphi[0] + mb.grad[a][1] * gphi[1];
          double k = mb.N[a] * mb.N[b] / dt              // mass
                     + mb.N[a] * adv * u_grad_b          // advection
                     + dif * gg                          // diffusion
                     + dif * z * gphi_grad_a * mb.N[b];  // drift (φ frozen)
          k += supg_a * (mb.N[b] / dt + adv * u_grad_b);  // SUPG residual part
          K[a][b] += w * k;
        }
      }
    }
    for (int a = 0; a < nn; ++a) {
      sys.rhs[el.nodes[a]] += F[a];
      for (int b = 0; b < nn; ++b) sys.A.add(el.nodes[a], el.nodes[b], K[a][b]);
    }
  }

  const ScalarVar var = ScalarVar::concentration(species);
  add_weak_facets(mesh, bc, var, state, params, coeffs, sys);
  apply_strong_scalar(mesh, bc, var, state.t, sys);
  return sys;
}

namespace {

/// Shared core of the flow assembly; J == nullptr skips all Jacobian work.
void ns_assemble_core(const Mesh& mesh, const SolutionState& guess,
                      const SolutionState& prev, double dt,
                      const NondimParams& params,
                      const EquationCoefficients& coeffs,
                      const BoundaryTable& bc, const NsOptions& opts,
                      std::vector<double>& residual, CsrMatrix* J) {
  if (mesh.dim != 2) {
    throw std::invalid_argument("flow assembly requires a 2D mesh (3D unsupported)");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("flow assembly: dt must be positive");
  const int n_nodes = mesh.node_count();
  if (static_cast<int>(guess.vel[0].size()) != n_nodes ||
      static_cast<int>(guess.vel[1].size()) != n_nodes ||
      static_cast<int>(guess.p.size()) != n_nodes) {
    throw std::invalid_argument("flow assembly: velocity/pressure fields not allocated");
  }

  const SolutionState& stab = opts.stab_state ? *opts.stab_state : prev;
  const double at = coeffs.ns_time_factor;
  const double ac = coeffs.ns_convection_factor;
  const double bf = coeffs.body_force_factor;
  const int n_species = params.species_count();

  residual.assign(3 * n_nodes, 0.0);

  for (int e = 0; e < mesh.element_count(); ++e) {
    const Element& el = mesh.elements[e];
    const int nn = nodes_per_element(el.kind);
    const int ndof = 3 * nn;
    const QuadratureRule rule = volume_rule(el.kind);

    // τ frozen at the stabilization state (centroid speed), viscosity scale 1.
    const MappedBasis cb = map_basis(mesh, e, centroid_ref(el.kind));
    const double ubx_c = interpolate(cb, el, stab.vel[0]);
    const double uby_c = interpolate(cb, el, stab.vel[1]);
    const double tau = tau_supg(element_diameter(mesh, e),
                                ac * std::sqrt(ubx_c * ubx_c + uby_c * uby_c),
                                dt / at, 1.0);

    double K[12][12] = {};
    double R[12] = {};
    for (int q = 0; q < rule.n; ++q) {
      const MappedBasis mb = map_basis(mesh, e, rule.points[q]);
      const double w = rule.weights[q] * mb.detJ;

      const double u[2] = {interpolate(mb, el, guess.vel[0]),
                           interpolate(mb, el, guess.vel[1])};
      const double un[2] = {interpolate(mb, el, prev.vel[0]),
                            interpolate(mb, el, prev.vel[1])};
      const double ub[2] = {interpolate(mb, el, stab.vel[0]),
                            interpolate(mb, el, stab.vel[1])};
      const double pq = interpolate(mb, el, guess.p);
      const auto gux = gradient(mb, el, guess.vel[0]);
      const auto guy = gradient(mb, el, guess.vel[1]);
      const auto gp = gradient(mb, el, guess.p);

      // Body force: electric coupling from the frozen charge state + extras.
      double f[2] = {0.0, 0.0};
      if (opts.charge_state) {
        double rho = 0.0;
        for (int s = 0; s < n_species; ++s) {
          rho += params.valences[s] * interpolate(mb, el, opts.charge_state->c[s]);
        }
        const auto gphi = gradient(mb, el, opts.charge_state->phi);
        f[0] -= bf * rho * gphi[0];
        f[1] -= bf * rho * gphi[1];
      }
      if (opts.extra_forcing) {
        const auto fx = opts.extra_forcing(guess.t, mb.x[0], mb.x[1]);
        f[0] += fx[0];
        f[1] += fx[1];
      }

      const double div_u = gux[0] + guy[1];
      const double* gu[2] = {gux.data(), guy.data()};
      // Strong momentum residual with the advection velocity frozen at ū
      // (keeps the Jacobian exact); the elementwise viscous term is zero.
      double rM[2], conv[2];
      for (int k = 0; k < 2; ++k) {
        const double ub_grad_uk = ub[0] * gu[k][0] + ub[1] * gu[k][1];
        rM[k] = at * (u[k] - un[k]) / dt + ac * ub_grad_uk + gp[k] - f[k];
        conv[k] = ac * (u[0] * gu[k][0] + u[1] * gu[k][1]);
      }

      for (int a = 0; a < nn; ++a) {
        const double* ga = mb.grad[a].data();
        const double ubg_a = ub[0] * ga[0] + ub[1] * ga[1];
        const double supg_a = tau * ac * ubg_a;

        for (int k = 0; k < 2; ++k) {
          R[3 * a + k] += w * (at * mb.N[a] * (u[k] - un[k]) / dt + mb.N[a] * conv[k] +
                               (ga[0] * gu[k][0] + ga[1] * gu[k][1]) - pq * ga[k] -
                               mb.N[a] * f[k] + supg_a * rM[k]);
        }
        R[3 * a + 2] += w * (mb.N[a] * div_u + tau * (ga[0] * rM[0] + ga[1] * rM[1]));

        if (!J) continue;
        for (int b = 0; b < nn; ++b) {
          const double* gb = mb.grad[b].data();
          const double gg = ga[0] * gb[0] + ga[1] * gb[1];
          const double u_grad_b = u[0] * gb[0] + u[1] * gb[1];
          const double ub_grad_b = ub[0] * gb[0] + ub[1] * gb[1];
          // Shared diagonal (k == m) block of momentum w.r.t. velocity.
          const double diag = at * mb.N[a] * mb.N[b] / dt + ac * mb.N[a] * u_grad_b +
                              gg + supg_a * (at * mb.N[b] / dt + ac * ub_grad_b);
          for (int k = 0; k < 2; ++k) {
            for (int m = 0; m < 2; ++m) {
              double val = (k == m) ? diag : 0.0;
              val += ac * mb.N[a] * mb.N[b] * gu[k][m];  // δu·∇u part
              K[3 * a + k][3 * b + m] += w * val;
            }
            K[3 * a + k][3 * b + 2] += w * (-ga[k] * mb.N[b] + supg_a * gb[k]);
          }
          for (int m = 0; m < 2; ++m) {
            K[3 * a + 2][3 * b + m] +=
                w * (mb.N[a] * gb[m] + tau * ga[m] * (at * mb.N[b] / dt + ac * ub_grad_b));
          }
          K[3 * a + 2][3 * b + 2] += w * tau * gg;
        }
      }
    }

    int gdof[12];
    for (int a = 0; a < nn; ++a) {
      for (int k = 0; k < 3; ++k) gdof[3 * a + k] = ns_dof(el.nodes[a], k);
    }
    for (int la = 0; la < ndof; ++la) {
      residual[gdof[la]] += R[la];
      if (J) {
        for (int lb = 0; lb < ndof; ++lb) J->add(gdof[la], gdof[lb], K[la][lb]);
      }
    }
  }

  // Constrained rows: r = value − datum, Jacobian row = identity.
  std::map<int, double> constrained;
  for (const BoundaryFacet& facet : mesh.boundary_facets) {
    for (int comp = 0; comp < 2; ++comp) {
      const VelocityComponentCondition* vc = bc.velocity(facet.tag, comp);
      if (!vc) continue;
      for (int j = 0; j < facet.n_nodes; ++j) {
        const int node = facet.nodes[j];
        const auto& x = mesh.nodes[node];
        constrained[ns_dof(node, comp)] = vc->datum(guess.t, x[0], x[1]);
      }
    }
  }
  const bool pin = opts.pressure_pin.has_value() || !bc.pressure_anchored_by_bc(mesh);
  if (pin) constrained[ns_dof(0, 2)] = opts.pressure_pin.value_or(0.0);

  for (const auto& [dof, g] : constrained) {
    const int node = dof / 3;
    const int comp = dof % 3;
    const double current = comp == 2 ? guess.p[node] : guess.vel[comp][node];
    residual[dof] = current - g;
    if (J) {
      const auto& row_ptr = J->pattern().row_ptr();
      std::vector<double>& vals = J->values();
      for (int idx = row_ptr[dof]; idx < row_ptr[dof + 1]; ++idx) vals[idx] = 0.0;
      vals[J->pattern().find(dof, dof)] = 1.0;
    }
  }
}

}  // namespace

NsAssembly assemble_ns_residual_jacobian(const Mesh& mesh,
                                         const SolutionState& guess,
                                         const SolutionState& prev, double dt,
                                         const NondimParams& params,
                                         const EquationCoefficients& coeffs,
                                         const BoundaryTable& bc,
                                         const SystemCache& cache,
                                         const NsOptions& opts) {
  if (!cache.ns) throw std::invalid_argument("flow assembly: cache lacks flow pattern");
  NsAssembly out;
  out.newton.A = CsrMatrix(cache.ns);
  ns_assemble_core(mesh, guess, prev, dt, params, coeffs, bc, opts, out.residual,
                   &out.newton.A);
  out.newton.rhs.resize(out.residual.size());
  for (size_t i = 0; i < out.residual.size(); ++i) {
    out.newton.rhs[i] = -out.residual[i];
  }
  return out;
}

std::vector<double> assemble_ns_residual(const Mesh& mesh,
                                         const SolutionState& guess,
                                         const SolutionState& prev, double dt,
                                         const NondimParams& params,
                                         const EquationCoefficients& coeffs,
                                         const BoundaryTable& bc,
                                         const NsOptions& opts) {
  std::vector<double> residual;
  ns_assemble_core(mesh, guess, prev, dt, params, coeffs, bc, opts, residual,
                   nullptr);
  return residual;
}

void apply_strong_dirichlet(LinearSystem& system, const std::vector<int>& dofs,
                            const std::vector<double>& values) {
  if (dofs.size() != values.size()) {
    throw std::invalid_argument("apply_strong_dirichlet: dof/value size mismatch");
  }
  const int n = system.n();
  std::vector<char> mask(n, 0);
  std::vector<double> val(n, 0.0);
  for (size_t i = 0; i < dofs.size(); ++i) {
    const int d = dofs[i];
    if (d < 0 || d >= n) throw std::invalid_argument("apply_strong_dirichlet: dof out of range");
    mask[d] = 1;
    val[d] = values[i];
  }

  const auto& row_ptr = system.A.pattern().row_ptr();
  const auto& cols = system.A.pattern().cols();
  std::vector<double>& vals = system.A.values();
  for (int r = 0; r < n; ++r) {
    if (mask[r]) {
      for (int idx = row_ptr[r]; idx < row_ptr[r + 1]; ++idx) {
        vals[idx] = cols[idx] == r ? 1.0 : 0.0;
      }
      system.rhs[r] = val[r];
    } else {
      for (int idx = row_ptr[r]; idx < row_ptr[r + 1]; ++idx) {
        if (mask[cols[idx]]) {
          system.rhs[r] -= vals[idx] * val[cols[idx]];
          vals[idx] = 0.0;
        }
      }
    }
  }
}

}  // namespace pnpfem
