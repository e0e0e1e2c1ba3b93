#include "pnpfem/postprocess.hpp"

#include "pnpfem/element.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pnpfem {

namespace {

/// 2-point Gauss positions on [0,1].
constexpr double kGaussA = 0.5 - 0.5 / 1.7320508075688772;
constexpr double kGaussB = 0.5 + 0.5 / 1.7320508075688772;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const FluxEntry* FluxReport::find(int tag, int species) const {
  for (const FluxEntry& e : entries) {
    if (e.tag == tag && e.species == species) return &e;
  }
  return nullptr;
}

FluxEntry boundary_flux(const Mesh& mesh, const SolutionState& state,
                        const NondimParams& params,
                        const EquationCoefficients& coeffs, int tag,
                        int species, FluxMode mode, const WeakDirichlet* weak) {
  if (!mesh.has_tag(tag)) {
    throw std::invalid_argument("boundary_flux: no facets carry tag " +
                                std::to_string(tag));
  }
  if (mode == FluxMode::weak && weak == nullptr) {
    throw std::invalid_argument("boundary_flux: weak mode requires a datum");
  }
  if (species < 0 || species >= params.species_count()) {
    throw std::invalid_argument("boundary_flux: species index out of range");
  }

  const double z = params.valences[species];
  const double d = coeffs.np_diffusion_factor;

  FluxEntry entry;
  entry.tag = tag;
  entry.species = species;
  entry.mode = mode;

  for (const BoundaryFacet& facet : mesh.boundary_facets) {
    if (facet.tag != tag) continue;
    const Element& el = mesh.elements[facet.element];
    const auto [measure, normal] = facet_measure_and_normal(mesh, facet);
    const double h_el = facet_h_el(mesh, facet);

    const double spts[2] = {kGaussA, kGaussB};
    const int nq = facet.n_nodes == 1 ? 1 : 2;
    for (int q = 0; q < nq; ++q) {
      double ref[2];
      facet_ref_point(el.kind, facet.local_facet, nq == 1 ? 0.0 : spts[q], ref);
      const MappedBasis mb = map_basis(mesh, facet.element, ref);
      const double w = nq == 1 ? 1.0 : 0.5 * measure;

      const auto gc = gradient(mb, el, state.c[species]);
      const auto gphi = gradient(mb, el, state.phi);
      const double cq = interpolate(mb, el, state.c[species]);
      const double flux_n = (gc[0] + z * cq * gphi[0]) * normal[0] +
                            (gc[1] + z * cq * gphi[1]) * normal[1];
      entry.consistency_term -= w * d * flux_n;

      if (mode == FluxMode::weak) {
        const double g = weak->g(state.t, mb.x[0], mb.x[1]);
        entry.penalty_term += w * (weak->penalty / h_el) * (cq - g);
      }
    }
  }
  entry.total = entry.consistency_term + entry.penalty_term;
  return entry;
}

namespace {

FluxEntry flux_for_condition(const Mesh& mesh, const SolutionState& state,
                             const NondimParams& params,
                             const EquationCoefficients& coeffs, int tag,
                             int species, const ScalarCondition& cond) {
  if (cond.kind == ScalarBcKind::weak) {
    const WeakDirichlet wd{cond.datum, cond.penalty};
    return boundary_flux(mesh, state, params, coeffs, tag, species,
                         FluxMode::weak, &wd);
  }
  if (cond.kind == ScalarBcKind::zero_flux) {
    // A natural facet adds no boundary term to the variational form, so its
    // contribution to the discrete species balance is exactly zero; the
    // gradient integral evaluated there would contradict the imposed
    // condition (and is dominated by interpolation error near layers).
    FluxEntry entry;
    entry.tag = tag;
    entry.species = species;
    entry.mode = FluxMode::strong;
    entry.consistency_term = 0.0;
    entry.penalty_term = 0.0;
    entry.total = 0.0;
    return entry;
  }
  return boundary_flux(mesh, state, params, coeffs, tag, species,
                       FluxMode::strong);
}

std::vector<int> boundary_tags(const Mesh& mesh) {
  std::vector<int> tags;
  for (const BoundaryFacet& facet : mesh.boundary_facets) {
    bool seen = false;
    for (int t : tags) seen = seen || t == facet.tag;
    if (!seen) tags.push_back(facet.tag);
  }
  return tags;
}

}  // namespace

FluxReport flux_report(const Mesh& mesh, const SolutionState& state,
                       const NondimParams& params,
                       const EquationCoefficients& coeffs,
                       const BoundaryTable& bc) {
  FluxReport report;
  for (int tag : boundary_tags(mesh)) {
    for (int s = 0; s < params.species_count(); ++s) {
      const ScalarCondition* cond = bc.scalar(tag, ScalarVar::concentration(s));
      if (!cond) {
        throw std::invalid_argument("flux_report: boundary tag " +
                                    std::to_string(tag) +
                                    " lacks a condition for species " +
                                    std::to_string(s));
      }
      report.entries.push_back(
          flux_for_condition(mesh, state, params, coeffs, tag, s, *cond));
    }
  }
  return report;
}

std::vector<double> conservation_audit(const Mesh& mesh,
                                       const SolutionState& state,
                                       const NondimParams& params,
                                       const EquationCoefficients& coeffs,
                                       const BoundaryTable& bc) {
  const FluxReport report = flux_report(mesh, state, params, coeffs, bc);
  std::vector<double> net(params.species_count(), 0.0);
  for (const FluxEntry& e : report.entries) net[e.species] += e.total;
  return net;
}

double l2_error(const Mesh& mesh, const std::vector<double>& field,
                const std::function<double(double, double)>& exact) {
  double err2 = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const Element& el = mesh.elements[e];
    const QuadratureRule rule = volume_rule(el.kind, /*high_accuracy=*/true);
    for (int q = 0; q < rule.n; ++q) {
      const MappedBasis mb = map_basis(mesh, e, rule.points[q]);
      const double vh = interpolate(mb, el, field);
      const double diff = vh - exact(mb.x[0], mb.x[1]);
      err2 += rule.weights[q] * mb.detJ * diff * diff;
    }
  }
  return std::sqrt(err2);
}

int locate_point(const Mesh& mesh, double x, double y,
                 std::array<double, 2>& ref) {
  constexpr double kTol = 1e-10;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const Element& el = mesh.elements[e];
    const auto& n0 = mesh.nodes[el.nodes[0]];
    switch (el.kind) {
      case ElementKind::line2: {
        const auto& n1 = mesh.nodes[el.nodes[1]];
        const double len = n1[0] - n0[0];
        const double xi = 2.0 * (x - n0[0]) / len - 1.0;
        if (xi >= -1.0 - kTol && xi <= 1.0 + kTol) {
          ref = {xi, 0.0};
          return e;
        }
        break;
      }
      case ElementKind::tri3: {
        const auto& n1 = mesh.nodes[el.nodes[1]];
        const auto& n2 = mesh.nodes[el.nodes[2]];
        const double a11 = n1[0] - n0[0], a12 = n2[0] - n0[0];
        const double a21 = n1[1] - n0[1], a22 = n2[1] - n0[1];
        const double det = a11 * a22 - a12 * a21;
        const double r = (a22 * (x - n0[0]) - a12 * (y - n0[1])) / det;
        const double s = (-a21 * (x - n0[0]) + a11 * (y - n0[1])) / det;
        if (r >= -kTol && s >= -kTol && r + s <= 1.0 + kTol) {
          ref = {r, s};
          return e;
        }
        break;
      }
      case ElementKind::quad4: {
        // Bilinear inverse by Newton iteration from the center; accept only
        // on residual convergence inside the reference square.
        const double diam = element_diameter(mesh, e);
        double xi = 0.0, eta = 0.0;
        bool converged = false;
        for (int it = 0; it < 30; ++it) {
          const double pt[2] = {xi, eta};
          // Map without the positivity guard of map_basis: evaluate directly.
          double N[4];
          shape_values(el.kind, pt, N);
          double mx = 0.0, my = 0.0;
          double J[2][2] = {{0, 0}, {0, 0}};
          double gref[4][2];
          shape_grads_ref(el.kind, pt, gref);
          for (int a = 0; a < 4; ++a) {
            const auto& na = mesh.nodes[el.nodes[a]];
            mx += N[a] * na[0];
            my += N[a] * na[1];
            J[0][0] += na[0] * gref[a][0];
            J[0][1] += na[0] * gref[a][1];
            J[1][0] += na[1] * gref[a][0];
            J[1][1] += na[1] * gref[a][1];
          }
          const double rx = mx - x, ry = my - y;
          if (std::abs(rx) + std::abs(ry) < 1e-12 * (diam + 1.0)) {
            converged = true;
            break;
          }
          const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
          if (det == 0.0) break;
          xi -= (J[1][1] * rx - J[0][1] * ry) / det;
          eta -= (-J[1][0] * rx + J[0][0] * ry) / det;
          if (std::abs(xi) > 3.0 || std::abs(eta) > 3.0) break;  // diverged
        }
        if (converged && std::abs(xi) <= 1.0 + kTol && std::abs(eta) <= 1.0 + kTol) {
          ref = {xi, eta};
          return e;
        }
        break;
      }
      case ElementKind::tet4:
        throw std::invalid_argument("locate_point: 3D unsupported");
    }
  }
  return -1;
}

double sample_field(const Mesh& mesh, const std::vector<double>& field,
                    double x, double y) {
  std::array<double, 2> ref{};
  const int e = locate_point(mesh, x, y, ref);
  if (e < 0) {
    throw std::invalid_argument("sample_field: point (" + std::to_string(x) +
                                ", " + std::to_string(y) +
                                ") lies outside the mesh");
  }
  const MappedBasis mb = map_basis(mesh, e, ref.data());
  return interpolate(mb, mesh.elements[e], field);
}

namespace {

int vtk_cell_type(ElementKind kind) {
  switch (kind) {
    case ElementKind::line2:
      return 3;
    case ElementKind::tri3:
      return 5;
    case ElementKind::quad4:
      return 9;
    case ElementKind::tet4:
      return 10;
  }
  return 0;
}

}  // namespace

void write_vtk(
    const Mesh& mesh, const std::string& path,
    const std::map<std::string, const std::vector<double>*>& scalars,
    const std::map<std::string, std::array<const std::vector<double>*, 2>>&
        vectors) {
  std::ofstream out(path, std::ios::binary);  // binary: force LF endings
  if (!out) throw std::runtime_error("write_vtk: cannot open " + path);

  out << "# vtk DataFile Version 3.0\n";
  out << "pnpfem snapshot\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.node_count() << " double\n";
  for (const auto& n : mesh.nodes) {
    out << fmt17(n[0]) << ' ' << fmt17(n[1]) << ' ' << fmt17(n[2]) << '\n';
  }

  int list_len = 0;
  for (const Element& el : mesh.elements) list_len += 1 + nodes_per_element(el.kind);
  out << "CELLS " << mesh.element_count() << ' ' << list_len << '\n';
  for (const Element& el : mesh.elements) {
    const int nn = nodes_per_element(el.kind);
    out << nn;
    for (int a = 0; a < nn; ++a) out << ' ' << el.nodes[a];
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.element_count() << '\n';
  for (const Element& el : mesh.elements) out << vtk_cell_type(el.kind) << '\n';

  if (!scalars.empty() || !vectors.empty()) {
    out << "POINT_DATA " << mesh.node_count() << '\n';
    for (const auto& [name, data] : scalars) {
      if (static_cast<int>(data->size()) != mesh.node_count()) {
        throw std::runtime_error("write_vtk: field '" + name + "' has wrong size");
      }
      out << "SCALARS " << name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (double v : *data) out << fmt17(v) << '\n';
    }
    for (const auto& [name, comps] : vectors) {
      out << "VECTORS " << name << " double\n";
      const auto* vx = comps[0];
      const auto* vy = comps[1];
      for (int i = 0; i < mesh.node_count(); ++i) {
        const double x = vx && !vx->empty() ? (*vx)[i] : 0.0;
        const double y = vy && !vy->empty() ? (*vy)[i] : 0.0;
        out << fmt17(x) << ' ' << fmt17(y) << " 0\n";
      }
    }
  }
  if (!out) throw std::runtime_error("write_vtk: write failure on " + path);
}

void write_csv_profile(
    const Mesh& mesh, const std::array<double, 2>& a,
    const std::array<double, 2>& b, int n_samples,
    const std::vector<std::pair<std::string, const std::vector<double>*>>&
        fields,
    const std::string& path) {
  if (n_samples < 2) {
    throw std::invalid_argument("write_csv_profile: need at least 2 samples");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv_profile: cannot open " + path);

  out << "x,y";
  for (const auto& [name, data] : fields) out << ',' << name;
  out << '\n';

  for (int i = 0; i < n_samples; ++i) {
    const double s = static_cast<double>(i) / (n_samples - 1);
    const double x = a[0] + s * (b[0] - a[0]);
    const double y = a[1] + s * (b[1] - a[1]);
    std::array<double, 2> ref{};
    const int e = locate_point(mesh, x, y, ref);
    if (e < 0) {
      throw std::invalid_argument("write_csv_profile: sample point outside mesh");
    }
    const MappedBasis mb = map_basis(mesh, e, ref.data());
    out << fmt17(x) << ',' << fmt17(y);
    for (const auto& [name, data] : fields) {
      out << ',' << fmt17(interpolate(mb, mesh.elements[e], *data));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_csv_profile: write failure on " + path);
}

}  // namespace pnpfem
