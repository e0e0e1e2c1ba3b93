#include "pnpfem/element.hpp"

#include <cmath>
#include <stdexcept>

namespace pnpfem {

namespace {

// 1/sqrt(3), Gauss abscissa of the 2-point rule.
constexpr double kG2 = 0.57735026918962576;

// line2 default: 2-point Gauss.
constexpr double kLinePts[2][2] = {{-kG2, 0.0}, {kG2, 0.0}};
constexpr double kLineWts[2] = {1.0, 1.0};

// line2 high accuracy: 5-point Gauss (degree 9).
constexpr double kLine5Pts[5][2] = {{-0.90617984593866399, 0.0},
                                    {-0.53846931010568309, 0.0},
                                    {0.0, 0.0},
                                    {0.53846931010568309, 0.0},
                                    {0.90617984593866399, 0.0}};
constexpr double kLine5Wts[5] = {0.23692688505618909, 0.47862867049936647,
                                 0.56888888888888889, 0.47862867049936647,
                                 0.23692688505618909};

// quad4 default: 2x2 Gauss.
constexpr double kQuadPts[4][2] = {
    {-kG2, -kG2}, {kG2, -kG2}, {kG2, kG2}, {-kG2, kG2}};
constexpr double kQuadWts[4] = {1.0, 1.0, 1.0, 1.0};

// quad4 high accuracy: 4x4 Gauss (degree 7).
constexpr double kG4a = 0.33998104358485626;
constexpr double kG4b = 0.86113631159405258;
constexpr double kW4a = 0.65214515486254614;
constexpr double kW4b = 0.34785484513745386;
constexpr double kQuad16Pts[16][2] = {
    {-kG4b, -kG4b}, {-kG4a, -kG4b}, {kG4a, -kG4b}, {kG4b, -kG4b},
    {-kG4b, -kG4a}, {-kG4a, -kG4a}, {kG4a, -kG4a}, {kG4b, -kG4a},
    {-kG4b, kG4a},  {-kG4a, kG4a},  {kG4a, kG4a},  {kG4b, kG4a},
    {-kG4b, kG4b},  {-kG4a, kG4b},  {kG4a, kG4b},  {kG4b, kG4b}};
constexpr double kQuad16Wts[16] = {
    kW4b * kW4b, kW4a * kW4b, kW4a * kW4b, kW4b * kW4b,
    kW4b * kW4a, kW4a * kW4a, kW4a * kW4a, kW4b * kW4a,
    kW4b * kW4a, kW4a * kW4a, kW4a * kW4a, kW4b * kW4a,
    kW4b * kW4b, kW4a * kW4b, kW4a * kW4b, kW4b * kW4b};

// tri3 default: 3-point degree-2 rule (weights include the 1/2 reference area).
constexpr double kTriPts[3][2] = {
    {1.0 / 6.0, 1.0 / 6.0}, {2.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 3.0}};
constexpr double kTriWts[3] = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};

// tri3 high accuracy: 7-point degree-5 rule (weights sum to 1/2).
constexpr double kT7b1 = 0.47014206410511509;
constexpr double kT7a1 = 0.05971587178976983;
constexpr double kT7w1 = 0.066197076394253090;
constexpr double kT7b2 = 0.10128650732345634;
constexpr double kT7a2 = 0.79742698535308732;
constexpr double kT7w2 = 0.062969590272413576;
constexpr double kTri7Pts[7][2] = {{1.0 / 3.0, 1.0 / 3.0}, {kT7b1, kT7b1},
                                   {kT7a1, kT7b1},         {kT7b1, kT7a1},
                                   {kT7b2, kT7b2},         {kT7a2, kT7b2},
                                   {kT7b2, kT7a2}};
constexpr double kTri7Wts[7] = {9.0 / 80.0, kT7w1, kT7w1, kT7w1,
                                kT7w2,      kT7w2, kT7w2};

}  // namespace

int nodes_per_element(ElementKind kind) {
  switch (kind) {
    case ElementKind::line2: return 2;
    case ElementKind::tri3: return 3;
    case ElementKind::quad4: return 4;
    case ElementKind::tet4: return 4;
  }
  throw std::invalid_argument("unknown element kind");
}

int facet_count(ElementKind kind) {
  switch (kind) {
    case ElementKind::line2: return 2;
    case ElementKind::tri3: return 3;
    case ElementKind::quad4: return 4;
    case ElementKind::tet4: return 4;
  }
  throw std::invalid_argument("unknown element kind");
}

int facet_local_nodes(ElementKind kind, int facet, int* nodes) {
  static constexpr int tri_edges[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  static constexpr int quad_edges[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  static constexpr int tet_faces[4][3] = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
  switch (kind) {
    case ElementKind::line2:
      nodes[0] = facet;  // facet 0 -> node 0, facet 1 -> node 1
      return 1;
    case ElementKind::tri3:
      nodes[0] = tri_edges[facet][0];
      nodes[1] = tri_edges[facet][1];
      return 2;
    case ElementKind::quad4:
      nodes[0] = quad_edges[facet][0];
      nodes[1] = quad_edges[facet][1];
      return 2;
    case ElementKind::tet4:
      nodes[0] = tet_faces[facet][0];
      nodes[1] = tet_faces[facet][1];
      nodes[2] = tet_faces[facet][2];
      return 3;
  }
  throw std::invalid_argument("unknown element kind");
}

void shape_values(ElementKind kind, const double* ref, double* N) {
  const double xi = ref[0];
  const double eta = ref[1];
  switch (kind) {
    case ElementKind::line2:
      N[0] = 0.5 * (1.0 - xi);
      N[1] = 0.5 * (1.0 + xi);
      return;
    case ElementKind::tri3:
      N[0] = 1.0 - xi - eta;
      N[1] = xi;
      N[2] = eta;
      return;
    case ElementKind::quad4:
      N[0] = 0.25 * (1.0 - xi) * (1.0 - eta);
      N[1] = 0.25 * (1.0 + xi) * (1.0 - eta);
      N[2] = 0.25 * (1.0 + xi) * (1.0 + eta);
      N[3] = 0.25 * (1.0 - xi) * (1.0 + eta);
      return;
    default:
      throw std::invalid_argument("shape_values: unsupported element kind");
  }
}

void shape_grads_ref(ElementKind kind, const double* ref, double grad[4][2]) {
  const double xi = ref[0];
  const double eta = ref[1];
  switch (kind) {
    case ElementKind::line2:
      grad[0][0] = -0.5; grad[0][1] = 0.0;
      grad[1][0] = 0.5;  grad[1][1] = 0.0;
      return;
    case ElementKind::tri3:
      grad[0][0] = -1.0; grad[0][1] = -1.0;
      grad[1][0] = 1.0;  grad[1][1] = 0.0;
      grad[2][0] = 0.0;  grad[2][1] = 1.0;
      return;
    case ElementKind::quad4:
      grad[0][0] = -0.25 * (1.0 - eta); grad[0][1] = -0.25 * (1.0 - xi);
      grad[1][0] = 0.25 * (1.0 - eta);  grad[1][1] = -0.25 * (1.0 + xi);
      grad[2][0] = 0.25 * (1.0 + eta);  grad[2][1] = 0.25 * (1.0 + xi);
      grad[3][0] = -0.25 * (1.0 + eta); grad[3][1] = 0.25 * (1.0 - xi);
      return;
    default:
      throw std::invalid_argument("shape_grads_ref: unsupported element kind");
  }
}

void facet_ref_point(ElementKind kind, int facet, double s, double* ref) {
  // Reference corner coordinates per kind.
  static constexpr double line_corners[2][2] = {{-1.0, 0.0}, {1.0, 0.0}};
  static constexpr double tri_corners[3][2] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  static constexpr double quad_corners[4][2] = {
      {-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}};

  int ln[3];
  const int nfn = facet_local_nodes(kind, facet, ln);
  const double (*corners)[2] = nullptr;
  switch (kind) {
    case ElementKind::line2: corners = line_corners; break;
    case ElementKind::tri3: corners = tri_corners; break;
    case ElementKind::quad4: corners = quad_corners; break;
    default:
      throw std::invalid_argument("facet_ref_point: unsupported element kind");
  }
  if (nfn == 1) {
    ref[0] = corners[ln[0]][0];
    ref[1] = corners[ln[0]][1];
  } else {
    ref[0] = (1.0 - s) * corners[ln[0]][0] + s * corners[ln[1]][0];
    ref[1] = (1.0 - s) * corners[ln[0]][1] + s * corners[ln[1]][1];
  }
}

QuadratureRule volume_rule(ElementKind kind, bool high_accuracy) {
  switch (kind) {
    case ElementKind::line2:
      return high_accuracy ? QuadratureRule{5, kLine5Pts, kLine5Wts}
                           : QuadratureRule{2, kLinePts, kLineWts};
    case ElementKind::tri3:
      return high_accuracy ? QuadratureRule{7, kTri7Pts, kTri7Wts}
                           : QuadratureRule{3, kTriPts, kTriWts};
    case ElementKind::quad4:
      return high_accuracy ? QuadratureRule{16, kQuad16Pts, kQuad16Wts}
                           : QuadratureRule{4, kQuadPts, kQuadWts};
    default:
      throw std::invalid_argument("volume_rule: unsupported element kind");
  }
}

MappedBasis map_basis(const Mesh& mesh, int element, const double* ref) {
  const Element& el = mesh.elements[element];
  if (el.kind == ElementKind::tet4) {
    throw std::runtime_error("3D unsupported: tet4 elements are parsed but cannot be assembled");
  }
  MappedBasis mb;
  mb.nn = nodes_per_element(el.kind);
  shape_values(el.kind, ref, mb.N.data());

  double gref[4][2];
  shape_grads_ref(el.kind, ref, gref);

  if (mesh.dim == 1) {
    double dxdxi = 0.0, x = 0.0;
    for (int a = 0; a < mb.nn; ++a) {
      dxdxi += mesh.nodes[el.nodes[a]][0] * gref[a][0];
      x += mesh.nodes[el.nodes[a]][0] * mb.N[a];
    }
    if (!(dxdxi > 0.0)) {
      throw std::runtime_error("map_basis: non-positive Jacobian in element " +
                               std::to_string(element));
    }
    mb.detJ = dxdxi;
    mb.x = {x, 0.0};
    for (int a = 0; a < mb.nn; ++a) {
      mb.grad[a] = {gref[a][0] / dxdxi, 0.0};
    }
    return mb;
  }

  // 2D isoparametric map.
  double J[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double x[2] = {0.0, 0.0};
  for (int a = 0; a < mb.nn; ++a) {
    const auto& p = mesh.nodes[el.nodes[a]];
    J[0][0] += p[0] * gref[a][0];
    J[0][1] += p[0] * gref[a][1];
    J[1][0] += p[1] * gref[a][0];
    J[1][1] += p[1] * gref[a][1];
    x[0] += p[0] * mb.N[a];
    x[1] += p[1] * mb.N[a];
  }
  const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  if (!(det > 0.0)) {
    throw std::runtime_error("map_basis: non-positive Jacobian in element " +
                             std::to_string(element));
  }
  const double inv00 = J[1][1] / det, inv01 = -J[0][1] / det;
  const double inv10 = -J[1][0] / det, inv11 = J[0][0] / det;
  for (int a = 0; a < mb.nn; ++a) {
    // grad_phys = J^{-T} grad_ref
    mb.grad[a] = {inv00 * gref[a][0] + inv10 * gref[a][1],
                  inv01 * gref[a][0] + inv11 * gref[a][1]};
  }
  mb.detJ = det;
  mb.x = {x[0], x[1]};
  return mb;
}

double interpolate(const MappedBasis& mb, const Element& el,
                   const std::vector<double>& nodal) {
  double v = 0.0;
  for (int a = 0; a < mb.nn; ++a) v += mb.N[a] * nodal[el.nodes[a]];
  return v;
}

std::array<double, 2> gradient(const MappedBasis& mb, const Element& el,
                               const std::vector<double>& nodal) {
  std::array<double, 2> g{0.0, 0.0};
  for (int a = 0; a < mb.nn; ++a) {
    g[0] += mb.grad[a][0] * nodal[el.nodes[a]];
    g[1] += mb.grad[a][1] * nodal[el.nodes[a]];
  }
  return g;
}

}  // namespace pnpfem
