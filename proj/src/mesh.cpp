#include "pnpfem/mesh.hpp"

#include "pnpfem/element.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pnpfem {

namespace {

std::array<double, 3> sub(const std::array<double, 3>& a,
                          const std::array<double, 3>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

double norm2(const std::array<double, 3>& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

std::array<double, 3> element_centroid(const Mesh& mesh, int e) {
  const Element& el = mesh.elements[e];
  const int nn = nodes_per_element(el.kind);
  std::array<double, 3> c{0.0, 0.0, 0.0};
  for (int a = 0; a < nn; ++a) {
    for (int d = 0; d < 3; ++d) c[d] += mesh.nodes[el.nodes[a]][d] / nn;
  }
  return c;
}

/// Compute and store the outward unit normal of a boundary facet from its
/// owning element's geometry (points away from the element centroid).
void set_outward_normal(const Mesh& mesh, BoundaryFacet& f) {
  const std::array<double, 3> cen = element_centroid(mesh, f.element);
  if (f.n_nodes == 1) {
    const double sign =
        (mesh.nodes[f.nodes[0]][0] >= cen[0]) ? 1.0 : -1.0;
    f.normal = {sign, 0.0, 0.0};
    return;
  }
  if (f.n_nodes == 2) {
    const auto& a = mesh.nodes[f.nodes[0]];
    const auto& b = mesh.nodes[f.nodes[1]];
    double nx = b[1] - a[1];
    double ny = -(b[0] - a[0]);
    const double len = std::hypot(nx, ny);
    if (!(len > 0.0)) throw std::runtime_error("degenerate boundary facet");
    nx /= len;
    ny /= len;
    const double midx = 0.5 * (a[0] + b[0]) - cen[0];
    const double midy = 0.5 * (a[1] + b[1]) - cen[1];
    if (nx * midx + ny * midy < 0.0) {
      nx = -nx;
      ny = -ny;
    }
    f.normal = {nx, ny, 0.0};
    return;
  }
  // Triangle facet of a tet: cross product, oriented away from the centroid.
  const auto& a = mesh.nodes[f.nodes[0]];
  const auto& b = mesh.nodes[f.nodes[1]];
  const auto& c = mesh.nodes[f.nodes[2]];
  const std::array<double, 3> e1 = sub(b, a), e2 = sub(c, a);
  std::array<double, 3> n = {e1[1] * e2[2] - e1[2] * e2[1],
                             e1[2] * e2[0] - e1[0] * e2[2],
                             e1[0] * e2[1] - e1[1] * e2[0]};
  const double len = norm2(n);
  if (!(len > 0.0)) throw std::runtime_error("degenerate boundary facet");
  for (double& v : n) v /= len;
  std::array<double, 3> mid{0.0, 0.0, 0.0};
  for (int d = 0; d < 3; ++d) mid[d] = (a[d] + b[d] + c[d]) / 3.0 - cen[d];
  if (n[0] * mid[0] + n[1] * mid[1] + n[2] * mid[2] < 0.0) {
    for (double& v : n) v = -v;
  }
  f.normal = n;
}

/// Geometric partition of `length` into n widths with successive ratio r.
std::vector<double> geometric_widths(int n, double length, double ratio) {
  std::vector<double> w(n);
  if (std::abs(ratio - 1.0) < 1e-14) {
    for (int i = 0; i < n; ++i) w[i] = length / n;
    return w;
  }
  // First width from the geometric series sum w0 (r^n - 1)/(r - 1) = length.
  const double w0 = length * (ratio - 1.0) / (std::pow(ratio, n) - 1.0);
  double wi = w0;
  for (int i = 0; i < n; ++i) {
    w[i] = wi;
    wi *= ratio;
  }
  return w;
}

void validate_element_measures(const Mesh& mesh) {
  for (int e = 0; e < mesh.element_count(); ++e) {
    if (mesh.elements[e].kind == ElementKind::tet4) continue;  // structural only
    if (!(element_measure(mesh, e) > 0.0)) {
      throw std::runtime_error("mesh element " + std::to_string(e) +
                               " has non-positive measure");
    }
  }
}

}  // namespace

std::vector<int> Mesh::facets_with_tag(int tag) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(boundary_facets.size()); ++i) {
    if (boundary_facets[i].tag == tag) out.push_back(i);
  }
  return out;
}

bool Mesh::has_tag(int tag) const {
  for (const auto& f : boundary_facets) {
    if (f.tag == tag) return true;
  }
  return false;
}

Mesh build_interval_mesh(int n_elems, double x0, double x1,
                         double stretch_ratio) {
  if (n_elems < 1) throw std::invalid_argument("build_interval_mesh: n_elems must be >= 1");
  if (!(x1 > x0)) throw std::invalid_argument("build_interval_mesh: degenerate interval");
  if (!(stretch_ratio > 0.0)) {
    throw std::invalid_argument("build_interval_mesh: stretch_ratio must be positive");
  }

  Mesh mesh;
  mesh.dim = 1;
  const std::vector<double> w = geometric_widths(n_elems, x1 - x0, stretch_ratio);
  mesh.nodes.reserve(n_elems + 1);
  double x = x0;
  mesh.nodes.push_back({x, 0.0, 0.0});
  for (int i = 0; i < n_elems; ++i) {
    x += w[i];
    mesh.nodes.push_back({x, 0.0, 0.0});
  }
  mesh.nodes.back()[0] = x1;  // pin the endpoint against accumulation error

  mesh.elements.reserve(n_elems);
  for (int i = 0; i < n_elems; ++i) {
    mesh.elements.push_back({ElementKind::line2, {i, i + 1, -1, -1}});
  }

  BoundaryFacet left{{0, -1, -1}, 1, 0, 0, kTagLeft1D, {}};
  BoundaryFacet right{{n_elems, -1, -1}, 1, n_elems - 1, 1, kTagRight1D, {}};
  set_outward_normal(mesh, left);
  set_outward_normal(mesh, right);
  mesh.boundary_facets = {left, right};
  mesh.tag_names = {{kTagLeft1D, "left"}, {kTagRight1D, "right"}};
  validate_element_measures(mesh);
  return mesh;
}

Mesh build_rect_mesh(int nx, int ny, double Lx, double Ly, ElementKind kind,
                     double y_stretch_ratio) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_rect_mesh: nx, ny must be >= 1");
  if (!(Lx > 0.0) || !(Ly > 0.0)) {
    throw std::invalid_argument("build_rect_mesh: side lengths must be positive");
  }
  if (kind != ElementKind::quad4 && kind != ElementKind::tri3) {
    throw std::invalid_argument("build_rect_mesh: kind must be quad4 or tri3");
  }
  if (!(y_stretch_ratio > 0.0)) {
    throw std::invalid_argument("build_rect_mesh: y_stretch_ratio must be positive");
  }

  Mesh mesh;
  mesh.dim = 2;
  const std::vector<double> wy = geometric_widths(ny, Ly, y_stretch_ratio);
  std::vector<double> ys(ny + 1);
  ys[0] = 0.0;
  for (int j = 0; j < ny; ++j) ys[j + 1] = ys[j] + wy[j];
  ys[ny] = Ly;

  mesh.nodes.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.nodes.push_back({Lx * i / nx, ys[j], 0.0});
    }
  }
  auto nid = [nx](int i, int j) { return j * (nx + 1) + i; };

  // Cell corner nodes, counterclockwise from bottom-left.
  auto corners = [&](int i, int j) {
    return std::array<int, 4>{nid(i, j), nid(i + 1, j), nid(i + 1, j + 1),
                              nid(i, j + 1)};
  };

  const bool quads = (kind == ElementKind::quad4);
  mesh.elements.reserve(nx * ny * (quads ? 1 : 2));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto c = corners(i, j);
      if (quads) {
        mesh.elements.push_back({ElementKind::quad4, {c[0], c[1], c[2], c[3]}});
      } else {
        mesh.elements.push_back({ElementKind::tri3, {c[0], c[1], c[2], -1}});
        mesh.elements.push_back({ElementKind::tri3, {c[0], c[2], c[3], -1}});
      }
    }
  }

  // Boundary facets. For tri3 cells the first triangle (c0,c1,c2) carries the
  // bottom (edge 0) and right (edge 1) cell edges; the second (c0,c2,c3)
  // carries the top (edge 1) and left (edge 2).
  auto cell_elem = [&](int i, int j, int which) {
    return quads ? (j * nx + i) : (2 * (j * nx + i) + which);
  };
  auto add_facet = [&](int n0, int n1, int elem, int local, int tag) {
    BoundaryFacet f{{n0, n1, -1}, 2, elem, local, tag, {}};
    set_outward_normal(mesh, f);
    mesh.boundary_facets.push_back(f);
  };
  for (int i = 0; i < nx; ++i) {  // bottom j=0, top j=ny-1
    const auto cb = corners(i, 0);
    add_facet(cb[0], cb[1], cell_elem(i, 0, 0), 0, kTagBottom);
  }
  for (int j = 0; j < ny; ++j) {  // right i=nx-1
    const auto cr = corners(nx - 1, j);
    add_facet(cr[1], cr[2], cell_elem(nx - 1, j, 0), 1, kTagRight);
  }
  for (int i = 0; i < nx; ++i) {
    const auto ct = corners(i, ny - 1);
    if (quads) {
      add_facet(ct[2], ct[3], cell_elem(i, ny - 1, 0), 2, kTagTop);
    } else {
      add_facet(ct[2], ct[3], cell_elem(i, ny - 1, 1), 1, kTagTop);
    }
  }
  for (int j = 0; j < ny; ++j) {  // left i=0
    const auto cl = corners(0, j);
    if (quads) {
      add_facet(cl[3], cl[0], cell_elem(0, j, 0), 3, kTagLeft);
    } else {
      add_facet(cl[3], cl[0], cell_elem(0, j, 1), 2, kTagLeft);
    }
  }
  mesh.tag_names = {{kTagBottom, "bottom"},
                    {kTagRight, "right"},
                    {kTagTop, "top"},
                    {kTagLeft, "left"}};
  validate_element_measures(mesh);
  return mesh;
}

int retag_edge_segment(Mesh& mesh, int edge_tag, double from, double to,
                       int new_tag, const std::string& new_name) {
  int count = 0;
  for (auto& f : mesh.boundary_facets) {
    if (f.tag != edge_tag || f.n_nodes != 2) continue;
    const auto& a = mesh.nodes[f.nodes[0]];
    const auto& b = mesh.nodes[f.nodes[1]];
    // Horizontal edges select by x, vertical edges by y.
    const int axis = (std::abs(f.normal[1]) > std::abs(f.normal[0])) ? 0 : 1;
    const double mid = 0.5 * (a[axis] + b[axis]);
    const double eps = 1e-12 * (1.0 + std::abs(from) + std::abs(to));
    if (mid >= from - eps && mid <= to + eps) {
      f.tag = new_tag;
      ++count;
    }
  }
  if (count > 0) mesh.tag_names[new_tag] = new_name;
  return count;
}

namespace {

struct MshReader {
  std::istream& in;
  int line_no = 0;

  std::string next_line() {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      // Trim trailing CR from CRLF files.
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return line;
      // Keep counting blank lines but skip them.
    }
    throw std::runtime_error("MSH parse error at line " +
                             std::to_string(line_no) + ": unexpected end of file");
  }

  [[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error("MSH parse error at line " +
                             std::to_string(line_no) + ": " + what);
  }
};

int msh_type_dim(int type) {
  switch (type) {
    case 15: return 0;  // point
    case 1: return 1;   // line2
    case 2: return 2;   // tri3
    case 3: return 2;   // quad4
    case 4: return 3;   // tet4
    default: return -1;
  }
}

int msh_type_nodes(int type) {
  switch (type) {
    case 15: return 1;
    case 1: return 2;
    case 2: return 3;
    case 3: return 4;
    case 4: return 4;
    default: return 0;
  }
}

}  // namespace

Mesh import_msh(std::istream& in) {
  MshReader rd{in};

  struct RawElem {
    int type;
    int tag;
    std::array<int, 4> nodes;
  };
  std::map<long long, int> node_index;
  std::vector<std::array<double, 3>> coords;
  std::vector<RawElem> raw;
  std::map<int, std::string> physical_names;
  bool saw_format = false, saw_nodes = false, saw_elements = false;

  std::string line;
  while (true) {
    if (!std::getline(rd.in, line)) break;
    ++rd.line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    if (line == "$MeshFormat") {
      const std::string fmt = rd.next_line();
      std::istringstream ss(fmt);
      double version = 0.0;
      ss >> version;
      if (!ss || version < 2.0 || version >= 3.0) {
        rd.fail("unsupported MSH version \"" + fmt + "\" (need 2.x ASCII)");
      }
      if (rd.next_line() != "$EndMeshFormat") rd.fail("missing $EndMeshFormat");
      saw_format = true;
    } else if (line == "$PhysicalNames") {
      std::istringstream ss(rd.next_line());
      int n = 0;
      ss >> n;
      if (!ss) rd.fail("bad $PhysicalNames count");
      for (int i = 0; i < n; ++i) {
        std::istringstream ls(rd.next_line());
        int dim = 0, tag = 0;
        std::string name;
        ls >> dim >> tag;
        std::getline(ls, name);
        // Strip surrounding whitespace and quotes.
        const auto first = name.find('"');
        const auto last = name.rfind('"');
        if (first != std::string::npos && last > first) {
          name = name.substr(first + 1, last - first - 1);
        }
        if (!ls && name.empty()) rd.fail("bad physical name entry");
        physical_names[tag] = name;
      }
      if (rd.next_line() != "$EndPhysicalNames") rd.fail("missing $EndPhysicalNames");
    } else if (line == "$Nodes") {
      std::istringstream ss(rd.next_line());
      long long n = 0;
      ss >> n;
      if (!ss || n < 0) rd.fail("bad $Nodes count");
      coords.reserve(static_cast<size_t>(n));
      for (long long i = 0; i < n; ++i) {
        std::istringstream ls(rd.next_line());
        long long id = 0;
        double x = 0, y = 0, z = 0;
        ls >> id >> x >> y >> z;
        if (!ls) rd.fail("bad node line");
        node_index[id] = static_cast<int>(coords.size());
        coords.push_back({x, y, z});
      }
      if (rd.next_line() != "$EndNodes") rd.fail("missing $EndNodes");
      saw_nodes = true;
    } else if (line == "$Elements") {
      std::istringstream ss(rd.next_line());
      long long n = 0;
      ss >> n;
      if (!ss || n < 0) rd.fail("bad $Elements count");
      raw.reserve(static_cast<size_t>(n));
      for (long long i = 0; i < n; ++i) {
        std::istringstream ls(rd.next_line());
        long long id = 0;
        int type = 0, ntags = 0;
        ls >> id >> type >> ntags;
        if (!ls) rd.fail("bad element line");
        if (msh_type_dim(type) < 0) {
          rd.fail("unknown element type " + std::to_string(type));
        }
        int physical = 0;
        for (int t = 0; t < ntags; ++t) {
          int tag = 0;
          ls >> tag;
          if (t == 0) physical = tag;
        }
        RawElem re{type, physical, {-1, -1, -1, -1}};
        const int nn = msh_type_nodes(type);
        for (int a = 0; a < nn; ++a) {
          long long nid = 0;
          ls >> nid;
          if (!ls) rd.fail("element node list truncated");
          const auto it = node_index.find(nid);
          if (it == node_index.end()) {
            rd.fail("element references unknown node " + std::to_string(nid));
          }
          re.nodes[a] = it->second;
        }
        raw.push_back(re);
      }
      if (rd.next_line() != "$EndElements") rd.fail("missing $EndElements");
      saw_elements = true;
    } else if (line[0] == '$') {
      // Skip unknown sections up to their matching end marker.
      const std::string end = "$End" + line.substr(1);
      while (rd.next_line() != end) {
      }
    } else {
      rd.fail("unexpected content \"" + line + "\"");
    }
  }
  if (!saw_format) throw std::runtime_error("MSH parse error: missing $MeshFormat");
  if (!saw_nodes || !saw_elements) {
    throw std::runtime_error("MSH parse error: missing $Nodes or $Elements section");
  }

  int ambient = 0;
  for (const auto& re : raw) ambient = std::max(ambient, msh_type_dim(re.type));
  if (ambient == 0) throw std::runtime_error("MSH parse error: no volume elements");

  Mesh mesh;
  mesh.dim = ambient;
  mesh.nodes = std::move(coords);
  mesh.tag_names = std::move(physical_names);

  std::vector<RawElem> facet_raw;
  for (const auto& re : raw) {
    const int d = msh_type_dim(re.type);
    if (d == ambient) {
      ElementKind kind;
      switch (re.type) {
        case 1: kind = ElementKind::line2; break;
        case 2: kind = ElementKind::tri3; break;
        case 3: kind = ElementKind::quad4; break;
        default: kind = ElementKind::tet4; break;
      }
      Element el{kind, re.nodes};
      // Re-orient inverted planar elements (exact fix for node-order flips).
      if (kind == ElementKind::tri3 || kind == ElementKind::quad4) {
        const int nn = nodes_per_element(kind);
        double area = 0.0;
        for (int a = 0; a < nn; ++a) {
          const auto& p = mesh.nodes[el.nodes[a]];
          const auto& q = mesh.nodes[el.nodes[(a + 1) % nn]];
          area += p[0] * q[1] - q[0] * p[1];
        }
        if (!(area > 0.0)) {
          if (kind == ElementKind::tri3) {
            std::swap(el.nodes[1], el.nodes[2]);
          } else {
            std::swap(el.nodes[1], el.nodes[3]);
          }
        }
      }
      mesh.elements.push_back(el);
    } else if (d == ambient - 1) {
      facet_raw.push_back(re);
    }
    // Elements more than one dimension below ambient (e.g. points in a 2D
    // mesh) carry no boundary data for us and are skipped.
  }

  // Match boundary facets to their unique owning element.
  std::map<std::vector<int>, std::pair<int, int>> owner;  // sorted nodes -> (elem, local)
  std::map<std::vector<int>, int> share_count;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const Element& el = mesh.elements[e];
    for (int f = 0; f < facet_count(el.kind); ++f) {
      int ln[3];
      const int nfn = facet_local_nodes(el.kind, f, ln);
      std::vector<int> key(nfn);
      for (int a = 0; a < nfn; ++a) key[a] = el.nodes[ln[a]];
      std::sort(key.begin(), key.end());
      owner[key] = {e, f};
      ++share_count[key];
    }
  }
  for (const auto& re : facet_raw) {
    const int nfn = msh_type_nodes(re.type);
    std::vector<int> key(re.nodes.begin(), re.nodes.begin() + nfn);
    std::sort(key.begin(), key.end());
    const auto it = owner.find(key);
    if (it == owner.end()) {
      throw std::runtime_error(
          "MSH import: boundary element does not match any volume element facet");
    }
    if (share_count[key] != 1) {
      throw std::runtime_error(
          "MSH import: tagged facet is interior (shared by two elements)");
    }
    BoundaryFacet bf{{-1, -1, -1}, nfn, it->second.first, it->second.second,
                     re.tag, {}};
    for (int a = 0; a < nfn; ++a) bf.nodes[a] = re.nodes[a];
    set_outward_normal(mesh, bf);
    mesh.boundary_facets.push_back(bf);
  }

  validate_element_measures(mesh);
  return mesh;
}

std::pair<double, std::array<double, 3>> facet_measure_and_normal(
    const Mesh& mesh, const BoundaryFacet& facet) {
  BoundaryFacet f = facet;
  set_outward_normal(mesh, f);
  double measure = 1.0;
  if (f.n_nodes == 2) {
    measure = norm2(sub(mesh.nodes[f.nodes[1]], mesh.nodes[f.nodes[0]]));
  } else if (f.n_nodes == 3) {
    const auto e1 = sub(mesh.nodes[f.nodes[1]], mesh.nodes[f.nodes[0]]);
    const auto e2 = sub(mesh.nodes[f.nodes[2]], mesh.nodes[f.nodes[0]]);
    const std::array<double, 3> cr = {e1[1] * e2[2] - e1[2] * e2[1],
                                      e1[2] * e2[0] - e1[0] * e2[2],
                                      e1[0] * e2[1] - e1[1] * e2[0]};
    measure = 0.5 * norm2(cr);
  }
  return {measure, f.normal};
}

double element_measure(const Mesh& mesh, int element) {
  const Element& el = mesh.elements[element];
  switch (el.kind) {
    case ElementKind::line2:
      return mesh.nodes[el.nodes[1]][0] - mesh.nodes[el.nodes[0]][0];
    case ElementKind::tri3: {
      const auto& a = mesh.nodes[el.nodes[0]];
      const auto& b = mesh.nodes[el.nodes[1]];
      const auto& c = mesh.nodes[el.nodes[2]];
      return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
    }
    case ElementKind::quad4: {
      // Shoelace over the (planar, straight-edged) quadrilateral.
      double area = 0.0;
      for (int a = 0; a < 4; ++a) {
        const auto& p = mesh.nodes[el.nodes[a]];
        const auto& q = mesh.nodes[el.nodes[(a + 1) % 4]];
        area += p[0] * q[1] - q[0] * p[1];
      }
      return 0.5 * area;
    }
    case ElementKind::tet4: {
      const auto& a = mesh.nodes[el.nodes[0]];
      const auto e1 = sub(mesh.nodes[el.nodes[1]], a);
      const auto e2 = sub(mesh.nodes[el.nodes[2]], a);
      const auto e3 = sub(mesh.nodes[el.nodes[3]], a);
      const double det = e1[0] * (e2[1] * e3[2] - e2[2] * e3[1]) -
                         e1[1] * (e2[0] * e3[2] - e2[2] * e3[0]) +
                         e1[2] * (e2[0] * e3[1] - e2[1] * e3[0]);
      return det / 6.0;
    }
  }
  throw std::invalid_argument("element_measure: unknown element kind");
}

double element_diameter(const Mesh& mesh, int element) {
  const Element& el = mesh.elements[element];
  const int nn = nodes_per_element(el.kind);
  double diam = 0.0;
  for (int a = 0; a < nn; ++a) {
    for (int b = a + 1; b < nn; ++b) {
      diam = std::max(diam, norm2(sub(mesh.nodes[el.nodes[a]],
                                      mesh.nodes[el.nodes[b]])));
    }
  }
  return diam;
}

double facet_h_el(const Mesh& mesh, const BoundaryFacet& facet) {
  const double owner = element_measure(mesh, facet.element);
  if (mesh.dim == 1) return owner;
  const double fm = facet_measure_and_normal(mesh, facet).first;
  if (!(fm > 0.0)) throw std::invalid_argument("facet_h_el: degenerate facet");
  return owner / fm;
}

}  // namespace pnpfem
