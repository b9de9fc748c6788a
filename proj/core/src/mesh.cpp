#include "smfg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "smfg/error.hpp"

namespace smfg {

double BoundaryWeights::total() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

std::span<const Vec> Mesh::shape_gradients(std::size_t element) const {
  const std::size_t k = vertices_per_element();
  return std::span<const Vec>(shape_grads_).subspan(element * k, k);
}

Vec Mesh::element_gradient(std::span<const double> nodal, std::size_t element) const {
  const auto grads = shape_gradients(element);
  const auto& el = elements_[element];
  Vec out{0.0, 0.0};
  for (std::size_t a = 0; a < grads.size(); ++a) out = out + nodal[el[a]] * grads[a];
  return out;
}

namespace {

const char* tag_name(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::neumann: return "neumann";
    case BoundaryTag::dirichlet: return "dirichlet";
    case BoundaryTag::none: return "none";
  }
  return "?";
}

const char* side_name(Side side) {
  switch (side) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::bottom: return "bottom";
    case Side::top: return "top";
  }
  return "?";
}

BoundaryWeights lump(const std::vector<BoundaryFacet>& facets, BoundaryTag tag) {
  std::map<std::size_t, double> acc;
  for (const auto& f : facets) {
    if (f.tag != tag) continue;
    const double share = f.measure / static_cast<double>(f.vertex_count);
    for (std::size_t a = 0; a < f.vertex_count; ++a) acc[f.vertices[a]] += share;
  }
  BoundaryWeights out;
  out.tag = tag;
  for (const auto& [node, w] : acc) {
    out.nodes.push_back(node);
    out.weights.push_back(w);
  }
  return out;
}

}  // namespace

void Mesh::finalize() {
  measures_.clear();
  centroids_.clear();
  shape_grads_.clear();
  domain_measure_ = 0.0;
  for (const auto& el : elements_) {
    if (dim_ == 1) {
      const double x0 = vertices_[el[0]][0];
      const double x1 = vertices_[el[1]][0];
      const double len = x1 - x0;
      measures_.push_back(len);
      centroids_.push_back({0.5 * (x0 + x1), 0.0});
      shape_grads_.push_back({-1.0 / len, 0.0});
      shape_grads_.push_back({1.0 / len, 0.0});
    } else {
      const Vec& p0 = vertices_[el[0]];
      const Vec& p1 = vertices_[el[1]];
      const Vec& p2 = vertices_[el[2]];
      const Vec e1 = p1 - p0;
      const Vec e2 = p2 - p0;
      const double det = e1[0] * e2[1] - e1[1] * e2[0];
      measures_.push_back(0.5 * std::abs(det));
      centroids_.push_back((1.0 / 3.0) * (p0 + p1 + p2));
      // Hat gradients: rows of the inverse Jacobian, with phi0 = 1 - phi1 - phi2.
      const Vec g1{e2[1] / det, -e2[0] / det};
      const Vec g2{-e1[1] / det, e1[0] / det};
      shape_grads_.push_back({-g1[0] - g2[0], -g1[1] - g2[1]});
      shape_grads_.push_back(g1);
      shape_grads_.push_back(g2);
    }
    domain_measure_ += measures_.back();
  }

  on_boundary_.assign(vertices_.size(), false);
  for (auto& f : facets_) {
    if (f.tag == BoundaryTag::none) {
      f.tag = BoundaryTag::neumann;
      f.zero_flux_wall = true;
    }
    for (std::size_t a = 0; a < f.vertex_count; ++a) on_boundary_[f.vertices[a]] = true;
  }
  neumann_ = lump(facets_, BoundaryTag::neumann);
  dirichlet_ = lump(facets_, BoundaryTag::dirichlet);
  if (neumann_.size() == 0) throw Error(ErrorCode::BadTags, "Γ_N empty: no Neumann boundary");
  if (dirichlet_.size() == 0) throw Error(ErrorCode::BadTags, "Γ_D empty: no Dirichlet boundary");
}

void Mesh::write_csv(std::ostream& out) const {
  fmt::print(out, "kind,index,a,b,c,x,y,measure,tag\n");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    fmt::print(out, "vertex,{},,,,{:.17g},{:.17g},,\n", i, vertices_[i][0], vertices_[i][1]);
  }
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const auto& el = elements_[e];
    if (dim_ == 1) {
      fmt::print(out, "element,{},{},{},,{:.17g},{:.17g},{:.17g},\n", e, el[0], el[1], centroids_[e][0],
                 centroids_[e][1], measures_[e]);
    } else {
      fmt::print(out, "element,{},{},{},{},{:.17g},{:.17g},{:.17g},\n", e, el[0], el[1], el[2],
                 centroids_[e][0], centroids_[e][1], measures_[e]);
    }
  }
  for (std::size_t f = 0; f < facets_.size(); ++f) {
    const auto& fc = facets_[f];
    const std::string b = fc.vertex_count > 1 ? std::to_string(fc.vertices[1]) : std::string();
    fmt::print(out, "facet,{},{},{},,,,{:.17g},{}{}\n", f, fc.vertices[0], b, fc.measure, tag_name(fc.tag),
               fc.zero_flux_wall ? std::string("/wall:") + side_name(fc.side) : std::string(":") + side_name(fc.side));
  }
}

Mesh build_interval_mesh(double a, double b, std::size_t n, BoundaryTag left, BoundaryTag right) {
  if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "interval requires a < b");
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "interval requires at least one element");
  Mesh mesh;
  mesh.dim_ = 1;
  const double h = (b - a) / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    mesh.vertices_.push_back({i == n ? b : a + h * static_cast<double>(i), 0.0});
  }
  for (std::size_t e = 0; e < n; ++e) mesh.elements_.push_back({e, e + 1, 0});
  // Boundary measure on endpoints is counting measure.
  mesh.facets_.push_back(BoundaryFacet{{0, 0}, 1, 1.0, left, Side::left, false});
  mesh.facets_.push_back(BoundaryFacet{{n, 0}, 1, 1.0, right, Side::right, false});
  mesh.finalize();
  return mesh;
}

BoundaryTag RectTags::operator[](Side side) const noexcept {
  switch (side) {
    case Side::left: return left;
    case Side::right: return right;
    case Side::bottom: return bottom;
    case Side::top: return top;
  }
  return BoundaryTag::none;
}

struct RectMeshBuilder {
  static Mesh build(double lx, double ly, std::size_t nx, std::size_t ny, const RectTags& tags) {
    if (!(lx > 0.0) || !(ly > 0.0)) throw Error(ErrorCode::InvalidArgument, "rectangle needs positive sides");
    if (nx == 0 || ny == 0) throw Error(ErrorCode::InvalidArgument, "rectangle needs positive cell counts");
    Mesh mesh;
    mesh.dim_ = 2;
    const auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
    for (std::size_t j = 0; j <= ny; ++j) {
      const double y = j == ny ? ly : ly * static_cast<double>(j) / static_cast<double>(ny);
      for (std::size_t i = 0; i <= nx; ++i) {
        const double x = i == nx ? lx : lx * static_cast<double>(i) / static_cast<double>(nx);
        mesh.vertices_.push_back({x, y});
      }
    }
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
        mesh.elements_.push_back({v00, v10, v11});
        mesh.elements_.push_back({v00, v11, v01});
      }
    }
    const double hx = lx / static_cast<double>(nx);
    const double hy = ly / static_cast<double>(ny);
    for (std::size_t j = 0; j < ny; ++j) {
      mesh.facets_.push_back({{id(0, j), id(0, j + 1)}, 2, hy, tags.left, Side::left, false});
    }
    for (std::size_t j = 0; j < ny; ++j) {
      mesh.facets_.push_back({{id(nx, j), id(nx, j + 1)}, 2, hy, tags.right, Side::right, false});
    }
    for (std::size_t i = 0; i < nx; ++i) {
      mesh.facets_.push_back({{id(i, 0), id(i + 1, 0)}, 2, hx, tags.bottom, Side::bottom, false});
    }
    for (std::size_t i = 0; i < nx; ++i) {
      mesh.facets_.push_back({{id(i, ny), id(i + 1, ny)}, 2, hx, tags.top, Side::top, false});
    }
    mesh.finalize();
    return mesh;
  }
};

Mesh build_rect_mesh(double lx, double ly, std::size_t nx, std::size_t ny, const RectTags& tags) {
  return RectMeshBuilder::build(lx, ly, nx, ny, tags);
}

const BoundaryWeights& boundary_weights(const Mesh& mesh, BoundaryTag tag) {
  if (tag == BoundaryTag::dirichlet) return mesh.dirichlet_weights();
  if (tag == BoundaryTag::neumann) return mesh.neumann_weights();
  throw Error(ErrorCode::InvalidArgument, "boundary weights exist for neumann or dirichlet only");
}

FeFunction::FeFunction(const Mesh& mesh) : mesh_(&mesh), values_(mesh.vertex_count(), 0.0) {}

FeFunction::FeFunction(const Mesh& mesh, std::vector<double> values) : mesh_(&mesh), values_(std::move(values)) {
  if (values_.size() != mesh.vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "nodal value count does not match the mesh");
  }
}

std::vector<double> nodal_inflow(const Mesh& mesh, double value) {
  std::vector<double> load(mesh.vertex_count(), 0.0);
  for (const auto& f : mesh.boundary_facets()) {
    if (f.tag != BoundaryTag::neumann || f.zero_flux_wall) continue;
    const double share = f.measure / static_cast<double>(f.vertex_count);
    for (std::size_t a = 0; a < f.vertex_count; ++a) load[f.vertices[a]] += share * value;
  }
  std::vector<double> j(mesh.vertex_count(), 0.0);
  const auto& w = mesh.neumann_weights();
  for (std::size_t k = 0; k < w.size(); ++k) j[w.nodes[k]] = load[w.nodes[k]] / w.weights[k];
  return j;
}

}  // namespace smfg
