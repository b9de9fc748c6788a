#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "smfg/vec.hpp"

namespace smfg {

/// Boundary tags requested by the caller. `none` is only an input value: it
/// marks a zero-flux wall, which the mesh stores as a Neumann facet.
enum class BoundaryTag { none, neumann, dirichlet };

enum class Side { left, right, bottom, top };

struct BoundaryFacet {
  std::array<std::size_t, 2> vertices{};
  std::size_t vertex_count = 1;  // 1 in 1D, 2 in 2D
  double measure = 1.0;
  BoundaryTag tag = BoundaryTag::neumann;  // neumann or dirichlet after construction
  Side side = Side::left;
  bool zero_flux_wall = false;  // requested as `none`
};

/// Lumped boundary weights for one tagged portion: each facet's measure is
/// split equally among its vertices. Stored sparsely over the portion's
/// vertices, in increasing vertex order.
struct BoundaryWeights {
  BoundaryTag tag = BoundaryTag::neumann;
  std::vector<std::size_t> nodes;
  std::vector<double> weights;

  double total() const;
  std::size_t size() const noexcept { return nodes.size(); }
};

/// Structured P1 mesh on an interval or an axis-aligned rectangle.
/// Immutable after construction.
class Mesh {
 public:
  using Element = std::array<std::size_t, 3>;  // unused trailing slot in 1D

  int dim() const noexcept { return dim_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t element_count() const noexcept { return elements_.size(); }
  std::size_t vertices_per_element() const noexcept { return static_cast<std::size_t>(dim_) + 1; }

  std::span<const Vec> vertices() const noexcept { return vertices_; }
  std::span<const Element> elements() const noexcept { return elements_; }
  std::span<const double> element_measures() const noexcept { return measures_; }
  std::span<const Vec> centroids() const noexcept { return centroids_; }
  std::span<const BoundaryFacet> boundary_facets() const noexcept { return facets_; }

  /// Gradients of the P1 hat functions of the element's local vertices.
  std::span<const Vec> shape_gradients(std::size_t element) const;

  /// Exact gradient of the affine interpolant of `nodal` on `element`.
  Vec element_gradient(std::span<const double> nodal, std::size_t element) const;

  double domain_measure() const noexcept { return domain_measure_; }

  const BoundaryWeights& neumann_weights() const noexcept { return neumann_; }
  const BoundaryWeights& dirichlet_weights() const noexcept { return dirichlet_; }

  /// True when the vertex lies on no boundary facet.
  bool is_interior(std::size_t vertex) const { return !on_boundary_[vertex]; }

  void write_csv(std::ostream& out) const;

 private:
  friend Mesh build_interval_mesh(double, double, std::size_t, BoundaryTag, BoundaryTag);
  friend struct RectMeshBuilder;

  void finalize();

  int dim_ = 1;
  std::vector<Vec> vertices_;
  std::vector<Element> elements_;
  std::vector<double> measures_;
  std::vector<Vec> centroids_;
  std::vector<Vec> shape_grads_;  // (dim+1) per element
  std::vector<BoundaryFacet> facets_;
  std::vector<bool> on_boundary_;
  BoundaryWeights neumann_;
  BoundaryWeights dirichlet_;
  double domain_measure_ = 0.0;
};

/// Uniform n-segment mesh of [a, b]. Throws Error{BadTags} unless one end is
/// Neumann and the other Dirichlet (or both carry distinct tags that leave
/// neither portion empty), Error{InvalidArgument} for a >= b or n == 0.
Mesh build_interval_mesh(double a, double b, std::size_t n, BoundaryTag left, BoundaryTag right);

struct RectTags {
  BoundaryTag left = BoundaryTag::neumann;
  BoundaryTag right = BoundaryTag::dirichlet;
  BoundaryTag bottom = BoundaryTag::none;
  BoundaryTag top = BoundaryTag::none;

  BoundaryTag operator[](Side side) const noexcept;
};

/// [0, lx] x [0, ly] with nx * ny cells, each split into two triangles along
/// the diagonal from its lower-left to upper-right corner.
Mesh build_rect_mesh(double lx, double ly, std::size_t nx, std::size_t ny, const RectTags& tags);

/// Lumped weights of the requested portion (neumann or dirichlet).
const BoundaryWeights& boundary_weights(const Mesh& mesh, BoundaryTag tag);

/// Nodal values of a P1 function. Holds a non-owning reference to its mesh.
class FeFunction {
 public:
  explicit FeFunction(const Mesh& mesh);
  FeFunction(const Mesh& mesh, std::vector<double> values);

  template <typename F>
  static FeFunction interpolate(const Mesh& mesh, F&& f) {
    FeFunction out(mesh);
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) out.values_[i] = f(mesh.vertices()[i]);
    return out;
  }

  const Mesh& mesh() const noexcept { return *mesh_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  Vec gradient(std::size_t element) const { return mesh_->element_gradient(values_, element); }

 private:
  const Mesh* mesh_;
  std::vector<double> values_;
};

/// Nodal inflow density on the Neumann vertices from per-side constants.
/// Zero-flux walls contribute 0; a vertex shared by facets with different
/// values receives the weight-averaged value, so that the lumped integral
/// sum_i w_i j_i equals the exact facet integral. Entries off the Neumann
/// portion are zero.
std::vector<double> nodal_inflow(const Mesh& mesh, double value);

}  // namespace smfg
