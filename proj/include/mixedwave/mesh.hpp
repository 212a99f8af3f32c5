#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace mixedwave {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// An edge of the triangulation. `vertices` is ordered lower index first.
/// `triangles[1]` is -1 for boundary edges. The stored unit normal is the
/// outward normal of `triangles[0]`, which is always the lower-numbered
/// neighbour.
struct Edge {
  std::array<int, 2> vertices{};
  std::array<int, 2> triangles{-1, -1};
  Vec2 normal = Vec2::Zero();
  bool boundary = false;
};

/// Conforming triangulation of a polygonal 2D domain.
///
/// Triangles are stored counterclockwise with the smallest vertex index
/// first. Local edge i of a triangle is the edge opposite local vertex i.
/// Vertices are numbered lexicographically by (y, x); triangles by their
/// sorted vertex triple; edges by their vertex pair.
///
/// A mesh produced by refine_uniform() keeps a shared reference to its
/// coarse parent together with the parent index of every fine triangle.
/// Meshes are immutable after construction.
class Mesh {
public:
  /// Builds a mesh from raw vertex coordinates and counterclockwise
  /// triangles, renumbering everything into canonical order. The optional
  /// `parent_of` gives the index in `parent` of each input triangle.
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
       int level = 0, std::shared_ptr<const Mesh> parent = nullptr,
       std::vector<int> parent_of = {});

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Global edge index of each local edge, per triangle.
  const std::vector<std::array<int, 3>>& triangle_edges() const { return triangle_edges_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  int level() const { return level_; }
  const std::shared_ptr<const Mesh>& parent() const { return parent_; }
  /// Index of the parent triangle in parent(), or -1 for an unrefined mesh.
  int parent_triangle(int t) const { return parent_of_.empty() ? -1 : parent_of_[t]; }

  Vec2 vertex(int t, int local) const { return vertices_[triangles_[t][local]]; }
  /// Affine Jacobian of the map from the reference triangle (0,0),(1,0),(0,1).
  Mat2 jacobian(int t) const;
  double area(int t) const;
  Vec2 centroid(int t) const;
  double diameter(int t) const;
  double inradius(int t) const;
  /// Outward unit normal of triangle t on its local edge i.
  Vec2 outward_normal(int t, int local_edge) const;

  /// True if both meshes have the same vertices (within `tol`) and triangles.
  bool same_as(const Mesh& other, double tol = 1e-14) const;

private:
  void build_edges();

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  int level_ = 0;
  std::shared_ptr<const Mesh> parent_;
  std::vector<int> parent_of_;
};

/// Structured triangulation of the L-shape (-1,1)^2 \ [0,1]^2 with `n`
/// square cells per unit length, each cut by its lower-left to upper-right
/// diagonal. Throws std::invalid_argument for n < 1.
Mesh build_lshape(int n);

/// Red refinement: every triangle is split into four congruent children
/// through its edge midpoints.
Mesh refine_uniform(std::shared_ptr<const Mesh> coarse);
Mesh refine_uniform(const Mesh& coarse);

struct MeshStats {
  double h = 0.0;      // max element diameter
  double gamma = 0.0;  // min inradius / diameter
};

MeshStats mesh_stats(const Mesh& m);

/// Returns a description of the first violated structural invariant, or an
/// empty string when the mesh is consistent. Checks orientation, the Euler
/// relation for a simply connected domain, edge adjacency and normal
/// conventions, and nesting against the parent when one is present.
std::string check_invariants(const Mesh& m);

}  // namespace mixedwave
