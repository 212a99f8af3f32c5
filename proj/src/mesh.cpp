#include "mixedwave/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

#include <Eigen/LU>

namespace mixedwave {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

std::array<int, 3> sorted_triple(std::array<int, 3> t) {
  std::sort(t.begin(), t.end());
  return t;
}

// Rotate so that the smallest index comes first; keeps the cyclic order.
std::array<int, 3> rotate_min_first(const std::array<int, 3>& t) {
  const auto pos = std::min_element(t.begin(), t.end()) - t.begin();
  return {t[pos], t[(pos + 1) % 3], t[(pos + 2) % 3]};
}

}  // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles, int level,
           std::shared_ptr<const Mesh> parent, std::vector<int> parent_of)
    : level_(level), parent_(std::move(parent)) {
  if (!parent_of.empty() && parent_of.size() != triangles.size()) {
    throw std::invalid_argument("Mesh: parent map size does not match triangle count");
  }
  if (parent_of.empty() && parent_) {
    throw std::invalid_argument("Mesh: parent mesh given without parent map");
  }

  const auto nv = vertices.size();
  std::vector<int> order(nv);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return std::tie(vertices[i].y(), vertices[i].x()) < std::tie(vertices[j].y(), vertices[j].x());
  });
  std::vector<int> renumber(nv);
  vertices_.resize(nv);
  for (std::size_t k = 0; k < nv; ++k) {
    renumber[order[k]] = static_cast<int>(k);
    vertices_[k] = vertices[order[k]];
  }

  for (auto& t : triangles) {
    for (auto& v : t) {
      if (v < 0 || static_cast<std::size_t>(v) >= nv) {
        throw std::invalid_argument("Mesh: triangle references a missing vertex");
      }
      v = renumber[v];
    }
    if (signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]) <= 0.0) {
      throw std::invalid_argument("Mesh: triangles must be counterclockwise and nondegenerate");
    }
    t = rotate_min_first(t);
  }

  std::vector<int> torder(triangles.size());
  std::iota(torder.begin(), torder.end(), 0);
  std::stable_sort(torder.begin(), torder.end(), [&](int i, int j) {
    return sorted_triple(triangles[i]) < sorted_triple(triangles[j]);
  });
  triangles_.reserve(triangles.size());
  for (int k : torder) {
    triangles_.push_back(triangles[k]);
    if (!parent_of.empty()) {
      parent_of_.push_back(parent_of[k]);
    }
  }

  build_edges();
}

void Mesh::build_edges() {
  struct Incidence {
    std::array<int, 2> key;
    int triangle;
    int local;
  };
  std::vector<Incidence> inc;
  inc.reserve(3 * triangles_.size());
  for (int t = 0; t < num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      int a = triangles_[t][(i + 1) % 3];
      int b = triangles_[t][(i + 2) % 3];
      inc.push_back({{std::min(a, b), std::max(a, b)}, t, i});
    }
  }
  std::sort(inc.begin(), inc.end(), [](const Incidence& x, const Incidence& y) {
    return std::tie(x.key, x.triangle) < std::tie(y.key, y.triangle);
  });

  triangle_edges_.assign(triangles_.size(), {-1, -1, -1});
  for (std::size_t k = 0; k < inc.size();) {
    std::size_t end = k + 1;
    while (end < inc.size() && inc[end].key == inc[k].key) {
      ++end;
    }
    if (end - k > 2) {
      throw std::invalid_argument("Mesh: edge shared by more than two triangles");
    }
    Edge e;
    e.vertices = inc[k].key;
    e.triangles[0] = inc[k].triangle;
    e.boundary = (end - k == 1);
    if (!e.boundary) {
      e.triangles[1] = inc[k + 1].triangle;
    }
    e.normal = outward_normal(inc[k].triangle, inc[k].local);
    const int id = static_cast<int>(edges_.size());
    for (std::size_t j = k; j < end; ++j) {
      triangle_edges_[inc[j].triangle][inc[j].local] = id;
    }
    edges_.push_back(e);
    k = end;
  }
}

Mat2 Mesh::jacobian(int t) const {
  const Vec2 p0 = vertex(t, 0);
  Mat2 j;
  j.col(0) = vertex(t, 1) - p0;
  j.col(1) = vertex(t, 2) - p0;
  return j;
}

double Mesh::area(int t) const { return signed_area(vertex(t, 0), vertex(t, 1), vertex(t, 2)); }

Vec2 Mesh::centroid(int t) const { return (vertex(t, 0) + vertex(t, 1) + vertex(t, 2)) / 3.0; }

double Mesh::diameter(int t) const {
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    d = std::max(d, (vertex(t, (i + 1) % 3) - vertex(t, (i + 2) % 3)).norm());
  }
  return d;
}

double Mesh::inradius(int t) const {
  double perimeter = 0.0;
  for (int i = 0; i < 3; ++i) {
    perimeter += (vertex(t, (i + 1) % 3) - vertex(t, (i + 2) % 3)).norm();
  }
  return 2.0 * area(t) / perimeter;
}

Vec2 Mesh::outward_normal(int t, int local_edge) const {
  // Counterclockwise traversal: the edge runs from local vertex i+1 to i+2
  // and the outward normal is the clockwise rotation of its tangent.
  const Vec2 d = vertex(t, (local_edge + 2) % 3) - vertex(t, (local_edge + 1) % 3);
  return Vec2(d.y(), -d.x()).normalized();
}

bool Mesh::same_as(const Mesh& other, double tol) const {
  if (this == &other) {
    return true;
  }
  if (num_vertices() != other.num_vertices() || triangles_ != other.triangles_) {
    return false;
  }
  for (int v = 0; v < num_vertices(); ++v) {
    if ((vertices_[v] - other.vertices_[v]).lpNorm<Eigen::Infinity>() > tol) {
      return false;
    }
  }
  return true;
}

Mesh build_lshape(int n) {
  if (n < 1) {
    throw std::invalid_argument("build_lshape: n must be at least 1, got " + std::to_string(n));
  }
  // Grid points (i, j) with i, j in [-n, n], minus the removed open quadrant.
  std::map<std::pair<int, int>, int> index;
  std::vector<Vec2> vertices;
  for (int j = -n; j <= n; ++j) {
    for (int i = -n; i <= n; ++i) {
      if (i > 0 && j > 0) {
        continue;
      }
      index[{i, j}] = static_cast<int>(vertices.size());
      vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    }
  }
  std::vector<std::array<int, 3>> triangles;
  for (int j = -n; j < n; ++j) {
    for (int i = -n; i < n; ++i) {
      if (i >= 0 && j >= 0) {
        continue;
      }
      const int ll = index.at({i, j});
      const int lr = index.at({i + 1, j});
      const int ur = index.at({i + 1, j + 1});
      const int ul = index.at({i, j + 1});
      triangles.push_back({ll, lr, ur});
      triangles.push_back({ll, ur, ul});
    }
  }
  return Mesh(std::move(vertices), std::move(triangles));
}

Mesh refine_uniform(std::shared_ptr<const Mesh> coarse) {
  if (!coarse) {
    throw std::invalid_argument("refine_uniform: null mesh");
  }
  const Mesh& m = *coarse;
  std::vector<Vec2> vertices = m.vertices();
  const int nv = m.num_vertices();
  for (const Edge& e : m.edges()) {
    vertices.push_back(0.5 * (m.vertices()[e.vertices[0]] + m.vertices()[e.vertices[1]]));
  }
  std::vector<std::array<int, 3>> children;
  std::vector<int> parent_of;
  children.reserve(4 * m.num_triangles());
  parent_of.reserve(4 * m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& v = m.triangles()[t];
    const auto& te = m.triangle_edges()[t];
    const int m0 = nv + te[0];
    const int m1 = nv + te[1];
    const int m2 = nv + te[2];
    for (const auto& child : {std::array<int, 3>{v[0], m2, m1}, std::array<int, 3>{m2, v[1], m0},
                              std::array<int, 3>{m1, m0, v[2]}, std::array<int, 3>{m0, m1, m2}}) {
      children.push_back(child);
      parent_of.push_back(t);
    }
  }
  const int level = m.level() + 1;
  return Mesh(std::move(vertices), std::move(children), level, std::move(coarse), std::move(parent_of));
}

Mesh refine_uniform(const Mesh& coarse) { return refine_uniform(std::make_shared<const Mesh>(coarse)); }

MeshStats mesh_stats(const Mesh& m) {
  MeshStats s;
  s.gamma = std::numeric_limits<double>::infinity();
  for (int t = 0; t < m.num_triangles(); ++t) {
    const double d = m.diameter(t);
    s.h = std::max(s.h, d);
    s.gamma = std::min(s.gamma, m.inradius(t) / d);
  }
  return s;
}

std::string check_invariants(const Mesh& m) {
  std::ostringstream err;
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (!(m.area(t) > 0.0)) {
      err << "triangle " << t << " is not counterclockwise";
      return err.str();
    }
  }
  if (m.num_vertices() - m.num_edges() + m.num_triangles() != 1) {
    err << "Euler relation violated: V - E + T = "
        << m.num_vertices() - m.num_edges() + m.num_triangles();
    return err.str();
  }
  std::vector<int> uses(m.num_edges(), 0);
  for (const auto& te : m.triangle_edges()) {
    for (int e : te) {
      ++uses[e];
    }
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& edge = m.edges()[e];
    const int expected = edge.boundary ? 1 : 2;
    if (uses[e] != expected) {
      err << "edge " << e << " has " << uses[e] << " adjacent triangles";
      return err.str();
    }
    if (!edge.boundary && edge.triangles[0] >= edge.triangles[1]) {
      err << "edge " << e << " neighbours out of order";
      return err.str();
    }
    const int t0 = edge.triangles[0];
    int local = -1;
    for (int i = 0; i < 3; ++i) {
      if (m.triangle_edges()[t0][i] == e) {
        local = i;
      }
    }
    if (local < 0 || (m.outward_normal(t0, local) - edge.normal).norm() > 1e-14) {
      err << "edge " << e << " normal is not the outward normal of its first neighbour";
      return err.str();
    }
  }

  if (const auto& parent = m.parent()) {
    std::vector<int> children(parent->num_triangles(), 0);
    std::vector<double> child_area(parent->num_triangles(), 0.0);
    for (int t = 0; t < m.num_triangles(); ++t) {
      const int p = m.parent_triangle(t);
      if (p < 0 || p >= parent->num_triangles()) {
        err << "triangle " << t << " has no valid parent";
        return err.str();
      }
      ++children[p];
      child_area[p] += m.area(t);
      if (std::abs(m.area(t) - parent->area(p) / 4.0) > 1e-13 * parent->area(p)) {
        err << "child " << t << " area is not a quarter of its parent";
        return err.str();
      }
      // Child vertices must lie in the closed parent triangle.
      const Mat2 jinv = parent->jacobian(p).inverse();
      for (int i = 0; i < 3; ++i) {
        const Vec2 ref = jinv * (m.vertex(t, i) - parent->vertex(p, 0));
        if (ref.x() < -1e-12 || ref.y() < -1e-12 || ref.x() + ref.y() > 1.0 + 1e-12) {
          err << "child " << t << " is not contained in parent " << p;
          return err.str();
        }
      }
    }
    for (int p = 0; p < parent->num_triangles(); ++p) {
      if (children[p] != 4 || std::abs(child_area[p] - parent->area(p)) > 1e-13 * parent->area(p)) {
        err << "parent " << p << " is not exactly covered by four children";
        return err.str();
      }
    }
  }
  return {};
}

}  // namespace mixedwave
