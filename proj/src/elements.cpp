#include "mixedwave/elements.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

namespace mixedwave {

namespace {

// Orbits of the symmetric rules, with weights normalised to sum to one.
void add_centroid(QuadratureRule& r, double w) {
  r.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
  r.weights.push_back(w);
}

void add_orbit3(QuadratureRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  for (const Vec2& p : {Vec2(a, a), Vec2(b, a), Vec2(a, b)}) {
    r.points.push_back(p);
    r.weights.push_back(w);
  }
}

void add_orbit6(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  for (const Vec2& p : {Vec2(a, b), Vec2(b, a), Vec2(c, a), Vec2(a, c), Vec2(b, c), Vec2(c, b)}) {
    r.points.push_back(p);
    r.weights.push_back(w);
  }
}

QuadratureRule make_rule(int degree) {
  QuadratureRule r;
  r.degree = degree;
  switch (degree) {
    case 1:
      add_centroid(r, 1.0);
      break;
    case 2:
      add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
      break;
    case 3:
    case 4:
      // Degree 3 reuses the 6-point rule to avoid a negative weight.
      add_orbit3(r, 0.4459484909159648863183, 0.2233815896780114656950);
      add_orbit3(r, 0.09157621350977074345957, 0.1099517436553218676383);
      break;
    case 5: {
      const double s15 = std::sqrt(15.0);
      add_centroid(r, 9.0 / 40.0);
      add_orbit3(r, (6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
      add_orbit3(r, (6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
      break;
    }
    case 6:
      add_orbit3(r, 0.2492867451709126155472, 0.1167862757263758005102);
      add_orbit3(r, 0.06308901449150142288191, 0.05084490637020571768434);
      add_orbit6(r, 0.05314504984481843127296, 0.3103524510337821118852, 0.08285107561837590756937);
      break;
    default:
      throw std::invalid_argument("quadrature: degree must be in 1..6, got " + std::to_string(degree));
  }
  for (double& w : r.weights) {
    w *= 0.5;
  }
  return r;
}

// Monomial vector basis used to build the dual basis.
std::array<Vec2, 6> monomials(const Vec2& x) {
  return {Vec2(1, 0), Vec2(x.x(), 0), Vec2(x.y(), 0), Vec2(0, 1), Vec2(0, x.x()), Vec2(0, x.y())};
}

constexpr std::array<double, 6> kMonomialDivergence = {0, 1, 0, 0, 0, 1};

Eigen::Matrix<double, 6, 6> compute_coefficients() {
  // dof_i(m_j) by 2-point Gauss per edge: v.n is linear, times s is quadratic.
  Eigen::Matrix<double, 6, 6> dof = Eigen::Matrix<double, 6, 6>::Zero();
  const LineRule& line = gauss_legendre(2);
  for (int i = 0; i < 3; ++i) {
    const ReferenceEdge& e = reference_edges()[i];
    const Vec2 a = reference_vertex(e.from);
    const Vec2 b = reference_vertex(e.to);
    const double half_length = 0.5 * (b - a).norm();
    for (std::size_t q = 0; q < line.points.size(); ++q) {
      const double s = line.points[q];
      const Vec2 x = 0.5 * (a + b) + 0.5 * s * (b - a);
      const auto m = monomials(x);
      for (int j = 0; j < 6; ++j) {
        const double flux = m[j].dot(e.normal) * line.weights[q] * half_length;
        dof(2 * i, j) += flux;
        dof(2 * i + 1, j) += flux * s;
      }
    }
  }
  return dof.inverse();
}

}  // namespace

const QuadratureRule& quadrature(int degree) {
  static const std::array<QuadratureRule, 6> rules = {make_rule(1), make_rule(2), make_rule(3),
                                                      make_rule(4), make_rule(5), make_rule(6)};
  if (degree < 1 || degree > 6) {
    throw std::invalid_argument("quadrature: degree must be in 1..6, got " + std::to_string(degree));
  }
  return rules[degree - 1];
}

const LineRule& gauss_legendre(int num_points) {
  static const std::array<LineRule, 4> rules = [] {
    std::array<LineRule, 4> r;
    r[0] = {{0.0}, {2.0}};
    const double g2 = 1.0 / std::sqrt(3.0);
    r[1] = {{-g2, g2}, {1.0, 1.0}};
    const double g3 = std::sqrt(0.6);
    r[2] = {{-g3, 0.0, g3}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
    const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
    const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
    r[3] = {{-b, -a, a, b}, {wb, wa, wa, wb}};
    return r;
  }();
  if (num_points < 1 || num_points > 4) {
    throw std::invalid_argument("gauss_legendre: 1..4 points supported");
  }
  return rules[num_points - 1];
}

const std::array<ReferenceEdge, 3>& reference_edges() {
  static const std::array<ReferenceEdge, 3> edges = {
      ReferenceEdge{1, 2, Vec2(1.0, 1.0) / std::sqrt(2.0)},
      ReferenceEdge{0, 2, Vec2(-1.0, 0.0)},
      ReferenceEdge{0, 1, Vec2(0.0, -1.0)},
  };
  return edges;
}

Vec2 reference_vertex(int local) {
  switch (local) {
    case 0:
      return Vec2(0.0, 0.0);
    case 1:
      return Vec2(1.0, 0.0);
    default:
      return Vec2(0.0, 1.0);
  }
}

const Eigen::Matrix<double, 6, 6>& bdm1_coefficients() {
  static const Eigen::Matrix<double, 6, 6> c = compute_coefficients();
  return c;
}

BDM1Values bdm1_eval(const Vec2& ref_point) {
  const auto& c = bdm1_coefficients();
  const auto m = monomials(ref_point);
  BDM1Values out;
  for (int j = 0; j < 6; ++j) {
    Vec2 v = Vec2::Zero();
    double div = 0.0;
    for (int k = 0; k < 6; ++k) {
      v += c(k, j) * m[k];
      div += c(k, j) * kMonomialDivergence[k];
    }
    out.values[j] = v;
    out.divergence[j] = div;
  }
  return out;
}

Vec2 AffineMap::to_reference(const Vec2& x) const {
  const Vec2 d = x - origin;
  // Inverse of a 2x2 matrix written out; det is nonzero by construction.
  return Vec2(jacobian(1, 1) * d.x() - jacobian(0, 1) * d.y(),
              -jacobian(1, 0) * d.x() + jacobian(0, 0) * d.y()) /
         det;
}

AffineMap affine_map(const Vec2& v0, const Vec2& v1, const Vec2& v2) {
  AffineMap map;
  map.origin = v0;
  map.jacobian.col(0) = v1 - v0;
  map.jacobian.col(1) = v2 - v0;
  map.det = map.jacobian.determinant();
  if (std::abs(map.det) < 1e-14) {
    throw std::invalid_argument("affine_map: degenerate triangle");
  }
  return map;
}

AffineMap affine_map(const Mesh& m, int triangle) {
  return affine_map(m.vertex(triangle, 0), m.vertex(triangle, 1), m.vertex(triangle, 2));
}

Vec2 piola_map(const std::array<Vec2, 3>& triangle, const Vec2& ref_vector) {
  return piola_map(affine_map(triangle[0], triangle[1], triangle[2]), ref_vector);
}

DofMap build_dofmap(const Mesh& m) {
  DofMap d;
  d.num_bdm = 2 * m.num_edges();
  d.num_p0 = m.num_triangles();
  d.bdm_dofs.resize(m.num_triangles());
  d.bdm_signs.resize(m.num_triangles());
  const auto& ref = reference_edges();
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& verts = m.triangles()[t];
    for (int i = 0; i < 3; ++i) {
      const int e = m.triangle_edges()[t][i];
      const Edge& edge = m.edges()[e];
      const double normal_sign = (edge.triangles[0] == t) ? 1.0 : -1.0;
      const double direction_sign = (verts[ref[i].from] < verts[ref[i].to]) ? 1.0 : -1.0;
      d.bdm_dofs[t][2 * i] = 2 * e;
      d.bdm_dofs[t][2 * i + 1] = 2 * e + 1;
      d.bdm_signs[t][2 * i] = normal_sign;
      d.bdm_signs[t][2 * i + 1] = normal_sign * direction_sign;
    }
  }
  return d;
}

DiscretizationPtr make_discretization(std::shared_ptr<const Mesh> mesh) {
  if (!mesh) {
    throw std::invalid_argument("make_discretization: null mesh");
  }
  auto dofs = build_dofmap(*mesh);
  return std::make_shared<const Discretization>(Discretization{std::move(mesh), std::move(dofs)});
}

DiscretizationPtr make_discretization(Mesh mesh) {
  return make_discretization(std::make_shared<const Mesh>(std::move(mesh)));
}

}  // namespace mixedwave
