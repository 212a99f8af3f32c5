#pragma once

// Independent reference computations for the unit and acceptance tests.
// Nothing here calls the library's quadrature, basis or assembly code.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mixedwave/mesh.hpp"

namespace oracle {

using mixedwave::Mat2;
using mixedwave::Vec2;

inline constexpr unsigned kSeed = 20240611u;

/// Gauss-Legendre nodes and weights on [-1, 1] via Golub-Welsch.
struct Gauss1D {
  std::vector<double> x;
  std::vector<double> w;
};

inline Gauss1D golub_welsch(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Gauss1D g;
  for (int i = 0; i < n; ++i) {
    g.x.push_back(es.eigenvalues()[i]);
    const double v = es.eigenvectors()(0, i);
    g.w.push_back(2.0 * v * v);
  }
  return g;
}

/// Collapsed (Duffy) tensor Gauss rule on the reference triangle; exact
/// for polynomials of degree <= 2n - 2.
struct TriRule {
  std::vector<Vec2> x;
  std::vector<double> w;
};

inline TriRule duffy(int n) {
  const Gauss1D g = golub_welsch(n);
  TriRule r;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = 0.5 * (g.x[i] + 1.0);
      const double v = 0.5 * (g.x[j] + 1.0);
      r.x.emplace_back(u, v * (1.0 - u));
      r.w.push_back(0.25 * g.w[i] * g.w[j] * (1.0 - u));
    }
  }
  return r;
}

/// Composite Simpson on [a, b] with `panels` panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 8) {
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double x0 = a + i * h;
    sum += h / 6.0 * (f(x0) + 4.0 * f(x0 + 0.5 * h) + f(x0 + h));
  }
  return sum;
}

/// {int_e v.n ds, int_e v.n s ds} on the segment from p to q, with s
/// running from -1 at p to 1 at q and ds the arc length element.
inline std::array<double, 2> edge_moments(const std::function<Vec2(const Vec2&)>& v, const Vec2& p,
                                          const Vec2& q, const Vec2& n) {
  const double half = 0.5 * (q - p).norm();
  const auto at = [&](double s) { return v(0.5 * (p + q) + 0.5 * s * (q - p)).dot(n) * half; };
  return {simpson(at, -1.0, 1.0), simpson([&](double s) { return at(s) * s; }, -1.0, 1.0)};
}

/// Integral over a physical triangle with a Duffy rule of the given size.
inline double integrate(const std::array<Vec2, 3>& tri, const std::function<double(const Vec2&)>& f,
                        int n = 8) {
  static thread_local std::vector<std::pair<int, TriRule>> cache;
  const TriRule* rule = nullptr;
  for (const auto& [k, r] : cache) {
    if (k == n) {
      rule = &r;
    }
  }
  if (!rule) {
    cache.emplace_back(n, duffy(n));
    rule = &cache.back().second;
  }
  Mat2 J;
  J.col(0) = tri[1] - tri[0];
  J.col(1) = tri[2] - tri[0];
  const double det = std::abs(J.determinant());
  double sum = 0.0;
  for (std::size_t q = 0; q < rule->x.size(); ++q) {
    sum += rule->w[q] * f(tri[0] + J * rule->x[q]);
  }
  return sum * det;
}

inline std::array<Vec2, 3> triangle(const mixedwave::Mesh& m, int t) {
  return {m.vertex(t, 0), m.vertex(t, 1), m.vertex(t, 2)};
}

/// BDM1 basis on a physical triangle built directly from its edges: the
/// six functions in span{(1,0),(x,0),(y,0),(0,1),(0,x),(0,y)} dual to the
/// moments of v.n against {1, s} on each edge (edge i opposite vertex i,
/// s from the lower to the higher local vertex, outward normal).
class PhysicalBDM1 {
public:
  explicit PhysicalBDM1(const std::array<Vec2, 3>& tri) : tri_(tri) {
    Eigen::Matrix<double, 6, 6> dof;
    for (int j = 0; j < 6; ++j) {
      const auto mono = [j](const Vec2& x) { return monomial(j, x); };
      for (int i = 0; i < 3; ++i) {
        const auto [p, q, n] = edge(i);
        const auto mom = edge_moments(mono, p, q, n);
        dof(2 * i, j) = mom[0];
        dof(2 * i + 1, j) = mom[1];
      }
    }
    coeffs_ = dof.fullPivLu().inverse();
  }

  /// Endpoints (lower local vertex first) and outward normal of edge i.
  std::tuple<Vec2, Vec2, Vec2> edge(int i) const {
    const int a = i == 0 ? 1 : 0;
    const int b = i == 2 ? 1 : 2;
    const Vec2 d = tri_[b] - tri_[a];
    Vec2 n(d.y(), -d.x());
    n.normalize();
    if (n.dot(tri_[i] - tri_[a]) > 0.0) {
      n = -n;
    }
    return {tri_[a], tri_[b], n};
  }

  Vec2 value(int j, const Vec2& x) const {
    Vec2 v = Vec2::Zero();
    for (int k = 0; k < 6; ++k) {
      v += coeffs_(k, j) * monomial(k, x);
    }
    return v;
  }

  double divergence(int j) const { return coeffs_(1, j) + coeffs_(5, j); }

  static Vec2 monomial(int k, const Vec2& x) {
    switch (k) {
      case 0: return Vec2(1.0, 0.0);
      case 1: return Vec2(x.x(), 0.0);
      case 2: return Vec2(x.y(), 0.0);
      case 3: return Vec2(0.0, 1.0);
      case 4: return Vec2(0.0, x.x());
      default: return Vec2(0.0, x.y());
    }
  }

private:
  std::array<Vec2, 3> tri_;
  Eigen::Matrix<double, 6, 6> coeffs_;
};

/// Local post-processing as the constrained minimisation
///   min 1/2 |grad q|^2_K - (r, grad q)_K   subject to (q, 1)_K = mean |K|
/// over linears q = c0 + c1 x + c2 y, solved as a dense 4x4 KKT system.
/// Returns q at the three vertices.
inline std::array<double, 3> kkt_postprocess(const std::array<Vec2, 3>& tri,
                                             const std::function<Vec2(const Vec2&)>& r, double mean) {
  const std::function<double(const Vec2&)> one = [](const Vec2&) { return 1.0; };
  const double area = integrate(tri, one);
  const double ix = integrate(tri, [](const Vec2& x) { return x.x(); });
  const double iy = integrate(tri, [](const Vec2& x) { return x.y(); });
  Eigen::Matrix4d K = Eigen::Matrix4d::Zero();
  Eigen::Vector4d rhs = Eigen::Vector4d::Zero();
  // grad of (1, x, y) = (0,0), (1,0), (0,1)
  K(1, 1) = area;
  K(2, 2) = area;
  const std::array<double, 3> B{area, ix, iy};
  for (int i = 0; i < 3; ++i) {
    K(3, i) = B[i];
    K(i, 3) = B[i];
  }
  rhs(1) = integrate(tri, [&](const Vec2& x) { return r(x).x(); }, 10);
  rhs(2) = integrate(tri, [&](const Vec2& x) { return r(x).y(); }, 10);
  rhs(3) = mean * area;
  const Eigen::Vector4d c = K.fullPivLu().solve(rhs);
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    out[i] = c(0) + c(1) * tri[i].x() + c(2) * tri[i].y();
  }
  return out;
}

/// Random point strictly inside the reference triangle.
inline Vec2 random_reference_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double a = u(rng);
  double b = u(rng);
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  return Vec2(a, b);
}

/// Random counterclockwise triangle with minimum angle bounded away from 0.
inline std::array<Vec2, 3> random_triangle(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (;;) {
    std::array<Vec2, 3> t{Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng))};
    Mat2 J;
    J.col(0) = t[1] - t[0];
    J.col(1) = t[2] - t[0];
    const double det = J.determinant();
    double longest = 0.0;
    for (int i = 0; i < 3; ++i) {
      longest = std::max(longest, (t[(i + 1) % 3] - t[i]).norm());
    }
    if (std::abs(det) < 0.2 * longest * longest) {
      continue;
    }
    if (det < 0.0) {
      std::swap(t[1], t[2]);
    }
    return t;
  }
}

/// Random affine vector field x -> c + A x.
struct AffineField {
  Vec2 c;
  Mat2 A;
  Vec2 operator()(const Vec2& x) const { return c + A * x; }
};

inline AffineField random_affine_field(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AffineField f;
  f.c = Vec2(u(rng), u(rng));
  f.A << u(rng), u(rng), u(rng), u(rng);
  return f;
}

}  // namespace oracle
