#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mixedwave/projections.hpp"
#include "support.hpp"

using namespace mixedwave;

namespace {

constexpr double kPi = std::numbers::pi;

VectorFunction wave_velocity() {
  VectorFunction u;
  u.eval = [](const Vec2& x, double) {
    return Vec2(std::cos(kPi * x.x()) * std::sin(kPi * x.y()), std::exp(x.x()) * std::cos(2.0 * x.y()));
  };
  return u;
}

double wave_divergence(const Vec2& x) {
  return -kPi * std::sin(kPi * x.x()) * std::sin(kPi * x.y()) - 2.0 * std::exp(x.x()) * std::sin(2.0 * x.y());
}

ScalarFunction scalar(std::function<double(const Vec2&)> f) {
  ScalarFunction s;
  s.eval = [f](const Vec2& x, double) { return f(x); };
  return s;
}

DiscretizationPtr space(int n) { return make_discretization(build_lshape(n)); }

}  // namespace

TEST_CASE("commuting diagram: div rho_h u = pi_h div u") {
  const VectorFunction u = wave_velocity();
  for (int n : {1, 2, 4, 8}) {
    const auto s = space(n);
    const FieldBDM1 ru = interpolate_bdm1(u, 0.0, s);
    const Mesh& m = *s->mesh;
    double sum = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) {
      const double mean =
          oracle::integrate(oracle::triangle(m, t), wave_divergence, 12) / m.area(t);
      sum += m.area(t) * std::pow(ru.divergence(t) - mean, 2);
    }
    CHECK(std::sqrt(sum) <= 1e-9);
  }
}

TEST_CASE("rho_h reproduces fields in BDM1") {
  std::mt19937 rng(oracle::kSeed);
  const auto s = space(3);
  const Mesh& m = *s->mesh;
  for (int trial = 0; trial < 5; ++trial) {
    const oracle::AffineField f = oracle::random_affine_field(rng);
    VectorFunction u;
    u.eval = [f](const Vec2& x, double) { return f(x); };
    const FieldBDM1 ru = interpolate_bdm1(u, 0.0, s);
    for (int t = 0; t < m.num_triangles(); t += 7) {
      const Vec2 x = affine_map(m, t).to_physical(oracle::random_reference_point(rng));
      CHECK((ru.value(t, x) - f(x)).norm() < 1e-13);
    }
    CHECK(l2_error(ru, u, 0.0) < 1e-13);
    // rho_h is a projection
    const FieldBDM1 again = interpolate_bdm1(
        VectorFunction{[&](const Vec2& x, double) {
          for (int t = 0; t < m.num_triangles(); ++t) {
            const Vec2 r = affine_map(m, t).to_reference(x);
            if (r.x() >= -1e-12 && r.y() >= -1e-12 && r.x() + r.y() <= 1 + 1e-12) {
              return ru.value(t, x);
            }
          }
          return Vec2(0.0, 0.0);
        }},
        0.0, s);
    CHECK((again.coeffs - ru.coeffs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("normal continuity of BDM1 fields") {
  std::mt19937 rng(oracle::kSeed + 2);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const auto s = space(2);
  const Mesh& m = *s->mesh;
  FieldBDM1 u(s);
  for (int i = 0; i < u.coeffs.size(); ++i) {
    u.coeffs[i] = coef(rng);
  }
  for (const Edge& e : m.edges()) {
    if (e.boundary) {
      continue;
    }
    const Vec2 a = m.vertices()[e.vertices[0]];
    const Vec2 b = m.vertices()[e.vertices[1]];
    for (double lambda : {0.1, 0.5, 0.8}) {
      const Vec2 x = a + lambda * (b - a);
      const double left = u.value(e.triangles[0], x).dot(e.normal);
      const double right = u.value(e.triangles[1], x).dot(e.normal);
      CHECK(left == doctest::Approx(right).epsilon(1e-12));
    }
  }
}

TEST_CASE("pi_h^0 and pi_h^1") {
  const auto s = space(2);
  const Mesh& m = *s->mesh;
  const FieldP0 c = project_p0(constant_scalar(3.5), 0.0, s);
  CHECK((c.coeffs.array() - 3.5).abs().maxCoeff() < 1e-15);

  const auto lin = scalar([](const Vec2& x) { return 1.0 + 2.0 * x.x() - 3.0 * x.y(); });
  const FieldP1 p = project_p1(lin, 0.0, s);
  CHECK(l2_error(p, lin, 0.0) < 1e-14);
  for (int t = 0; t < m.num_triangles(); ++t) {
    CHECK(p.local(t)[1] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(p.local(t)[2] == doctest::Approx(-3.0).epsilon(1e-13));
  }

  // pi^0 of a smooth function equals the element mean from the oracle rule
  // once the elements are small enough for the degree-6 rule
  const auto smooth = scalar([](const Vec2& x) { return std::sin(kPi * x.x()) * std::sin(kPi * x.y()); });
  const auto fine = space(8);
  const Mesh& mf = *fine->mesh;
  const FieldP0 q = project_p0(smooth, 0.0, fine);
  for (int t = 0; t < mf.num_triangles(); ++t) {
    const double mean =
        oracle::integrate(oracle::triangle(mf, t), [&](const Vec2& x) { return smooth(x, 0.0); }, 12) / mf.area(t);
    CHECK(std::abs(q.coeffs[t] - mean) < 1e-10);
  }
  // pi^1 mean equals pi^0
  const FieldP1 q1 = project_p1(smooth, 0.0, fine);
  for (int t = 0; t < mf.num_triangles(); ++t) {
    CHECK(q1.mean(t) == doctest::Approx(q.coeffs[t]).epsilon(1e-13));
  }
}

TEST_CASE("pi_h^1 residual is orthogonal to linears") {
  const auto s = space(1);
  const Mesh& m = *s->mesh;
  const auto f = [](const Vec2& x) {
    return std::pow(x.x(), 4) * x.y() - x.x() * x.x() * std::pow(x.y(), 3) + x.x() * x.x() * x.y() + 2.0;
  };
  const FieldP1 p = project_p1(scalar(f), 0.0, s);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto tri = oracle::triangle(m, t);
    for (int k = 0; k < 3; ++k) {
      const auto basis = [k](const Vec2& x) { return k == 0 ? 1.0 : (k == 1 ? x.x() : x.y()); };
      const double r = oracle::integrate(tri, [&](const Vec2& x) { return (f(x) - p.value(t, x).x()) * basis(x); }, 12);
      CHECK(std::abs(r) < 1e-13);
    }
  }
}

TEST_CASE("to_p1 is the same polynomial as the BDM1 field") {
  std::mt19937 rng(oracle::kSeed + 3);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const auto s = space(2);
  const Mesh& m = *s->mesh;
  FieldBDM1 u(s);
  for (int i = 0; i < u.coeffs.size(); ++i) {
    u.coeffs[i] = coef(rng);
  }
  const FieldP1 p = to_p1(u);
  CHECK(p.components() == 2);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Vec2 x = affine_map(m, t).to_physical(oracle::random_reference_point(rng));
    CHECK((p.value(t, x) - u.value(t, x)).norm() < 1e-13);
  }
  CHECK(l2_norm(p) == doctest::Approx(l2_norm(u)).epsilon(1e-13));
}

TEST_CASE("nested transfers") {
  auto coarse_mesh = std::make_shared<const Mesh>(build_lshape(2));
  const auto coarse = make_discretization(coarse_mesh);
  const auto fine = make_discretization(refine_uniform(coarse_mesh));
  auto fine2_mesh = std::make_shared<const Mesh>(refine_uniform(fine->mesh));
  const auto fine2 = make_discretization(fine2_mesh);

  CHECK(nesting_depth(*coarse->mesh, *fine->mesh) == 1);
  CHECK(nesting_depth(*coarse->mesh, *fine2->mesh) == 2);
  CHECK(nesting_depth(*fine->mesh, *fine->mesh) == 0);
  CHECK(nesting_depth(*fine->mesh, *coarse->mesh) == -1);
  const Mesh unrelated = build_lshape(3);
  CHECK(nesting_depth(unrelated, *fine->mesh) == -1);

  // degree 4, so every projection below is computed exactly
  const auto f = scalar([](const Vec2& x) { return x.x() * x.x() * x.x() * x.y() + x.y() * x.y() - x.x(); });
  SUBCASE("restrict_p0 of a fine projection is the coarse projection") {
    const FieldP0 r = restrict_p0(project_p0(f, 0.0, fine2), coarse);
    CHECK((r.coeffs - project_p0(f, 0.0, coarse).coeffs).cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("restrict_p1 of a fine projection is the coarse projection") {
    const FieldP1 r = restrict_p1(project_p1(f, 0.0, fine), coarse);
    // pi^1_H pi^1_h = pi^1_H on nested meshes
    CHECK(l2_distance(r, project_p1(f, 0.0, coarse)) < 1e-12);
  }
  SUBCASE("prolongation then restriction is the identity") {
    const FieldP1 c = project_p1(f, 0.0, coarse);
    const FieldP1 up = prolongate_p1(c, fine2);
    CHECK(diff_norm_nested(up, c) < 1e-13);
    CHECK(l2_distance(restrict_p1(up, coarse), c) < 1e-13);
  }
  SUBCASE("diff_norm_nested matches the exact distance after prolongation") {
    const FieldP1 a = project_p1(f, 0.0, fine);
    const FieldP1 b = project_p1(f, 0.0, coarse);
    CHECK(diff_norm_nested(a, b) == doctest::Approx(l2_distance(a, prolongate_p1(b, fine))).epsilon(1e-12));
  }
  SUBCASE("transfers reject unrelated meshes") {
    const auto other = make_discretization(build_lshape(3));
    CHECK_THROWS_AS(restrict_p0(project_p0(f, 0.0, fine), other), std::invalid_argument);
    CHECK_THROWS_AS(restrict_p1(project_p1(f, 0.0, fine), other), std::invalid_argument);
    CHECK_THROWS_AS(prolongate_p1(project_p1(f, 0.0, other), fine), std::invalid_argument);
  }
}

TEST_CASE("l2 norms and distances against the oracle") {
  const auto s = space(1);
  const Mesh& m = *s->mesh;
  const auto f = scalar([](const Vec2& x) { return x.x() * x.x() + 0.5 * x.y(); });
  const auto g = scalar([](const Vec2& x) { return std::cos(x.x() - x.y()); });
  const FieldP1 a = project_p1(f, 0.0, s);
  const FieldP1 b = project_p1(g, 0.0, s);
  double sum = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    sum += oracle::integrate(oracle::triangle(m, t),
                             [&](const Vec2& x) { return std::pow(a.value(t, x).x() - b.value(t, x).x(), 2); });
  }
  CHECK(l2_distance(a, b) == doctest::Approx(std::sqrt(sum)).epsilon(1e-13));
  CHECK(diff_norm_nested(a, b) == doctest::Approx(std::sqrt(sum)).epsilon(1e-13));

  const FieldP0 pa = project_p0(f, 0.0, s);
  double err = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    err += oracle::integrate(oracle::triangle(m, t), [&](const Vec2& x) { return std::pow(f(x, 0.0) - pa.coeffs[t], 2); });
  }
  CHECK(l2_error(pa, f, 0.0) == doctest::Approx(std::sqrt(err)).epsilon(1e-12));

  const FieldP0 other(make_discretization(build_lshape(2)));
  CHECK_THROWS_AS(l2_distance(pa, other), std::invalid_argument);
}
