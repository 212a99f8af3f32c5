#include "mixedwave/assembly.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace mixedwave {

namespace {

// Basis values at the degree-6 quadrature points, computed once.
const std::vector<BDM1Values>& basis_at_quadrature() {
  static const std::vector<BDM1Values> values = [] {
    const QuadratureRule& rule = quadrature(6);
    std::vector<BDM1Values> v;
    v.reserve(rule.points.size());
    for (const Vec2& p : rule.points) {
      v.push_back(bdm1_eval(p));
    }
    return v;
  }();
  return values;
}

double checked_coefficient(const std::function<double(const Vec2&)>& c, const Vec2& x, const char* name) {
  const double v = c(x);
  if (!(v >= 1e-12)) {
    throw std::domain_error(std::string("coefficient ") + name + " is not positive at (" +
                            std::to_string(x.x()) + ", " + std::to_string(x.y()) + ")");
  }
  return v;
}

SparseMatrix from_triplets(int rows, int cols, const std::vector<Eigen::Triplet<double>>& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace

ProblemCoefficients constant_coefficients(double a, double b) {
  return {[a](const Vec2&) { return a; }, [b](const Vec2&) { return b; }};
}

SparseMatrix assemble_mass_p0(const ProblemCoefficients& coeffs, const Discretization& space) {
  const Mesh& m = *space.mesh;
  const QuadratureRule& rule = quadrature(6);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const AffineMap map = affine_map(m, t);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      sum += rule.weights[q] * checked_coefficient(coeffs.a, map.to_physical(rule.points[q]), "a");
    }
    triplets.emplace_back(t, t, sum * map.det);
  }
  return from_triplets(space.dofs.num_p0, space.dofs.num_p0, triplets);
}

SparseMatrix assemble_mass_bdm1(const ProblemCoefficients& coeffs, const Discretization& space) {
  const Mesh& m = *space.mesh;
  const QuadratureRule& rule = quadrature(6);
  const auto& basis = basis_at_quadrature();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(36 * m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const AffineMap map = affine_map(m, t);
    // (J phi_i / det) . (J phi_j / det) * det = phi_i^T (J^T J) phi_j / det
    const Mat2 metric = map.jacobian.transpose() * map.jacobian / map.det;
    Eigen::Matrix<double, 6, 6> local = Eigen::Matrix<double, 6, 6>::Zero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights[q] * checked_coefficient(coeffs.b, map.to_physical(rule.points[q]), "b");
      for (int i = 0; i < 6; ++i) {
        const Vec2 gi = metric * basis[q].values[i];
        for (int j = i; j < 6; ++j) {
          local(i, j) += w * gi.dot(basis[q].values[j]);
        }
      }
    }
    local.triangularView<Eigen::StrictlyLower>() = local.transpose().triangularView<Eigen::StrictlyLower>();
    const auto& dofs = space.dofs.bdm_dofs[t];
    const auto& signs = space.dofs.bdm_signs[t];
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        triplets.emplace_back(dofs[i], dofs[j], signs[i] * signs[j] * local(i, j));
      }
    }
  }
  return from_triplets(space.dofs.num_bdm, space.dofs.num_bdm, triplets);
}

SparseMatrix assemble_div(const Discretization& space) {
  const Mesh& m = *space.mesh;
  const BDM1Values basis = bdm1_eval(Vec2::Zero());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(6 * m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) {
    // |K| * div_hat / det = div_hat / 2 on every element.
    const auto& dofs = space.dofs.bdm_dofs[t];
    const auto& signs = space.dofs.bdm_signs[t];
    for (int j = 0; j < 6; ++j) {
      // First-moment functions carry no net flux and are divergence free.
      if (std::abs(basis.divergence[j]) > 1e-10) {
        triplets.emplace_back(t, dofs[j], signs[j] * 0.5 * basis.divergence[j]);
      }
    }
  }
  return from_triplets(space.dofs.num_p0, space.dofs.num_bdm, triplets);
}

Eigen::VectorXd assemble_load(const ScalarFunction& f, double t, const Discretization& space) {
  const Mesh& m = *space.mesh;
  const QuadratureRule& rule = quadrature(6);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(space.dofs.num_p0);
  for (int k = 0; k < m.num_triangles(); ++k) {
    const AffineMap map = affine_map(m, k);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      sum += rule.weights[q] * f(map.to_physical(rule.points[q]), t);
    }
    load[k] = sum * map.det;
  }
  return load;
}

Eigen::VectorXd assemble_load(const VectorFunction& g, double t, const Discretization& space) {
  const Mesh& m = *space.mesh;
  const QuadratureRule& rule = quadrature(6);
  const auto& basis = basis_at_quadrature();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(space.dofs.num_bdm);
  for (int k = 0; k < m.num_triangles(); ++k) {
    const AffineMap map = affine_map(m, k);
    // int g . (J phi / det) det = int (J^T g) . phi over the reference element
    std::array<double, 6> local{};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 jg = map.jacobian.transpose() * g(map.to_physical(rule.points[q]), t);
      for (int j = 0; j < 6; ++j) {
        local[j] += rule.weights[q] * jg.dot(basis[q].values[j]);
      }
    }
    const auto& dofs = space.dofs.bdm_dofs[k];
    const auto& signs = space.dofs.bdm_signs[k];
    for (int j = 0; j < 6; ++j) {
      load[dofs[j]] += signs[j] * local[j];
    }
  }
  return load;
}

void write_coordinate(std::ostream& os, const SparseMatrix& m) {
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(17);
  for (int r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
  os.flags(flags);
  os.precision(precision);
}

}  // namespace mixedwave
