#pragma once

#include <iosfwd>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "mixedwave/projections.hpp"

namespace mixedwave {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Material coefficients of a p_t + div u = f, b u_t + grad p = g.
/// Both are time independent and must be uniformly positive.
struct ProblemCoefficients {
  std::function<double(const Vec2&)> a;
  std::function<double(const Vec2&)> b;
};

ProblemCoefficients constant_coefficients(double a, double b);

/// (a p, q) on P0: diagonal with entries int_K a. Throws std::domain_error
/// if a < 1e-12 at any quadrature point.
SparseMatrix assemble_mass_p0(const ProblemCoefficients& coeffs, const Discretization& space);

/// (b u, v) on BDM1, symmetric positive definite. Throws std::domain_error
/// if b < 1e-12 at any quadrature point.
SparseMatrix assemble_mass_bdm1(const ProblemCoefficients& coeffs, const Discretization& space);

/// D[q][v] = (div v, q): rows P0, columns BDM1.
SparseMatrix assemble_div(const Discretization& space);

/// (f(t), q) for every P0 basis function.
Eigen::VectorXd assemble_load(const ScalarFunction& f, double t, const Discretization& space);

/// (g(t), v) for every BDM1 basis function.
Eigen::VectorXd assemble_load(const VectorFunction& g, double t, const Discretization& space);

/// Writes "row col value" lines (0-based) in row-major order.
void write_coordinate(std::ostream& os, const SparseMatrix& m);

}  // namespace mixedwave
