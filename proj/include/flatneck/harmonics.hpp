#pragma once

#include <span>
#include <vector>

namespace flatneck::harmonics {

struct ModeIndex {
  int k = 0;  // degree, >= 0
  int i = 1;  // index within the degree, 1..N(k)
};

// Eigenvalue of -Laplace on S^{n-2} for degree k: k(k+n-3).
double eigenvalue(int k, int n);

// Number of linearly independent harmonics of degree k on S^{n-2}.
// n = 2: the sphere is two points, so only k = 0, 1 exist (one each).
// n = 3: 1 for k = 0, 2 for k >= 1. n >= 4: standard dimension formula
// (metadata only; the reduced solves depend on modes through eigenvalue()).
int mode_count(int k, int n);

// Surface measure of S^{n-2}: 2 for n = 2 (counting measure), 2 pi for n = 3.
double sphere_measure(int n);

// Quadrature samples of a scalar on the circle S^1 (n = 3 path).
struct SphereSamples {
  std::vector<double> angles;
  std::vector<double> weights;  // sum to the sphere measure
  std::vector<double> values;
};

// Uniform angles with equal weights 2 pi / count.
SphereSamples circle_samples(int count);

// L2-normalized circle harmonics: Y_{0,1} = 1/sqrt(2 pi); for k >= 1 the
// pair cos(k t)/sqrt(pi), sin(k t)/sqrt(pi). Only n = 3 is supported.
std::vector<double> basis_eval(ModeIndex m, std::span<const double> angles, int n = 3);

// Quadrature of field * Y_{k,i} over the circle. Requires at least
// 4k + 8 sample nodes to resolve the degree.
double project(const SphereSamples& field, ModeIndex m);

// Inverse of project on finitely many modes: sum_m coeff[m] Y_m at the angles.
SphereSamples synthesize(std::span<const ModeIndex> modes,
                         std::span<const double> coeffs,
                         int node_count);

// sup over the sphere of |Y_{k,i}| and |grad_xi Y_{k,i}| for the dimensions
// with explicit bases (n = 2, 3); used by the gradient reconstruction.
double max_abs_basis(int k, int n);
double max_abs_basis_gradient(int k, int n);

}  // namespace flatneck::harmonics
