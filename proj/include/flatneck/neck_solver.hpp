#pragma once

#include <functional>
#include <memory>

#include "flatneck/grid2d.hpp"
#include "flatneck/radial.hpp"

namespace flatneck {

struct SolveReport {
  std::size_t unknowns = 0;
  double residual = 0.0;             // relative algebraic residual
  double conservation_defect = 0.0;  // flux-balance defect, relative
  double flux_axis = 0.0;            // boundary reaction at rho = 0 (k >= 1 only)
  double flux_lateral = 0.0;         // boundary reaction at rho = 1
  double reaction_sink = 0.0;        // angular-term volume sink
  double assemble_ms = 0.0;
  double solve_ms = 0.0;
};

// Solves the flattened mode equation
//   d_rho(rho^{n-2}(g W_rho + tau W_yn)) + d_yn(rho^{n-2}(tau W_rho + a^{nn} W_yn))
//     - k(k+n-3) g rho^{n-4} W = 0
// on (0,1) x (-eps, eps): conservative bilinear-element assembly with exact
// natural zero-flux on the cylinder faces, Dirichlet data at rho = 1, and
// the mode-appropriate axis condition. Returns the mode coefficient field W.
Field2D assemble_and_solve_mode(const std::shared_ptr<const Grid2D>& grid,
                                const BoundaryData& bc,
                                SolveReport* report = nullptr);

// Manufactured-solution hooks: W* with its exact partials. solve_manufactured
// assembles the same operator against W* (so the discrete solution is the
// Ritz projection of W*) and returns it; field_l2_error measures the
// control-volume-weighted L2 distance to W* at the nodes.
struct ManufacturedMode {
  std::function<double(double rho, double yn)> w, w_rho, w_yn;
};

Field2D solve_manufactured(const std::shared_ptr<const Grid2D>& grid,
                           const ManufacturedMode& mms, SolveReport* report = nullptr);
double field_l2_error(const Field2D& numeric, const ManufacturedMode& mms);

// Vertical average over (-eps, eps) at each radial node (trapezoid).
RadialFunction vertical_average(const Field2D& field);

// Flux of the averaged equation and its source split. F is the radial flux
// component; A and B are the pieces of the reduced source H = A' + B.
struct FluxSources {
  RadialFunction flux;  // F_r(rho)
  RadialFunction A;
  RadialFunction B;
};
FluxSources flux_and_sources(const Field2D& field);

// Nodal sup over the angle of |Du| in physical coordinates, reconstructed
// through the chart: radial part W_rho + (tau/g) W_yn, vertical part
// (2 eps / g) W_yn, angular part k |W| / rho.
Field2D gradient_field(const Field2D& field);

// The two angle families of the physical gradient at a node, before the
// basis normalization: planar = |(radial, vertical)| part, angular = |W|/rho
// (one-sided limit at the axis). |Du| = max(planar * maxY, angular * maxDY).
struct GradParts {
  double planar = 0.0;
  double angular = 0.0;
};
GradParts gradient_parts(const Field2D& field, std::size_t i, std::size_t j);

// Weighted residual of the averaged 1D equation against the computed flux,
// in integrated (flux-balance) form over node intervals; used to verify the
// averaged equation holds to truncation order.
double averaged_equation_defect(const Field2D& field);

// eps-stability statistics of the chart derivative bounds:
//   first  = max |D_{y'} v| * sqrt(eps + (rho-r0)_+^2)
//   second = max |D_n v| * eps / (eps + (rho-r0)_+^2)
std::pair<double, double> derivative_bound_stats(const Field2D& field);

}  // namespace flatneck
