#include "flatneck/grid2d.hpp"

#include <cmath>
#include <stdexcept>

namespace flatneck {

Grid2D::Grid2D(const ProblemConfig& cfg, std::vector<double> rho, std::vector<double> yn)
    : profile_(cfg), rho_(std::move(rho)), yn_(std::move(yn)) {
  if (rho_.size() < 3 || yn_.size() < 3)
    throw std::invalid_argument("Grid2D: degenerate grid");
  if (std::abs(rho_.front()) > 1e-14 || std::abs(rho_.back() - 1.0) > 1e-14)
    throw std::invalid_argument("Grid2D: radial extent must be [0, 1]");
  const double eps = cfg.epsilon;
  if (std::abs(yn_.front() + eps) > 1e-14 * eps || std::abs(yn_.back() - eps) > 1e-14 * eps)
    throw std::invalid_argument("Grid2D: vertical extent must be [-eps, eps]");
}

std::shared_ptr<const Grid2D> Grid2D::build(const ProblemConfig& cfg,
                                            int radial_nodes,
                                            int vertical_intervals,
                                            double grading_beta) {
  cfg.validate();
  if (vertical_intervals < 15)
    throw std::invalid_argument(
        "Grid2D::build: resolution error, need >= 16 vertical nodes across the gap");
  RadialGridSpec spec;
  spec.r_min = 0.0;
  spec.r_max = 1.0;
  spec.r0 = cfg.r0;
  spec.epsilon = cfg.epsilon;
  spec.count = radial_nodes;
  spec.beta = grading_beta;
  RadialGrid rg = RadialGrid::graded(spec);

  std::vector<double> yn(vertical_intervals + 1);
  for (int j = 0; j <= vertical_intervals; ++j)
    yn[j] = -cfg.epsilon + 2.0 * cfg.epsilon * j / vertical_intervals;
  yn.front() = -cfg.epsilon;
  yn.back() = cfg.epsilon;

  return std::make_shared<Grid2D>(cfg, rg.nodes(), std::move(yn));
}

double Grid2D::xn(std::size_t i, std::size_t j) const {
  const ProblemConfig& cfg = profile_.config();
  const double r = rho_[i];
  const double g = cfg.epsilon + profile_.h1(r) - profile_.h2(r);
  return profile_.h2(r) - 0.5 * cfg.epsilon +
         (yn_[j] / (2.0 * cfg.epsilon) + 0.5) * g;
}

}  // namespace flatneck
