#pragma once

#include <memory>
#include <string>
#include <vector>

#include "flatneck/geometry.hpp"
#include "flatneck/problem.hpp"
#include "flatneck/radial.hpp"

namespace flatneck {

// Tensor-product grid on the flattened neck: graded radial nodes on [0, 1]
// times uniform vertical nodes on [-eps, eps]. Physical coordinates of a
// node follow from the inverse flattening map.
class Grid2D {
 public:
  static std::shared_ptr<const Grid2D> build(const ProblemConfig& cfg,
                                             int radial_nodes,
                                             int vertical_intervals,
                                             double grading_beta = 0.10);

  const std::vector<double>& rho() const { return rho_; }
  const std::vector<double>& yn() const { return yn_; }
  std::size_t nr() const { return rho_.size(); }
  std::size_t nz() const { return yn_.size(); }
  std::size_t size() const { return nr() * nz(); }
  std::size_t idx(std::size_t i, std::size_t j) const { return i * nz() + j; }

  const Profile& profile() const { return profile_; }
  const ProblemConfig& config() const { return profile_.config(); }

  // physical vertical coordinate of node (i, j)
  double xn(std::size_t i, std::size_t j) const;

  RadialGrid radial_grid() const { return RadialGrid(rho_); }

  Grid2D(const ProblemConfig& cfg, std::vector<double> rho, std::vector<double> yn);

 private:
  Profile profile_;
  std::vector<double> rho_;
  std::vector<double> yn_;
};

// Nodal scalar field on a Grid2D, immutable once filled.
struct Field2D {
  std::shared_ptr<const Grid2D> grid;
  std::vector<double> v;
  std::string name;

  Field2D() = default;
  Field2D(std::shared_ptr<const Grid2D> g, std::string nm)
      : grid(std::move(g)), v(grid->size(), 0.0), name(std::move(nm)) {}

  double at(std::size_t i, std::size_t j) const { return v[grid->idx(i, j)]; }
  double& at(std::size_t i, std::size_t j) { return v[grid->idx(i, j)]; }
};

// Dirichlet data on the lateral boundary rho = 1 as a function of the
// physical vertical coordinate, plus the axis condition at rho = 0.
struct BoundaryData {
  enum class Axis { automatic, zero_flux, zero_value };

  std::function<double(double xn)> lateral;
  Axis axis = Axis::automatic;

  static BoundaryData constant(double c) {
    return BoundaryData{[c](double) { return c; }, Axis::automatic};
  }
};

}  // namespace flatneck
