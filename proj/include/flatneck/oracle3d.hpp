#pragma once

#include <cstddef>
#include <vector>

#include "flatneck/problem.hpp"

namespace flatneck {

// Coarse voxel (staircase-Neumann) solve of the full 3D neck problem with
// boundary data phi = x_1, followed by angular projection of ring samples.
// Validates that a single-mode boundary datum produces a single-mode
// solution; used as an orthogonality oracle, not a rate oracle.
struct Oracle3dResult {
  double energy_fraction = 0.0;  // share of modal energy in the (1, cos) mode
  double residual = 0.0;         // CG relative residual
  std::size_t unknowns = 0;
  std::vector<double> cos_energies;  // per degree 0..m_max
  std::vector<double> sin_energies;
};

Oracle3dResult mode_preservation_oracle(const ProblemConfig& cfg,
                                        int nodes_per_dim = 33);

}  // namespace flatneck
