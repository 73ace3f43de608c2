#include "flatneck/oracle3d.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "flatneck/errors.hpp"
#include "flatneck/geometry.hpp"

namespace flatneck {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

}  // namespace

Oracle3dResult mode_preservation_oracle(const ProblemConfig& cfg, int nodes_per_dim) {
  if (cfg.n != 3)
    throw std::invalid_argument("mode_preservation_oracle: n = 3 only");
  if (nodes_per_dim < 17)
    throw std::invalid_argument("mode_preservation_oracle: need >= 17 nodes per dim");
  const Profile prof(cfg);
  const double eps = cfg.epsilon;

  const int N = nodes_per_dim;
  const double hx = 2.0 / (N - 1);
  const double zlo = -0.5 * eps;
  const double zhi = 0.5 * eps + prof.h1(1.0);
  const double hz = (zhi - zlo) / (N - 1);

  auto xc = [&](int i) { return -1.0 + i * hx; };
  auto zc = [&](int k) { return zlo + k * hz; };

  // voxel classification: inside the truncated neck (closed in z, open in r)
  auto inside = [&](int i, int j, int k) -> bool {
    if (i < 0 || j < 0 || k < 0 || i >= N || j >= N || k >= N) return false;
    const double r = std::hypot(xc(i), xc(j));
    if (r >= 1.0 - 1e-12) return false;
    const double z = zc(k);
    return z >= zlo - 1e-12 && z <= 0.5 * eps + prof.h1(r) + 1e-12;
  };

  std::vector<int> id(static_cast<std::size_t>(N) * N * N, -1);
  auto lin = [&](int i, int j, int k) {
    return (static_cast<std::size_t>(i) * N + j) * N + k;
  };
  int n_unknown = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        if (inside(i, j, k)) id[lin(i, j, k)] = n_unknown++;

  const double wx = 1.0 / (hx * hx);
  const double wz = 1.0 / (hz * hz);
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(n_unknown) * 7);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_unknown);

  const int di[6] = {1, -1, 0, 0, 0, 0};
  const int dj[6] = {0, 0, 1, -1, 0, 0};
  const int dk[6] = {0, 0, 0, 0, 1, -1};

  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      for (int k = 0; k < N; ++k) {
        const int row = id[lin(i, j, k)];
        if (row < 0) continue;
        double diag = 0.0;
        for (int f = 0; f < 6; ++f) {
          const int ii = i + di[f], jj = j + dj[f], kk = k + dk[f];
          const double w = f < 4 ? wx : wz;
          if (inside(ii, jj, kk)) {
            diag += w;
            trips.emplace_back(row, id[lin(ii, jj, kk)], -w);
            continue;
          }
          // outside: lateral exit is Dirichlet phi = x_1, vertical exit is
          // the insulated staircase face (dropped)
          const bool lateral = (ii < 0 || jj < 0 || ii >= N || jj >= N ||
                                std::hypot(xc(ii), xc(jj)) >= 1.0 - 1e-12);
          if (lateral) {
            diag += w;
            rhs(row) += w * xc(ii);
          }
        }
        trips.emplace_back(row, row, diag);
      }
    }
  }

  SpMat A(n_unknown, n_unknown);
  A.setFromTriplets(trips.begin(), trips.end());

  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-12);
  cg.setMaxIterations(20000);
  cg.compute(A);
  Eigen::VectorXd u = cg.solve(rhs);
  if (cg.info() != Eigen::Success)
    throw SolverError("mode_preservation_oracle: CG did not converge, error " +
                      std::to_string(cg.error()));

  Oracle3dResult out;
  out.unknowns = static_cast<std::size_t>(n_unknown);
  out.residual = (A * u - rhs).norm() / std::max(rhs.norm(), 1e-300);

  // trilinear interpolation of the voxel solution; valid only if all eight
  // surrounding nodes are inside
  auto interp = [&](double x, double y, double z, double& val) -> bool {
    const double fi = (x + 1.0) / hx, fj = (y + 1.0) / hx, fk = (z - zlo) / hz;
    const int i0 = static_cast<int>(std::floor(fi));
    const int j0 = static_cast<int>(std::floor(fj));
    const int k0 = static_cast<int>(std::floor(fk));
    if (i0 < 0 || j0 < 0 || k0 < 0 || i0 + 1 >= N || j0 + 1 >= N || k0 + 1 >= N)
      return false;
    const double tx = fi - i0, ty = fj - j0, tz = fk - k0;
    val = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          const int r = id[lin(i0 + a, j0 + b, k0 + c)];
          if (r < 0) return false;
          const double w = (a ? tx : 1 - tx) * (b ? ty : 1 - ty) * (c ? tz : 1 - tz);
          val += w * u(r);
        }
    return true;
  };

  // ring projection: modal energies over radii x z-levels x 64 angles
  const int m_max = 8, n_theta = 64, n_lev = 5;
  out.cos_energies.assign(m_max + 1, 0.0);
  out.sin_energies.assign(m_max + 1, 0.0);
  const double two_pi = 2.0 * std::numbers::pi;
  for (double rl = 0.15; rl <= 0.86; rl += 0.10) {
    const double ztop = 0.5 * eps + prof.h1(rl);
    for (int lev = 0; lev < n_lev; ++lev) {
      const double margin = 2.0 * hz;
      const double z = (zlo + margin) +
                       (ztop - zlo - 2.0 * margin) * lev / (n_lev - 1);
      if (z <= zlo || z >= ztop) continue;
      std::vector<double> ring(n_theta);
      bool full = true;
      for (int q = 0; q < n_theta && full; ++q) {
        const double th = two_pi * q / n_theta;
        full = interp(rl * std::cos(th), rl * std::sin(th), z, ring[q]);
      }
      if (!full) continue;
      for (int m = 0; m <= m_max; ++m) {
        double cc = 0.0, ss = 0.0;
        for (int q = 0; q < n_theta; ++q) {
          const double th = two_pi * q / n_theta;
          cc += ring[q] * std::cos(m * th);
          ss += ring[q] * std::sin(m * th);
        }
        cc *= 2.0 / n_theta;
        ss *= 2.0 / n_theta;
        if (m == 0) cc *= 0.5;
        out.cos_energies[m] += cc * cc;
        out.sin_energies[m] += ss * ss;
      }
    }
  }
  double total = 0.0;
  for (int m = 0; m <= m_max; ++m)
    total += out.cos_energies[m] + out.sin_energies[m];
  out.energy_fraction = total > 0.0 ? out.cos_energies[1] / total : 0.0;
  return out;
}

}  // namespace flatneck
