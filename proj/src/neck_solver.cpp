#include "flatneck/neck_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "flatneck/errors.hpp"
#include "flatneck/harmonics.hpp"

namespace flatneck {

namespace {

using Clock = std::chrono::steady_clock;
using Triplet = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double>;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

constexpr double kGp2 = 0.5773502691896257;  // 1/sqrt(3)

// non-uniform three-point derivative along the radial index at (i, j)
double radial_deriv(const Field2D& f, std::size_t i, std::size_t j) {
  const auto& r = f.grid->rho();
  const std::size_t nr = r.size();
  if (i > 0 && i + 1 < nr) {
    const double hl = r[i] - r[i - 1], hr = r[i + 1] - r[i];
    const double dl = (f.at(i, j) - f.at(i - 1, j)) / hl;
    const double dr = (f.at(i + 1, j) - f.at(i, j)) / hr;
    return (hl * dr + hr * dl) / (hl + hr);
  }
  if (i == 0) {
    const double h0 = r[1] - r[0], h1 = r[2] - r[1];
    return -(2 * h0 + h1) / (h0 * (h0 + h1)) * f.at(0, j) +
           (h0 + h1) / (h0 * h1) * f.at(1, j) - h0 / (h1 * (h0 + h1)) * f.at(2, j);
  }
  const double hn = r[nr - 1] - r[nr - 2], hm = r[nr - 2] - r[nr - 3];
  return (2 * hn + hm) / (hn * (hn + hm)) * f.at(nr - 1, j) -
         (hn + hm) / (hn * hm) * f.at(nr - 2, j) +
         hn / (hm * (hn + hm)) * f.at(nr - 3, j);
}

// uniform three-point derivative along the vertical index at (i, j)
double vertical_deriv(const Field2D& f, std::size_t i, std::size_t j) {
  const auto& y = f.grid->yn();
  const std::size_t nz = y.size();
  const double dy = y[1] - y[0];
  if (j > 0 && j + 1 < nz) return (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * dy);
  if (j == 0)
    return (-3.0 * f.at(i, 0) + 4.0 * f.at(i, 1) - f.at(i, 2)) / (2.0 * dy);
  return (3.0 * f.at(i, nz - 1) - 4.0 * f.at(i, nz - 2) + f.at(i, nz - 3)) /
         (2.0 * dy);
}

enum class NodeKind : char { free_node = 0, dirichlet_axis = 1, dirichlet_lateral = 2 };

struct Assembled {
  SpMat K;             // full stiffness, no boundary elimination
  Eigen::VectorXd b;   // full load
  std::vector<NodeKind> kind;
  Eigen::VectorXd dval;  // Dirichlet values where kind != free
};

Assembled assemble(const Grid2D& grid, const ManufacturedMode* mms) {
  const ProblemConfig& cfg = grid.config();
  const Profile& prof = grid.profile();
  const auto& rho = grid.rho();
  const auto& yn = grid.yn();
  const std::size_t nr = rho.size(), nz = yn.size();
  const std::size_t n_nodes = nr * nz;
  const double lambda = cfg.mode_eigenvalue();

  Assembled out;
  out.b = Eigen::VectorXd::Zero(n_nodes);
  out.kind.assign(n_nodes, NodeKind::free_node);
  out.dval = Eigen::VectorXd::Zero(n_nodes);

  std::vector<Triplet> trips;
  trips.reserve(16 * (nr - 1) * (nz - 1) * 4);

  // corner offsets in (rho, yn) index space
  const int ci[4] = {0, 1, 0, 1};
  const int cj[4] = {0, 0, 1, 1};

  for (std::size_t ei = 0; ei + 1 < nr; ++ei) {
    for (std::size_t ej = 0; ej + 1 < nz; ++ej) {
      const double dr = rho[ei + 1] - rho[ei];
      const double dy = yn[ej + 1] - yn[ej];
      std::size_t gidx[4];
      for (int a = 0; a < 4; ++a) gidx[a] = grid.idx(ei + ci[a], ej + cj[a]);

      for (int qx = 0; qx < 2; ++qx) {
        for (int qy = 0; qy < 2; ++qy) {
          const double xi = qx == 0 ? -kGp2 : kGp2;
          const double eta = qy == 0 ? -kGp2 : kGp2;
          const double rq = rho[ei] + 0.5 * (1.0 + xi) * dr;
          const double yq = yn[ej] + 0.5 * (1.0 + eta) * dy;
          const double wq = 0.25 * dr * dy;  // unit Gauss weights

          const double weight = cfg.n == 2 ? 1.0 : std::pow(rq, cfg.n - 2);
          const double g = cfg.epsilon + prof.h1(rq) - prof.h2(rq);
          const double t = prof.tau(rq, yq);
          const double mrr = weight * g;
          const double mrn = weight * t;
          const double mnn =
              weight * (4.0 * cfg.epsilon * cfg.epsilon + t * t) / g;
          const double creact =
              lambda > 0.0 ? lambda * g * std::pow(rq, cfg.n - 4) : 0.0;

          // bilinear shapes and their derivatives at (xi, eta)
          double N[4], Nr[4], Ny[4];
          for (int a = 0; a < 4; ++a) {
            const double sx = ci[a] == 0 ? -1.0 : 1.0;
            const double sy = cj[a] == 0 ? -1.0 : 1.0;
            N[a] = 0.25 * (1.0 + sx * xi) * (1.0 + sy * eta);
            Nr[a] = 0.25 * sx * (1.0 + sy * eta) * 2.0 / dr;
            Ny[a] = 0.25 * sy * (1.0 + sx * xi) * 2.0 / dy;
          }

          for (int a = 0; a < 4; ++a) {
            for (int bb = 0; bb < 4; ++bb) {
              const double kab = wq * (mrr * Nr[a] * Nr[bb] +
                                       mrn * (Nr[a] * Ny[bb] + Ny[a] * Nr[bb]) +
                                       mnn * Ny[a] * Ny[bb] +
                                       creact * N[a] * N[bb]);
              trips.emplace_back(static_cast<int>(gidx[a]),
                                 static_cast<int>(gidx[bb]), kab);
            }
            if (mms) {
              const double wsr = mms->w_rho(rq, yq);
              const double wsy = mms->w_yn(rq, yq);
              const double ws = mms->w(rq, yq);
              out.b(gidx[a]) += wq * (mrr * wsr * Nr[a] +
                                      mrn * (wsr * Ny[a] + wsy * Nr[a]) +
                                      mnn * wsy * Ny[a] + creact * ws * N[a]);
            }
          }
        }
      }
    }
  }

  out.K.resize(static_cast<int>(n_nodes), static_cast<int>(n_nodes));
  out.K.setFromTriplets(trips.begin(), trips.end());
  return out;
}

struct SolveOutput {
  Eigen::VectorXd w;
  SolveReport report;
};

SolveOutput solve_assembled(Assembled& sys, const Grid2D& grid) {
  const std::size_t n_nodes = grid.size();
  std::vector<int> free_of(n_nodes, -1);
  std::size_t n_free = 0;
  for (std::size_t i = 0; i < n_nodes; ++i)
    if (sys.kind[i] == NodeKind::free_node) free_of[i] = static_cast<int>(n_free++);

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
  for (std::size_t i = 0; i < n_nodes; ++i)
    if (free_of[i] >= 0) rhs(free_of[i]) = sys.b(i);

  std::vector<Triplet> ff;
  ff.reserve(sys.K.nonZeros());
  for (int col = 0; col < sys.K.outerSize(); ++col) {
    for (SpMat::InnerIterator it(sys.K, col); it; ++it) {
      const int r = static_cast<int>(it.row()), c = col;
      if (free_of[r] >= 0 && free_of[c] >= 0) {
        ff.emplace_back(free_of[r], free_of[c], it.value());
      } else if (free_of[r] >= 0) {
        rhs(free_of[r]) -= it.value() * sys.dval(c);
      }
    }
  }
  SpMat Kff(static_cast<int>(n_free), static_cast<int>(n_free));
  Kff.setFromTriplets(ff.begin(), ff.end());

  const auto t0 = Clock::now();
  Eigen::VectorXd xf;
  double pivot_min = 0.0, pivot_max = 0.0;
  // banded 2D systems factor cheaply well past 1e5 unknowns; the gap
  // anisotropy (~1/eps^2) makes incomplete-Cholesky CG a last resort only
  if (n_free <= 600000) {
    Eigen::SimplicialLDLT<SpMat> ldlt;
    ldlt.compute(Kff);
    if (ldlt.info() != Eigen::Success)
      throw SolverError("mode solve: LDLT factorization failed (matrix not SPD?)");
    xf = ldlt.solve(rhs);
    pivot_min = ldlt.vectorD().minCoeff();
    pivot_max = ldlt.vectorD().maxCoeff();
    if (!(pivot_min > 0.0))
      throw SolverError("mode solve: nonpositive pivot, condition estimate " +
                        std::to_string(pivot_max / std::max(pivot_min, 1e-300)));
  } else {
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        cg;
    cg.setTolerance(1e-13);
    cg.setMaxIterations(5000);
    cg.compute(Kff);
    if (cg.info() != Eigen::Success)
      throw SolverError("mode solve: CG preconditioner setup failed");
    xf = cg.solve(rhs);
    if (cg.info() != Eigen::Success)
      throw SolverError("mode solve: CG did not converge, error " +
                        std::to_string(cg.error()));
  }

  SolveOutput out;
  out.report.unknowns = n_free;
  out.report.solve_ms = ms_since(t0);

  const double rhs_norm = rhs.norm();
  const double res_norm = (Kff * xf - rhs).norm();
  out.report.residual = rhs_norm > 0.0 ? res_norm / rhs_norm : res_norm;
  if (!(out.report.residual <= 1e-10))
    throw SolverError("mode solve: relative residual " +
                      std::to_string(out.report.residual) +
                      " above tolerance 1e-10, pivot range [" +
                      std::to_string(pivot_min) + ", " + std::to_string(pivot_max) + "]");

  out.w = Eigen::VectorXd(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i)
    out.w(i) = free_of[i] >= 0 ? xf(free_of[i]) : sys.dval(i);

  // discrete conservation: boundary reactions vs the angular volume sink
  const Eigen::VectorXd resid_full = sys.K * out.w - sys.b;
  double fa = 0.0, fl = 0.0, all = 0.0, freesum = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    all += resid_full(i);
    if (sys.kind[i] == NodeKind::dirichlet_axis) fa += resid_full(i);
    else if (sys.kind[i] == NodeKind::dirichlet_lateral) fl += resid_full(i);
    else freesum += resid_full(i);
    if (sys.kind[i] != NodeKind::free_node) scale += std::abs(resid_full(i));
  }
  out.report.flux_axis = fa;
  out.report.flux_lateral = fl;
  out.report.reaction_sink = all;
  out.report.conservation_defect = std::abs(freesum) / std::max(scale, 1e-300);
  if (scale == 0.0) out.report.conservation_defect = 0.0;
  return out;
}

void apply_mode_bc(Assembled& sys, const Grid2D& grid, const BoundaryData& bc) {
  const ProblemConfig& cfg = grid.config();
  const std::size_t nr = grid.nr(), nz = grid.nz();

  BoundaryData::Axis axis = bc.axis;
  const BoundaryData::Axis wanted = cfg.mode_k >= 1 ? BoundaryData::Axis::zero_value
                                                    : BoundaryData::Axis::zero_flux;
  if (axis == BoundaryData::Axis::automatic) axis = wanted;
  if (axis != wanted)
    throw std::invalid_argument(
        "assemble_and_solve_mode: axis condition inconsistent with the mode degree");
  if (!bc.lateral)
    throw std::invalid_argument("assemble_and_solve_mode: missing lateral data");

  for (std::size_t j = 0; j < nz; ++j) {
    const std::size_t lat = grid.idx(nr - 1, j);
    sys.kind[lat] = NodeKind::dirichlet_lateral;
    sys.dval(lat) = bc.lateral(grid.xn(nr - 1, j));
    if (axis == BoundaryData::Axis::zero_value) {
      const std::size_t ax = grid.idx(0, j);
      sys.kind[ax] = NodeKind::dirichlet_axis;
      sys.dval(ax) = 0.0;
    }
  }
}

Field2D to_field(const Grid2D& grid, std::shared_ptr<const Grid2D> holder,
                 const Eigen::VectorXd& w, const std::string& name) {
  Field2D f(std::move(holder), name);
  for (std::size_t i = 0; i < grid.size(); ++i) f.v[i] = w(i);
  return f;
}

}  // namespace

Field2D assemble_and_solve_mode(const std::shared_ptr<const Grid2D>& grid,
                                const BoundaryData& bc, SolveReport* report) {
  const auto t0 = Clock::now();
  Assembled sys = assemble(*grid, nullptr);
  apply_mode_bc(sys, *grid, bc);
  const double assemble_ms = ms_since(t0);
  SolveOutput out = solve_assembled(sys, *grid);
  out.report.assemble_ms = assemble_ms;
  if (report) *report = out.report;
  return to_field(*grid, grid, out.w, "U_mode");
}

Field2D solve_manufactured(const std::shared_ptr<const Grid2D>& grid,
                           const ManufacturedMode& mms, SolveReport* report) {
  const auto t0 = Clock::now();
  Assembled sys = assemble(*grid, &mms);
  const ProblemConfig& cfg = grid->config();
  const std::size_t nr = grid->nr(), nz = grid->nz();
  for (std::size_t j = 0; j < nz; ++j) {
    const std::size_t lat = grid->idx(nr - 1, j);
    sys.kind[lat] = NodeKind::dirichlet_lateral;
    sys.dval(lat) = mms.w(1.0, grid->yn()[j]);
    if (cfg.mode_k >= 1) {
      const std::size_t ax = grid->idx(0, j);
      sys.kind[ax] = NodeKind::dirichlet_axis;
      sys.dval(ax) = mms.w(0.0, grid->yn()[j]);
    }
  }
  const double assemble_ms = ms_since(t0);
  SolveOutput out = solve_assembled(sys, *grid);
  out.report.assemble_ms = assemble_ms;
  if (report) *report = out.report;
  return to_field(*grid, grid, out.w, "U_manufactured");
}

double field_l2_error(const Field2D& numeric, const ManufacturedMode& mms) {
  const Grid2D& g = *numeric.grid;
  const auto& rho = g.rho();
  const auto& yn = g.yn();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.nr(); ++i) {
    const double wr = (i + 1 < g.nr() ? 0.5 * (rho[i + 1] - rho[i]) : 0.0) +
                      (i > 0 ? 0.5 * (rho[i] - rho[i - 1]) : 0.0);
    for (std::size_t j = 0; j < g.nz(); ++j) {
      const double wy = (j + 1 < g.nz() ? 0.5 * (yn[j + 1] - yn[j]) : 0.0) +
                        (j > 0 ? 0.5 * (yn[j] - yn[j - 1]) : 0.0);
      const double d = numeric.at(i, j) - mms.w(rho[i], yn[j]);
      acc += wr * wy * d * d;
    }
  }
  return std::sqrt(acc);
}

RadialFunction vertical_average(const Field2D& field) {
  const Grid2D& g = *field.grid;
  const auto& yn = g.yn();
  const double eps = g.config().epsilon;
  std::vector<double> avg(g.nr(), 0.0);
  for (std::size_t i = 0; i < g.nr(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < g.nz(); ++j)
      acc += 0.5 * (yn[j + 1] - yn[j]) * (field.at(i, j) + field.at(i, j + 1));
    avg[i] = acc / (2.0 * eps);
  }
  return RadialFunction(g.radial_grid(), std::move(avg));
}

FluxSources flux_and_sources(const Field2D& field) {
  const Grid2D& g = *field.grid;
  const ProblemConfig& cfg = g.config();
  const Profile& prof = g.profile();
  const auto& rho = g.rho();
  const auto& yn = g.yn();
  const double eps = cfg.epsilon;
  const double lambda = cfg.mode_eigenvalue();

  RadialFunction V = vertical_average(field);
  const std::vector<double>& Vp = V.node_slopes();

  std::vector<double> F(g.nr(), 0.0), A(g.nr(), 0.0), B(g.nr(), 0.0);
  std::vector<double> taudn(g.nz());
  for (std::size_t i = 0; i < g.nr(); ++i) {
    const double r = rho[i];
    for (std::size_t j = 0; j < g.nz(); ++j)
      taudn[j] = prof.tau(r, yn[j]) * vertical_deriv(field, i, j);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < g.nz(); ++j)
      acc += 0.5 * (yn[j + 1] - yn[j]) * (taudn[j] + taudn[j + 1]);
    const double e = prof.remainder(r);
    F[i] = acc / (2.0 * eps) + e * Vp[i];

    const double kap = prof.kappa(r);
    A[i] = -F[i] / kap;
    if (r > 0.0) {
      B[i] = -(prof.dkappa(r) * F[i] / (kap * kap) +
               (cfg.n - 2) * F[i] / (r * kap) -
               lambda * e * V.values()[i] / (r * r * kap));
    } else {
      B[i] = 0.0;  // F, e vanish at the axis; the (n-2)F/r limit is zero
    }
  }
  RadialGrid rg = g.radial_grid();
  return FluxSources{RadialFunction(rg, std::move(F)), RadialFunction(rg, std::move(A)),
                     RadialFunction(rg, std::move(B))};
}

GradParts gradient_parts(const Field2D& field, std::size_t i, std::size_t j) {
  const Grid2D& g = *field.grid;
  const ProblemConfig& cfg = g.config();
  const Profile& prof = g.profile();
  const double r = g.rho()[i];
  const double eps = cfg.epsilon;
  const double gp = eps + prof.h1(r) - prof.h2(r);
  const double wr = radial_deriv(field, i, j);
  const double wn = vertical_deriv(field, i, j);
  const double t = prof.tau(r, g.yn()[j]);
  GradParts out;
  out.planar = std::hypot(wr + t / gp * wn, 2.0 * eps / gp * wn);
  out.angular = (i == 0 ? std::abs(wr) : std::abs(field.at(i, j)) / r);
  return out;
}

Field2D gradient_field(const Field2D& field) {
  const Grid2D& g = *field.grid;
  const ProblemConfig& cfg = g.config();
  const double max_y = harmonics::max_abs_basis(cfg.mode_k, cfg.n);
  const double max_dy = harmonics::max_abs_basis_gradient(cfg.mode_k, cfg.n);

  Field2D out(field.grid, "|Du|");
  for (std::size_t i = 0; i < g.nr(); ++i) {
    for (std::size_t j = 0; j < g.nz(); ++j) {
      const GradParts p = gradient_parts(field, i, j);
      out.at(i, j) = std::max(p.planar * max_y,
                              max_dy > 0.0 ? p.angular * max_dy : 0.0);
    }
  }
  return out;
}

double averaged_equation_defect(const Field2D& field) {
  const Grid2D& g = *field.grid;
  const ProblemConfig& cfg = g.config();
  const Profile& prof = g.profile();
  const auto& rho = g.rho();
  const double lambda = cfg.mode_eigenvalue();

  RadialFunction V = vertical_average(field);
  FluxSources fs = flux_and_sources(field);
  const std::vector<double>& Vp = V.node_slopes();

  auto weight = [&cfg](double r) {
    return cfg.n == 2 ? 1.0 : std::pow(r, cfg.n - 2);
  };
  auto G = [&](std::size_t i) {
    return weight(rho[i]) * (prof.kappa(rho[i]) * Vp[i] + fs.flux.values()[i]);
  };

  // flux-balance defect of the averaged equation over [rho_0, rho_i]
  double maxdef = 0.0, maxg = 0.0;
  double sink = 0.0;
  const double g0 = G(0);
  for (std::size_t i = 1; i < g.nr(); ++i) {
    if (lambda > 0.0) {
      sink += gauss4_over_grid(
          V.grid(), rho[i - 1], rho[i], [&](double r) {
            return lambda * (prof.kappa(r) + prof.remainder(r)) * V(r) *
                   std::pow(r, cfg.n - 4);
          });
    }
    const double gi = G(i);
    maxdef = std::max(maxdef, std::abs(gi - g0 - sink));
    maxg = std::max(maxg, std::abs(gi));
  }
  return maxdef / std::max(maxg, 1e-300);
}

std::pair<double, double> derivative_bound_stats(const Field2D& field) {
  const Grid2D& g = *field.grid;
  const ProblemConfig& cfg = g.config();
  const Profile& prof = g.profile();
  const auto& rho = g.rho();
  const double max_y = harmonics::max_abs_basis(cfg.mode_k, cfg.n);
  const double max_dy = harmonics::max_abs_basis_gradient(cfg.mode_k, cfg.n);

  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < g.nr(); ++i) {
    const double r = rho[i];
    const double kap = prof.kappa(r);
    for (std::size_t j = 0; j < g.nz(); ++j) {
      const double wr = radial_deriv(field, i, j);
      const double wn = vertical_deriv(field, i, j);
      double horiz = std::abs(wr) * max_y;
      if (max_dy > 0.0) {
        const double ang = (i == 0 ? std::abs(wr) : std::abs(field.at(i, j)) / r);
        horiz = std::max(horiz, ang * max_dy);
      }
      s1 = std::max(s1, horiz * std::sqrt(kap));
      s2 = std::max(s2, std::abs(wn) * max_y * cfg.epsilon / kap);
    }
  }
  return {s1, s2};
}

}  // namespace flatneck
