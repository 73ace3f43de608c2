#include "flatneck/harmonics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flatneck::harmonics {

namespace {
constexpr double kPi = std::numbers::pi;
}

double eigenvalue(int k, int n) {
  if (k < 0) throw std::invalid_argument("eigenvalue: k must be >= 0");
  if (n < 2) throw std::invalid_argument("eigenvalue: n must be >= 2");
  return static_cast<double>(k) * (k + n - 3);
}

int mode_count(int k, int n) {
  if (k < 0 || n < 2) return 0;
  if (n == 2) return k <= 1 ? 1 : 0;
  if (n == 3) return k == 0 ? 1 : 2;
  if (k == 0) return 1;
  // dim of degree-k harmonics on S^{n-2}: C(k+n-3, k) - C(k+n-5, k-2)
  auto binom = [](long long m, long long j) -> long long {
    if (j < 0 || j > m) return 0;
    long long r = 1;
    for (long long t = 1; t <= j; ++t) r = r * (m - j + t) / t;
    return r;
  };
  const long long d = n - 2;  // sphere dimension
  return static_cast<int>(binom(k + d, k) - binom(k + d - 2, k - 2));
}

double sphere_measure(int n) {
  if (n == 2) return 2.0;
  if (n == 3) return 2.0 * kPi;
  // |S^{d}| with d = n-2: 2 pi^{(d+1)/2} / Gamma((d+1)/2)
  const double d = n - 2;
  return 2.0 * std::pow(kPi, (d + 1) / 2.0) / std::tgamma((d + 1) / 2.0);
}

SphereSamples circle_samples(int count) {
  if (count < 4) throw std::invalid_argument("circle_samples: need at least 4 nodes");
  SphereSamples s;
  s.angles.resize(count);
  s.weights.assign(count, 2.0 * kPi / count);
  s.values.assign(count, 0.0);
  for (int m = 0; m < count; ++m) s.angles[m] = 2.0 * kPi * m / count;
  return s;
}

std::vector<double> basis_eval(ModeIndex m, std::span<const double> angles, int n) {
  if (n != 3) throw std::invalid_argument("basis_eval: explicit bases only for n = 3");
  if (m.k < 0) throw std::invalid_argument("basis_eval: k must be >= 0");
  if (m.i < 1 || m.i > mode_count(m.k, 3))
    throw std::invalid_argument("basis_eval: i out of range for degree k");
  std::vector<double> out(angles.size());
  if (m.k == 0) {
    const double c = 1.0 / std::sqrt(2.0 * kPi);
    for (std::size_t j = 0; j < angles.size(); ++j) out[j] = c;
    return out;
  }
  const double c = 1.0 / std::sqrt(kPi);
  for (std::size_t j = 0; j < angles.size(); ++j) {
    const double kt = m.k * angles[j];
    out[j] = c * (m.i == 1 ? std::cos(kt) : std::sin(kt));
  }
  return out;
}

double project(const SphereSamples& field, ModeIndex m) {
  if (field.angles.size() != field.values.size() ||
      field.angles.size() != field.weights.size())
    throw std::invalid_argument("project: inconsistent sample arrays");
  const std::size_t need = static_cast<std::size_t>(4 * m.k + 8);
  if (field.angles.size() < need)
    throw std::invalid_argument("project: insufficient angular resolution for degree k");
  const std::vector<double> y = basis_eval(m, field.angles);
  double acc = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j)
    acc += field.values[j] * y[j] * field.weights[j];
  return acc;
}

SphereSamples synthesize(std::span<const ModeIndex> modes,
                         std::span<const double> coeffs,
                         int node_count) {
  if (modes.size() != coeffs.size())
    throw std::invalid_argument("synthesize: modes/coeffs size mismatch");
  SphereSamples s = circle_samples(node_count);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const std::vector<double> y = basis_eval(modes[m], s.angles);
    for (std::size_t j = 0; j < y.size(); ++j) s.values[j] += coeffs[m] * y[j];
  }
  return s;
}

double max_abs_basis(int k, int n) {
  if (n == 2) return 1.0 / std::sqrt(2.0);
  if (n == 3) return k == 0 ? 1.0 / std::sqrt(2.0 * kPi) : 1.0 / std::sqrt(kPi);
  return 1.0;  // no explicit basis; rates are unaffected by the normalization
}

double max_abs_basis_gradient(int k, int n) {
  if (n == 2) return 0.0;  // S^0 carries no angular derivative
  if (n == 3) return k / std::sqrt(kPi);
  return std::sqrt(eigenvalue(k, n));
}

}  // namespace flatneck::harmonics
