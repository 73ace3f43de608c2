#include "flatneck/problem.hpp"

#include <stdexcept>
#include <string>

#include "flatneck/harmonics.hpp"

namespace flatneck {

void ProblemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (n < 2) fail("n must be >= 2");
  if (!(epsilon > 0.0 && epsilon < 0.25)) fail("epsilon must be in (0, 1/4)");
  if (!(a > 0.0)) fail("a must be > 0");
  if (!(r0 >= 0.0 && r0 < 0.5)) fail("r0 must be in [0, 1/2)");
  if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must be in (0, 1)");
  if (mode_k < 0) fail("mode_k must be >= 0");
  const int nk = harmonics::mode_count(mode_k, n);
  if (nk <= 0) fail("mode_k has no harmonics in dimension n");
  if (mode_i < 1 || mode_i > nk) fail("mode_i must be in [1, N(k)]");
  if (remainder_c < 0.0) fail("remainder_c must be >= 0");
}

double ProblemConfig::mode_eigenvalue() const {
  return harmonics::eigenvalue(mode_k, n);
}

}  // namespace flatneck
