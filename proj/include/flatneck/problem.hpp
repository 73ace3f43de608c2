#pragma once

#include <cstdint>

namespace flatneck {

// Parameters of one neck configuration: ambient dimension, gap width, the
// shape of the inclusion boundaries near their closest points, and the
// angular mode under study. r0 == 0 selects the strictly convex control
// case (no flat cap), which is the blow-up reference experiment.
struct ProblemConfig {
  int n = 3;                 // ambient dimension, >= 2
  double epsilon = 1e-2;     // gap width, in (0, 1/4)
  double a = 1.0;            // curvature amplitude of the quadratic departure, > 0
  double r0 = 0.25;          // flat radius, in [0, 1/2)
  double gamma = 0.5;        // Hoelder exponent of the profile remainder, in (0, 1)
  int mode_k = 1;            // angular mode degree, >= 0
  int mode_i = 1;            // index within the degree, 1..N(k)
  double remainder_c = 0.0;  // amplitude of the optional (r-r0)_+^(2+gamma) term

  // Throws std::invalid_argument with the offending field named.
  void validate() const;

  bool convex_control() const { return r0 == 0.0; }

  // Eigenvalue of the angular mode: k(k+n-3).
  double mode_eigenvalue() const;
};

}  // namespace flatneck
