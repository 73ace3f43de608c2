#pragma once

#include <string>
#include <vector>

namespace flatneck {

// Fault injection for harness self-tests: drift_sign flips the sign of the
// drift inside the quadrature route of the integrating-factor agreement
// check, which must trip exactly that check.
enum class VerifyFault { none, drift_sign };

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  std::string to_table() const;  // deterministic bytes (no timings)
};

// The full invariant suite: geometry identities, harmonics orthonormality,
// integrating-factor closed form, homogeneous-solution bounds, manufactured
// solutions for both solvers, zero-data and constant solves, slab gradient.
VerifyReport run_verify_suite(VerifyFault fault = VerifyFault::none);

}  // namespace flatneck
