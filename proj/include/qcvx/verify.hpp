#pragma once
// Property suites run by `qcvx verify` and the acceptance binary. Each suite is
// deterministic in its seed and compares library results against independent
// routes (brute-force kernels, closed forms, corpus oracles).
#include <cstdint>
#include <string>
#include <vector>

namespace qcvx::verify {

struct VerifyReport {
  std::string suite;
  std::size_t cases = 0;
  std::size_t failures = 0;
  /// Largest normalized defect seen; each suite states its threshold in `note`.
  double worst_defect = 0.0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;  // seconds
  std::string note;

  bool passed() const { return cases > 0 && failures == 0; }
};

/// In acceptance-criterion order.
const std::vector<std::string>& suite_names();

/// Throws DomainError for an unknown name.
VerifyReport run_suite(const std::string& name, std::uint64_t seed);

}  // namespace qcvx::verify
