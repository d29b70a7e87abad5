#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fjs {

enum class VerifyScale { small, full };

struct VerifyOptions {
  VerifyScale scale = VerifyScale::small;
  std::uint64_t seed = 1;
  // Perturbs one row of the fundamental matrix before its checks run.
  bool inject_fault = false;
  // Receives one human-readable line per property.
  std::function<void(const std::string&)> on_line;
};

struct PropertyOutcome {
  std::string name;  // "module.property"
  std::size_t passed = 0;
  std::size_t failed = 0;
  double worst = 0.0;  // largest measured deviation (property-specific unit)
  std::string first_failure;
};

struct VerifySummary {
  std::vector<PropertyOutcome> properties;
  bool all_passed() const;
  const PropertyOutcome* find(const std::string& name) const;
};

// Runs the invariant suites of every module on seeded random instances and
// the hand fixtures. Full scale adds the n <= 7 forest sweep and larger counts.
VerifySummary run_verify(const VerifyOptions& options);

}  // namespace fjs
