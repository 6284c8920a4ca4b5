#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gpd {

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<std::string> groups;
  bool passed = false;
  // One line per measured quantity with its bound.
  std::vector<std::string> details;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  // Criterion numbers or group names; empty runs everything.
  std::vector<std::string> only;
};

/// Group names accepted by `only`.
std::vector<std::string> acceptance_groups();

/// Runs the selected criteria in order. A criterion that throws is reported
/// as failed with the exception text.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// "[PASS] 3 identities: ..." followed by indented detail lines.
std::string format_result(const CriterionResult& result);

}  // namespace gpd
