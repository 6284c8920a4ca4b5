// Runs every acceptance criterion and prints one verdict per criterion.
// Usage: gpd_acceptance [--seed S] [criterion-or-group ...]

#include <cstdio>
#include <cstring>
#include <exception>
#include <string>

#include "gpd/acceptance.hpp"

int main(int argc, char** argv) {
  gpd::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      options.seed = std::stoull(argv[++i]);
    } else {
      options.only.emplace_back(argv[i]);
    }
  }
  try {
    int failed = 0;
    for (const auto& r : gpd::run_acceptance(options)) {
      std::fputs(gpd::format_result(r).c_str(), stdout);
      std::fflush(stdout);
      if (!r.passed) ++failed;
    }
    std::printf("%s\n", failed == 0 ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance: %s\n", e.what());
    return 64;
  }
}
