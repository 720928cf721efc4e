// Acceptance suite: runs the full verification battery and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>

#include "qgossip/experiments.hpp"

int main() {
  // pinned: the suite must be reproducible run to run
  constexpr std::uint64_t kSeed = 20110915;

  const auto start = std::chrono::steady_clock::now();
  const qgossip::VerifyReport report =
      qgossip::verify_suite(qgossip::VerifyDepth::Full, kSeed);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  int criterion = 0;
  for (const qgossip::CheckResult& check : report.checks) {
    ++criterion;
    std::printf("[%s] criterion %2d  %-28s %s\n", check.passed ? "PASS" : "FAIL", criterion,
                check.name.c_str(), check.detail.c_str());
  }
  std::printf("%s (%d criteria, %.2f s, seed %llu)\n",
              report.all_passed() ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              criterion, elapsed, static_cast<unsigned long long>(kSeed));
  return report.all_passed() ? 0 : 1;
}
