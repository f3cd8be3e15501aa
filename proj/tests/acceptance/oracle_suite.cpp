// Property and oracle acceptance suite: runs without external datasets and
// prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>

#include "../oracles/oracles.hpp"

int main() {
  const auto start = std::chrono::steady_clock::now();
  const auto results = normprobe::oracle::run_oracle_suite();
  int failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] criterion %2d: %s%s%s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.empty() ? "" : " -- ", r.detail.c_str());
    failures += r.passed ? 0 : 1;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%zu criteria, %d failed, %.1f s\n", results.size(), failures, seconds);
  return failures == 0 ? 0 : 1;
}
