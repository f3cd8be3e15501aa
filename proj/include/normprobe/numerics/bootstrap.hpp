#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "normprobe/error.hpp"
#include "normprobe/numerics/stats.hpp"

namespace normprobe {

struct ConfidenceInterval {
  double low = 0;
  double high = 0;
  double level = 0.95;
  int resamples = 0;
  std::uint64_t seed = 0;

  bool contains(double x) const { return low <= x && x <= high; }
};

struct BootstrapOptions {
  int resamples = 10000;
  double level = 0.95;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

namespace detail {

/// Generator for resample `index`; independent of which thread draws it.
inline std::mt19937_64 resample_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

inline double resampled_median(std::span<const double> sample, std::mt19937_64& engine,
                               std::vector<double>& scratch) {
  std::uniform_int_distribution<std::size_t> pick(0, sample.size() - 1);
  scratch.resize(sample.size());
  for (auto& x : scratch) x = sample[pick(engine)];
  return median(std::span<const double>(scratch));
}

}  // namespace detail

/// Percentile bootstrap interval for median(a) - median(b). Each resample is
/// seeded from (seed, resample index), so the bounds do not depend on the
/// number of worker threads.
inline ConfidenceInterval bootstrap_median_diff(std::span<const double> a, std::span<const double> b,
                                                const BootstrapOptions& options = {}) {
  if (a.empty() || b.empty()) throw ArgumentError("bootstrap_median_diff: both samples must be nonempty");
  if (options.resamples < 100) throw ArgumentError("bootstrap_median_diff: need at least 100 resamples");
  if (!(options.level > 0 && options.level < 1)) throw ArgumentError("bootstrap_median_diff: level must be in (0, 1)");

  std::vector<double> stats(static_cast<std::size_t>(options.resamples));
  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> scratch;
    for (std::size_t r = begin; r < end; ++r) {
      auto engine = detail::resample_engine(options.seed, r);
      const double ma = detail::resampled_median(a, engine, scratch);
      const double mb = detail::resampled_median(b, engine, scratch);
      stats[r] = ma - mb;
    }
  };

  const std::size_t n = stats.size();
  const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, n);
  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t)
      pool.emplace_back(work, n * t / workers, n * (t + 1) / workers);
  }

  std::sort(stats.begin(), stats.end());
  const double tail = (1.0 - options.level) / 2.0;
  ConfidenceInterval ci;
  ci.low = sorted_quantile(std::span<const double>(stats), tail);
  ci.high = sorted_quantile(std::span<const double>(stats), 1.0 - tail);
  ci.level = options.level;
  ci.resamples = options.resamples;
  ci.seed = options.seed;
  return ci;
}

}  // namespace normprobe
