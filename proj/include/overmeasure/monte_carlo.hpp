#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "overmeasure/error.hpp"
#include "overmeasure/random.hpp"

namespace overmeasure {

inline constexpr std::uint64_t kTrialsPerBlock = 4096;

struct MonteCarloOptions {
  SeededStream stream;
  unsigned workers = 0;  // 0: one per hardware thread
};

/// Hit/trial counter for binomial estimates.
struct CountTally {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;

  friend CountTally operator+(CountTally a, const CountTally& b) {
    return {a.hits + b.hits, a.trials + b.trials};
  }
};

/// Neumaier-compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

/// First two moments of a sample.
struct MomentTally {
  CompensatedSum sum;
  CompensatedSum sum_sq;
  std::uint64_t count = 0;

  void add(double x) {
    sum.add(x);
    sum_sq.add(x * x);
    ++count;
  }
  friend MomentTally operator+(MomentTally a, const MomentTally& b) {
    a.sum.add(b.sum.sum);
    a.sum.add(b.sum.carry);
    a.sum_sq.add(b.sum_sq.sum);
    a.sum_sq.add(b.sum_sq.carry);
    a.count += b.count;
    return a;
  }
};

namespace detail {

template <class Tally>
Tally pairwise_reduce(const std::vector<Tally>& parts, std::size_t lo,
                      std::size_t hi) {
  if (hi - lo == 1) return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_reduce(parts, lo, mid) + pairwise_reduce(parts, mid, hi);
}

}  // namespace detail

/// Runs `trials` Monte Carlo trials in fixed blocks of kTrialsPerBlock.
/// Block b draws from NormalGenerator(stream, b) and yields one Tally via
/// `run_block(generator, trials_in_block)`; tallies are combined by a
/// pairwise tree over block order. Neither the draws nor the reduction
/// depend on the worker count, so the result is bit-identical for any
/// partitioning.
template <class Tally, class BlockFn>
Tally run_partitioned(std::uint64_t trials, const MonteCarloOptions& options,
                      BlockFn&& run_block) {
  if (trials == 0) throw_domain("Monte Carlo run needs at least one trial");
  const std::uint64_t blocks = (trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
  if (blocks > UINT32_MAX) throw_domain("too many Monte Carlo trials");

  std::vector<Tally> parts(blocks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::uint64_t b = next++; b < blocks; b = next++) {
      try {
        const std::uint64_t count =
            std::min(kTrialsPerBlock, trials - b * kTrialsPerBlock);
        NormalGenerator gen(options.stream, static_cast<std::uint32_t>(b));
        parts[b] = run_block(gen, count);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = blocks;
      }
    }
  };

  unsigned workers = options.workers != 0 ? options.workers
                                          : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, blocks));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return detail::pairwise_reduce(parts, 0, parts.size());
}

}  // namespace overmeasure
