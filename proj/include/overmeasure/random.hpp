#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace overmeasure {

/// Identifies one reproducible random sequence. Equal (seed, stream_index)
/// pairs give identical draws on every run and platform.
struct SeededStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;

  friend bool operator==(const SeededStream&, const SeededStream&) = default;
};

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Uniform and standard-normal draws from one block of a stream.
///
/// The Philox counter is laid out as [position, block, stream_index lo,
/// stream_index hi] with the seed as key, so every (seed, stream_index,
/// block) triple addresses a disjoint sequence of 2^32 Philox outputs.
/// Monte Carlo drivers give each fixed-size block of trials its own
/// generator, which is what makes results independent of how the blocks
/// are spread over threads.
class NormalGenerator {
 public:
  explicit NormalGenerator(SeededStream stream, std::uint32_t block = 0);

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via Box-Muller; variates are produced in pairs.
  double normal();

 private:
  std::uint64_t next_bits();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t block_;
  std::uint64_t stream_index_;
  std::uint32_t position_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_words_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// `count` independent standard-normal variates from block 0 of `stream`.
std::vector<double> sample_standard_normal(SeededStream stream, std::size_t count);

}  // namespace overmeasure
