#pragma once

#include <array>
#include <cstdint>

namespace olsb {

/// Philox4x32-10 block function (Salmon et al., Random123).
/// Pure function of (counter, key); the basis for every random draw in the
/// simulator so that a run replays bit-identically from its seed.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stream domains keep draws for different purposes independent.
enum class RngDomain : std::uint32_t {
  kLinkWeight = 1,
  kArrivals = 2,
  kLinkMeta = 3,
  kTest = 99,
};

/// Sequence of uniforms keyed by (seed, domain, stream, step).
///
/// Every (stream, step) pair names its own substream, so e.g. the weight of
/// link 7 at slot 1200 does not depend on how many other draws were made.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, RngDomain domain, std::uint32_t stream,
                std::uint64_t step);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double normal();

 private:
  std::uint64_t next_u64();

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

}  // namespace olsb
