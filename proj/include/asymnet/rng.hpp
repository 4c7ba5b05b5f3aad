// Copyright 2026 The asymnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASYMNET_RNG_HPP
#define ASYMNET_RNG_HPP

#include <array>
#include <cstdint>

namespace asymnet {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3", SC'11). Maps a 128-bit counter and a 64-bit key to
/// 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based generator. The value of the k-th draw depends only on
/// (seed, stream, k): the counter words are (k_lo, k_hi, stream_lo, stream_hi)
/// and the key is the 64-bit seed. Each draw consumes exactly one Philox block.
///
/// Distributions are implemented here rather than through <random> so that
/// sequences are identical across standard libraries:
///   uniform()  53-bit mantissa from the first two words, in [0, 1)
///   normal()   Box-Muller (cosine branch) on two 53-bit uniforms
///   sign()     +1/-1 from the low bit of the first word
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  std::uint64_t position() const noexcept { return counter_; }

  /// Independent generator for sub-task `index`. Derivation is a pure
  /// function of (stream, index), so results do not depend on the order in
  /// which substreams are created or on thread count.
  Rng substream(std::uint64_t index) const;

  std::array<std::uint32_t, 4> next_block();
  std::uint64_t next_u64();
  double uniform();
  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_pos();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double sign();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer; used to derive substream identifiers.
std::uint64_t mix64(std::uint64_t x);

}  // namespace asymnet

#endif  // ASYMNET_RNG_HPP
