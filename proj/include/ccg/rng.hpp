#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace ccg {

// Random stream keyed by (seed, stream id). Values are identical on every
// platform: the engine and seed_seq are fully specified by the standard and
// the conversions below avoid the implementation-defined distributions.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id);

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform index in [0, n).
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ccg
