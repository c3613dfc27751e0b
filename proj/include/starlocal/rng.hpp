#pragma once

#include <array>
#include <cstdint>

namespace starlocal {

// Philox4x32-10 counter-based generator.  Chosen because streams are
// cheap: any (seed, stream) pair indexes an independent sequence without
// jump-ahead state, which is what makes chunked Monte Carlo reproducible
// under any thread count.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key);
};

// Sequential view of one Philox stream.  key = seed, counter = (stream,
// block index); each block yields four 32-bit words.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // 53-bit uniform in [0, 1).
  double next_double();
  // Uniform on the unit sphere: z = 2u-1, azimuth = 2*pi*v.
  std::array<double, 3> unit_vector();

 private:
  void refill();
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
};

}  // namespace starlocal
