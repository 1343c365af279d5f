#pragma once

#include <cstdint>

#include "selenc/bytes.hpp"

namespace selenc {

struct TestStreamConfig {
  std::uint32_t gop = 12;
  std::uint32_t frames = 60;
  /// RBSP size of every slice NAL, slice header included. At least 4.
  std::uint32_t payload_size = 512;
  std::uint64_t seed = 1;
};

/// Synthetic Annex B stream: SPS, PPS, then one slice NAL per frame. Frames
/// with index % gop == 0 are IDR slices (slice_type 7, 4-byte start code);
/// the rest are P slices (type 1, slice_type 0, 3-byte start code). Slice
/// payloads are seeded filler peppered with zero runs so that emulation
/// prevention is exercised. Deterministic in the config.
Bytes gen_test_stream(const TestStreamConfig& config);

}  // namespace selenc
