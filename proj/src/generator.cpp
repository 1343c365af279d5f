#include "selenc/generator.hpp"

#include <random>

#include "selenc/bitstream.hpp"
#include "selenc/error.hpp"

namespace selenc {

namespace {

// Baseline profile, level 3.0; contents are never parsed.
constexpr std::uint8_t kSpsRbsp[] = {0x42, 0xc0, 0x1e, 0xda, 0x02, 0x80, 0xbf, 0xe5, 0x80};
constexpr std::uint8_t kPpsRbsp[] = {0xce, 0x3c, 0x80};

void append_nal(Bytes& out, std::uint8_t start_code_len, std::uint8_t header, ByteView rbsp) {
  if (start_code_len == 4) out.push_back(0x00);
  out.insert(out.end(), {0x00, 0x00, 0x01, header});
  const Bytes ebsp = rbsp_to_ebsp(rbsp);
  out.insert(out.end(), ebsp.begin(), ebsp.end());
}

Bytes slice_rbsp(bool idr, std::uint32_t payload_size, std::mt19937_64& rng) {
  BitWriter writer;
  writer.write_ue(0);              // first_mb_in_slice
  writer.write_ue(idr ? 7 : 0);    // slice_type
  writer.write_ue(0);              // pic_parameter_set_id
  writer.align_zero();

  Bytes rbsp = writer.bytes();
  while (rbsp.size() + 1 < payload_size) {
    const std::uint64_t r = rng();
    if (r % 24 == 0) {
      // Zero run: two or three zeros, then a byte that would need escaping.
      rbsp.push_back(0x00);
      rbsp.push_back(0x00);
      if ((r >> 8) % 2 == 0) rbsp.push_back(0x00);
      rbsp.push_back(static_cast<std::uint8_t>((r >> 16) % 4));
    } else {
      rbsp.push_back(static_cast<std::uint8_t>(r >> 24));
    }
  }
  rbsp.resize(payload_size - 1);
  rbsp.push_back(0x80);  // rbsp_stop_one_bit + alignment
  return rbsp;
}

}  // namespace

Bytes gen_test_stream(const TestStreamConfig& config) {
  if (config.gop == 0 || config.frames == 0) {
    throw Error(ErrorCode::InvalidArgument, "gop and frames must both be at least 1");
  }
  if (config.payload_size < 4) {
    throw Error(ErrorCode::InvalidArgument, "payload size must be at least 4 bytes");
  }
  std::mt19937_64 rng(config.seed);
  Bytes out;
  append_nal(out, 4, 0x67, kSpsRbsp);
  append_nal(out, 4, 0x68, kPpsRbsp);
  for (std::uint32_t frame = 0; frame < config.frames; ++frame) {
    const bool idr = frame % config.gop == 0;
    const Bytes rbsp = slice_rbsp(idr, config.payload_size, rng);
    append_nal(out, idr ? 4 : 3, idr ? 0x65 : 0x41, rbsp);
  }
  return out;
}

}  // namespace selenc
