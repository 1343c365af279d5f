#include "selenc/aes.hpp"

#include <algorithm>

#include "selenc/error.hpp"

namespace selenc::aes {

namespace {

constexpr std::array<std::uint8_t, 256> kSBox = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,};

constexpr std::array<std::uint8_t, kRounds> kRoundConstants = {0x01, 0x02, 0x04, 0x08, 0x10,
                                                               0x20, 0x40, 0x80, 0x1b, 0x36};

std::uint8_t xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0x00));
}

State mix_with(const State& s, const std::array<std::uint8_t, 4>& coeffs) {
  // Column polynomial times the fixed polynomial, reduced mod x^4 + 1: a
  // circulant matrix whose first row is `coeffs`.
  State out;
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t r = 0; r < 4; ++r) {
      std::uint8_t acc = 0;
      for (std::size_t k = 0; k < 4; ++k) {
        acc ^= gf_mul(coeffs[(k + 4 - r) % 4], s.at(k, c));
      }
      out.at(r, c) = acc;
    }
  }
  return out;
}

}  // namespace

const SBox& SBox::standard() {
  static const SBox box = [] {
    SBox b;
    b.forward_ = kSBox;
    b.rebuild_inverse();
    return b;
  }();
  return box;
}

SBox SBox::with_swapped_entries(std::uint8_t a, std::uint8_t b) {
  SBox box = standard();
  std::swap(box.forward_[a], box.forward_[b]);
  box.rebuild_inverse();
  return box;
}

void SBox::rebuild_inverse() {
  for (std::size_t i = 0; i < 256; ++i) inverse_[forward_[i]] = static_cast<std::uint8_t>(i);
}

std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t product = 0;
  while (b != 0) {
    if (b & 1) product ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return product;
}

State sub_bytes(const State& s, const SBox& box) {
  Block out = s.to_block();
  for (auto& b : out) b = box.forward(b);
  return State::from_block(out);
}

State inv_sub_bytes(const State& s, const SBox& box) {
  Block out = s.to_block();
  for (auto& b : out) b = box.inverse(b);
  return State::from_block(out);
}

State shift_rows(const State& s) {
  State out;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) out.at(r, c) = s.at(r, (c + r) % 4);
  }
  return out;
}

State inv_shift_rows(const State& s) {
  State out;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) out.at(r, (c + r) % 4) = s.at(r, c);
  }
  return out;
}

// c(x) = {03}x^3 + {01}x^2 + {01}x + {02}
State mix_columns(const State& s) { return mix_with(s, {0x02, 0x03, 0x01, 0x01}); }

// d(x) = {0b}x^3 + {0d}x^2 + {09}x + {0e}
State inv_mix_columns(const State& s) { return mix_with(s, {0x0e, 0x0b, 0x0d, 0x09}); }

State add_round_key(const State& s, const Block& round_key) {
  Block out = s.to_block();
  for (std::size_t i = 0; i < kBlockSize; ++i) out[i] ^= round_key[i];
  return State::from_block(out);
}

Word key_core(const Word& w, std::uint8_t round_constant, const SBox& box) {
  Word out = {box.forward(w[1]), box.forward(w[2]), box.forward(w[3]), box.forward(w[0])};
  out[0] ^= round_constant;
  return out;
}

KeySchedule::KeySchedule(ByteView key, const SBox& box) : box_(&box) {
  if (key.size() != kKeySize) {
    throw Error(ErrorCode::BadKeyLength,
                "AES-128 needs a 16-byte key, got " + std::to_string(key.size()));
  }
  for (std::size_t i = 0; i < kKeyWords; ++i) {
    std::copy_n(key.begin() + static_cast<std::ptrdiff_t>(4 * i), 4, words_[i].begin());
  }
  for (std::size_t i = kKeyWords; i < kScheduleWords; ++i) {
    Word temp = words_[i - 1];
    if (i % kKeyWords == 0) temp = key_core(temp, kRoundConstants[i / kKeyWords - 1], box);
    for (std::size_t j = 0; j < 4; ++j) words_[i][j] = temp[j] ^ words_[i - kKeyWords][j];
  }
}

const std::array<std::uint8_t, kRounds>& KeySchedule::round_constants() {
  return kRoundConstants;
}

Block KeySchedule::round_key(std::size_t round) const {
  Block out;
  for (std::size_t w = 0; w < 4; ++w) {
    std::copy(words_[4 * round + w].begin(), words_[4 * round + w].end(), out.begin() + 4 * w);
  }
  return out;
}

Block encrypt_block(const Block& block, const KeySchedule& ks) {
  const SBox& box = ks.sbox();
  State s = add_round_key(State::from_block(block), ks.round_key(0));
  for (std::size_t round = 1; round < kRounds; ++round) {
    s = sub_bytes(s, box);
    s = shift_rows(s);
    s = mix_columns(s);
    s = add_round_key(s, ks.round_key(round));
  }
  s = sub_bytes(s, box);
  s = shift_rows(s);
  s = add_round_key(s, ks.round_key(kRounds));
  return s.to_block();
}

Block decrypt_block(const Block& block, const KeySchedule& ks) {
  const SBox& box = ks.sbox();
  State s = add_round_key(State::from_block(block), ks.round_key(kRounds));
  s = inv_shift_rows(s);
  s = inv_sub_bytes(s, box);
  for (std::size_t round = kRounds - 1; round >= 1; --round) {
    s = add_round_key(s, ks.round_key(round));
    s = inv_mix_columns(s);
    s = inv_shift_rows(s);
    s = inv_sub_bytes(s, box);
  }
  s = add_round_key(s, ks.round_key(0));
  return s.to_block();
}

Block CounterBlock::serialize() const {
  Block out{};
  std::copy(nonce.begin(), nonce.end(), out.begin());
  for (std::size_t i = 0; i < 4; ++i) {
    out[8 + i] = static_cast<std::uint8_t>(nal_ordinal >> (24 - 8 * i));
    out[12 + i] = static_cast<std::uint8_t>(block_index >> (24 - 8 * i));
  }
  return out;
}

std::uint64_t ctr_apply(const KeySchedule& ks, const Nonce& nonce, std::uint32_t nal_ordinal,
                        std::span<std::uint8_t> data) {
  if (data.size() > kMaxKeystreamBytes) {
    throw Error(ErrorCode::CounterOverflow,
                std::to_string(data.size()) + " bytes exceed the 2^32-block counter space");
  }
  CounterBlock counter{nonce, nal_ordinal, 0};
  std::uint64_t blocks = 0;
  for (std::size_t offset = 0; offset < data.size(); offset += kBlockSize) {
    counter.block_index = static_cast<std::uint32_t>(blocks);
    const Block pad = encrypt_block(counter.serialize(), ks);
    ++blocks;
    const std::size_t n = std::min(kBlockSize, data.size() - offset);
    for (std::size_t i = 0; i < n; ++i) data[offset + i] ^= pad[i];
  }
  return blocks;
}

Bytes ctr_keystream(const KeySchedule& ks, const Nonce& nonce, std::uint32_t nal_ordinal,
                    std::uint64_t nbytes) {
  if (nbytes > kMaxKeystreamBytes) {
    throw Error(ErrorCode::CounterOverflow,
                std::to_string(nbytes) + " bytes exceed the 2^32-block counter space");
  }
  Bytes out(static_cast<std::size_t>(nbytes), 0);
  ctr_apply(ks, nonce, nal_ordinal, out);
  return out;
}

}  // namespace selenc::aes
