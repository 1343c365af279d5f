#pragma once

// AES-128 assembled from its four round transformations, plus the counter
// mode used for NAL payloads. Not constant time.

#include <array>
#include <cstddef>
#include <cstdint>

#include "selenc/bytes.hpp"

namespace selenc::aes {

inline constexpr std::size_t kBlockSize = 16;
inline constexpr std::size_t kKeySize = 16;
inline constexpr std::size_t kKeyWords = 4;  // Nk
inline constexpr std::size_t kRounds = 10;
inline constexpr std::size_t kScheduleWords = 4 * (kRounds + 1);

using Block = std::array<std::uint8_t, kBlockSize>;
using Word = std::array<std::uint8_t, 4>;
using Nonce = std::array<std::uint8_t, 8>;

/// Forward and inverse byte substitution tables. `standard()` is the AES
/// S-box; other instances exist only for fault-injection tests.
class SBox {
 public:
  static const SBox& standard();

  /// Copy of the standard box with two forward entries exchanged. Still a
  /// bijection, so the cipher remains invertible but no longer standard.
  static SBox with_swapped_entries(std::uint8_t a, std::uint8_t b);

  std::uint8_t forward(std::uint8_t x) const { return forward_[x]; }
  std::uint8_t inverse(std::uint8_t x) const { return inverse_[x]; }

 private:
  SBox() = default;
  void rebuild_inverse();

  std::array<std::uint8_t, 256> forward_{};
  std::array<std::uint8_t, 256> inverse_{};
};

/// 4x4 byte matrix. Block byte i sits at row i % 4, column i / 4.
class State {
 public:
  State() = default;
  static State from_block(const Block& block) {
    State s;
    s.cells_ = block;
    return s;
  }
  const Block& to_block() const { return cells_; }

  std::uint8_t& at(std::size_t row, std::size_t col) { return cells_[col * 4 + row]; }
  std::uint8_t at(std::size_t row, std::size_t col) const { return cells_[col * 4 + row]; }

  friend bool operator==(const State&, const State&) = default;

 private:
  Block cells_{};
};

/// Multiplication in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1.
std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b);

State sub_bytes(const State& s, const SBox& box = SBox::standard());
State inv_sub_bytes(const State& s, const SBox& box = SBox::standard());
State shift_rows(const State& s);
State inv_shift_rows(const State& s);
State mix_columns(const State& s);
State inv_mix_columns(const State& s);
State add_round_key(const State& s, const Block& round_key);

/// The 44 expanded key words. Immutable once built; safe to share between
/// threads.
class KeySchedule {
 public:
  /// Throws Error(BadKeyLength) unless `key` is exactly 16 bytes.
  explicit KeySchedule(ByteView key, const SBox& box = SBox::standard());

  static const std::array<std::uint8_t, kRounds>& round_constants();

  const std::array<Word, kScheduleWords>& words() const { return words_; }
  const Word& word(std::size_t i) const { return words_[i]; }
  /// Words 4r..4r+3 laid out as a block.
  Block round_key(std::size_t round) const;
  const SBox& sbox() const { return *box_; }

 private:
  std::array<Word, kScheduleWords> words_{};
  const SBox* box_;
};

/// The key-expansion core transformation: rotate left one byte, substitute,
/// then XOR the round constant into the first byte.
Word key_core(const Word& w, std::uint8_t round_constant, const SBox& box = SBox::standard());

Block encrypt_block(const Block& block, const KeySchedule& ks);
Block decrypt_block(const Block& block, const KeySchedule& ks);

/// nonce(8) || nal_ordinal(4, BE) || block_index(4, BE)
struct CounterBlock {
  Nonce nonce{};
  std::uint32_t nal_ordinal = 0;
  std::uint32_t block_index = 0;

  Block serialize() const;
};

inline constexpr std::uint64_t kMaxKeystreamBytes = (std::uint64_t{1} << 32) * kBlockSize;

/// First `nbytes` of E(ctr(nonce, ordinal, 0)) || E(ctr(nonce, ordinal, 1)) || ...
Bytes ctr_keystream(const KeySchedule& ks, const Nonce& nonce, std::uint32_t nal_ordinal,
                    std::uint64_t nbytes);

/// XORs the keystream for `nal_ordinal` into `data` in place and returns the
/// number of block-cipher invocations it took.
std::uint64_t ctr_apply(const KeySchedule& ks, const Nonce& nonce, std::uint32_t nal_ordinal,
                        std::span<std::uint8_t> data);

/// Number of cipher blocks needed to cover `nbytes`.
constexpr std::uint64_t blocks_for(std::uint64_t nbytes) {
  return (nbytes + kBlockSize - 1) / kBlockSize;
}

}  // namespace selenc::aes
