#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "selenc/aes.hpp"

namespace selenc {

using Key128 = std::array<std::uint8_t, aes::kKeySize>;

inline constexpr std::uint32_t kDefaultKdfIterations = 10000;

struct RawKey {
  std::string hex;  // 32 hex digits
};

struct Passphrase {
  std::string text;
  std::uint32_t kdf_iterations = kDefaultKdfIterations;
};

using KeySource = std::variant<RawKey, Passphrase>;

/// Raw keys are hex-decoded. Passphrases go through an iterated AES
/// Davies-Meyer compression (not a standard KDF):
///
///   m = passphrase || 0x80 || zero padding to a multiple of 16
///   H = 0^128
///   repeat kdf_iterations times:
///     for each 16-byte block b of m: H = AES_b(H) xor H
///
/// Throws BadHex, EmptyPassphrase, or InvalidArgument for zero iterations.
Key128 derive_key(const KeySource& source);

struct PassphraseStrength {
  double bits = 0.0;
  bool weak = true;  // bits < 128
};

/// length * log2(charset), where the charset is the union of the classes
/// present: lowercase (26), uppercase (26), digits (10), anything else (33).
/// Length counts bytes.
PassphraseStrength estimate_passphrase_bits(std::string_view passphrase);

}  // namespace selenc
