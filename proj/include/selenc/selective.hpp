#pragma once

// Key-frame selection and per-NAL payload encryption. Only the payload after
// the NAL header byte is touched; framing and start codes are preserved.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "selenc/aes.hpp"
#include "selenc/bitstream.hpp"

namespace selenc {

enum class EncryptionPolicy : std::uint8_t {
  IdrOnly = 0,   // nal_unit_type 5
  AllIntra = 1,  // type 5 plus type-1 slices whose slice_type is I
};

std::string_view to_string(EncryptionPolicy policy);
/// Accepts "idr" and "all-i".
std::optional<EncryptionPolicy> parse_policy(std::string_view name);

struct SelectionResult {
  std::vector<std::uint32_t> selected_ordinals;
  /// Type-1 NALs whose slice header could not be read under AllIntra.
  std::vector<std::uint32_t> unparsed_ordinals;
  std::uint64_t selected_bytes = 0;       // RBSP bytes of selected NALs
  std::uint64_t total_payload_bytes = 0;  // RBSP bytes of all VCL NALs

  double encrypted_fraction() const {
    return total_payload_bytes == 0
               ? 0.0
               : static_cast<double>(selected_bytes) / static_cast<double>(total_payload_bytes);
  }
};

SelectionResult select(std::span<const NalUnit> nals, EncryptionPolicy policy);

using KeyCheck = std::array<std::uint8_t, 4>;

/// First four bytes of E_k(0^128).
KeyCheck key_check(const aes::KeySchedule& ks);

/// Sidecar metadata written next to an encrypted stream.
///
///   "SEH1" | version 0x01 | policy | key_check[4] | nonce[8] | count (u32 BE)
///   | count x ordinal (u32 BE, strictly increasing)
struct CipherHeader {
  static constexpr std::array<std::uint8_t, 4> kMagic = {'S', 'E', 'H', '1'};
  static constexpr std::uint8_t kVersion = 0x01;
  static constexpr std::size_t kFixedSize = 22;

  EncryptionPolicy policy = EncryptionPolicy::IdrOnly;
  KeyCheck key_check{};
  aes::Nonce nonce{};
  std::vector<std::uint32_t> ordinals;

  Bytes serialize() const;
  /// Throws BadMagic, BadVersion or MalformedHeader.
  static CipherHeader parse(ByteView bytes);

  friend bool operator==(const CipherHeader&, const CipherHeader&) = default;
};

struct CipherStats {
  std::uint64_t bytes = 0;   // RBSP bytes run through the keystream
  std::uint64_t blocks = 0;  // block-cipher invocations
};

/// Encrypts the RBSP of one NAL with the CTR keystream for its ordinal and
/// re-applies emulation prevention. When the escaped result would end in
/// 00 03* a single 0x03 is appended so that the payload can never merge with
/// a following start code; decrypt_nal strips it again.
NalUnit encrypt_nal(const NalUnit& nal, const aes::KeySchedule& ks, const aes::Nonce& nonce,
                    CipherStats* stats = nullptr);
NalUnit decrypt_nal(const NalUnit& nal, const aes::KeySchedule& ks, const aes::Nonce& nonce,
                    CipherStats* stats = nullptr);

/// Appends the trailing 0x03 guard when `ebsp` ends in 00 03*.
void append_tail_guard(Bytes& ebsp);
/// Removes a guard added by append_tail_guard.
void strip_tail_guard(Bytes& ebsp);

struct EncryptedStream {
  std::vector<NalUnit> nals;
  CipherHeader header;
  CipherStats stats;
};

EncryptedStream encrypt_stream(std::span<const NalUnit> nals, const aes::KeySchedule& ks,
                               EncryptionPolicy policy, const aes::Nonce& nonce);

/// Verifies the key check and ordinal range before touching any payload.
std::vector<NalUnit> decrypt_stream(std::span<const NalUnit> nals, const aes::KeySchedule& ks,
                                    const CipherHeader& header, CipherStats* stats = nullptr);

aes::Nonce random_nonce();

}  // namespace selenc
