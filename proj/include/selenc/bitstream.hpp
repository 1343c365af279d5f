#pragma once

// H.264/AVC Annex B framing, emulation prevention and the few slice-header
// fields needed to tell intra slices apart. Nothing here decodes video.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selenc/bytes.hpp"

namespace selenc {

namespace nal_type {
inline constexpr std::uint8_t kNonIdrSlice = 1;
inline constexpr std::uint8_t kIdrSlice = 5;
inline constexpr std::uint8_t kSei = 6;
inline constexpr std::uint8_t kSps = 7;
inline constexpr std::uint8_t kPps = 8;
}  // namespace nal_type

struct NalHeader {
  std::uint8_t forbidden_zero_bit = 0;
  std::uint8_t nal_ref_idc = 0;
  std::uint8_t nal_unit_type = 0;

  std::uint8_t to_byte() const {
    return static_cast<std::uint8_t>((forbidden_zero_bit & 1) << 7 | (nal_ref_idc & 3) << 5 |
                                     (nal_unit_type & 0x1f));
  }
  bool is_slice() const {
    return nal_unit_type == nal_type::kNonIdrSlice || nal_unit_type == nal_type::kIdrSlice;
  }
  bool is_vcl() const { return nal_unit_type >= 1 && nal_unit_type <= 5; }

  friend bool operator==(const NalHeader&, const NalHeader&) = default;
};

NalHeader parse_nal_header(std::uint8_t byte);

/// One NAL unit as found in the byte stream. `ebsp` still carries its
/// emulation-prevention bytes.
struct NalUnit {
  std::uint32_t ordinal = 0;
  std::uint8_t start_code_len = 4;
  NalHeader header;
  Bytes ebsp;

  friend bool operator==(const NalUnit&, const NalUnit&) = default;
};

/// A scanned stream. `leading` holds whatever preceded the first start code.
struct AnnexBStream {
  Bytes leading;
  std::vector<NalUnit> nals;

  friend bool operator==(const AnnexBStream&, const AnnexBStream&) = default;
};

/// Splits an Annex B byte stream at 00 00 01 / 00 00 00 01 start codes. A zero
/// byte directly before 00 00 01 makes the start code four bytes wide; any
/// earlier zeros stay with the preceding payload.
AnnexBStream scan_annexb(ByteView stream);

Bytes serialize_annexb(const AnnexBStream& stream);
Bytes serialize_annexb(std::span<const NalUnit> nals);

/// True if `ebsp` has no 00 00 xx with xx <= 0x02.
bool satisfies_escaping(ByteView ebsp);

Bytes ebsp_to_rbsp(ByteView ebsp);
Bytes rbsp_to_ebsp(ByteView rbsp);

/// MSB-first bit cursor over a byte buffer.
class BitReader {
 public:
  explicit BitReader(ByteView source) : source_(source) {}
  BitReader(Bytes&&) = delete;

  std::size_t position() const { return position_; }
  std::size_t bits_left() const { return source_.size() * 8 - position_; }

  unsigned read_bit();
  std::uint32_t read_bits(unsigned count);
  /// Order-0 Exp-Golomb, ue(v).
  std::uint32_t read_ue();

 private:
  ByteView source_;
  std::size_t position_ = 0;
};

/// Counterpart of BitReader; used to synthesize slice headers.
class BitWriter {
 public:
  void write_bit(unsigned bit);
  void write_bits(std::uint32_t value, unsigned count);
  void write_ue(std::uint32_t value);
  /// Pads with zero bits up to the next byte boundary.
  void align_zero();

  std::size_t bit_count() const { return bit_count_; }
  const Bytes& bytes() const { return bytes_; }

 private:
  Bytes bytes_;
  std::size_t bit_count_ = 0;
};

struct SliceInfo {
  std::uint32_t first_mb_in_slice = 0;
  std::uint32_t slice_type = 0;
  bool is_intra = false;
};

/// Reads first_mb_in_slice and slice_type from the start of a slice RBSP.
SliceInfo parse_slice_info(ByteView rbsp);

enum class NalKind { Sps, Pps, Sei, Idr, NonIdr, Other };

NalKind kind_of(const NalHeader& header);
std::string_view to_string(NalKind kind);

/// Single-letter frame kind for a slice type: P, B, I, SP or SI.
std::string_view slice_kind_name(std::uint32_t slice_type);

struct NalRow {
  std::uint32_t ordinal = 0;
  std::uint8_t start_code_len = 0;
  NalHeader header;
  NalKind kind = NalKind::Other;
  std::size_t ebsp_size = 0;
  std::size_t rbsp_size = 0;
  std::optional<SliceInfo> slice;
  /// Slice NAL whose header could not be parsed (or whose payload is badly
  /// escaped).
  bool unparsed = false;
};

std::vector<NalRow> classify_stream(std::span<const NalUnit> nals);

}  // namespace selenc
