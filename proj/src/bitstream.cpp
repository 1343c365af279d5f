#include "selenc/bitstream.hpp"

#include <algorithm>

#include "selenc/error.hpp"

namespace selenc {

namespace {

constexpr std::size_t kNotFound = static_cast<std::size_t>(-1);

// Index of the next 00 00 01 triple at or after `from`.
std::size_t find_start_code(ByteView s, std::size_t from) {
  for (std::size_t i = from; i + 2 < s.size(); ++i) {
    if (s[i + 2] > 0x01) {
      i += 2;
      continue;
    }
    if (s[i] == 0x00 && s[i + 1] == 0x00 && s[i + 2] == 0x01) {
      return i;
    }
  }
  return kNotFound;
}

void append_start_code(Bytes& out, std::uint8_t len) {
  if (len == 4) out.push_back(0x00);
  out.insert(out.end(), {0x00, 0x00, 0x01});
}

}  // namespace

NalHeader parse_nal_header(std::uint8_t byte) {
  return NalHeader{
      .forbidden_zero_bit = static_cast<std::uint8_t>(byte >> 7),
      .nal_ref_idc = static_cast<std::uint8_t>((byte >> 5) & 0x03),
      .nal_unit_type = static_cast<std::uint8_t>(byte & 0x1f),
  };
}

AnnexBStream scan_annexb(ByteView s) {
  AnnexBStream out;
  if (s.empty()) return out;

  std::size_t sc = find_start_code(s, 0);
  if (sc == kNotFound) {
    throw Error(ErrorCode::NoStartCode, "no 00 00 01 in " + std::to_string(s.size()) + " bytes");
  }
  std::uint8_t sc_len = (sc > 0 && s[sc - 1] == 0x00) ? 4 : 3;
  out.leading.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(sc - (sc_len - 3)));

  std::uint32_t ordinal = 0;
  while (true) {
    const std::size_t header_pos = sc + 3;
    if (header_pos >= s.size()) {
      throw Error(ErrorCode::InvalidArgument, "start code at end of stream has no NAL header");
    }
    const std::size_t next = find_start_code(s, header_pos + 1);
    std::size_t payload_end = s.size();
    std::uint8_t next_len = 3;
    if (next != kNotFound) {
      // A zero right before the next 00 00 01 belongs to its start code, unless
      // it is our own header byte.
      next_len = (next - 1 > header_pos && s[next - 1] == 0x00) ? 4 : 3;
      payload_end = next - (next_len - 3);
    }

    NalUnit nal;
    nal.ordinal = ordinal++;
    nal.start_code_len = sc_len;
    nal.header = parse_nal_header(s[header_pos]);
    nal.ebsp.assign(s.begin() + static_cast<std::ptrdiff_t>(header_pos + 1),
                    s.begin() + static_cast<std::ptrdiff_t>(payload_end));
    out.nals.push_back(std::move(nal));

    if (next == kNotFound) break;
    sc = next;
    sc_len = next_len;
  }
  return out;
}

bool satisfies_escaping(ByteView ebsp) {
  int zeros = 0;
  for (std::uint8_t b : ebsp) {
    if (zeros >= 2 && b <= 0x02) return false;
    zeros = (b == 0x00) ? zeros + 1 : 0;
  }
  return true;
}

Bytes serialize_annexb(const AnnexBStream& stream) {
  if (find_start_code(stream.leading, 0) != kNotFound) {
    throw Error(ErrorCode::EscapingViolation, "leading bytes contain a start code");
  }
  Bytes out = stream.leading;
  bool previous_ends_in_zero = !out.empty() && out.back() == 0x00;
  for (const NalUnit& nal : stream.nals) {
    if (nal.start_code_len != 3 && nal.start_code_len != 4) {
      throw Error(ErrorCode::InvalidArgument,
                  "NAL " + std::to_string(nal.ordinal) + " has start code length " +
                      std::to_string(nal.start_code_len));
    }
    const std::uint8_t header = nal.header.to_byte();
    const std::uint8_t head[3] = {header, nal.ebsp.size() > 0 ? nal.ebsp[0] : std::uint8_t{0xff},
                                  nal.ebsp.size() > 1 ? nal.ebsp[1] : std::uint8_t{0xff}};
    if (!satisfies_escaping(nal.ebsp) || !satisfies_escaping(head)) {
      throw Error(ErrorCode::EscapingViolation,
                  "NAL " + std::to_string(nal.ordinal) + " payload emulates a start code");
    }
    // 00 followed by a three-byte start code would rescan as a four-byte one.
    if (previous_ends_in_zero && nal.start_code_len == 3) {
      throw Error(ErrorCode::EscapingViolation,
                  "payload before NAL " + std::to_string(nal.ordinal) +
                      " ends in 0x00 and cannot precede a 3-byte start code");
    }
    append_start_code(out, nal.start_code_len);
    out.push_back(header);
    out.insert(out.end(), nal.ebsp.begin(), nal.ebsp.end());
    previous_ends_in_zero = nal.ebsp.empty() ? header == 0x00 : nal.ebsp.back() == 0x00;
  }
  return out;
}

Bytes serialize_annexb(std::span<const NalUnit> nals) {
  AnnexBStream stream;
  stream.nals.assign(nals.begin(), nals.end());
  return serialize_annexb(stream);
}

Bytes ebsp_to_rbsp(ByteView ebsp) {
  Bytes out;
  out.reserve(ebsp.size());
  int zeros = 0;
  for (std::size_t i = 0; i < ebsp.size(); ++i) {
    const std::uint8_t b = ebsp[i];
    if (zeros >= 2) {
      if (b <= 0x02) {
        throw Error(ErrorCode::MalformedEscape,
                    "00 00 " + to_hex(ebsp.subspan(i, 1)) + " at offset " + std::to_string(i - 2));
      }
      if (b == 0x03 && i + 1 < ebsp.size() && ebsp[i + 1] <= 0x03) {
        zeros = 0;
        continue;
      }
    }
    out.push_back(b);
    zeros = (b == 0x00) ? zeros + 1 : 0;
  }
  return out;
}

Bytes rbsp_to_ebsp(ByteView rbsp) {
  Bytes out;
  out.reserve(rbsp.size() + rbsp.size() / 64 + 1);
  int zeros = 0;
  for (std::uint8_t b : rbsp) {
    if (zeros >= 2 && b <= 0x03) {
      out.push_back(0x03);
      zeros = 0;
    }
    out.push_back(b);
    zeros = (b == 0x00) ? zeros + 1 : 0;
  }
  return out;
}

unsigned BitReader::read_bit() {
  if (position_ >= source_.size() * 8) {
    throw Error(ErrorCode::OutOfBits, "read past bit " + std::to_string(position_));
  }
  const unsigned bit = (source_[position_ / 8] >> (7 - position_ % 8)) & 1u;
  ++position_;
  return bit;
}

std::uint32_t BitReader::read_bits(unsigned count) {
  if (count > 32) {
    throw Error(ErrorCode::InvalidArgument, "read_bits supports at most 32 bits");
  }
  if (count > bits_left()) {
    throw Error(ErrorCode::OutOfBits, "need " + std::to_string(count) + " bits, have " +
                                          std::to_string(bits_left()));
  }
  std::uint64_t value = 0;
  for (unsigned i = 0; i < count; ++i) value = (value << 1) | read_bit();
  return static_cast<std::uint32_t>(value);
}

std::uint32_t BitReader::read_ue() {
  unsigned leading_zeros = 0;
  while (read_bit() == 0) {
    if (++leading_zeros > 31) {
      throw Error(ErrorCode::OutOfRange, "Exp-Golomb prefix longer than 31 bits");
    }
  }
  const std::uint64_t suffix = read_bits(leading_zeros);
  return static_cast<std::uint32_t>((std::uint64_t{1} << leading_zeros) - 1 + suffix);
}

void BitWriter::write_bit(unsigned bit) {
  if (bit_count_ % 8 == 0) bytes_.push_back(0);
  if (bit & 1u) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bit_count_ % 8));
  ++bit_count_;
}

void BitWriter::write_bits(std::uint32_t value, unsigned count) {
  for (unsigned i = count; i-- > 0;) write_bit((value >> i) & 1u);
}

void BitWriter::write_ue(std::uint32_t value) {
  const std::uint64_t code = std::uint64_t{value} + 1;
  unsigned width = 0;
  while ((code >> (width + 1)) != 0) ++width;
  for (unsigned i = 0; i < width; ++i) write_bit(0);
  for (unsigned i = width + 1; i-- > 0;) write_bit(static_cast<unsigned>(code >> i) & 1u);
}

void BitWriter::align_zero() {
  while (bit_count_ % 8 != 0) write_bit(0);
}

SliceInfo parse_slice_info(ByteView rbsp) {
  BitReader reader(rbsp);
  SliceInfo info;
  info.first_mb_in_slice = reader.read_ue();
  info.slice_type = reader.read_ue();
  if (info.slice_type > 9) {
    throw Error(ErrorCode::OutOfRange, "slice_type " + std::to_string(info.slice_type));
  }
  info.is_intra = info.slice_type % 5 == 2;
  return info;
}

NalKind kind_of(const NalHeader& header) {
  switch (header.nal_unit_type) {
    case nal_type::kSps: return NalKind::Sps;
    case nal_type::kPps: return NalKind::Pps;
    case nal_type::kSei: return NalKind::Sei;
    case nal_type::kIdrSlice: return NalKind::Idr;
    case nal_type::kNonIdrSlice: return NalKind::NonIdr;
    default: return NalKind::Other;
  }
}

std::string_view to_string(NalKind kind) {
  switch (kind) {
    case NalKind::Sps: return "SPS";
    case NalKind::Pps: return "PPS";
    case NalKind::Sei: return "SEI";
    case NalKind::Idr: return "IDR";
    case NalKind::NonIdr: return "non-IDR";
    case NalKind::Other: return "other";
  }
  return "other";
}

std::string_view slice_kind_name(std::uint32_t slice_type) {
  static constexpr std::string_view kNames[] = {"P", "B", "I", "SP", "SI"};
  return kNames[slice_type % 5];
}

std::vector<NalRow> classify_stream(std::span<const NalUnit> nals) {
  std::vector<NalRow> rows;
  rows.reserve(nals.size());
  for (const NalUnit& nal : nals) {
    NalRow row;
    row.ordinal = nal.ordinal;
    row.start_code_len = nal.start_code_len;
    row.header = nal.header;
    row.kind = kind_of(nal.header);
    row.ebsp_size = nal.ebsp.size();
    try {
      const Bytes rbsp = ebsp_to_rbsp(nal.ebsp);
      row.rbsp_size = rbsp.size();
      if (nal.header.is_slice()) row.slice = parse_slice_info(rbsp);
    } catch (const Error&) {
      if (row.rbsp_size == 0) row.rbsp_size = nal.ebsp.size();
      row.unparsed = true;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace selenc
