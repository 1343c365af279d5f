#include "selenc/selective.hpp"

#include <algorithm>
#include <random>

#include "selenc/error.hpp"

namespace selenc {

namespace {

void put_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint32_t get_u32(ByteView in, std::size_t offset) {
  return std::uint32_t{in[offset]} << 24 | std::uint32_t{in[offset + 1]} << 16 |
         std::uint32_t{in[offset + 2]} << 8 | std::uint32_t{in[offset + 3]};
}

// Index of the last byte that is not 0x03, if any.
std::optional<std::size_t> last_non_three(const Bytes& ebsp) {
  for (std::size_t i = ebsp.size(); i-- > 0;) {
    if (ebsp[i] != 0x03) return i;
  }
  return std::nullopt;
}

// Position of the NAL with `ordinal`; scanned streams store it at that index.
std::optional<std::size_t> locate(std::span<const NalUnit> nals, std::uint32_t ordinal) {
  if (ordinal < nals.size() && nals[ordinal].ordinal == ordinal) return ordinal;
  auto it = std::find_if(nals.begin(), nals.end(),
                         [ordinal](const NalUnit& n) { return n.ordinal == ordinal; });
  if (it == nals.end()) return std::nullopt;
  return static_cast<std::size_t>(it - nals.begin());
}

}  // namespace

std::string_view to_string(EncryptionPolicy policy) {
  return policy == EncryptionPolicy::IdrOnly ? "idr" : "all-i";
}

std::optional<EncryptionPolicy> parse_policy(std::string_view name) {
  if (name == "idr") return EncryptionPolicy::IdrOnly;
  if (name == "all-i") return EncryptionPolicy::AllIntra;
  return std::nullopt;
}

SelectionResult select(std::span<const NalUnit> nals, EncryptionPolicy policy) {
  SelectionResult result;
  for (const NalUnit& nal : nals) {
    if (!nal.header.is_vcl()) continue;

    std::optional<Bytes> rbsp;
    try {
      rbsp = ebsp_to_rbsp(nal.ebsp);
    } catch (const Error&) {
    }
    const std::uint64_t payload = rbsp ? rbsp->size() : nal.ebsp.size();
    result.total_payload_bytes += payload;

    bool selected = nal.header.nal_unit_type == nal_type::kIdrSlice;
    if (!selected && policy == EncryptionPolicy::AllIntra &&
        nal.header.nal_unit_type == nal_type::kNonIdrSlice) {
      try {
        if (!rbsp) throw Error(ErrorCode::MalformedEscape, "slice payload");
        selected = parse_slice_info(*rbsp).is_intra;
      } catch (const Error&) {
        result.unparsed_ordinals.push_back(nal.ordinal);
      }
    }
    if (selected) {
      result.selected_ordinals.push_back(nal.ordinal);
      result.selected_bytes += payload;
    }
  }
  return result;
}

KeyCheck key_check(const aes::KeySchedule& ks) {
  const aes::Block zero{};
  const aes::Block enc = aes::encrypt_block(zero, ks);
  return {enc[0], enc[1], enc[2], enc[3]};
}

Bytes CipherHeader::serialize() const {
  if (!std::is_sorted(ordinals.begin(), ordinals.end()) ||
      std::adjacent_find(ordinals.begin(), ordinals.end()) != ordinals.end()) {
    throw Error(ErrorCode::MalformedHeader, "ordinals must be strictly increasing");
  }
  Bytes out(kMagic.begin(), kMagic.end());
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(policy));
  out.insert(out.end(), key_check.begin(), key_check.end());
  out.insert(out.end(), nonce.begin(), nonce.end());
  put_u32(out, static_cast<std::uint32_t>(ordinals.size()));
  for (std::uint32_t ordinal : ordinals) put_u32(out, ordinal);
  return out;
}

CipherHeader CipherHeader::parse(ByteView bytes) {
  if (bytes.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::BadMagic, "sidecar does not start with SEH1");
  }
  if (bytes.size() < kFixedSize) {
    throw Error(ErrorCode::MalformedHeader, "sidecar truncated at " +
                                                std::to_string(bytes.size()) + " bytes");
  }
  if (bytes[4] != kVersion) {
    throw Error(ErrorCode::BadVersion, "version " + std::to_string(bytes[4]));
  }
  CipherHeader header;
  if (bytes[5] > 1) {
    throw Error(ErrorCode::MalformedHeader, "policy byte " + std::to_string(bytes[5]));
  }
  header.policy = static_cast<EncryptionPolicy>(bytes[5]);
  std::copy_n(bytes.begin() + 6, 4, header.key_check.begin());
  std::copy_n(bytes.begin() + 10, 8, header.nonce.begin());
  const std::uint64_t count = get_u32(bytes, 18);
  if (bytes.size() != kFixedSize + 4 * count) {
    throw Error(ErrorCode::MalformedHeader,
                "count " + std::to_string(count) + " does not match sidecar size " +
                    std::to_string(bytes.size()));
  }
  header.ordinals.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t ordinal = get_u32(bytes, kFixedSize + 4 * i);
    if (!header.ordinals.empty() && ordinal <= header.ordinals.back()) {
      throw Error(ErrorCode::MalformedHeader, "ordinals not strictly increasing");
    }
    header.ordinals.push_back(ordinal);
  }
  return header;
}

void append_tail_guard(Bytes& ebsp) {
  const auto last = last_non_three(ebsp);
  if (last && ebsp[*last] == 0x00) ebsp.push_back(0x03);
}

void strip_tail_guard(Bytes& ebsp) {
  const auto last = last_non_three(ebsp);
  if (last && ebsp[*last] == 0x00 && *last + 1 < ebsp.size()) ebsp.pop_back();
}

NalUnit encrypt_nal(const NalUnit& nal, const aes::KeySchedule& ks, const aes::Nonce& nonce,
                    CipherStats* stats) {
  Bytes rbsp = ebsp_to_rbsp(nal.ebsp);
  if (rbsp_to_ebsp(rbsp) != nal.ebsp) {
    // Decryption re-escapes canonically, so a non-canonical input could not be
    // restored byte for byte.
    throw Error(ErrorCode::MalformedEscape,
                "NAL " + std::to_string(nal.ordinal) + " uses non-canonical emulation prevention");
  }
  const std::uint64_t blocks = aes::ctr_apply(ks, nonce, nal.ordinal, rbsp);
  if (stats) {
    stats->bytes += rbsp.size();
    stats->blocks += blocks;
  }
  NalUnit out = nal;
  out.ebsp = rbsp_to_ebsp(rbsp);
  append_tail_guard(out.ebsp);
  return out;
}

NalUnit decrypt_nal(const NalUnit& nal, const aes::KeySchedule& ks, const aes::Nonce& nonce,
                    CipherStats* stats) {
  Bytes ebsp = nal.ebsp;
  strip_tail_guard(ebsp);
  Bytes rbsp = ebsp_to_rbsp(ebsp);
  const std::uint64_t blocks = aes::ctr_apply(ks, nonce, nal.ordinal, rbsp);
  if (stats) {
    stats->bytes += rbsp.size();
    stats->blocks += blocks;
  }
  NalUnit out = nal;
  out.ebsp = rbsp_to_ebsp(rbsp);
  return out;
}

EncryptedStream encrypt_stream(std::span<const NalUnit> nals, const aes::KeySchedule& ks,
                               EncryptionPolicy policy, const aes::Nonce& nonce) {
  EncryptedStream out;
  out.header.policy = policy;
  out.header.key_check = key_check(ks);
  out.header.nonce = nonce;
  out.header.ordinals = select(nals, policy).selected_ordinals;

  out.nals.assign(nals.begin(), nals.end());
  for (std::uint32_t ordinal : out.header.ordinals) {
    const std::size_t pos = *locate(out.nals, ordinal);
    out.nals[pos] = encrypt_nal(out.nals[pos], ks, nonce, &out.stats);
  }
  return out;
}

std::vector<NalUnit> decrypt_stream(std::span<const NalUnit> nals, const aes::KeySchedule& ks,
                                    const CipherHeader& header, CipherStats* stats) {
  if (key_check(ks) != header.key_check) {
    throw Error(ErrorCode::WrongKey, "key check value " + to_hex(key_check(ks)) +
                                         " does not match sidecar " + to_hex(header.key_check));
  }
  std::vector<std::size_t> positions;
  positions.reserve(header.ordinals.size());
  for (std::uint32_t ordinal : header.ordinals) {
    const auto pos = locate(nals, ordinal);
    if (!pos) {
      throw Error(ErrorCode::OrdinalOutOfRange, "ordinal " + std::to_string(ordinal) +
                                                    " not in a stream of " +
                                                    std::to_string(nals.size()) + " NAL units");
    }
    positions.push_back(*pos);
  }

  std::vector<NalUnit> out(nals.begin(), nals.end());
  for (std::size_t pos : positions) out[pos] = decrypt_nal(out[pos], ks, header.nonce, stats);
  return out;
}

aes::Nonce random_nonce() {
  std::random_device rd;
  aes::Nonce nonce;
  for (std::size_t i = 0; i < nonce.size(); i += 4) {
    const std::uint32_t r = rd();
    for (std::size_t j = 0; j < 4; ++j) nonce[i + j] = static_cast<std::uint8_t>(r >> (8 * j));
  }
  return nonce;
}

}  // namespace selenc
