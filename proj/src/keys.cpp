#include "selenc/keys.hpp"

#include <cmath>

#include "selenc/error.hpp"

namespace selenc {

namespace {

Key128 decode_raw(const RawKey& raw) {
  if (raw.hex.size() != 2 * aes::kKeySize) {
    throw Error(ErrorCode::BadHex, "raw key must be 32 hex digits, got " +
                                       std::to_string(raw.hex.size()));
  }
  const Bytes bytes = from_hex(raw.hex);
  Key128 key{};
  std::copy(bytes.begin(), bytes.end(), key.begin());
  return key;
}

Key128 stretch(const Passphrase& pass) {
  if (pass.text.empty()) throw Error(ErrorCode::EmptyPassphrase, "passphrase is empty");
  if (pass.kdf_iterations == 0) {
    throw Error(ErrorCode::InvalidArgument, "kdf iterations must be at least 1");
  }

  Bytes message(pass.text.begin(), pass.text.end());
  message.push_back(0x80);
  message.resize((message.size() + aes::kBlockSize - 1) / aes::kBlockSize * aes::kBlockSize, 0x00);

  std::vector<aes::KeySchedule> schedules;
  schedules.reserve(message.size() / aes::kBlockSize);
  for (std::size_t off = 0; off < message.size(); off += aes::kBlockSize) {
    schedules.emplace_back(ByteView(message).subspan(off, aes::kBlockSize));
  }

  aes::Block h{};
  for (std::uint32_t it = 0; it < pass.kdf_iterations; ++it) {
    for (const aes::KeySchedule& ks : schedules) {
      const aes::Block e = aes::encrypt_block(h, ks);
      for (std::size_t i = 0; i < h.size(); ++i) h[i] ^= e[i];
    }
  }
  return h;
}

}  // namespace

Key128 derive_key(const KeySource& source) {
  if (const auto* raw = std::get_if<RawKey>(&source)) return decode_raw(*raw);
  return stretch(std::get<Passphrase>(source));
}

PassphraseStrength estimate_passphrase_bits(std::string_view passphrase) {
  bool lower = false, upper = false, digit = false, other = false;
  for (unsigned char c : passphrase) {
    if (c >= 'a' && c <= 'z') lower = true;
    else if (c >= 'A' && c <= 'Z') upper = true;
    else if (c >= '0' && c <= '9') digit = true;
    else other = true;
  }
  const int charset = (lower ? 26 : 0) + (upper ? 26 : 0) + (digit ? 10 : 0) + (other ? 33 : 0);
  PassphraseStrength s;
  s.bits = charset == 0 ? 0.0 : static_cast<double>(passphrase.size()) * std::log2(charset);
  s.weak = s.bits < 128.0;
  return s;
}

}  // namespace selenc
