#include "selenc/commands.hpp"

#include <fstream>
#include <iterator>
#include <random>

#include "selenc/error.hpp"

namespace selenc {

namespace fs = std::filesystem;

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::Io, "read failed: " + path.string());
  return data;
}

void write_file_atomic(const fs::path& path, ByteView data) {
  fs::path tmp = path;
  tmp += ".tmp-" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot create " + tmp.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw Error(ErrorCode::Io, "write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot rename into " + path.string());
  }
}

AnnexBStream load_stream(const fs::path& in, Bytes* raw) {
  Bytes data = read_file(in);
  if (data.empty()) throw Error(ErrorCode::NoStartCode, in.string() + " is empty");
  AnnexBStream stream = scan_annexb(data);
  if (raw) *raw = std::move(data);
  return stream;
}

EncryptOutcome cmd_encrypt(const EncryptRequest& request) {
  Bytes raw;
  const AnnexBStream input = load_stream(request.in, &raw);
  const Key128 key = derive_key(request.key);
  const aes::KeySchedule ks(key);
  const aes::Nonce nonce = request.nonce.value_or(random_nonce());

  EncryptedStream encrypted = encrypt_stream(input.nals, ks, request.policy, nonce);
  const Bytes out = serialize_annexb(AnnexBStream{input.leading, encrypted.nals});
  const Bytes meta = encrypted.header.serialize();

  write_file_atomic(request.out, out);
  write_file_atomic(request.meta, meta);

  EncryptOutcome outcome;
  outcome.report = build_report(input, raw.size(), encrypted.header.ordinals);
  outcome.header = std::move(encrypted.header);
  outcome.stats = encrypted.stats;
  outcome.output_bytes = out.size();
  return outcome;
}

StreamReport cmd_decrypt(const fs::path& in, const fs::path& meta, const fs::path& out,
                         const KeySource& key) {
  const CipherHeader header = CipherHeader::parse(read_file(meta));
  const AnnexBStream input = load_stream(in);
  const aes::KeySchedule ks(derive_key(key));

  AnnexBStream restored{input.leading, decrypt_stream(input.nals, ks, header)};
  const Bytes data = serialize_annexb(restored);
  write_file_atomic(out, data);
  return build_report(restored, data.size(), header.ordinals);
}

StreamReport cmd_inspect(const fs::path& in) {
  Bytes raw;
  const AnnexBStream stream = load_stream(in, &raw);
  const SelectionResult selection = select(stream.nals, EncryptionPolicy::IdrOnly);
  return build_report(stream, raw.size(), selection.selected_ordinals);
}

Bytes cmd_gen_test(const fs::path& out, const TestStreamConfig& config) {
  Bytes data = gen_test_stream(config);
  write_file_atomic(out, data);
  return data;
}

}  // namespace selenc
