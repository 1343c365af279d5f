#pragma once

// File-level encrypt / decrypt / inspect / gen-test operations behind the
// selenc CLI. Outputs are written to a temporary file and renamed into place.

#include <filesystem>
#include <optional>

#include "selenc/generator.hpp"
#include "selenc/keys.hpp"
#include "selenc/report.hpp"
#include "selenc/selective.hpp"

namespace selenc {

Bytes read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, ByteView data);

struct EncryptRequest {
  std::filesystem::path in;
  std::filesystem::path out;
  std::filesystem::path meta;
  KeySource key;
  EncryptionPolicy policy = EncryptionPolicy::IdrOnly;
  std::optional<aes::Nonce> nonce;  // random when absent
};

struct EncryptOutcome {
  StreamReport report;  // of the input, selection marked
  CipherHeader header;
  CipherStats stats;
  std::uint64_t output_bytes = 0;
};

EncryptOutcome cmd_encrypt(const EncryptRequest& request);

/// Returns the report of the restored stream.
StreamReport cmd_decrypt(const std::filesystem::path& in, const std::filesystem::path& meta,
                         const std::filesystem::path& out, const KeySource& key);

/// Selection is marked as the IDR-only policy would apply it.
StreamReport cmd_inspect(const std::filesystem::path& in);

Bytes cmd_gen_test(const std::filesystem::path& out, const TestStreamConfig& config);

/// Reads and scans an Annex B file; an empty file is NoStartCode.
AnnexBStream load_stream(const std::filesystem::path& in, Bytes* raw = nullptr);

}  // namespace selenc
