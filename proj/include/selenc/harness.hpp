#pragma once

// Selective-vs-naive work comparison and the cross-module self-check suite.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "selenc/selective.hpp"

namespace selenc {

struct BenchResult {
  std::uint64_t total_bytes = 0;  // serialized stream size
  std::uint64_t vcl_payload_bytes = 0;
  std::uint64_t selective_encrypted_bytes = 0;
  std::uint64_t naive_encrypted_bytes = 0;  // RBSP of every NAL
  double selective_fraction = 0.0;          // of vcl_payload_bytes
  std::uint64_t aes_blocks_selective = 0;
  std::uint64_t aes_blocks_naive = 0;
  double wall_time_selective = 0.0;  // seconds
  double wall_time_naive = 0.0;
  /// Encrypted stream size minus original size (escaping plus tail guards).
  std::int64_t escaping_size_delta = 0;
};

/// Runs the selective pass and a whole-stream pass over the same NALs with
/// the same counter scheme. Block counts are exact; times are informational.
BenchResult bench(std::span<const NalUnit> nals, const aes::KeySchedule& ks,
                  EncryptionPolicy policy, const aes::Nonce& nonce = {});

nlohmann::json to_json(const BenchResult& result);
void print_bench(std::ostream& os, const BenchResult& result);

struct OracleConfig {
  std::uint64_t seed = 20240601;
  /// Substitution table used by the cipher checks; swap entries to inject a
  /// fault.
  const aes::SBox* sbox = &aes::SBox::standard();
  /// Fault injection: encrypt without re-applying emulation prevention.
  bool skip_reescape = false;
};

struct OracleCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct OracleReport {
  std::vector<OracleCheck> checks;

  bool all_passed() const;
  const OracleCheck* find(std::string_view name) const;
};

/// Runs every cross-module invariant check. Failures are reported per check;
/// nothing throws.
OracleReport oracle_suite(const OracleConfig& config = {});

}  // namespace selenc
