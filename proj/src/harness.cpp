#include "selenc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "selenc/error.hpp"
#include "selenc/generator.hpp"
#include "selenc/keys.hpp"

namespace selenc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t serialized_size(std::span<const NalUnit> nals) {
  std::uint64_t n = 0;
  for (const NalUnit& nal : nals) n += nal.start_code_len + 1 + nal.ebsp.size();
  return n;
}

aes::Block random_block(std::mt19937_64& rng) {
  aes::Block b;
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

Bytes random_rbsp(std::mt19937_64& rng, std::size_t max_len) {
  Bytes out(rng() % (max_len + 1));
  for (auto& b : out) {
    // Bias towards zeros so that escaping paths are hit often.
    b = (rng() % 3 == 0) ? 0x00 : static_cast<std::uint8_t>(rng() % 5 == 0 ? rng() % 4 : rng());
  }
  return out;
}

// An arbitrary well-formed Annex B stream built NAL by NAL.
Bytes random_annexb(std::mt19937_64& rng) {
  AnnexBStream stream;
  const std::size_t leading = rng() % 4;
  for (std::size_t i = 0; i < leading; ++i) {
    stream.leading.push_back(static_cast<std::uint8_t>(1 + rng() % 255));
  }
  const std::size_t count = 1 + rng() % 12;
  bool previous_ends_in_zero = false;
  for (std::uint32_t i = 0; i < count; ++i) {
    NalUnit nal;
    nal.ordinal = i;
    nal.start_code_len = (previous_ends_in_zero || rng() % 2 == 0) ? 4 : 3;
    nal.header = parse_nal_header(static_cast<std::uint8_t>(1 + rng() % 255));
    nal.ebsp = rbsp_to_ebsp(random_rbsp(rng, 80));
    previous_ends_in_zero = !nal.ebsp.empty() && nal.ebsp.back() == 0x00;
    stream.nals.push_back(std::move(nal));
  }
  return serialize_annexb(stream);
}

TestStreamConfig random_config(std::mt19937_64& rng) {
  TestStreamConfig c;
  c.gop = 1 + static_cast<std::uint32_t>(rng() % 12);
  c.frames = 1 + static_cast<std::uint32_t>(rng() % 16);
  c.payload_size = 4 + static_cast<std::uint32_t>(rng() % 96);
  c.seed = rng();
  return c;
}

// Cheap running check: accumulates failures with the first reason kept.
class Tally {
 public:
  void expect(bool ok, const std::function<std::string()>& why) {
    ++total_;
    if (!ok && failures_++ == 0) first_ = why();
  }
  OracleCheck finish(std::string name) const {
    std::ostringstream detail;
    detail << (total_ - failures_) << "/" << total_ << " ok";
    if (failures_ != 0) detail << "; first failure: " << first_;
    return {std::move(name), failures_ == 0, detail.str()};
  }

 private:
  std::uint64_t total_ = 0;
  std::uint64_t failures_ = 0;
  std::string first_;
};

OracleCheck guarded(const std::string& name, const std::function<OracleCheck()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, std::string("exception: ") + e.what()};
  }
}

OracleCheck check_known_answers(const aes::SBox& box) {
  Tally t;
  const Bytes key = from_hex("2b7e151628aed2a6abf7158809cf4f3c");
  const aes::KeySchedule ks(key, box);
  const std::pair<std::size_t, const char*> expected_words[] = {
      {0, "2b7e1516"},  {3, "09cf4f3c"},  {4, "a0fafe17"},  {5, "88542cb1"},
      {6, "23a33939"},  {7, "2a6c7605"},  {8, "f2c295f2"},  {20, "d4d1c6f8"},
      {40, "d014f9a8"}, {41, "c9ee2589"}, {42, "e13f0cc8"}, {43, "b6630ca6"},
  };
  for (const auto& [index, hex] : expected_words) {
    const std::string got = to_hex(ks.word(index));
    t.expect(got == hex, [&] { return "W[" + std::to_string(index) + "] = " + got; });
  }

  struct Vector {
    const char* key;
    const char* plain;
    const char* cipher;
  };
  const Vector vectors[] = {
      {"2b7e151628aed2a6abf7158809cf4f3c", "3243f6a8885a308d313198a2e0370734",
       "3925841d02dc09fbdc118597196a0b32"},
      {"000102030405060708090a0b0c0d0e0f", "00112233445566778899aabbccddeeff",
       "69c4e0d86a7b0430d8cdb78070b4c55a"},
  };
  for (const Vector& v : vectors) {
    const aes::KeySchedule vks(from_hex(v.key), box);
    aes::Block plain;
    const Bytes p = from_hex(v.plain);
    std::copy(p.begin(), p.end(), plain.begin());
    const aes::Block enc = aes::encrypt_block(plain, vks);
    t.expect(to_hex(enc) == v.cipher, [&] { return std::string("E(") + v.plain + ") = " + to_hex(enc); });
    t.expect(aes::decrypt_block(enc, vks) == plain,
             [&] { return std::string("D(E(") + v.plain + ")) mismatch"; });
  }
  return t.finish("aes.known_answer");
}

OracleCheck check_block_round_trip(const aes::SBox& box, std::mt19937_64& rng) {
  Tally t;
  for (int i = 0; i < 10000; ++i) {
    const aes::Block key = random_block(rng);
    const aes::KeySchedule ks(key, box);
    const aes::Block plain = random_block(rng);
    const aes::Block back = aes::decrypt_block(aes::encrypt_block(plain, ks), ks);
    t.expect(back == plain, [&] { return "plaintext " + to_hex(plain); });
  }
  return t.finish("aes.round_trip");
}

OracleCheck check_transform_algebra(const aes::SBox& box, std::mt19937_64& rng) {
  Tally t;
  for (int i = 0; i < 1000; ++i) {
    const aes::State s = aes::State::from_block(random_block(rng));
    const aes::Block rk = random_block(rng);
    auto state_hex = [&] { return to_hex(s.to_block()); };
    t.expect(aes::add_round_key(aes::add_round_key(s, rk), rk) == s, state_hex);
    aes::State r = s;
    for (int k = 0; k < 4; ++k) r = aes::shift_rows(r);
    t.expect(r == s, state_hex);
    t.expect(aes::inv_shift_rows(aes::shift_rows(s)) == s, state_hex);
    t.expect(aes::inv_sub_bytes(aes::sub_bytes(s, box), box) == s, state_hex);
    t.expect(aes::inv_mix_columns(aes::mix_columns(s)) == s, state_hex);
    t.expect(aes::mix_columns(aes::inv_mix_columns(s)) == s, state_hex);
  }
  return t.finish("aes.transform_algebra");
}

OracleCheck check_key_schedule(const aes::SBox& box, std::mt19937_64& rng) {
  Tally t;
  const auto& rcon = aes::KeySchedule::round_constants();
  for (int trial = 0; trial < 1000; ++trial) {
    const aes::Block key = random_block(rng);
    const aes::KeySchedule ks(key, box);
    for (std::size_t i = 0; i < aes::kScheduleWords; ++i) {
      aes::Word expect;
      if (i < aes::kKeyWords) {
        std::copy_n(key.begin() + 4 * i, 4, expect.begin());
      } else {
        aes::Word temp = ks.word(i - 1);
        if (i % aes::kKeyWords == 0) temp = aes::key_core(temp, rcon[i / 4 - 1], box);
        for (std::size_t j = 0; j < 4; ++j) expect[j] = temp[j] ^ ks.word(i - 4)[j];
      }
      t.expect(ks.word(i) == expect, [&] { return "W[" + std::to_string(i) + "]"; });
    }
  }
  return t.finish("aes.key_schedule");
}

OracleCheck check_bitstream_round_trip(std::mt19937_64& rng) {
  Tally t;
  for (int i = 0; i < 1000; ++i) {
    const Bytes s = (i % 2 == 0) ? gen_test_stream(random_config(rng)) : random_annexb(rng);
    const AnnexBStream scanned = scan_annexb(s);
    bool ordinals_ok = true;
    for (std::size_t k = 0; k < scanned.nals.size(); ++k) {
      ordinals_ok = ordinals_ok && scanned.nals[k].ordinal == k;
    }
    t.expect(ordinals_ok, [&] { return "ordinals not contiguous in stream " + std::to_string(i); });
    t.expect(serialize_annexb(scanned) == s, [&] { return "stream " + std::to_string(i); });
  }
  return t.finish("bitstream.round_trip");
}

OracleCheck check_escaping(std::mt19937_64& rng) {
  Tally t;
  for (int i = 0; i < 1000; ++i) {
    const Bytes rbsp = random_rbsp(rng, 256);
    const Bytes ebsp = rbsp_to_ebsp(rbsp);
    t.expect(satisfies_escaping(ebsp), [&] { return "forbidden pattern for " + to_hex(rbsp); });
    t.expect(ebsp_to_rbsp(ebsp) == rbsp, [&] { return "round trip of " + to_hex(rbsp); });
  }
  return t.finish("escaping.round_trip");
}

OracleCheck check_exp_golomb() {
  Tally t;
  for (std::uint32_t n = 0; n <= 65535; ++n) {
    BitWriter w;
    w.write_ue(n);
    unsigned width = 0;
    while (((n + 1) >> (width + 1)) != 0) ++width;
    const std::size_t expected_bits = 2 * width + 1;
    BitReader r(w.bytes());
    const std::uint32_t back = r.read_ue();
    t.expect(back == n && r.position() == expected_bits && w.bit_count() == expected_bits,
             [&] { return "value " + std::to_string(n); });
  }
  return t.finish("exp_golomb.exhaustive");
}

// Encrypts with or without re-escaping, per the configured fault.
NalUnit encrypt_for_check(const NalUnit& nal, const aes::KeySchedule& ks, const aes::Nonce& nonce,
                          bool skip_reescape) {
  if (!skip_reescape) return encrypt_nal(nal, ks, nonce);
  NalUnit out = nal;
  out.ebsp = ebsp_to_rbsp(nal.ebsp);
  aes::ctr_apply(ks, nonce, nal.ordinal, out.ebsp);
  return out;
}

OracleCheck check_selective_round_trip(const aes::SBox& box, std::mt19937_64& rng) {
  Tally t;
  for (int i = 0; i < 100; ++i) {
    const Bytes s = gen_test_stream(random_config(rng));
    const AnnexBStream stream = scan_annexb(s);
    const aes::KeySchedule ks(random_block(rng), box);
    aes::Nonce nonce;
    for (auto& b : nonce) b = static_cast<std::uint8_t>(rng());
    for (EncryptionPolicy policy : {EncryptionPolicy::IdrOnly, EncryptionPolicy::AllIntra}) {
      const EncryptedStream enc = encrypt_stream(stream.nals, ks, policy, nonce);
      const Bytes wire = serialize_annexb(AnnexBStream{stream.leading, enc.nals});
      const AnnexBStream rescanned = scan_annexb(wire);
      const CipherHeader header = CipherHeader::parse(enc.header.serialize());
      const Bytes restored =
          serialize_annexb(AnnexBStream{rescanned.leading, decrypt_stream(rescanned.nals, ks, header)});
      t.expect(restored == s, [&] { return "stream " + std::to_string(i); });
    }
  }
  return t.finish("selective.round_trip");
}

// IDR payloads chosen so that, under (ks, nonce), the ciphertext RBSP is full
// of start-code emulations and ends in zeros, each followed by a NAL with a
// three-byte start code.
AnnexBStream adversarial_stream(const aes::KeySchedule& ks, const aes::Nonce& nonce,
                                std::mt19937_64& rng) {
  AnnexBStream stream;
  auto push = [&](std::uint8_t sc, std::uint8_t header, const Bytes& rbsp) {
    NalUnit nal;
    nal.ordinal = static_cast<std::uint32_t>(stream.nals.size());
    nal.start_code_len = sc;
    nal.header = parse_nal_header(header);
    nal.ebsp = rbsp_to_ebsp(rbsp);
    stream.nals.push_back(std::move(nal));
  };
  push(4, 0x67, {0x42, 0xc0, 0x1e, 0x80});
  for (int idr = 0; idr < 3; ++idr) {
    Bytes target;
    const std::size_t runs = 2 + rng() % 6;
    for (std::size_t k = 0; k < runs; ++k) {
      target.push_back(static_cast<std::uint8_t>(0x10 + rng() % 0xe0));
      target.insert(target.end(), {0x00, 0x00, static_cast<std::uint8_t>(rng() % 4)});
    }
    target.insert(target.end(), 1 + rng() % 3, 0x00);
    const auto ordinal = static_cast<std::uint32_t>(stream.nals.size());
    const Bytes pad = aes::ctr_keystream(ks, nonce, ordinal, target.size());
    for (std::size_t k = 0; k < target.size(); ++k) target[k] ^= pad[k];
    push(4, 0x65, target);
    push(3, 0x41, {0xe0, 0x12, 0x80});
  }
  return stream;
}

OracleCheck check_compliance(bool skip_reescape, std::mt19937_64& rng) {
  Tally t;
  for (int i = 0; i < 100; ++i) {
    const aes::KeySchedule ks(random_block(rng));
    aes::Nonce nonce;
    for (auto& b : nonce) b = static_cast<std::uint8_t>(rng());
    const AnnexBStream stream = (i % 4 == 0) ? adversarial_stream(ks, nonce, rng)
                                             : scan_annexb(gen_test_stream(random_config(rng)));

    AnnexBStream encrypted = stream;
    for (std::uint32_t ordinal : select(stream.nals, EncryptionPolicy::IdrOnly).selected_ordinals) {
      encrypted.nals[ordinal] = encrypt_for_check(stream.nals[ordinal], ks, nonce, skip_reescape);
    }
    std::string failure;
    try {
      const AnnexBStream re = scan_annexb(serialize_annexb(encrypted));
      if (re.nals.size() != stream.nals.size()) {
        failure = "NAL count " + std::to_string(re.nals.size()) + " vs " +
                  std::to_string(stream.nals.size());
      }
      for (std::size_t k = 0; failure.empty() && k < re.nals.size(); ++k) {
        const NalUnit& a = re.nals[k];
        const NalUnit& b = stream.nals[k];
        if (a.ordinal != b.ordinal || a.header != b.header ||
            a.start_code_len != b.start_code_len || !satisfies_escaping(a.ebsp)) {
          failure = "NAL " + std::to_string(k) + " differs after rescan";
        }
      }
    } catch (const Error& e) {
      failure = e.what();
    }
    t.expect(failure.empty(), [&] { return failure; });
  }
  return t.finish("selective.compliance");
}

OracleCheck check_selectivity(std::mt19937_64& rng) {
  Tally t;
  for (int i = 0; i < 50; ++i) {
    const AnnexBStream stream = scan_annexb(gen_test_stream(random_config(rng)));
    const aes::KeySchedule ks(random_block(rng));
    for (EncryptionPolicy policy : {EncryptionPolicy::IdrOnly, EncryptionPolicy::AllIntra}) {
      const EncryptedStream enc = encrypt_stream(stream.nals, ks, policy, {});
      std::uint64_t bytes = 0, blocks = 0;
      for (std::uint32_t ordinal : enc.header.ordinals) {
        const std::uint64_t len = ebsp_to_rbsp(stream.nals[ordinal].ebsp).size();
        bytes += len;
        blocks += aes::blocks_for(len);
      }
      t.expect(enc.stats.bytes == bytes && enc.stats.blocks == blocks,
               [&] { return "stream " + std::to_string(i); });
      for (const NalUnit& nal : stream.nals) {
        const bool selected = std::binary_search(enc.header.ordinals.begin(),
                                                 enc.header.ordinals.end(), nal.ordinal);
        t.expect(selected || enc.nals[nal.ordinal] == nal,
                 [&] { return "unselected NAL " + std::to_string(nal.ordinal) + " modified"; });
      }
    }
  }
  return t.finish("selective.selectivity");
}

OracleCheck check_kdf_vectors() {
  struct Vector {
    const char* passphrase;
    std::uint32_t iterations;
    const char* key;
  };
  // Computed once with an independent implementation of the passphrase KDF.
  const Vector vectors[] = {
      {"a", 1, "5e032572a8bddda63df07808e7f3fbad"},
      {"a", 2, "2900a13c3341823438db2622ed48c704"},
      {"password", 10, "153709eadf7b97e60bc13aa2cef0df74"},
      {"correct horse battery staple", 100, "9633a47e3978d8e2b133a0e05bcd04a0"},
      {"Aa1!Aa1!", 10000, "2bb075fc67378244e477039136d90298"},
      {"exactly16bytes!!", 3, "5374079bea885901335be65506642d69"},
  };
  Tally t;
  for (const Vector& v : vectors) {
    const std::string got = to_hex(derive_key(Passphrase{v.passphrase, v.iterations}));
    t.expect(got == v.key, [&] { return std::string(v.passphrase) + " -> " + got; });
  }
  return t.finish("kdf.regression");
}

}  // namespace

BenchResult bench(std::span<const NalUnit> nals, const aes::KeySchedule& ks,
                  EncryptionPolicy policy, const aes::Nonce& nonce) {
  BenchResult r;
  r.total_bytes = serialized_size(nals);
  r.vcl_payload_bytes = select(nals, policy).total_payload_bytes;

  auto start = Clock::now();
  const EncryptedStream selective = encrypt_stream(nals, ks, policy, nonce);
  r.wall_time_selective = seconds_since(start);
  r.selective_encrypted_bytes = selective.stats.bytes;
  r.aes_blocks_selective = selective.stats.blocks;
  r.escaping_size_delta = static_cast<std::int64_t>(serialized_size(selective.nals)) -
                          static_cast<std::int64_t>(r.total_bytes);

  CipherStats naive;
  start = Clock::now();
  for (const NalUnit& nal : nals) (void)encrypt_nal(nal, ks, nonce, &naive);
  r.wall_time_naive = seconds_since(start);
  r.naive_encrypted_bytes = naive.bytes;
  r.aes_blocks_naive = naive.blocks;

  r.selective_fraction = r.vcl_payload_bytes == 0
                             ? 0.0
                             : static_cast<double>(r.selective_encrypted_bytes) /
                                   static_cast<double>(r.vcl_payload_bytes);
  return r;
}

nlohmann::json to_json(const BenchResult& r) {
  return {
      {"total_bytes", r.total_bytes},
      {"vcl_payload_bytes", r.vcl_payload_bytes},
      {"selective_encrypted_bytes", r.selective_encrypted_bytes},
      {"naive_encrypted_bytes", r.naive_encrypted_bytes},
      {"selective_fraction", r.selective_fraction},
      {"aes_blocks_selective", r.aes_blocks_selective},
      {"aes_blocks_naive", r.aes_blocks_naive},
      {"wall_time_selective", r.wall_time_selective},
      {"wall_time_naive", r.wall_time_naive},
      {"escaping_size_delta", r.escaping_size_delta},
  };
}

void print_bench(std::ostream& os, const BenchResult& r) {
  os << "total_bytes " << r.total_bytes << "\n"
     << "vcl_payload_bytes " << r.vcl_payload_bytes << "\n"
     << "selective_encrypted_bytes " << r.selective_encrypted_bytes << "\n"
     << "naive_encrypted_bytes " << r.naive_encrypted_bytes << "\n"
     << "selective_fraction " << std::setprecision(6) << r.selective_fraction << "\n"
     << "aes_blocks_selective " << r.aes_blocks_selective << "\n"
     << "aes_blocks_naive " << r.aes_blocks_naive << "\n"
     << "wall_time_selective " << r.wall_time_selective << "\n"
     << "wall_time_naive " << r.wall_time_naive << "\n"
     << "escaping_size_delta " << r.escaping_size_delta << "\n";
}

bool OracleReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed; });
}

const OracleCheck* OracleReport::find(std::string_view name) const {
  auto it = std::find_if(checks.begin(), checks.end(),
                         [name](const OracleCheck& c) { return c.name == name; });
  return it == checks.end() ? nullptr : &*it;
}

OracleReport oracle_suite(const OracleConfig& config) {
  const aes::SBox& box = *config.sbox;
  // Each check draws from its own stream so one check's work never shifts
  // another's inputs.
  std::seed_seq seq{config.seed};
  std::vector<std::uint64_t> seeds(8);
  {
    std::vector<std::uint32_t> words(16);
    seq.generate(words.begin(), words.end());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      seeds[i] = std::uint64_t{words[2 * i]} << 32 | words[2 * i + 1];
    }
  }
  auto rng = [&](std::size_t i) { return std::mt19937_64(seeds[i]); };

  OracleReport report;
  auto run = [&](const std::string& name, const std::function<OracleCheck()>& body) {
    report.checks.push_back(guarded(name, body));
  };
  run("aes.known_answer", [&] { return check_known_answers(box); });
  run("aes.round_trip", [&] { auto r = rng(0); return check_block_round_trip(box, r); });
  run("aes.transform_algebra", [&] { auto r = rng(1); return check_transform_algebra(box, r); });
  run("aes.key_schedule", [&] { auto r = rng(2); return check_key_schedule(box, r); });
  run("bitstream.round_trip", [&] { auto r = rng(3); return check_bitstream_round_trip(r); });
  run("escaping.round_trip", [&] { auto r = rng(4); return check_escaping(r); });
  run("exp_golomb.exhaustive", [] { return check_exp_golomb(); });
  run("selective.round_trip", [&] { auto r = rng(5); return check_selective_round_trip(box, r); });
  run("selective.compliance",
      [&] { auto r = rng(6); return check_compliance(config.skip_reescape, r); });
  run("selective.selectivity", [&] { auto r = rng(7); return check_selectivity(r); });
  run("kdf.regression", [] { return check_kdf_vectors(); });
  return report;
}

}  // namespace selenc
