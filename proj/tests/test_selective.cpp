#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "selenc/error.hpp"
#include "selenc/generator.hpp"
#include "selenc/selective.hpp"
#include "support/streams.hpp"

using namespace selenc;
using testing_support::build_stream;
using testing_support::bytes;
using testing_support::make_nal;

namespace {

const aes::Nonce kNonce = {1, 2, 3, 4, 5, 6, 7, 8};

aes::KeySchedule schedule(std::uint8_t fill) { return aes::KeySchedule(Bytes(16, fill)); }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::Io;
}

std::vector<std::uint32_t> ordinals(std::initializer_list<std::uint32_t> v) { return v; }

}  // namespace

TEST(Select, IdrOnly) {
  const auto nals = build_stream({5, 1, 1, 1});
  const auto result = select(nals, EncryptionPolicy::IdrOnly);
  EXPECT_EQ(result.selected_ordinals, ordinals({2}));
  EXPECT_EQ(result.selected_bytes, ebsp_to_rbsp(nals[2].ebsp).size());
  std::uint64_t vcl = 0;
  for (std::size_t i = 2; i < nals.size(); ++i) vcl += ebsp_to_rbsp(nals[i].ebsp).size();
  EXPECT_EQ(result.total_payload_bytes, vcl);
}

TEST(Select, AllIntraWithPSlicesMatchesIdrOnly) {
  const auto nals = build_stream({5, 1, 1, 1}, /*non_idr_slice_type=*/0);
  EXPECT_EQ(select(nals, EncryptionPolicy::AllIntra).selected_ordinals, ordinals({2}));
}

TEST(Select, AllIntraPicksIntraNonIdrSlices) {
  auto nals = build_stream({5, 1, 1, 1}, /*non_idr_slice_type=*/5);
  nals[4] = make_nal(4, 0x41, testing_support::slice_rbsp(7, 30, 99), 3);
  EXPECT_EQ(select(nals, EncryptionPolicy::AllIntra).selected_ordinals, ordinals({2, 4}));
  EXPECT_EQ(select(nals, EncryptionPolicy::IdrOnly).selected_ordinals, ordinals({2}));
}

TEST(Select, NothingMatches) {
  const auto nals = build_stream({1, 1});
  EXPECT_TRUE(select(nals, EncryptionPolicy::AllIntra).selected_ordinals.empty());
  EXPECT_EQ(select(nals, EncryptionPolicy::AllIntra).selected_bytes, 0u);
}

TEST(Select, UnparseableSliceTreatedAsNonIntra) {
  auto nals = build_stream({5, 1});
  nals[3].ebsp.clear();
  const auto result = select(nals, EncryptionPolicy::AllIntra);
  EXPECT_EQ(result.selected_ordinals, ordinals({2}));
  EXPECT_EQ(result.unparsed_ordinals, ordinals({3}));
}

TEST(Select, NonVclNeverSelected) {
  std::vector<NalUnit> nals = {make_nal(0, 0x67, bytes({1})), make_nal(1, 0x68, bytes({2})),
                               make_nal(2, 0x06, bytes({3})), make_nal(3, 0x09, bytes({4}))};
  const auto result = select(nals, EncryptionPolicy::AllIntra);
  EXPECT_TRUE(result.selected_ordinals.empty());
  EXPECT_EQ(result.total_payload_bytes, 0u);
}

TEST(EncryptNal, EmptyPayload) {
  const NalUnit nal = make_nal(3, 0x65, {});
  CipherStats stats;
  EXPECT_EQ(encrypt_nal(nal, schedule(1), kNonce, &stats), nal);
  EXPECT_EQ(stats.blocks, 0u);
}

TEST(EncryptNal, KeepsFramingAndRoundTrips) {
  std::mt19937_64 rng(31);
  const auto ks = schedule(7);
  for (int trial = 0; trial < 500; ++trial) {
    Bytes rbsp(rng() % 200);
    for (auto& b : rbsp) b = rng() % 3 == 0 ? 0x00 : static_cast<std::uint8_t>(rng());
    const NalUnit nal = make_nal(static_cast<std::uint32_t>(rng() % 1000), 0x65, rbsp,
                                 rng() % 2 ? 4 : 3);
    const NalUnit enc = encrypt_nal(nal, ks, kNonce);
    EXPECT_EQ(enc.ordinal, nal.ordinal);
    EXPECT_EQ(enc.start_code_len, nal.start_code_len);
    EXPECT_EQ(enc.header, nal.header);
    EXPECT_TRUE(satisfies_escaping(enc.ebsp));
    EXPECT_TRUE(enc.ebsp.empty() || enc.ebsp.back() != 0x00);
    ASSERT_EQ(decrypt_nal(enc, ks, kNonce), nal) << "trial " << trial;

    // Growth is exactly the inserted 0x03 bytes: unescaping recovers the
    // ciphertext RBSP, which has the plaintext's length.
    Bytes stripped = enc.ebsp;
    strip_tail_guard(stripped);
    const Bytes cipher_rbsp = ebsp_to_rbsp(stripped);
    EXPECT_EQ(cipher_rbsp.size(), rbsp.size());
    const auto threes_in = std::count(nal.ebsp.begin(), nal.ebsp.end(), 0x03) -
                           std::count(rbsp.begin(), rbsp.end(), 0x03);
    const auto threes_out = std::count(enc.ebsp.begin(), enc.ebsp.end(), 0x03) -
                            std::count(cipher_rbsp.begin(), cipher_rbsp.end(), 0x03);
    EXPECT_EQ(enc.ebsp.size() - rbsp.size(), static_cast<std::size_t>(threes_out));
    EXPECT_EQ(nal.ebsp.size() - rbsp.size(), static_cast<std::size_t>(threes_in));
  }
}

TEST(EncryptNal, CiphertextDiffersFromPlaintext) {
  std::mt19937_64 rng(32);
  const auto ks = schedule(9);
  for (int trial = 0; trial < 200; ++trial) {
    Bytes rbsp(16 + rng() % 300);
    for (auto& b : rbsp) b = static_cast<std::uint8_t>(rng());
    const NalUnit nal = make_nal(static_cast<std::uint32_t>(trial), 0x65, rbsp);
    Bytes enc = encrypt_nal(nal, ks, kNonce).ebsp;
    strip_tail_guard(enc);
    const Bytes cipher = ebsp_to_rbsp(enc);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < rbsp.size(); ++i) differing += cipher[i] != rbsp[i];
    EXPECT_GE(4 * differing, rbsp.size()) << "trial " << trial;
  }
}

TEST(EncryptNal, RejectsNonCanonicalEscaping) {
  NalUnit nal = make_nal(0, 0x65, {});
  nal.ebsp = bytes({0x00, 0x00, 0x03, 0x07});  // 0x03 not needed before 0x07
  EXPECT_EQ(code_of([&] { encrypt_nal(nal, schedule(1), kNonce); }), ErrorCode::MalformedEscape);
}

TEST(TailGuard, IsReversibleAndNeverEndsInZero) {
  const std::vector<Bytes> cases = {
      {},
      bytes({0x03}),
      bytes({0x00}),
      bytes({0x11, 0x00}),
      bytes({0x11, 0x00, 0x03}),
      bytes({0x00, 0x00, 0x03, 0x03}),
      bytes({0x11, 0x00, 0x03, 0x03, 0x03}),
      bytes({0x11, 0x22}),
      bytes({0x03, 0x03}),
  };
  for (const Bytes& c : cases) {
    Bytes g = c;
    append_tail_guard(g);
    EXPECT_TRUE(g.empty() || g.back() != 0x00);
    strip_tail_guard(g);
    EXPECT_EQ(g, c) << to_hex(c);
  }
}

TEST(CipherHeader, BitExactLayout) {
  CipherHeader h;
  h.policy = EncryptionPolicy::AllIntra;
  h.key_check = {0xc6, 0xa1, 0x3b, 0x37};
  h.nonce = {0, 1, 2, 3, 4, 5, 6, 7};
  h.ordinals = {2, 14, 0x01020304};
  EXPECT_EQ(to_hex(h.serialize()),
            "53454831"          // SEH1
            "01"                // version
            "01"                // policy
            "c6a13b37"          // key check
            "0001020304050607"  // nonce
            "00000003"          // count
            "00000002"
            "0000000e"
            "01020304");
  EXPECT_EQ(CipherHeader::parse(h.serialize()), h);
}

TEST(CipherHeader, ParseErrors) {
  CipherHeader h;
  h.ordinals = {1, 2};
  const Bytes good = h.serialize();

  EXPECT_EQ(code_of([&] { CipherHeader::parse(Bytes(good.begin(), good.begin() + 3)); }),
            ErrorCode::BadMagic);
  Bytes bad = good;
  bad[0] = 'X';
  EXPECT_EQ(code_of([&] { CipherHeader::parse(bad); }), ErrorCode::BadMagic);
  bad = good;
  bad[4] = 0x02;
  EXPECT_EQ(code_of([&] { CipherHeader::parse(bad); }), ErrorCode::BadVersion);
  bad = good;
  bad[5] = 0x07;
  EXPECT_EQ(code_of([&] { CipherHeader::parse(bad); }), ErrorCode::MalformedHeader);
  EXPECT_EQ(code_of([&] { CipherHeader::parse(Bytes(good.begin(), good.end() - 1)); }),
            ErrorCode::MalformedHeader);
  EXPECT_EQ(code_of([&] { CipherHeader::parse(Bytes(good.begin(), good.begin() + 10)); }),
            ErrorCode::MalformedHeader);
  bad = good;
  bad[25] = 0x05;  // first ordinal 5 > second ordinal 2
  EXPECT_EQ(code_of([&] { CipherHeader::parse(bad); }), ErrorCode::MalformedHeader);

  h.ordinals = {3, 3};
  EXPECT_EQ(code_of([&] { h.serialize(); }), ErrorCode::MalformedHeader);
}

TEST(KeyCheck, FirstBytesOfZeroBlockEncryption) {
  const aes::KeySchedule ks(from_hex("000102030405060708090a0b0c0d0e0f"));
  EXPECT_EQ(to_hex(key_check(ks)), "c6a13b37");
}

TEST(EncryptStream, EmptyStream) {
  const auto out = encrypt_stream({}, schedule(1), EncryptionPolicy::IdrOnly, kNonce);
  EXPECT_TRUE(out.nals.empty());
  EXPECT_TRUE(out.header.ordinals.empty());
  EXPECT_EQ(out.header.serialize().size(), CipherHeader::kFixedSize);
}

TEST(EncryptStream, GeneratedSixtyFramesHasFiveIdrEntries) {
  const AnnexBStream s = scan_annexb(gen_test_stream({.gop = 12, .frames = 60, .payload_size = 200}));
  const auto ks = schedule(3);
  const auto out = encrypt_stream(s.nals, ks, EncryptionPolicy::IdrOnly, kNonce);
  EXPECT_EQ(out.header.ordinals.size(), 5u);
  EXPECT_EQ(out.header.key_check, key_check(ks));
  EXPECT_EQ(out.header.nonce, kNonce);
  ASSERT_EQ(out.nals.size(), s.nals.size());
  for (std::size_t i = 0; i < s.nals.size(); ++i) {
    const bool selected = std::binary_search(out.header.ordinals.begin(),
                                             out.header.ordinals.end(), s.nals[i].ordinal);
    EXPECT_EQ(out.nals[i].header, s.nals[i].header);
    if (!selected) EXPECT_EQ(out.nals[i], s.nals[i]);
    else EXPECT_NE(out.nals[i].ebsp, s.nals[i].ebsp);
  }
}

TEST(DecryptStream, RoundTripBothPolicies) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 60; ++trial) {
    const TestStreamConfig cfg{.gop = 1 + static_cast<std::uint32_t>(rng() % 8),
                               .frames = 1 + static_cast<std::uint32_t>(rng() % 20),
                               .payload_size = 4 + static_cast<std::uint32_t>(rng() % 150),
                               .seed = rng()};
    const Bytes wire = gen_test_stream(cfg);
    const AnnexBStream s = scan_annexb(wire);
    const auto ks = schedule(static_cast<std::uint8_t>(rng()));
    for (auto policy : {EncryptionPolicy::IdrOnly, EncryptionPolicy::AllIntra}) {
      const auto enc = encrypt_stream(s.nals, ks, policy, kNonce);
      const Bytes enc_wire = serialize_annexb(AnnexBStream{s.leading, enc.nals});
      const AnnexBStream rescanned = scan_annexb(enc_wire);
      ASSERT_EQ(rescanned.nals.size(), s.nals.size());
      for (std::size_t i = 0; i < s.nals.size(); ++i) {
        EXPECT_EQ(rescanned.nals[i].header, s.nals[i].header);
        EXPECT_EQ(rescanned.nals[i].start_code_len, s.nals[i].start_code_len);
      }
      const auto dec = decrypt_stream(rescanned.nals, ks, enc.header);
      ASSERT_EQ(serialize_annexb(AnnexBStream{rescanned.leading, dec}), wire);
    }
  }
}

TEST(DecryptStream, WrongKeyFailsBeforeTouchingPayload) {
  const AnnexBStream s = scan_annexb(gen_test_stream({.gop = 4, .frames = 8, .payload_size = 64}));
  const auto enc = encrypt_stream(s.nals, schedule(1), EncryptionPolicy::IdrOnly, kNonce);
  const auto snapshot = enc.nals;
  CipherStats stats;
  EXPECT_EQ(code_of([&] { decrypt_stream(enc.nals, schedule(2), enc.header, &stats); }),
            ErrorCode::WrongKey);
  EXPECT_EQ(stats.blocks, 0u);
  EXPECT_EQ(enc.nals, snapshot);
}

TEST(DecryptStream, WrongKeyPayloadWouldDiffer) {
  const NalUnit nal = make_nal(0, 0x65, bytes({0x88, 0x12, 0x34, 0x56, 0x80}));
  const NalUnit enc = encrypt_nal(nal, schedule(1), kNonce);
  EXPECT_NE(decrypt_nal(enc, schedule(2), kNonce), nal);
}

TEST(DecryptStream, OrdinalOutOfRange) {
  const AnnexBStream s = scan_annexb(gen_test_stream({.gop = 4, .frames = 8, .payload_size = 64}));
  ASSERT_EQ(s.nals.size(), 10u);
  const auto ks = schedule(1);
  CipherHeader header;
  header.key_check = key_check(ks);
  header.ordinals = {999};
  EXPECT_EQ(code_of([&] { decrypt_stream(s.nals, ks, header); }), ErrorCode::OrdinalOutOfRange);
}

TEST(EncryptStream, BlockCountsAreExact) {
  const AnnexBStream s = scan_annexb(gen_test_stream({.gop = 3, .frames = 12, .payload_size = 77}));
  const auto enc = encrypt_stream(s.nals, schedule(5), EncryptionPolicy::IdrOnly, kNonce);
  std::uint64_t bytes_total = 0, blocks = 0;
  for (std::uint32_t o : enc.header.ordinals) {
    const auto len = ebsp_to_rbsp(s.nals[o].ebsp).size();
    bytes_total += len;
    blocks += aes::blocks_for(len);
  }
  EXPECT_EQ(enc.stats.bytes, bytes_total);
  EXPECT_EQ(enc.stats.blocks, blocks);
}

TEST(Policy, Names) {
  EXPECT_EQ(parse_policy("idr"), EncryptionPolicy::IdrOnly);
  EXPECT_EQ(parse_policy("all-i"), EncryptionPolicy::AllIntra);
  EXPECT_FALSE(parse_policy("everything").has_value());
  EXPECT_EQ(to_string(EncryptionPolicy::AllIntra), "all-i");
}
