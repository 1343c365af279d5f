#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "selenc/commands.hpp"
#include "selenc/error.hpp"
#include "support/streams.hpp"

using namespace selenc;
namespace fs = std::filesystem;

namespace {

const char* kKey = "000102030405060708090a0b0c0d0e0f";
const aes::Nonce kNonce = {9, 8, 7, 6, 5, 4, 3, 2};

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("selenc-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  ErrorCode code_of(const std::function<void()>& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::Io;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CommandsTest, FileRoundTrip) {
  const Bytes original = cmd_gen_test(path("in.264"), {.gop = 12, .frames = 60, .payload_size = 300});
  EncryptRequest req{path("in.264"), path("enc.264"), path("enc.meta"), RawKey{kKey},
                     EncryptionPolicy::IdrOnly, kNonce};
  const EncryptOutcome outcome = cmd_encrypt(req);

  std::size_t idr_rows = 0;
  for (const auto& row : outcome.report.rows) idr_rows += row.nal.kind == NalKind::Idr;
  EXPECT_EQ(outcome.header.ordinals.size(), idr_rows);
  EXPECT_EQ(CipherHeader::parse(read_file(path("enc.meta"))), outcome.header);
  EXPECT_NE(read_file(path("enc.264")), original);

  cmd_decrypt(path("enc.264"), path("enc.meta"), path("dec.264"), RawKey{kKey});
  EXPECT_EQ(read_file(path("dec.264")), original);
}

TEST_F(CommandsTest, PassphraseRoundTripAndWrongPassphrase) {
  const Bytes original = cmd_gen_test(path("in.264"), {.gop = 4, .frames = 12, .payload_size = 100});
  EncryptRequest req{path("in.264"), path("enc.264"), path("enc.meta"),
                     Passphrase{"open sesame", 50}, EncryptionPolicy::AllIntra, std::nullopt};
  cmd_encrypt(req);

  EXPECT_EQ(code_of([&] {
              cmd_decrypt(path("enc.264"), path("enc.meta"), path("bad.264"),
                          Passphrase{"open sesame!", 50});
            }),
            ErrorCode::WrongKey);
  EXPECT_FALSE(fs::exists(path("bad.264")));

  cmd_decrypt(path("enc.264"), path("enc.meta"), path("dec.264"), Passphrase{"open sesame", 50});
  EXPECT_EQ(read_file(path("dec.264")), original);
}

TEST_F(CommandsTest, EmptyInputWritesNothing) {
  write_file_atomic(path("empty.264"), Bytes{});
  EncryptRequest req{path("empty.264"), path("enc.264"), path("enc.meta"), RawKey{kKey},
                     EncryptionPolicy::IdrOnly, kNonce};
  EXPECT_EQ(code_of([&] { cmd_encrypt(req); }), ErrorCode::NoStartCode);
  EXPECT_FALSE(fs::exists(path("enc.264")));
  EXPECT_FALSE(fs::exists(path("enc.meta")));
  EXPECT_EQ(code_of([&] { cmd_inspect(path("empty.264")); }), ErrorCode::NoStartCode);
}

TEST_F(CommandsTest, MissingInputIsIoError) {
  EXPECT_EQ(code_of([&] { cmd_inspect(path("nope.264")); }), ErrorCode::Io);
}

TEST_F(CommandsTest, ExplicitNonceIsDeterministic) {
  cmd_gen_test(path("in.264"), {.gop = 3, .frames = 9, .payload_size = 80});
  EncryptRequest a{path("in.264"), path("a.264"), path("a.meta"), RawKey{kKey},
                   EncryptionPolicy::IdrOnly, kNonce};
  EncryptRequest b = a;
  b.out = path("b.264");
  b.meta = path("b.meta");
  cmd_encrypt(a);
  cmd_encrypt(b);
  EXPECT_EQ(read_file(path("a.264")), read_file(path("b.264")));
  EXPECT_EQ(read_file(path("a.meta")), read_file(path("b.meta")));
}

TEST_F(CommandsTest, TruncatedSidecar) {
  cmd_gen_test(path("in.264"), {.gop = 3, .frames = 9, .payload_size = 80});
  EncryptRequest req{path("in.264"), path("enc.264"), path("enc.meta"), RawKey{kKey},
                     EncryptionPolicy::IdrOnly, kNonce};
  cmd_encrypt(req);
  const Bytes meta = read_file(path("enc.meta"));

  write_file_atomic(path("short.meta"), ByteView(meta).first(2));
  EXPECT_EQ(code_of([&] { cmd_decrypt(path("enc.264"), path("short.meta"), path("o"), RawKey{kKey}); }),
            ErrorCode::BadMagic);
  write_file_atomic(path("short.meta"), ByteView(meta).first(meta.size() - 2));
  EXPECT_EQ(code_of([&] { cmd_decrypt(path("enc.264"), path("short.meta"), path("o"), RawKey{kKey}); }),
            ErrorCode::MalformedHeader);
  EXPECT_FALSE(fs::exists(path("o")));
}

TEST_F(CommandsTest, InspectHandBuiltStream) {
  const auto nals = testing_support::build_stream({5});
  write_file_atomic(path("s.264"), serialize_annexb(nals));
  const StreamReport report = cmd_inspect(path("s.264"));
  ASSERT_EQ(report.rows.size(), 3u);
  EXPECT_EQ(report.rows[0].nal.header.nal_unit_type, 7);
  EXPECT_EQ(report.rows[1].nal.header.nal_unit_type, 8);
  EXPECT_EQ(report.rows[2].nal.header.nal_unit_type, 5);
  EXPECT_TRUE(report.rows[2].selected);
}

TEST_F(CommandsTest, InspectEncryptedKeepsTypeSequence) {
  cmd_gen_test(path("in.264"), {.gop = 5, .frames = 25, .payload_size = 120});
  cmd_encrypt({path("in.264"), path("enc.264"), path("enc.meta"), RawKey{kKey},
               EncryptionPolicy::IdrOnly, kNonce});
  const StreamReport plain = cmd_inspect(path("in.264"));
  const StreamReport enc = cmd_inspect(path("enc.264"));
  ASSERT_EQ(plain.rows.size(), enc.rows.size());
  for (std::size_t i = 0; i < plain.rows.size(); ++i) {
    EXPECT_EQ(plain.rows[i].nal.header, enc.rows[i].nal.header);
    EXPECT_EQ(plain.rows[i].nal.start_code_len, enc.rows[i].nal.start_code_len);
  }
}

TEST_F(CommandsTest, ReportAggregatesAreRowSums) {
  const Bytes data = cmd_gen_test(path("in.264"), {.gop = 4, .frames = 13, .payload_size = 90});
  const StreamReport r = cmd_inspect(path("in.264"));
  std::uint64_t vcl = 0, selected = 0, blocks = 0;
  for (const auto& row : r.rows) {
    if (row.nal.header.is_vcl()) vcl += row.nal.rbsp_size;
    if (row.selected) {
      selected += row.nal.rbsp_size;
      blocks += aes::blocks_for(row.nal.rbsp_size);
    }
  }
  EXPECT_EQ(r.total_bytes, data.size());
  EXPECT_EQ(r.vcl_payload_bytes, vcl);
  EXPECT_EQ(r.selected_bytes, selected);
  EXPECT_EQ(r.aes_blocks, blocks);
  EXPECT_DOUBLE_EQ(r.encrypted_fraction(), 4.0 / 13.0);

  const auto json = to_json(r);
  EXPECT_EQ(json["nal_count"], r.rows.size());
  EXPECT_EQ(json["nals"][2]["type"], "IDR");
  EXPECT_EQ(json["nals"][2]["slice"]["slice_type"], 7);
}

TEST_F(CommandsTest, LeadingGarbageSurvivesRoundTrip) {
  Bytes data = {0x47, 0x11};
  const Bytes stream = gen_test_stream({.gop = 2, .frames = 4, .payload_size = 50});
  data.insert(data.end(), stream.begin(), stream.end());
  write_file_atomic(path("g.264"), data);
  cmd_encrypt({path("g.264"), path("enc.264"), path("enc.meta"), RawKey{kKey},
               EncryptionPolicy::IdrOnly, kNonce});
  cmd_decrypt(path("enc.264"), path("enc.meta"), path("dec.264"), RawKey{kKey});
  EXPECT_EQ(read_file(path("dec.264")), data);
  EXPECT_EQ(cmd_inspect(path("g.264")).leading_bytes, 2u);
}
