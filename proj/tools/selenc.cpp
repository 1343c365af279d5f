// selenc: selective key-frame encryption for H.264 Annex B streams.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "selenc/commands.hpp"
#include "selenc/error.hpp"
#include "selenc/harness.hpp"

namespace {

struct KeyOptions {
  std::string key_hex;
  std::string passphrase;
  std::uint32_t kdf_iters = selenc::kDefaultKdfIterations;
};

void add_key_options(CLI::App* cmd, KeyOptions& opts) {
  auto* key = cmd->add_option("--key", opts.key_hex, "AES-128 key as 32 hex digits");
  auto* pass = cmd->add_option("--passphrase", opts.passphrase, "Derive the key from a passphrase");
  key->excludes(pass);
  cmd->add_option("--kdf-iters", opts.kdf_iters, "Passphrase KDF iterations")
      ->check(CLI::PositiveNumber);
  cmd->callback([cmd] {
    if (cmd->count("--key") + cmd->count("--passphrase") != 1) {
      throw CLI::ValidationError("exactly one of --key or --passphrase is required");
    }
  });
}

selenc::KeySource key_source(const KeyOptions& opts) {
  if (!opts.key_hex.empty()) return selenc::RawKey{opts.key_hex};
  const auto strength = selenc::estimate_passphrase_bits(opts.passphrase);
  if (strength.weak) {
    std::cerr << "selenc: warning: passphrase carries about " << static_cast<int>(strength.bits)
              << " bits, well short of a 128-bit key\n";
  }
  return selenc::Passphrase{opts.passphrase, opts.kdf_iters};
}

selenc::EncryptionPolicy policy_from(const std::string& name) {
  return *selenc::parse_policy(name);
}

std::optional<selenc::aes::Nonce> nonce_from(const std::string& hex) {
  if (hex.empty()) return std::nullopt;
  const selenc::Bytes bytes = selenc::from_hex(hex);
  if (bytes.size() != 8) {
    throw selenc::Error(selenc::ErrorCode::BadHex, "nonce must be 16 hex digits");
  }
  selenc::aes::Nonce nonce;
  std::copy(bytes.begin(), bytes.end(), nonce.begin());
  return nonce;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective encryption of H.264 Annex B key frames with AES-128-CTR"};
  app.require_subcommand(1);
  const auto policy_check = CLI::IsMember({"idr", "all-i"});

  std::string in, out, meta, policy = "idr", nonce_hex;
  bool json = false;
  KeyOptions keys;

  auto* encrypt = app.add_subcommand("encrypt", "Encrypt key-frame NAL payloads");
  encrypt->add_option("--in", in, "Input Annex B stream")->required();
  encrypt->add_option("--out", out, "Encrypted stream")->required();
  encrypt->add_option("--meta", meta, "Sidecar metadata file")->required();
  encrypt->add_option("--policy", policy, "idr or all-i")->check(policy_check);
  encrypt->add_option("--nonce", nonce_hex, "Fixed 8-byte nonce as hex (default random)");
  add_key_options(encrypt, keys);

  auto* decrypt = app.add_subcommand("decrypt", "Restore an encrypted stream");
  decrypt->add_option("--in", in, "Encrypted stream")->required();
  decrypt->add_option("--meta", meta, "Sidecar metadata file")->required();
  decrypt->add_option("--out", out, "Restored stream")->required();
  add_key_options(decrypt, keys);

  auto* inspect = app.add_subcommand("inspect", "Print the NAL units of a stream");
  inspect->add_option("--in", in, "Annex B stream")->required();
  inspect->add_flag("--json", json, "Machine-readable output");

  selenc::TestStreamConfig gen;
  auto* gen_test = app.add_subcommand("gen-test", "Write a synthetic test stream");
  gen_test->add_option("--out", out, "Output file")->required();
  gen_test->add_option("--gop", gen.gop, "Frames per GOP")->required()->check(CLI::PositiveNumber);
  gen_test->add_option("--frames", gen.frames, "Frame count")->required()->check(CLI::PositiveNumber);
  gen_test->add_option("--payload", gen.payload_size, "RBSP bytes per slice")
      ->check(CLI::Range(4u, 1u << 24));
  gen_test->add_option("--seed", gen.seed, "Generator seed");

  auto* bench = app.add_subcommand("bench", "Compare selective and whole-stream encryption work");
  bench->add_option("--in", in, "Annex B stream")->required();
  bench->add_option("--key", keys.key_hex, "AES-128 key as 32 hex digits")->required();
  bench->add_option("--policy", policy, "idr or all-i")->check(policy_check);
  bench->add_flag("--json", json, "Machine-readable output");

  selenc::OracleConfig oracle;
  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");
  selftest->add_option("--seed", oracle.seed, "Seed for randomized checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*encrypt) {
      selenc::EncryptRequest request{in, out, meta, key_source(keys), policy_from(policy),
                                     nonce_from(nonce_hex)};
      const auto outcome = selenc::cmd_encrypt(request);
      std::cout << "encrypted " << outcome.header.ordinals.size() << " of "
                << outcome.report.rows.size() << " NAL units, " << outcome.stats.bytes
                << " bytes in " << outcome.stats.blocks << " AES blocks ("
                << outcome.report.encrypted_fraction() * 100.0 << "% of slice payload)\n"
                << "nonce " << selenc::to_hex(outcome.header.nonce) << ", output "
                << outcome.output_bytes << " bytes (input " << outcome.report.total_bytes
                << ")\n";
    } else if (*decrypt) {
      const auto report = selenc::cmd_decrypt(in, meta, out, key_source(keys));
      std::cout << "decrypted " << report.aes_blocks << " AES blocks across "
                << report.rows.size() << " NAL units\n";
    } else if (*inspect) {
      const auto report = selenc::cmd_inspect(in);
      if (json) {
        std::cout << selenc::to_json(report).dump(2) << "\n";
      } else {
        selenc::print_report(std::cout, report);
      }
    } else if (*gen_test) {
      const auto data = selenc::cmd_gen_test(out, gen);
      std::cout << "wrote " << data.size() << " bytes to " << out << "\n";
    } else if (*bench) {
      const auto stream = selenc::load_stream(in);
      const selenc::aes::KeySchedule ks(selenc::derive_key(selenc::RawKey{keys.key_hex}));
      const auto result = selenc::bench(stream.nals, ks, policy_from(policy));
      if (json) {
        std::cout << selenc::to_json(result).dump(2) << "\n";
      } else {
        selenc::print_bench(std::cout, result);
      }
    } else if (*selftest) {
      const auto report = selenc::oracle_suite(oracle);
      for (const auto& check : report.checks) {
        std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << "  " << check.detail
                  << "\n";
      }
      return report.all_passed() ? 0 : 1;
    }
  } catch (const selenc::Error& e) {
    std::cerr << "selenc: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "selenc: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
