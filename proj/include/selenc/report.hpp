#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "selenc/bitstream.hpp"

namespace selenc {

struct ReportRow {
  NalRow nal;
  bool selected = false;
};

/// Per-NAL rows plus totals. Every aggregate is a sum over `rows` (or the
/// stream size), recomputed by build_report.
struct StreamReport {
  std::vector<ReportRow> rows;
  std::uint64_t total_bytes = 0;
  std::uint64_t leading_bytes = 0;
  std::uint64_t vcl_payload_bytes = 0;
  std::uint64_t selected_bytes = 0;
  std::uint64_t aes_blocks = 0;
  std::uint64_t forbidden_bit_count = 0;
  std::uint64_t unparsed_count = 0;

  double encrypted_fraction() const {
    return vcl_payload_bytes == 0 ? 0.0
                                  : static_cast<double>(selected_bytes) /
                                        static_cast<double>(vcl_payload_bytes);
  }
};

/// `selected` must be sorted.
StreamReport build_report(const AnnexBStream& stream, std::uint64_t total_bytes,
                          std::span<const std::uint32_t> selected);

nlohmann::json to_json(const StreamReport& report);
void print_report(std::ostream& os, const StreamReport& report);

}  // namespace selenc
