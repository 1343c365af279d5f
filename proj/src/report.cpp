#include "selenc/report.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "selenc/aes.hpp"

namespace selenc {

StreamReport build_report(const AnnexBStream& stream, std::uint64_t total_bytes,
                          std::span<const std::uint32_t> selected) {
  StreamReport report;
  report.total_bytes = total_bytes;
  report.leading_bytes = stream.leading.size();
  for (const NalRow& nal : classify_stream(stream.nals)) {
    ReportRow row{nal, std::binary_search(selected.begin(), selected.end(), nal.ordinal)};
    if (nal.header.is_vcl()) report.vcl_payload_bytes += nal.rbsp_size;
    if (row.selected) {
      report.selected_bytes += nal.rbsp_size;
      report.aes_blocks += aes::blocks_for(nal.rbsp_size);
    }
    if (nal.header.forbidden_zero_bit) ++report.forbidden_bit_count;
    if (nal.unparsed) ++report.unparsed_count;
    report.rows.push_back(row);
  }
  return report;
}

nlohmann::json to_json(const StreamReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ReportRow& row : report.rows) {
    nlohmann::json r = {
        {"ordinal", row.nal.ordinal},
        {"start_code_len", row.nal.start_code_len},
        {"nal_unit_type", row.nal.header.nal_unit_type},
        {"nal_ref_idc", row.nal.header.nal_ref_idc},
        {"forbidden_zero_bit", row.nal.header.forbidden_zero_bit},
        {"type", std::string(to_string(row.nal.kind))},
        {"ebsp_size", row.nal.ebsp_size},
        {"rbsp_size", row.nal.rbsp_size},
        {"unparsed", row.nal.unparsed},
        {"selected", row.selected},
    };
    if (row.nal.slice) {
      r["slice"] = {{"first_mb_in_slice", row.nal.slice->first_mb_in_slice},
                    {"slice_type", row.nal.slice->slice_type},
                    {"kind", std::string(slice_kind_name(row.nal.slice->slice_type))},
                    {"is_intra", row.nal.slice->is_intra}};
    }
    rows.push_back(std::move(r));
  }
  return {
      {"nal_count", report.rows.size()},
      {"total_bytes", report.total_bytes},
      {"leading_bytes", report.leading_bytes},
      {"vcl_payload_bytes", report.vcl_payload_bytes},
      {"selected_bytes", report.selected_bytes},
      {"encrypted_fraction", report.encrypted_fraction()},
      {"aes_blocks", report.aes_blocks},
      {"forbidden_bit_count", report.forbidden_bit_count},
      {"unparsed_count", report.unparsed_count},
      {"nals", std::move(rows)},
  };
}

void print_report(std::ostream& os, const StreamReport& report) {
  os << std::left << std::setw(8) << "ordinal" << std::setw(4) << "sc" << std::setw(6) << "type"
     << std::setw(9) << "name" << std::setw(5) << "ref" << std::setw(10) << "ebsp"
     << std::setw(10) << "rbsp" << std::setw(8) << "slice" << "flags\n";
  for (const ReportRow& row : report.rows) {
    const NalRow& n = row.nal;
    std::string slice = "-";
    if (n.slice) slice = std::string(slice_kind_name(n.slice->slice_type)) + "(" +
                         std::to_string(n.slice->slice_type) + ")";
    std::string flags;
    if (row.selected) flags += "selected ";
    if (n.unparsed) flags += "unparsed ";
    if (n.header.forbidden_zero_bit) flags += "forbidden-bit ";
    os << std::left << std::setw(8) << n.ordinal << std::setw(4) << int{n.start_code_len}
       << std::setw(6) << int{n.header.nal_unit_type} << std::setw(9) << to_string(n.kind)
       << std::setw(5) << int{n.header.nal_ref_idc} << std::setw(10) << n.ebsp_size
       << std::setw(10) << n.rbsp_size << std::setw(8) << slice << flags << "\n";
  }
  os << "nal units:          " << report.rows.size() << "\n"
     << "total bytes:        " << report.total_bytes << "\n";
  if (report.leading_bytes != 0) {
    os << "leading garbage:    " << report.leading_bytes << " bytes\n";
  }
  os << "vcl payload bytes:  " << report.vcl_payload_bytes << "\n"
     << "selected bytes:     " << report.selected_bytes << "\n"
     << "encrypted fraction: " << std::fixed << std::setprecision(4)
     << report.encrypted_fraction() << "\n"
     << "aes blocks:         " << report.aes_blocks << "\n";
  os.unsetf(std::ios_base::floatfield);
}

}  // namespace selenc
