#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace selenc {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Lowercase hex, two characters per byte.
std::string to_hex(ByteView bytes);

/// Accepts upper- or lowercase digits; throws Error(BadHex) on odd length or
/// a non-hex character.
Bytes from_hex(std::string_view hex);

}  // namespace selenc
