#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace symsys {

/// Round-trip decimal form ("%.17g"), so CSV/JSON bytes are a pure
/// function of the binary value.
std::string format_double(double v);

/// 64-bit FNV-1a of `text`, as 16 lowercase hex digits.
std::string digest_hex(std::string_view text);

}  // namespace symsys
