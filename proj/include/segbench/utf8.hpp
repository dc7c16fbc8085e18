#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace segbench {

// Minimal UTF-8 walking.  Annotation offsets count code points, not bytes,
// so spans survive multi-byte scripts.  Malformed bytes are treated as one
// code point each (value 0xFFFD) instead of raising; pool text is taken as
// it comes.

// Decodes the code point starting at byte `pos` and advances `pos` past it.
std::uint32_t utf8_decode(const std::string& s, std::size_t& pos);

// Number of code points in the whole string.
std::size_t utf8_length(const std::string& s);

// Byte offset of each code point, plus one past-the-end entry, so that the
// code point range [a, b) maps to the byte range [idx[a], idx[b]).
std::vector<std::size_t> utf8_byte_index(const std::string& s);

} // namespace segbench
