#include "segbench/utf8.hpp"

namespace segbench {

std::uint32_t utf8_decode(const std::string& s, std::size_t& pos) {
    const auto byte = [&](std::size_t i) {
        return static_cast<unsigned char>(s[i]);
    };
    const unsigned char b0 = byte(pos);
    std::size_t len = 1;
    std::uint32_t cp = 0xFFFD;
    if (b0 < 0x80) {
        cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++pos;
        return 0xFFFD;
    }
    if (pos + len > s.size()) {
        ++pos;
        return 0xFFFD;
    }
    for (std::size_t i = 1; i < len; ++i) {
        const unsigned char b = byte(pos + i);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    pos += len;
    return cp;
}

std::size_t utf8_length(const std::string& s) {
    std::size_t pos = 0, count = 0;
    while (pos < s.size()) {
        utf8_decode(s, pos);
        ++count;
    }
    return count;
}

std::vector<std::size_t> utf8_byte_index(const std::string& s) {
    std::vector<std::size_t> idx;
    std::size_t pos = 0;
    while (pos < s.size()) {
        idx.push_back(pos);
        utf8_decode(s, pos);
    }
    idx.push_back(s.size());
    return idx;
}

} // namespace segbench
