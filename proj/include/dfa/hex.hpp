//
// Licensed by "The MIT License". See file LICENSE.
//

#ifndef DFA_HEX_HPP
#define DFA_HEX_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dfa {

// Bytes render as contiguous uppercase hex pairs, e.g. 'D4'.
inline std::string to_hex(std::span<const std::uint8_t> data)
{
    static constexpr char digits[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

inline int hex_nibble(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw std::invalid_argument(std::string("invalid hex digit '") + c + "'");
}

inline std::vector<std::uint8_t> parse_hex(std::string_view text)
{
    if (text.size() % 2 != 0)
        throw std::invalid_argument("hex string has odd length");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 2);
    for (std::size_t i = 0; i < text.size(); i += 2)
        out.push_back(static_cast<std::uint8_t>(hex_nibble(text[i]) << 4 | hex_nibble(text[i + 1])));
    return out;
}

inline std::uint8_t parse_hex_byte(std::string_view text)
{
    if (text.size() != 2)
        throw std::invalid_argument("expected exactly two hex digits");
    return static_cast<std::uint8_t>(hex_nibble(text[0]) << 4 | hex_nibble(text[1]));
}

} // namespace dfa

#endif // DFA_HEX_HPP
