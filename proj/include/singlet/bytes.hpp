#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace singlet {

using Bytes = std::vector<std::uint8_t>;

inline void put_u16_be(std::uint8_t* p, std::uint16_t v) {
    p[0] = static_cast<std::uint8_t>(v >> 8);
    p[1] = static_cast<std::uint8_t>(v);
}

inline void put_u32_be(std::uint8_t* p, std::uint32_t v) {
    p[0] = static_cast<std::uint8_t>(v >> 24);
    p[1] = static_cast<std::uint8_t>(v >> 16);
    p[2] = static_cast<std::uint8_t>(v >> 8);
    p[3] = static_cast<std::uint8_t>(v);
}

inline void put_u64_be(std::uint8_t* p, std::uint64_t v) {
    put_u32_be(p, static_cast<std::uint32_t>(v >> 32));
    put_u32_be(p + 4, static_cast<std::uint32_t>(v));
}

inline std::uint16_t get_u16_be(const std::uint8_t* p) {
    return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

inline std::uint32_t get_u32_be(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

inline std::uint64_t get_u64_be(const std::uint8_t* p) {
    return (static_cast<std::uint64_t>(get_u32_be(p)) << 32) | get_u32_be(p + 4);
}

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(std::string_view hex);  // throws Error{Protocol} on malformed input

std::string to_base64(std::span<const std::uint8_t> data);
Bytes from_base64(std::string_view b64);  // throws Error{Protocol} on malformed input

template <std::size_t N>
std::array<std::uint8_t, N> array_from_hex(std::string_view hex);

template <std::size_t N>
bool is_all_zero(const std::array<std::uint8_t, N>& a) {
    for (auto b : a)
        if (b != 0) return false;
    return true;
}

}  // namespace singlet
