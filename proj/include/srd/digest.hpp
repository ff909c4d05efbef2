#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace srd {

/// Streaming FNV-1a 64-bit hash. Doubles are hashed by bit pattern.
class Fnv1a {
public:
    Fnv1a& bytes(const void* data, std::size_t n) noexcept
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ULL;
        }
        return *this;
    }
    Fnv1a& text(std::string_view s) noexcept { return bytes(s.data(), s.size()).u64(s.size()); }
    Fnv1a& u64(std::uint64_t v) noexcept
    {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) {
            b[i] = static_cast<unsigned char>(v >> (8 * i));
        }
        return bytes(b, 8);
    }
    Fnv1a& f64(double v) noexcept { return u64(std::bit_cast<std::uint64_t>(v)); }

    std::uint64_t value() const noexcept { return h_; }
    std::string hex() const { return to_hex(h_); }

    static std::string to_hex(std::uint64_t v)
    {
        static constexpr char digits[] = "0123456789abcdef";
        std::string s(16, '0');
        for (int i = 15; i >= 0; --i, v >>= 4) {
            s[static_cast<std::size_t>(i)] = digits[v & 0xF];
        }
        return s;
    }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace srd
