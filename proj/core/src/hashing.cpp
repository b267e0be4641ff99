#include "deshadow/hashing.hpp"

#include <cstdio>

namespace deshadow {

namespace {
constexpr std::uint64_t kPrime = 0x100000001b3ull;
}

Fnv1a& Fnv1a::update(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        state_ ^= bytes[i];
        state_ *= kPrime;
    }
    return *this;
}

Fnv1a& Fnv1a::update_u64(std::uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    return update(bytes, 8);
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    return Fnv1a().update(data, len).digest();
}

std::uint64_t fnv1a64(std::string_view s) {
    return fnv1a64(s.data(), s.size());
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

}  // namespace deshadow
