#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace deshadow {

// FNV-1a, 64-bit. Used for config hashes, weight-freeze checks and artifact
// checksums; stability across runs matters, cryptographic strength does not.
class Fnv1a {
public:
    Fnv1a& update(const void* data, std::size_t len);
    Fnv1a& update(std::string_view s) { return update(s.data(), s.size()); }
    Fnv1a& update_u64(std::uint64_t v);
    std::uint64_t digest() const { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ull;
};

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(std::string_view s);

// Lower-case hex, zero padded to 16 chars.
std::string hex64(std::uint64_t v);

}  // namespace deshadow
