#include "deshadow/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "deshadow/errors.hpp"
#include "deshadow/hashing.hpp"

namespace deshadow {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw ValidationError("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());  // full 64-bit range
    // Rejection sampling keeps the distribution exactly uniform.
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return lo + static_cast<std::int64_t>(v % span);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::string Rng::state() const {
    std::ostringstream out;
    out << engine_ << ' ' << (has_spare_ ? 1 : 0) << ' ';
    out.precision(17);
    out << spare_;
    return out.str();
}

void Rng::restore(const std::string& s) {
    std::istringstream in(s);
    int spare_flag = 0;
    in >> engine_ >> spare_flag >> spare_;
    if (!in) throw FormatError("Rng::restore: malformed state string");
    has_spare_ = spare_flag != 0;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::initializer_list<std::uint64_t> coords) {
    Fnv1a h;
    h.update_u64(master).update(stream);
    for (std::uint64_t c : coords) h.update_u64(c);
    return h.digest();
}

}  // namespace deshadow
