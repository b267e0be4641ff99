#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <string_view>

namespace deshadow {

// Deterministic random source with output that is identical across standard
// library implementations. mt19937_64 itself is fully specified by the
// standard; std::*_distribution is not, so the distributions here are
// hand-rolled.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform();

    // Uniform in [lo, hi).
    double uniform(double lo, double hi);

    // Uniform integer in [lo, hi], both ends inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    // Standard normal via Box-Muller.
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Engine + spare-value state, serialized as text. restore() accepts only
    // strings produced by state().
    std::string state() const;
    void restore(const std::string& s);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Stateless derivation of independent substream seeds from a master seed, a
// stream tag and integer coordinates (FNV-1a over the inputs). Equal inputs
// give equal seeds on every platform.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::initializer_list<std::uint64_t> coords = {});

}  // namespace deshadow
