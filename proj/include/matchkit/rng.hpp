#pragma once

#include <cstdint>
#include <random>

namespace matchkit {

/// Seeded generator for sampled scans. mt19937_64 has a bit-exact sequence
/// fixed by the standard; bounded draws use plain modulo so replays are
/// byte-identical on every platform (std::uniform_int_distribution is not
/// portable across standard libraries).
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }
    std::uint64_t bounded(std::uint64_t k) { return k ? eng_() % k : 0; }
    long long range(long long lo, long long hi) {  // inclusive
        return lo + (long long)bounded((std::uint64_t)(hi - lo + 1));
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace matchkit
