#include "csvm/rng.hpp"

namespace csvm::rng {

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
    // 2^64 mod bound; rejecting draws below this removes modulo bias.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

namespace {

std::uint64_t mix(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    std::uint64_t h = mix(seed + 0x9e3779b97f4a7c15ull);
    h = mix(h ^ (tag + 0x9e3779b97f4a7c15ull));
    h = mix(h ^ (index + 0x9e3779b97f4a7c15ull));
    return h;
}

} // namespace csvm::rng
