#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace csvm::rng {

// SplitMix64: seedable generator with identical output on every platform.
// All randomness in the library flows through this type so that results
// never depend on the standard library's distribution implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Unbiased uniform draw from [0, bound); bound must be >= 1.
    std::uint64_t next_below(std::uint64_t bound);

    // Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

private:
    std::uint64_t state_;
};

// Derives an independent stream seed from (seed, tag, index). Every
// stochastic draw in the pipeline gets its own derived stream, which keeps
// results independent of thread scheduling and worker count.
std::uint64_t derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0);

// Stream tags, one per distinct purpose.
inline constexpr std::uint64_t kTagSplit = 1;
inline constexpr std::uint64_t kTagPatchExtract = 2;
inline constexpr std::uint64_t kTagFilterSubset = 3;
inline constexpr std::uint64_t kTagPatchSource = 4;

// Fisher-Yates shuffle driven by a SplitMix64 stream.
template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& g) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(g.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace csvm::rng
