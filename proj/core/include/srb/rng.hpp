#pragma once

#include <cstdint>
#include <span>

namespace srb {

namespace detail {
// SplitMix64 finalizer (Steele, Lea, Flood 2014). Full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Counter-based generator keyed by (master seed, stream index). Streams are
// statistically independent, so ensembles can hand stream i to worker i and
// get schedule-independent, bit-reproducible output.
class CounterRng {
public:
    CounterRng(std::uint64_t master_seed, std::uint64_t stream)
        : key_(detail::mix64(detail::mix64(master_seed + 0x9e3779b97f4a7c15ULL) ^
                             detail::mix64(stream + 0x6a09e667f3bcc909ULL))) {}

    std::uint64_t next_u64() {
        counter_ += 0x9e3779b97f4a7c15ULL;
        return detail::mix64(key_ ^ counter_);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Inverse-CDF draw from the distribution with the given cumulative vector
    // (ascending, last entry 1). Returns an index in [0, cumulative.size()).
    int next_symbol(std::span<const double> cumulative) {
        const double u = next_unit();
        int lo = 0;
        int hi = static_cast<int>(cumulative.size()) - 1;
        while (lo < hi) {
            const int mid = (lo + hi) / 2;
            if (u < cumulative[static_cast<std::size_t>(mid)]) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        return lo;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace srb
