#pragma once

#include "klr/blowup.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace klr {

std::uint64_t fnv1a64(std::string_view text);

// SplitMix64 (Steele, Lea, Flood). The whole sampling pipeline draws from this generator so that
// streams can be reproduced bit for bit from any language.
class SplitMix64
{
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, bound): rejects draws below 2^64 mod bound, then reduces modulo bound.
    std::uint64_t below(std::uint64_t bound);

    // Uniform on [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// A named substream of a master seed. The generator state is master ^ fnv1a64(label).
struct SeedSpec
{
    std::uint64_t master = 0;
    std::string label;

    std::uint64_t derived() const { return master ^ fnv1a64(label); }
    SplitMix64 stream() const { return SplitMix64(derived()); }

    // "parent/child", or just "child" under an empty parent label.
    SeedSpec child(std::string_view sub) const;
};

// Uniform G^H_{n,m}: every pattern-pair block gets exactly m edges. Block (i, j) draws from the
// substream "pair:i-j" by a partial Fisher-Yates shuffle over edge indices u * n + v.
BlowupGraph sample_gnm_h(const PatternGraph & pattern, int n, std::int64_t m, const SeedSpec & seed);

// The triangle-free construction on K_3: part 0 is split into U_1 = [0, n/2) and U_2 = [n/2, n);
// block (0, 1) only uses rows in U_1, block (0, 2) only rows in U_2, block (1, 2) is uniform.
BlowupGraph adversarial_split(int n, std::int64_t m, const SeedSpec & seed);

// Splits every block into `rounds` equal chunks uniformly at random (substream "expose:i-j").
std::vector<BlowupGraph> partition_exposure(const BlowupGraph & g, int rounds, const SeedSpec & seed);

} // namespace klr
