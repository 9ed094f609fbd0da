#include "klr/sampler.hpp"

#include <numeric>
#include <stdexcept>

namespace klr {

std::uint64_t fnv1a64(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t SplitMix64::below(std::uint64_t bound)
{
    if (bound == 0)
        throw std::invalid_argument("SplitMix64::below: zero bound");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        auto x = next();
        if (x >= threshold)
            return x % bound;
    }
}

SeedSpec SeedSpec::child(std::string_view sub) const
{
    if (label.empty())
        return {master, std::string(sub)};
    return {master, label + "/" + std::string(sub)};
}

namespace
{
    // First m entries of a partial Fisher-Yates shuffle of `slots`.
    void choose_slots(std::vector<std::uint32_t> & slots, std::int64_t m, SplitMix64 & rng)
    {
        const auto total = static_cast<std::uint64_t>(slots.size());
        for (std::int64_t t = 0 ; t < m ; ++t) {
            auto r = static_cast<std::size_t>(t + rng.below(total - t));
            std::swap(slots[t], slots[r]);
        }
    }

    void fill_block(BitMatrix & blk, int n, std::vector<std::uint32_t> slots, std::int64_t m, SplitMix64 rng)
    {
        choose_slots(slots, m, rng);
        for (std::int64_t t = 0 ; t < m ; ++t)
            blk.set(static_cast<int>(slots[t] / n), static_cast<int>(slots[t] % n));
    }

    std::vector<std::uint32_t> all_slots(int n)
    {
        std::vector<std::uint32_t> s(static_cast<std::size_t>(n) * n);
        std::iota(s.begin(), s.end(), 0u);
        return s;
    }

    void check_size(int n)
    {
        if (n < 1 || n > 4096)
            throw std::invalid_argument("part size n must be in [1, 4096]");
    }
}

BlowupGraph sample_gnm_h(const PatternGraph & pattern, int n, std::int64_t m, const SeedSpec & seed)
{
    check_size(n);
    if (m < 0 || m > static_cast<std::int64_t>(n) * n)
        throw std::invalid_argument("sample_gnm_h: m must lie in [0, n^2]");

    BlowupGraph g = new_host(pattern, n, Fill::empty);
    for (auto & e : pattern.edges()) {
        auto key = PairKey{e.u, e.v};
        fill_block(g.ensure_block(e.u, e.v), n, all_slots(n), m, seed.child("pair:" + key.to_string()).stream());
    }
    return g;
}

BlowupGraph adversarial_split(int n, std::int64_t m, const SeedSpec & seed)
{
    check_size(n);
    if (n % 2 != 0)
        throw std::invalid_argument("adversarial_split: n must be even");
    const std::int64_t half_slots = static_cast<std::int64_t>(n) * n / 2;
    if (m < 0 || m > half_slots)
        throw std::invalid_argument("adversarial_split: m must lie in [0, n^2/2]");

    BlowupGraph g = new_host(complete_pattern(3), n, Fill::empty);
    const int h = n / 2;
    for (int j : {1, 2}) {
        // Rows of block (0, j) restricted to U_j.
        const int lo = j == 1 ? 0 : h;
        std::vector<std::uint32_t> slots;
        slots.reserve(half_slots);
        for (int u = lo ; u < lo + h ; ++u)
            for (int v = 0 ; v < n ; ++v)
                slots.push_back(static_cast<std::uint32_t>(u * n + v));
        fill_block(g.ensure_block(0, j), n, std::move(slots), m, seed.child("pair:0-" + std::to_string(j)).stream());
    }
    fill_block(g.ensure_block(1, 2), n, all_slots(n), m, seed.child("pair:1-2").stream());
    return g;
}

std::vector<BlowupGraph> partition_exposure(const BlowupGraph & g, int rounds, const SeedSpec & seed)
{
    if (rounds < 1)
        throw std::invalid_argument("partition_exposure: rounds must be positive");
    for (auto & [key, blk] : g.blocks())
        if (blk.count() % rounds != 0)
            throw std::invalid_argument("partition_exposure: block " + key.to_string() + " has "
                    + std::to_string(blk.count()) + " edges, not divisible by " + std::to_string(rounds));

    std::vector<BlowupGraph> chunks(rounds, BlowupGraph(g.pattern(), g.n()));
    for (auto & chunk : chunks)
        for (auto & [key, blk] : g.blocks())
            chunk.ensure_block(key.i, key.j);

    const int n = g.n();
    for (auto & [key, blk] : g.blocks()) {
        std::vector<std::uint32_t> present;
        for (int u = 0 ; u < n ; ++u)
            for (auto v = blk.row(u).find_first() ; v != Bits::npos ; v = blk.row(u).find_next(v))
                present.push_back(static_cast<std::uint32_t>(u * n + v));
        auto rng = seed.child("expose:" + key.to_string()).stream();
        choose_slots(present, static_cast<std::int64_t>(present.size()), rng);

        const std::size_t per = present.size() / rounds;
        for (std::size_t t = 0 ; t < present.size() ; ++t)
            chunks[t / per].ensure_block(key.i, key.j).set(static_cast<int>(present[t] / n), static_cast<int>(present[t] % n));
    }
    return chunks;
}

} // namespace klr
