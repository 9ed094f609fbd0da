#include "klr/regularity.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace klr;

namespace
{
    BitMatrix random_block(int n, double p, SplitMix64 & rng)
    {
        BitMatrix b(n, n);
        for (int r = 0 ; r < n ; ++r)
            for (int c = 0 ; c < n ; ++c)
                if (rng.unit() < p)
                    b.set(r, c);
        return b;
    }

    BitMatrix block_from_mask(int n, std::uint64_t mask)
    {
        BitMatrix b(n, n);
        for (int i = 0 ; i < n * n ; ++i)
            if (mask >> i & 1)
                b.set(i / n, i % n);
        return b;
    }

    std::vector<double> per_size(const DeltaSchedule & d, int n)
    {
        std::vector<double> out(n + 1, 0);
        for (int s = 1 ; s <= n ; ++s)
            out[s] = d(static_cast<double>(s) / n);
        return out;
    }
}

TEST_CASE("delta schedule")
{
    auto d = delta_schedule(0.5, 0.5);
    CHECK(d(1.0) == doctest::Approx(0.5 / (4 * std::exp(1.0)) * std::pow(0.25, 2.0)));
    CHECK(d(0.5) < d(1.0));
    CHECK(DeltaSchedule::constant(0.3)(0.1) == doctest::Approx(0.3));
    CHECK_NOTHROW(delta_schedule(1.0, 0.5));
    CHECK_THROWS(delta_schedule(0.0, 0.5));
    CHECK_THROWS(delta_schedule(0.5, 1.0));
    CHECK_THROWS(d(0.0));
}

TEST_CASE("parameter validation")
{
    BitMatrix b(4, 4, true);
    CHECK_THROWS(check_exact(b, {0.0, 0.5, std::nullopt}));
    CHECK_THROWS(check_exact(b, {0.5, 1.5, std::nullopt}));
    CHECK_THROWS(check_exact(BitMatrix(3, 4), {0.5, 0.5, std::nullopt}));
}

TEST_CASE("exact mode agrees with the double-subset oracle on every 3x3 block")
{
    for (std::uint64_t mask = 0 ; mask < 512 ; ++mask) {
        auto b = block_from_mask(3, mask);
        for (double eps : {0.3, 0.5, 1.0})
            for (double lambda : {0.25, 0.5, 1.0}) {
                RegularityParams p{eps, lambda, std::nullopt};
                auto v = check_exact(b, p);
                auto o = oracle::regularity(b, eps, lambda);
                CHECK((v.status == RegularityStatus::certified_regular) == o.regular);
                CHECK(v.status != RegularityStatus::unknown);
                if (v.witness)
                    CHECK(witness_violates(b, *v.witness, p));
            }
    }
}

TEST_CASE("exact mode agrees with the oracle on random blocks, both forms")
{
    SplitMix64 rng(2024);
    const auto extremal = delta_schedule(0.5, 0.5);
    const auto flat = DeltaSchedule::constant(0.5);
    for (int trial = 0 ; trial < 300 ; ++trial) {
        const int n = 4 + trial % 3;
        auto b = random_block(n, 0.15 + 0.7 * rng.unit(), rng);

        RegularityParams constant_form{0.25, 0.5, std::nullopt};
        CHECK((check_exact(b, constant_form).status == RegularityStatus::certified_regular) == oracle::regularity(b, 0.25, 0.5).regular);

        for (auto * sched : {&extremal, &flat}) {
            RegularityParams fn{0.25, 0.5, *sched};
            auto sizes = per_size(*sched, n);
            auto v = check_exact(b, fn);
            CHECK((v.status == RegularityStatus::certified_regular) == oracle::regularity(b, 0.25, 0.5, &sizes).regular);
            if (v.witness)
                CHECK(witness_violates(b, *v.witness, fn));
        }
    }
}

TEST_CASE("structured blocks")
{
    RegularityParams p{0.25, 0.5, std::nullopt};
    CHECK(check_exact(BitMatrix(8, 8, true), p).status == RegularityStatus::certified_regular);
    CHECK(check_exact(BitMatrix(8, 8, false), p).status == RegularityStatus::certified_regular);

    BitMatrix half(8, 8);
    for (int r = 0 ; r < 4 ; ++r)
        for (int c = 0 ; c < 8 ; ++c)
            half.set(r, c);
    auto v = check_exact(half, p);
    REQUIRE(v.status == RegularityStatus::irregular);
    REQUIRE(v.witness);
    CHECK(v.witness->density == 0);
    CHECK(witness_violates(half, *v.witness, p));
}

TEST_CASE("exact mode enforces its cap")
{
    BitMatrix b(30, 30, true);
    ExactOptions tight;
    tight.enumeration_cap = 1000;
    CHECK_THROWS_AS(check_exact(b, {0.5, 0.5, std::nullopt}, tight), std::length_error);
}

TEST_CASE("heuristic never reports a false irregularity")
{
    SplitMix64 rng(7);
    int found = 0;
    for (int trial = 0 ; trial < 200 ; ++trial) {
        const int n = 5 + trial % 2;
        auto b = random_block(n, 0.2 + 0.6 * rng.unit(), rng);
        RegularityParams p{0.4, 0.75, std::nullopt};
        auto h = check_heuristic(b, p, 4, {static_cast<std::uint64_t>(trial), ""});
        CHECK(h.status != RegularityStatus::certified_regular);
        auto o = oracle::regularity(b, 0.4, 0.75);
        if (h.status == RegularityStatus::irregular) {
            ++found;
            CHECK_FALSE(o.regular);
            CHECK(witness_violates(b, *h.witness, p));
        }
    }
    CHECK(found > 0);
}

TEST_CASE("spectral bound dominates the true norm and certifies only regular blocks")
{
    SplitMix64 rng(11);
    int certified = 0;
    for (int trial = 0 ; trial < 100 ; ++trial) {
        const int n = 12;
        auto b = random_block(n, 0.5 + 0.45 * rng.unit(), rng);
        auto nb = centred_norm_bound(b);
        CHECK(nb.upper >= nb.estimate);

        RegularityParams p{0.5, 0.25, std::nullopt};
        auto s = check_spectral(b, p);
        CHECK(s.status != RegularityStatus::irregular);
        if (s.status == RegularityStatus::certified_regular) {
            ++certified;
            CHECK(check_exact(b, p).status == RegularityStatus::certified_regular);
        }
    }
    CHECK(certified > 0);
    CHECK(check_spectral(BitMatrix(6, 6), {0.5, 0.5, std::nullopt}).status == RegularityStatus::unknown);
    CHECK(check_spectral(BitMatrix(6, 6, true), {0.5, 0.5, std::nullopt}).status == RegularityStatus::certified_regular);
}

TEST_CASE("blow-up verdicts")
{
    auto h = complete_pattern(3);
    auto g = sample_gnm_h(h, 8, 64, {1, ""});
    CheckOptions opt;
    opt.target_m = 64;
    auto v = check_blowup(g, {0.25, 0.5, std::nullopt}, opt);
    CHECK(v.all_certified);
    CHECK(v.pairs.size() == 3);
    REQUIRE(v.in_family);
    CHECK(*v.in_family);
    opt.target_m = 63;
    CHECK_FALSE(*check_blowup(g, {0.25, 0.5, std::nullopt}, opt).in_family);

    auto adv = adversarial_split(8, 16, {1, ""});
    auto va = check_blowup(adv, {0.25, 0.5, std::nullopt}, {});
    CHECK(va.any_irregular);
    CHECK(va.pairs.at(PairKey::of(0, 1)).status == RegularityStatus::irregular);
    CHECK(va.pairs.at(PairKey::of(0, 2)).status == RegularityStatus::irregular);
}
