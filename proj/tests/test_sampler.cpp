#include "klr/sampler.hpp"
#include "klr/census.hpp"

#include <doctest.h>

#include <map>

using namespace klr;

TEST_CASE("fnv-1a and splitmix reference values")
{
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xe220a8397b1dcdafULL);
    CHECK(rng.next() == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("seed labels")
{
    SeedSpec root{7, ""};
    CHECK(root.child("a").label == "a");
    CHECK(root.child("a").child("b").label == "a/b");
    CHECK(root.child("a").derived() == (7 ^ fnv1a64("a")));
    CHECK(root.child("a").derived() != root.child("b").derived());
}

TEST_CASE("bounded draws are roughly uniform")
{
    SplitMix64 rng(12345);
    std::map<std::uint64_t, int> hist;
    const int draws = 60000;
    for (int i = 0 ; i < draws ; ++i)
        ++hist[rng.below(6)];
    REQUIRE(hist.size() == 6);
    for (auto & [v, c] : hist)
        CHECK(std::abs(c - draws / 6) < 600);
    CHECK_THROWS(rng.below(0));
}

TEST_CASE("G^H_{n,m} has exactly m edges per pattern block")
{
    auto h = cycle_pattern(4);
    for (std::int64_t m : {0, 1, 17, 49}) {
        auto g = sample_gnm_h(h, 7, m, {3, ""});
        for (auto & e : h.edges())
            CHECK(g.block_edge_count(e.u, e.v) == static_cast<std::size_t>(m));
        CHECK_FALSE(g.has_block(0, 2));
    }
    CHECK(sample_gnm_h(h, 7, 20, {3, ""}) == sample_gnm_h(h, 7, 20, {3, ""}));
    CHECK_FALSE(sample_gnm_h(h, 7, 20, {3, ""}) == sample_gnm_h(h, 7, 20, {4, ""}));
    CHECK_THROWS(sample_gnm_h(h, 7, 50, {3, ""}));
    CHECK_THROWS(sample_gnm_h(h, 0, 0, {3, ""}));
}

TEST_CASE("edge marginals are uniform")
{
    auto h = complete_pattern(2);
    std::vector<int> hits(9, 0);
    const int runs = 9000;
    for (int s = 0 ; s < runs ; ++s) {
        auto g = sample_gnm_h(h, 3, 3, {static_cast<std::uint64_t>(s), ""});
        for (int u = 0 ; u < 3 ; ++u)
            for (int v = 0 ; v < 3 ; ++v)
                hits[u * 3 + v] += g.block(0, 1)->test(u, v);
    }
    for (int c : hits)
        CHECK(std::abs(c - runs / 3) < 150);
}

TEST_CASE("adversarial split is triangle-free with m edges per block")
{
    for (std::uint64_t s = 0 ; s < 20 ; ++s) {
        auto g = adversarial_split(8, 16, {s, ""});
        CHECK(count_canonical(g, complete_pattern(3)) == 0);
        CHECK(g.block_edge_count(0, 1) == 16);
        CHECK(g.block_edge_count(0, 2) == 16);
        CHECK(g.block_edge_count(1, 2) == 16);
        for (int u = 4 ; u < 8 ; ++u)
            CHECK(g.block(0, 1)->row(u).none());
        for (int u = 0 ; u < 4 ; ++u)
            CHECK(g.block(0, 2)->row(u).none());
    }
    CHECK_THROWS(adversarial_split(7, 4, {1, ""}));
    CHECK_THROWS(adversarial_split(8, 33, {1, ""}));
}

TEST_CASE("exposure chunks partition every block evenly")
{
    auto h = complete_pattern(3);
    auto g = sample_gnm_h(h, 8, 24, {5, ""});
    auto chunks = partition_exposure(g, 4, {5, "e"});
    REQUIRE(chunks.size() == 4);
    BlowupGraph all(h, 8);
    std::size_t total = 0;
    for (auto & c : chunks) {
        for (auto & e : h.edges())
            CHECK(c.block_edge_count(e.u, e.v) == 6);
        CHECK(intersect(all, c).edge_count() == 0);
        all = unite(all, c);
        total += c.edge_count();
    }
    CHECK(all == g);
    CHECK(total == g.edge_count());
    CHECK_THROWS(partition_exposure(g, 5, {5, "e"}));
    CHECK(partition_exposure(g, 4, {5, "e"})[0] == chunks[0]);
}
