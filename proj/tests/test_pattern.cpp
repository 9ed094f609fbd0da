#include "klr/pattern.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <vector>

using namespace klr;

namespace
{
    // every graph on k labelled vertices
    std::vector<PatternGraph> all_graphs(int k)
    {
        std::vector<std::pair<int, int>> slots;
        for (int u = 0 ; u < k ; ++u)
            for (int v = u + 1 ; v < k ; ++v)
                slots.emplace_back(u, v);
        std::vector<PatternGraph> out;
        for (std::uint64_t mask = 0 ; mask < (std::uint64_t{1} << slots.size()) ; ++mask) {
            std::vector<std::pair<int, int>> edges;
            for (std::size_t i = 0 ; i < slots.size() ; ++i)
                if (mask >> i & 1)
                    edges.push_back(slots[i]);
            out.push_back(validate_pattern(k, edges));
        }
        return out;
    }
}

TEST_CASE("validate_pattern rejects malformed input")
{
    CHECK_THROWS_AS(validate_pattern(3, {{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate_pattern(3, {{0, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(validate_pattern(3, {{0, 1}, {1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate_pattern(0, {}), std::invalid_argument);
    CHECK_THROWS_AS(validate_pattern(3, {{-1, 2}}), std::invalid_argument);

    auto h = validate_pattern(3, {{2, 1}, {0, 2}});
    CHECK(h.edge_count() == 2);
    CHECK(h.edges().front().u == 0);
    CHECK(h.has_edge(1, 2));
    CHECK(h.has_edge(2, 1));
    CHECK_FALSE(h.has_edge(0, 1));
}

TEST_CASE("pattern specs round trip")
{
    for (auto h : {complete_pattern(4), path_pattern(3), cycle_pattern(4), complete_pattern(4).without_edge(0, 1)}) {
        auto back = parse_pattern_spec(h.to_spec());
        CHECK(back == h);
    }
    CHECK(parse_pattern_spec("k=3;edges=0-1,0-2,1-2") == complete_pattern(3));
    CHECK(parse_pattern_spec("k=2;edges=").edge_count() == 0);
    CHECK_THROWS(parse_pattern_spec("k=3;edges=0-1,1-1"));
    CHECK_THROWS(parse_pattern_spec("edges=0-1"));
    CHECK_THROWS(parse_pattern_spec("k=3;edges=0-x"));
    CHECK_THROWS(complete_pattern(3).without_edge(0, 0));
    CHECK_THROWS(path_pattern(3).without_edge(0, 2));
}

TEST_CASE("two-density of the standard patterns")
{
    CHECK(two_density(complete_pattern(3)).value == Rational::make(2, 1));
    CHECK(two_density(complete_pattern(4)).value == Rational::make(5, 2));
    CHECK(two_density(cycle_pattern(4)).value == Rational::make(3, 2));
    CHECK(two_density(path_pattern(3)).value == Rational::make(1, 1));

    auto edge = validate_pattern(2, {{0, 1}});
    CHECK(two_density(edge).value == Rational::make(1, 2));
    CHECK(two_density(edge).convention);
    auto edge_plus = validate_pattern(3, {{0, 1}});
    CHECK(two_density(edge_plus).value == Rational::make(1, 2));
    CHECK(two_density(edge_plus).convention);
    CHECK_FALSE(two_density(path_pattern(3)).convention);
    CHECK_THROWS(two_density(validate_pattern(3, {})));
}

TEST_CASE("two-density matches the subset oracle on every graph up to 5 vertices")
{
    for (int k = 2 ; k <= 5 ; ++k)
        for (auto & h : all_graphs(k)) {
            if (h.edge_count() == 0)
                continue;
            auto [num, den] = oracle::two_density(h);
            CAPTURE(h.to_spec());
            CHECK(two_density(h).value == Rational::make(num, den));
        }
}

TEST_CASE("phi matches the subgraph oracle")
{
    for (auto & h : all_graphs(4)) {
        if (h.edge_count() == 0)
            continue;
        for (auto [n, m] : {std::pair<std::int64_t, std::int64_t>{10, 5}, {10, 40}, {100, 200}, {7, 49}, {1000, 1}}) {
            CAPTURE(h.to_spec());
            CHECK(phi(h, n, m).ln == doctest::Approx(oracle::log_phi(h, n, m)).epsilon(1e-12));
        }
    }
    CHECK_THROWS(phi(complete_pattern(3), 10, 0));
    CHECK_THROWS(phi(complete_pattern(3), 10, 101));
}

TEST_CASE("expected copies")
{
    CHECK(expected_copies(complete_pattern(3), 10, 50, false).value() == doctest::Approx(125.0));
    CHECK(expected_copies(complete_pattern(3), 10, 50, true).value() == doctest::Approx(1.25));
    CHECK(expected_copies(complete_pattern(3), 10, 100, false).value() == doctest::Approx(1000.0));
    CHECK(expected_copies(complete_pattern(3), 10, 0, false).is_zero());
}

TEST_CASE("glued patterns")
{
    auto h = complete_pattern(4);
    auto glued = glued_patterns(h, 0, 1);
    REQUIRE(glued.size() == 4);
    for (auto & gp : glued) {
        CHECK((gp.overlap & 0b11) == 0b11);
        const int j = gp.overlap_vertices();
        CHECK(gp.result.k() == 2 * 4 - j);
        CHECK(gp.result.edge_count() == 2 * 6 - gp.overlap_edges());
        CHECK(static_cast<int>(gp.part_map.size()) == gp.result.k());
    }
    // J = V(H) is H itself
    CHECK(glued.back().result == h);
    CHECK(glued.front().label() == "J=0,1");

    CHECK(glued_patterns(path_pattern(5), 0, 4).size() == 8);
    CHECK_THROWS(glued_patterns(h, 1, 1));
    CHECK_THROWS(glued_patterns(h, 0, 4));
}

TEST_CASE("log-space helpers")
{
    CHECK(log_binomial(10, 3) == doctest::Approx(std::log(120.0)));
    CHECK(std::isinf(log_binomial(3, 4)));
    CHECK(min_subset_size(0.25, 12) == 3);
    CHECK(min_subset_size(0.1, 30) == 3);
    CHECK(min_subset_size(0.3, 10) == 3);
    CHECK(min_subset_size(0.26, 12) == 4);
}
