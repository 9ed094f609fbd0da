#pragma once

#include "klr/logmath.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace klr {

// Bitmask over pattern vertices; patterns are small, so 64 bits is plenty.
using VertexMask = std::uint64_t;

constexpr int max_pattern_vertices = 63;

struct PatternEdge
{
    int u = 0;
    int v = 0;   // u < v

    friend auto operator<=>(const PatternEdge &, const PatternEdge &) = default;
};

// The template graph H on vertices {0..k-1}. Isolated vertices are allowed.
class PatternGraph
{
public:
    PatternGraph() = default;

    int k() const { return k_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<PatternEdge> & edges() const { return edges_; }

    bool has_edge(int a, int b) const;
    VertexMask neighbours(int v) const { return adjacency_[v]; }

    // Number of edges with both endpoints in the mask.
    int induced_edge_count(VertexMask mask) const;

    PatternGraph without_edge(int a, int b) const;

    // "k=3;edges=0-1,0-2,1-2"
    std::string to_spec() const;

    friend bool operator==(const PatternGraph & a, const PatternGraph & b)
    {
        return a.k_ == b.k_ && a.edges_ == b.edges_;
    }

    friend PatternGraph validate_pattern(int k, std::span<const std::pair<int, int>> edge_list);

private:
    int k_ = 0;
    std::vector<PatternEdge> edges_;
    std::vector<VertexMask> adjacency_;
};

// Normalizes (sorted, u < v) or throws std::invalid_argument on self-loops, out-of-range endpoints and
// duplicate edges.
PatternGraph validate_pattern(int k, std::span<const std::pair<int, int>> edge_list);
PatternGraph validate_pattern(int k, std::initializer_list<std::pair<int, int>> edge_list);

// Parses the inline form "k=3;edges=0-1,0-2,1-2" (edges may be empty: "k=2;edges=").
PatternGraph parse_pattern_spec(std::string_view spec);

PatternGraph complete_pattern(int k);
PatternGraph path_pattern(int k);
PatternGraph cycle_pattern(int k);

struct Rational
{
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(std::int64_t num, std::int64_t den);
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string to_string() const;

    friend bool operator==(const Rational &, const Rational &) = default;
    friend std::strong_ordering operator<=>(const Rational & a, const Rational & b);
};

struct TwoDensity
{
    Rational value;
    // True when the 1/2 floor was applied: no subgraph on more than two vertices reaches 1/2.
    bool convention = false;
};

// m_2(H) = max (e(H') - 1) / (v(H') - 2) over H' with v(H') > 2, floored at 1/2.
TwoDensity two_density(const PatternGraph & pattern);

// ln Phi(H, m) = min over subgraphs with at least one edge of ln( n^v (m/n^2)^e ).
LogScale phi(const PatternGraph & pattern, std::int64_t n, std::int64_t m);

// mu = n^v(H) (m/n^2)^e(H), or mu_e = mu / n^2 when rooted.
LogScale expected_copies(const PatternGraph & pattern, std::int64_t n, std::int64_t m, bool rooted);

// Two copies H1, H2 of a base pattern identified on an overlap J (containing a and b). Vertex x of the
// result lives in part part_map[x] of the host: copy-1 vertices keep their index, copy-2 vertices for
// i outside J are appended in increasing order of i.
struct GluedPattern
{
    PatternGraph base;
    VertexMask overlap = 0;
    PatternGraph result;
    std::vector<int> part_map;

    int overlap_vertices() const;
    int overlap_edges() const { return base.induced_edge_count(overlap); }
    std::string label() const;
};

GluedPattern glue(const PatternGraph & base, VertexMask overlap);

// One glued pattern per overlap J with {a, b} subset of J subset of V(H): 2^(k-2) of them.
std::vector<GluedPattern> glued_patterns(const PatternGraph & base, int a, int b);

} // namespace klr
