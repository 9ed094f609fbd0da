#include "klr/pattern.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>

namespace klr {

namespace
{
    std::string trim(std::string_view s)
    {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        if (b == std::string_view::npos)
            return {};
        return std::string(s.substr(b, e - b + 1));
    }

    int parse_int(std::string_view s, std::string_view what)
    {
        auto t = trim(s);
        int value = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
        if (ec != std::errc{} || ptr != t.data() + t.size())
            throw std::invalid_argument("pattern spec: bad integer '" + t + "' in " + std::string(what));
        return value;
    }

    void check_enumerable(const PatternGraph & pattern)
    {
        if (pattern.k() > 30)
            throw std::invalid_argument("pattern too large for subgraph enumeration (k > 30)");
    }
}

bool PatternGraph::has_edge(int a, int b) const
{
    if (a < 0 || b < 0 || a >= k_ || b >= k_)
        return false;
    return (adjacency_[a] >> b) & 1u;
}

int PatternGraph::induced_edge_count(VertexMask mask) const
{
    int count = 0;
    for (auto & e : edges_)
        if (((mask >> e.u) & 1u) && ((mask >> e.v) & 1u))
            ++count;
    return count;
}

PatternGraph PatternGraph::without_edge(int a, int b) const
{
    if (! has_edge(a, b))
        throw std::invalid_argument("without_edge: " + std::to_string(a) + "-" + std::to_string(b) + " is not a pattern edge");
    std::vector<std::pair<int, int>> rest;
    for (auto & e : edges_)
        if (! (e.u == std::min(a, b) && e.v == std::max(a, b)))
            rest.emplace_back(e.u, e.v);
    return validate_pattern(k_, rest);
}

std::string PatternGraph::to_spec() const
{
    std::string out = "k=" + std::to_string(k_) + ";edges=";
    for (std::size_t i = 0 ; i < edges_.size() ; ++i) {
        if (i)
            out += ',';
        out += std::to_string(edges_[i].u) + "-" + std::to_string(edges_[i].v);
    }
    return out;
}

PatternGraph validate_pattern(int k, std::span<const std::pair<int, int>> edge_list)
{
    if (k < 1 || k > max_pattern_vertices)
        throw std::invalid_argument("pattern vertex count must be in [1, " + std::to_string(max_pattern_vertices) + "], got " + std::to_string(k));

    PatternGraph p;
    p.k_ = k;
    p.adjacency_.assign(k, 0);
    std::set<PatternEdge> seen;
    for (auto [a, b] : edge_list) {
        if (a == b)
            throw std::invalid_argument("pattern edge " + std::to_string(a) + "-" + std::to_string(b) + " is a self-loop");
        if (a < 0 || b < 0 || a >= k || b >= k)
            throw std::invalid_argument("pattern edge " + std::to_string(a) + "-" + std::to_string(b) + " has an endpoint out of range");
        PatternEdge e{std::min(a, b), std::max(a, b)};
        if (! seen.insert(e).second)
            throw std::invalid_argument("duplicate pattern edge " + std::to_string(e.u) + "-" + std::to_string(e.v));
        p.adjacency_[e.u] |= VertexMask{1} << e.v;
        p.adjacency_[e.v] |= VertexMask{1} << e.u;
    }
    p.edges_.assign(seen.begin(), seen.end());
    return p;
}

PatternGraph validate_pattern(int k, std::initializer_list<std::pair<int, int>> edge_list)
{
    return validate_pattern(k, std::span<const std::pair<int, int>>(edge_list.begin(), edge_list.size()));
}

PatternGraph parse_pattern_spec(std::string_view spec)
{
    std::optional<int> k;
    std::vector<std::pair<int, int>> edges;
    bool saw_edges = false;

    std::size_t pos = 0;
    while (pos <= spec.size()) {
        auto end = spec.find(';', pos);
        if (end == std::string_view::npos)
            end = spec.size();
        auto item = trim(spec.substr(pos, end - pos));
        pos = end + 1;
        if (item.empty())
            continue;

        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("pattern spec: expected key=value, got '" + item + "'");
        auto key = trim(std::string_view(item).substr(0, eq));
        auto value = trim(std::string_view(item).substr(eq + 1));
        if (key == "k")
            k = parse_int(value, "k");
        else if (key == "edges") {
            saw_edges = true;
            std::size_t q = 0;
            while (q < value.size()) {
                auto comma = value.find(',', q);
                if (comma == std::string::npos)
                    comma = value.size();
                auto token = trim(std::string_view(value).substr(q, comma - q));
                q = comma + 1;
                if (token.empty())
                    continue;
                auto dash = token.find('-');
                if (dash == std::string::npos)
                    throw std::invalid_argument("pattern spec: edge '" + token + "' is not of the form u-v");
                edges.emplace_back(parse_int(std::string_view(token).substr(0, dash), "edge"),
                        parse_int(std::string_view(token).substr(dash + 1), "edge"));
            }
        }
        else
            throw std::invalid_argument("pattern spec: unknown key '" + key + "'");
    }
    if (! k)
        throw std::invalid_argument("pattern spec: missing k");
    if (! saw_edges)
        throw std::invalid_argument("pattern spec: missing edges");
    return validate_pattern(*k, edges);
}

PatternGraph complete_pattern(int k)
{
    std::vector<std::pair<int, int>> e;
    for (int i = 0 ; i < k ; ++i)
        for (int j = i + 1 ; j < k ; ++j)
            e.emplace_back(i, j);
    return validate_pattern(k, e);
}

PatternGraph path_pattern(int k)
{
    std::vector<std::pair<int, int>> e;
    for (int i = 0 ; i + 1 < k ; ++i)
        e.emplace_back(i, i + 1);
    return validate_pattern(k, e);
}

PatternGraph cycle_pattern(int k)
{
    std::vector<std::pair<int, int>> e;
    for (int i = 0 ; i < k ; ++i)
        e.emplace_back(i, (i + 1) % k);
    return validate_pattern(k, e);
}

Rational Rational::make(std::int64_t num, std::int64_t den)
{
    if (den == 0)
        throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    auto g = std::gcd(num < 0 ? -num : num, den);
    if (g == 0)
        g = 1;
    return {num / g, den / g};
}

std::string Rational::to_string() const
{
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::strong_ordering operator<=>(const Rational & a, const Rational & b)
{
    __int128 l = static_cast<__int128>(a.num) * b.den;
    __int128 r = static_cast<__int128>(b.num) * a.den;
    return l < r ? std::strong_ordering::less : l > r ? std::strong_ordering::greater : std::strong_ordering::equal;
}

TwoDensity two_density(const PatternGraph & pattern)
{
    if (pattern.edge_count() == 0)
        throw std::invalid_argument("two_density: pattern has no edges");
    check_enumerable(pattern);

    // For a fixed vertex set the ratio grows with the edge count, so induced subgraphs suffice.
    const Rational floor = Rational::make(1, 2);
    std::optional<Rational> best;
    const VertexMask all = (VertexMask{1} << pattern.k()) - 1;
    for (VertexMask s = 0 ; s <= all ; ++s) {
        int v = std::popcount(s);
        if (v <= 2)
            continue;
        int e = pattern.induced_edge_count(s);
        if (e == 0)
            continue;
        auto r = Rational::make(e - 1, v - 2);
        if (! best || r > *best)
            best = r;
    }
    if (! best || *best < floor)
        return {floor, true};
    return {*best, false};
}

LogScale phi(const PatternGraph & pattern, std::int64_t n, std::int64_t m)
{
    if (pattern.edge_count() == 0)
        throw std::invalid_argument("phi: pattern has no edges");
    if (n < 1 || m < 1 || m > n * n)
        throw std::invalid_argument("phi: m must lie in [1, n^2]");
    check_enumerable(pattern);

    // m / n^2 <= 1, so for fixed vertices the most edges give the minimum: induced subgraphs suffice.
    double best = std::numeric_limits<double>::infinity();
    const VertexMask all = (VertexMask{1} << pattern.k()) - 1;
    for (VertexMask s = 1 ; s <= all ; ++s) {
        int e = pattern.induced_edge_count(s);
        if (e == 0)
            continue;
        best = std::min(best, log_copy_expectation(n, static_cast<double>(m), std::popcount(s), e).ln);
    }
    return {best};
}

LogScale expected_copies(const PatternGraph & pattern, std::int64_t n, std::int64_t m, bool rooted)
{
    if (n < 1 || m < 0 || m > n * n)
        throw std::invalid_argument("expected_copies: m must lie in [0, n^2]");
    auto mu = log_copy_expectation(n, static_cast<double>(m), pattern.k(), pattern.edge_count());
    if (rooted)
        mu.ln -= 2 * std::log(static_cast<double>(n));
    return mu;
}

int GluedPattern::overlap_vertices() const
{
    return std::popcount(overlap);
}

std::string GluedPattern::label() const
{
    std::string j = "J=";
    for (int i = 0 ; i < base.k() ; ++i)
        if ((overlap >> i) & 1u)
            j += (j.size() > 2 ? "," : "") + std::to_string(i);
    return j;
}

GluedPattern glue(const PatternGraph & base, VertexMask overlap)
{
    const int k = base.k();
    if (2 * k > max_pattern_vertices)
        throw std::invalid_argument("glue: base pattern too large");

    std::vector<int> second(k);
    std::vector<int> part_map(k);
    std::iota(part_map.begin(), part_map.end(), 0);
    int next = k;
    for (int i = 0 ; i < k ; ++i) {
        if ((overlap >> i) & 1u)
            second[i] = i;
        else {
            second[i] = next++;
            part_map.push_back(i);
        }
    }

    std::vector<std::pair<int, int>> edges;
    for (auto & e : base.edges()) {
        edges.emplace_back(e.u, e.v);
        bool shared = ((overlap >> e.u) & 1u) && ((overlap >> e.v) & 1u);
        if (! shared)
            edges.emplace_back(second[e.u], second[e.v]);
    }
    return {base, overlap, validate_pattern(next, edges), std::move(part_map)};
}

std::vector<GluedPattern> glued_patterns(const PatternGraph & base, int a, int b)
{
    if (a == b)
        throw std::invalid_argument("glued_patterns: a and b must differ");
    if (a < 0 || b < 0 || a >= base.k() || b >= base.k())
        throw std::invalid_argument("glued_patterns: a or b out of range");

    const VertexMask roots = (VertexMask{1} << a) | (VertexMask{1} << b);
    const VertexMask all = (VertexMask{1} << base.k()) - 1;
    const VertexMask rest = all & ~roots;

    // Subsets of rest in increasing order, each joined with the roots.
    std::vector<GluedPattern> out;
    VertexMask sub = 0;
    do {
        out.push_back(glue(base, roots | sub));
        sub = (sub - rest) & rest;
    } while (sub != 0);
    return out;
}

} // namespace klr
