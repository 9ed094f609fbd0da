#pragma once

#include "klr/pattern.hpp"

#include <boost/dynamic_bitset.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace klr {

using Bits = boost::dynamic_bitset<std::uint64_t>;

// |a & b| without allocating.
std::size_t and_count(const Bits & a, const Bits & b);

class BitMatrix
{
public:
    BitMatrix() = default;
    BitMatrix(int rows, int cols, bool fill = false);

    int rows() const { return static_cast<int>(rows_.size()); }
    int cols() const { return cols_; }

    bool test(int r, int c) const { return rows_[r].test(c); }
    void set(int r, int c, bool value = true) { rows_[r].set(c, value); }
    const Bits & row(int r) const { return rows_[r]; }

    std::size_t count() const;
    BitMatrix transposed() const;
    void clear();

    BitMatrix & operator|=(const BitMatrix & other);
    BitMatrix & operator&=(const BitMatrix & other);
    BitMatrix & subtract(const BitMatrix & other);

    friend bool operator==(const BitMatrix &, const BitMatrix &) = default;

private:
    std::vector<Bits> rows_;
    int cols_ = 0;
};

// Unordered pair of part indices, normalized to i < j.
struct PairKey
{
    int i = 0;
    int j = 0;

    static PairKey of(int a, int b);
    std::string to_string() const { return std::to_string(i) + "-" + std::to_string(j); }
    friend auto operator<=>(const PairKey &, const PairKey &) = default;
};

// An edge of K_n^H: u lies in part pair.i and v in part pair.j.
struct HostEdge
{
    PairKey pair;
    int u = 0;
    int v = 0;

    friend auto operator<=>(const HostEdge &, const HostEdge &) = default;
};

struct PairSubset
{
    int part = 0;
    Bits members;

    static PairSubset full(int part, int n);
    static PairSubset of(int part, int n, std::span<const int> vertices);
    std::size_t size() const { return members.count(); }
};

// A subgraph of K_n^H stored as one n x n biadjacency block per part pair (rows in the lower part).
// Blocks on non-pattern pairs are allowed.
class BlowupGraph
{
public:
    BlowupGraph() = default;
    BlowupGraph(PatternGraph pattern, int n);

    const PatternGraph & pattern() const { return pattern_; }
    int n() const { return n_; }
    const std::map<PairKey, BitMatrix> & blocks() const { return blocks_; }

    // nullptr when the pair carries no block.
    const BitMatrix * block(int a, int b) const;
    bool has_block(int a, int b) const { return block(a, b) != nullptr; }
    BitMatrix & ensure_block(int a, int b);

    bool has_edge(const HostEdge & e) const;
    void add_edge(const HostEdge & e);

    std::size_t edge_count() const;
    std::size_t block_edge_count(int a, int b) const;
    std::vector<HostEdge> edges() const;   // sorted

    friend bool operator==(const BlowupGraph & a, const BlowupGraph & b);

private:
    void check_pair(int a, int b) const;

    PatternGraph pattern_;
    int n_ = 0;
    std::map<PairKey, BitMatrix> blocks_;
};

enum class Fill { empty, complete };

BlowupGraph new_host(const PatternGraph & pattern, int n, Fill fill);

// e(A, B) / (|A| |B|) within block (i, j); A lives in part i, B in part j.
double pair_density(const BlowupGraph & g, int i, int j, const PairSubset & a, const PairSubset & b);

BlowupGraph minus_pair(const BlowupGraph & g, int a, int b);
BlowupGraph unite(const BlowupGraph & g1, const BlowupGraph & g2);
BlowupGraph intersect(const BlowupGraph & g1, const BlowupGraph & g2);
BlowupGraph difference(const BlowupGraph & g, std::span<const HostEdge> removed);
BlowupGraph difference(const BlowupGraph & g, const BlowupGraph & removed);

// Canonical JSON text: pattern, n, blocks with "i-j" keys and sorted [u, v] lists.
std::string to_json(const BlowupGraph & g);
BlowupGraph graph_from_json(const std::string & text);
void save_graph(const BlowupGraph & g, const std::string & path);
BlowupGraph load_graph(const std::string & path);

} // namespace klr
