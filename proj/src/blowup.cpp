#include "klr/blowup.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace klr {

std::size_t and_count(const Bits & a, const Bits & b)
{
    thread_local Bits scratch;
    scratch = a;
    scratch &= b;
    return scratch.count();
}

BitMatrix::BitMatrix(int rows, int cols, bool fill) :
    rows_(rows, Bits(cols)),
    cols_(cols)
{
    if (fill)
        for (auto & r : rows_)
            r.set();
}

std::size_t BitMatrix::count() const
{
    std::size_t total = 0;
    for (auto & r : rows_)
        total += r.count();
    return total;
}

BitMatrix BitMatrix::transposed() const
{
    BitMatrix t(cols_, rows(), false);
    for (int r = 0 ; r < rows() ; ++r)
        for (auto c = rows_[r].find_first() ; c != Bits::npos ; c = rows_[r].find_next(c))
            t.rows_[c].set(r);
    return t;
}

void BitMatrix::clear()
{
    for (auto & r : rows_)
        r.reset();
}

BitMatrix & BitMatrix::operator|=(const BitMatrix & other)
{
    for (int r = 0 ; r < rows() ; ++r)
        rows_[r] |= other.rows_[r];
    return *this;
}

BitMatrix & BitMatrix::operator&=(const BitMatrix & other)
{
    for (int r = 0 ; r < rows() ; ++r)
        rows_[r] &= other.rows_[r];
    return *this;
}

BitMatrix & BitMatrix::subtract(const BitMatrix & other)
{
    for (int r = 0 ; r < rows() ; ++r)
        rows_[r] -= other.rows_[r];
    return *this;
}

PairKey PairKey::of(int a, int b)
{
    if (a == b)
        throw std::invalid_argument("part pair needs two distinct parts, got " + std::to_string(a) + "-" + std::to_string(b));
    return a < b ? PairKey{a, b} : PairKey{b, a};
}

PairSubset PairSubset::full(int part, int n)
{
    PairSubset s{part, Bits(n)};
    s.members.set();
    return s;
}

PairSubset PairSubset::of(int part, int n, std::span<const int> vertices)
{
    PairSubset s{part, Bits(n)};
    for (int v : vertices) {
        if (v < 0 || v >= n)
            throw std::invalid_argument("subset member " + std::to_string(v) + " out of range");
        s.members.set(v);
    }
    return s;
}

BlowupGraph::BlowupGraph(PatternGraph pattern, int n) :
    pattern_(std::move(pattern)),
    n_(n)
{
    if (n < 1)
        throw std::invalid_argument("part size n must be at least 1");
}

void BlowupGraph::check_pair(int a, int b) const
{
    if (a < 0 || b < 0 || a >= pattern_.k() || b >= pattern_.k() || a == b)
        throw std::invalid_argument("invalid part pair " + std::to_string(a) + "-" + std::to_string(b));
}

const BitMatrix * BlowupGraph::block(int a, int b) const
{
    check_pair(a, b);
    auto it = blocks_.find(PairKey::of(a, b));
    return it == blocks_.end() ? nullptr : &it->second;
}

BitMatrix & BlowupGraph::ensure_block(int a, int b)
{
    check_pair(a, b);
    auto [it, inserted] = blocks_.try_emplace(PairKey::of(a, b), n_, n_, false);
    return it->second;
}

bool BlowupGraph::has_edge(const HostEdge & e) const
{
    auto b = block(e.pair.i, e.pair.j);
    return b && b->test(e.u, e.v);
}

void BlowupGraph::add_edge(const HostEdge & e)
{
    if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_)
        throw std::invalid_argument("edge endpoint out of range");
    ensure_block(e.pair.i, e.pair.j).set(e.u, e.v);
}

std::size_t BlowupGraph::edge_count() const
{
    std::size_t total = 0;
    for (auto & [key, b] : blocks_)
        total += b.count();
    return total;
}

std::size_t BlowupGraph::block_edge_count(int a, int b) const
{
    auto blk = block(a, b);
    return blk ? blk->count() : 0;
}

std::vector<HostEdge> BlowupGraph::edges() const
{
    std::vector<HostEdge> out;
    for (auto & [key, b] : blocks_)
        for (int u = 0 ; u < b.rows() ; ++u)
            for (auto v = b.row(u).find_first() ; v != Bits::npos ; v = b.row(u).find_next(v))
                out.push_back({key, u, static_cast<int>(v)});
    return out;
}

bool operator==(const BlowupGraph & a, const BlowupGraph & b)
{
    return a.n_ == b.n_ && a.pattern_ == b.pattern_ && a.blocks_ == b.blocks_;
}

BlowupGraph new_host(const PatternGraph & pattern, int n, Fill fill)
{
    BlowupGraph g(pattern, n);
    for (auto & e : pattern.edges())
        g.ensure_block(e.u, e.v) = BitMatrix(n, n, fill == Fill::complete);
    return g;
}

double pair_density(const BlowupGraph & g, int i, int j, const PairSubset & a, const PairSubset & b)
{
    auto blk = g.block(i, j);
    if (! blk)
        throw std::invalid_argument("pair_density: no block on pair " + PairKey::of(i, j).to_string());
    if (a.part != i || b.part != j)
        throw std::invalid_argument("pair_density: subsets must live on parts i and j");
    if (a.members.size() != static_cast<std::size_t>(g.n()) || b.members.size() != static_cast<std::size_t>(g.n()))
        throw std::invalid_argument("pair_density: subset size does not match n");
    const auto sa = a.size(), sb = b.size();
    if (sa == 0 || sb == 0)
        throw std::invalid_argument("pair_density: empty subset");

    // Rows of the stored block belong to the lower part.
    const bool swapped = i > j;
    const Bits & rows = swapped ? b.members : a.members;
    const Bits & cols = swapped ? a.members : b.members;
    std::size_t e = 0;
    for (auto r = rows.find_first() ; r != Bits::npos ; r = rows.find_next(r))
        e += and_count(blk->row(static_cast<int>(r)), cols);
    return static_cast<double>(e) / (static_cast<double>(sa) * static_cast<double>(sb));
}

BlowupGraph minus_pair(const BlowupGraph & g, int a, int b)
{
    BlowupGraph out = g;
    if (g.has_block(a, b))
        out.ensure_block(a, b).clear();
    return out;
}

namespace
{
    void check_compatible(const BlowupGraph & g1, const BlowupGraph & g2, const char * op)
    {
        if (g1.n() != g2.n() || ! (g1.pattern() == g2.pattern()))
            throw std::invalid_argument(std::string(op) + ": graphs differ in pattern or part size");
    }
}

BlowupGraph unite(const BlowupGraph & g1, const BlowupGraph & g2)
{
    check_compatible(g1, g2, "union");
    BlowupGraph out = g1;
    for (auto & [key, blk] : g2.blocks())
        out.ensure_block(key.i, key.j) |= blk;
    return out;
}

BlowupGraph intersect(const BlowupGraph & g1, const BlowupGraph & g2)
{
    check_compatible(g1, g2, "intersection");
    BlowupGraph out = g1;
    for (auto & [key, blk] : g1.blocks()) {
        auto other = g2.block(key.i, key.j);
        if (other)
            out.ensure_block(key.i, key.j) &= *other;
        else
            out.ensure_block(key.i, key.j).clear();
    }
    return out;
}

BlowupGraph difference(const BlowupGraph & g, std::span<const HostEdge> removed)
{
    BlowupGraph out = g;
    for (auto & e : removed)
        if (out.has_edge(e))
            out.ensure_block(e.pair.i, e.pair.j).set(e.u, e.v, false);
    return out;
}

BlowupGraph difference(const BlowupGraph & g, const BlowupGraph & removed)
{
    check_compatible(g, removed, "difference");
    BlowupGraph out = g;
    for (auto & [key, blk] : removed.blocks())
        if (g.has_block(key.i, key.j))
            out.ensure_block(key.i, key.j).subtract(blk);
    return out;
}

std::string to_json(const BlowupGraph & g)
{
    using nlohmann::ordered_json;
    ordered_json pattern;
    pattern["k"] = g.pattern().k();
    pattern["edges"] = ordered_json::array();
    for (auto & e : g.pattern().edges())
        pattern["edges"].push_back({e.u, e.v});

    ordered_json blocks = ordered_json::object();
    for (auto & [key, blk] : g.blocks()) {
        auto list = ordered_json::array();
        for (int u = 0 ; u < blk.rows() ; ++u)
            for (auto v = blk.row(u).find_first() ; v != Bits::npos ; v = blk.row(u).find_next(v))
                list.push_back({u, static_cast<int>(v)});
        blocks[key.to_string()] = std::move(list);
    }

    ordered_json doc;
    doc["pattern"] = std::move(pattern);
    doc["n"] = g.n();
    doc["blocks"] = std::move(blocks);
    return doc.dump();
}

BlowupGraph graph_from_json(const std::string & text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error & e) {
        throw std::runtime_error(std::string("graph file: ") + e.what());
    }

    try {
        auto & p = doc.at("pattern");
        std::vector<std::pair<int, int>> edges;
        for (auto & e : p.at("edges"))
            edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        BlowupGraph g(validate_pattern(p.at("k").get<int>(), edges), doc.at("n").get<int>());

        for (auto & [key, list] : doc.at("blocks").items()) {
            auto dash = key.find('-');
            if (dash == std::string::npos)
                throw std::runtime_error("graph file: block key '" + key + "' is not of the form i-j");
            int i = std::stoi(key.substr(0, dash));
            int j = std::stoi(key.substr(dash + 1));
            if (i >= j)
                throw std::runtime_error("graph file: block key '" + key + "' must have i < j");
            g.ensure_block(i, j);
            for (auto & uv : list)
                g.add_edge({{i, j}, uv.at(0).get<int>(), uv.at(1).get<int>()});
        }
        return g;
    }
    catch (const nlohmann::json::exception & e) {
        throw std::runtime_error(std::string("graph file: ") + e.what());
    }
}

void save_graph(const BlowupGraph & g, const std::string & path)
{
    std::ofstream out(path, std::ios::binary);
    if (! out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << to_json(g) << '\n';
}

BlowupGraph load_graph(const std::string & path)
{
    std::ifstream in(path, std::ios::binary);
    if (! in)
        throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return graph_from_json(ss.str());
}

} // namespace klr
