#include "klr/census.hpp"

#include <bit>
#include <numeric>
#include <stdexcept>

namespace klr {

Template Template::canonical(const PatternGraph & pattern)
{
    Template t{pattern, std::vector<int>(pattern.k())};
    std::iota(t.parts.begin(), t.parts.end(), 0);
    return t;
}

Template Template::from(const GluedPattern & glued)
{
    return {glued.result, glued.part_map};
}

struct CopyCounter::Workspace
{
    std::vector<std::vector<Bits>> cand;   // [depth][vertex]
    std::vector<int> assignment;
};

CopyCounter::CopyCounter(const BlowupGraph & host, Template tmpl) :
    tmpl_(std::move(tmpl)),
    n_(host.n())
{
    const int k = tmpl_.graph.k();
    if (static_cast<int>(tmpl_.parts.size()) != k)
        throw std::invalid_argument("template part map has the wrong length");
    for (int p : tmpl_.parts)
        if (p < 0 || p >= host.pattern().k())
            throw std::invalid_argument("template part " + std::to_string(p) + " is not a part of the host");

    oriented_.assign(k, std::vector<const BitMatrix *>(k, nullptr));
    for (auto & e : tmpl_.graph.edges()) {
        const int p = tmpl_.parts[e.u], q = tmpl_.parts[e.v];
        if (p == q)
            throw std::invalid_argument("template edge inside a single part");
        const BitMatrix * blk = host.block(p, q);
        if (! blk) {
            feasible_ = false;
            continue;
        }
        auto key = std::minmax(p, q);
        auto it = transposes_.find(key);
        if (it == transposes_.end())
            it = transposes_.emplace(key, blk->transposed()).first;
        const BitMatrix * low_rows = blk;
        const BitMatrix * high_rows = &it->second;
        oriented_[e.u][e.v] = p < q ? low_rows : high_rows;
        oriented_[e.v][e.u] = p < q ? high_rows : low_rows;
    }

    // Components of the constraint graph: template edges plus shared parts.
    std::vector<int> root(k);
    std::iota(root.begin(), root.end(), 0);
    auto find = [&] (int x) {
        while (root[x] != x)
            x = root[x] = root[root[x]];
        return x;
    };
    for (int x = 0 ; x < k ; ++x)
        for (int y = x + 1 ; y < k ; ++y)
            if (tmpl_.graph.has_edge(x, y) || tmpl_.parts[x] == tmpl_.parts[y])
                root[find(x)] = find(y);
    std::map<int, VertexMask> comps;
    for (int x = 0 ; x < k ; ++x)
        comps[find(x)] |= VertexMask{1} << x;
    for (auto & [r, mask] : comps)
        components_.push_back(mask);
}

CopyCounter::Workspace CopyCounter::workspace() const
{
    const int k = tmpl_.graph.k();
    Workspace ws;
    Bits full(n_);
    full.set();
    ws.cand.assign(k + 1, std::vector<Bits>(k, full));
    ws.assignment.assign(k, -1);
    return ws;
}

int CopyCounter::pick(const Workspace & ws, int depth, VertexMask todo) const
{
    int best = -1;
    std::size_t best_count = 0;
    for (VertexMask m = todo ; m ; m &= m - 1) {
        int y = std::countr_zero(m);
        auto c = ws.cand[depth][y].count();
        if (best < 0 || c < best_count || (c == best_count && tmpl_.parts[y] < tmpl_.parts[best])) {
            best = y;
            best_count = c;
        }
    }
    return best;
}

bool CopyCounter::assign(Workspace & ws, int depth, int x, int u, VertexMask rest) const
{
    for (VertexMask m = rest ; m ; m &= m - 1) {
        int y = std::countr_zero(m);
        Bits & c = ws.cand[depth + 1][y];
        c = ws.cand[depth][y];
        if (oriented_[x][y])
            c &= oriented_[x][y]->row(u);
        if (tmpl_.parts[y] == tmpl_.parts[x])
            c.reset(u);
        if (c.none())
            return false;
    }
    return true;
}

Count CopyCounter::extend(Workspace & ws, int depth, VertexMask todo) const
{
    const int x = pick(ws, depth, todo);
    const VertexMask rest = todo & ~(VertexMask{1} << x);
    const Bits & choices = ws.cand[depth][x];
    if (rest == 0)
        return Count(choices.count());

    const bool last_pair = std::popcount(rest) == 1;
    const int last = std::countr_zero(rest);
    Count total = 0;
    std::uint64_t leaves = 0;
    for (auto u = choices.find_first() ; u != Bits::npos ; u = choices.find_next(u)) {
        if (! assign(ws, depth, x, static_cast<int>(u), rest))
            continue;
        if (last_pair)
            leaves += ws.cand[depth + 1][last].count();
        else
            total += extend(ws, depth + 1, rest);
    }
    total += leaves;
    return total;
}

Count CopyCounter::count() const
{
    if (! feasible_)
        return 0;
    auto ws = workspace();
    Count total = 1;
    for (auto comp : components_) {
        total *= extend(ws, 0, comp);
        if (total == 0)
            break;
    }
    return total;
}

Count CopyCounter::count_rooted(int a, int u, int b, int v) const
{
    const int k = tmpl_.graph.k();
    if (a == b || a < 0 || b < 0 || a >= k || b >= k)
        throw std::invalid_argument("count_rooted: invalid root vertices");
    if (u < 0 || v < 0 || u >= n_ || v >= n_)
        throw std::invalid_argument("count_rooted: root host vertex out of range");
    if (! feasible_)
        return 0;
    auto ws = workspace();
    ws.cand[0][a].reset();
    ws.cand[0][a].set(u);
    ws.cand[0][b].reset();
    ws.cand[0][b].set(v);
    Count total = 1;
    for (auto comp : components_) {
        total *= extend(ws, 0, comp);
        if (total == 0)
            break;
    }
    return total;
}

std::vector<Count> CopyCounter::rooted_table(int a, int b) const
{
    const int k = tmpl_.graph.k();
    if (a == b || a < 0 || b < 0 || a >= k || b >= k)
        throw std::invalid_argument("rooted_table: invalid root vertices");
    std::vector<Count> table(static_cast<std::size_t>(n_) * n_);
    if (! feasible_)
        return table;

    const VertexMask roots = (VertexMask{1} << a) | (VertexMask{1} << b);
    auto ws = workspace();
    Count fixed = 1;
    std::vector<VertexMask> rooted;
    for (auto comp : components_) {
        if (comp & roots)
            rooted.push_back(comp);
        else
            fixed *= extend(ws, 0, comp);
    }
    if (fixed == 0)
        return table;

    for (int u = 0 ; u < n_ ; ++u) {
        ws.cand[0][a].reset();
        ws.cand[0][a].set(u);
        for (int v = 0 ; v < n_ ; ++v) {
            ws.cand[0][b].reset();
            ws.cand[0][b].set(v);
            Count value = fixed;
            for (auto comp : rooted) {
                value *= extend(ws, 0, comp);
                if (value == 0)
                    break;
            }
            table[static_cast<std::size_t>(u) * n_ + v] = std::move(value);
        }
    }
    return table;
}

bool CopyCounter::enumerate_from(Workspace & ws, int depth, VertexMask todo, const std::function<bool(std::span<const int>)> & visit) const
{
    if (todo == 0)
        return visit(ws.assignment);
    const int x = pick(ws, depth, todo);
    const VertexMask rest = todo & ~(VertexMask{1} << x);
    const Bits & choices = ws.cand[depth][x];
    for (auto u = choices.find_first() ; u != Bits::npos ; u = choices.find_next(u)) {
        if (! assign(ws, depth, x, static_cast<int>(u), rest))
            continue;
        ws.assignment[x] = static_cast<int>(u);
        if (! enumerate_from(ws, depth + 1, rest, visit))
            return false;
    }
    return true;
}

bool CopyCounter::enumerate(const std::function<bool(std::span<const int>)> & visit) const
{
    if (! feasible_)
        return true;
    auto ws = workspace();
    const VertexMask all = tmpl_.graph.k() == 64 ? ~VertexMask{0} : (VertexMask{1} << tmpl_.graph.k()) - 1;
    return enumerate_from(ws, 0, all, visit);
}

Count count_canonical(const BlowupGraph & g, const PatternGraph & pattern)
{
    return CopyCounter(g, Template::canonical(pattern)).count();
}

Count count_canonical(const BlowupGraph & g, const GluedPattern & glued)
{
    return CopyCounter(g, Template::from(glued)).count();
}

Count DegreeVector::total() const
{
    Count t = 0;
    for (auto & v : values)
        t += v;
    return t;
}

DegreeVector degree_vector(const BlowupGraph & g, const PatternGraph & pattern, int a, int b)
{
    if (a == b)
        throw std::invalid_argument("degree_vector: a and b must differ");
    if (a < 0 || b < 0 || a >= pattern.k() || b >= pattern.k())
        throw std::invalid_argument("degree_vector: a or b out of range");
    DegreeVector dv{a, b, g.n(), pattern, {}};
    dv.values = CopyCounter(g, Template::canonical(pattern)).rooted_table(a, b);
    return dv;
}

Count sum_of_squares(const DegreeVector & dv)
{
    Count s = 0;
    for (auto & v : dv.values)
        s += v * v;
    return s;
}

double second_moment(const DegreeVector & dv)
{
    return sum_of_squares(dv).convert_to<double>() / (static_cast<double>(dv.n) * dv.n);
}

GluedIdentity glued_identity(const BlowupGraph & g, const PatternGraph & pattern, int a, int b)
{
    GluedIdentity id;
    id.squares = sum_of_squares(degree_vector(g, pattern, a, b));
    id.glued_copies = 0;
    for (auto & glued : glued_patterns(pattern, a, b))
        id.glued_copies += count_canonical(g, glued);
    return id;
}

bool glued_identity_check(const BlowupGraph & g, const PatternGraph & pattern, int a, int b)
{
    return glued_identity(g, pattern, a, b).holds();
}

std::size_t rich_pairs(const DegreeVector & dv, double gamma, LogScale mu_e)
{
    if (! (gamma > 0) || mu_e.is_zero())
        throw std::invalid_argument("rich_pairs: gamma and mu_e must be positive");
    const double threshold = gamma * mu_e.value() / 2;
    std::size_t rich = 0;
    for (auto & v : dv.values)
        if (v.convert_to<double>() >= threshold)
            ++rich;
    return rich;
}

PoorPairs poor_pairs(const BlowupGraph & dense, const BlowupGraph & ghat, const PatternGraph & pattern, int a, int b, double gamma_pp, LogScale mu_e)
{
    if (dense.n() != ghat.n() || ! (dense.pattern() == ghat.pattern()))
        throw std::invalid_argument("poor_pairs: D and Ghat live on different hosts");
    if (pattern.k() != dense.pattern().k())
        throw std::invalid_argument("poor_pairs: pattern does not match the host parts");
    if (! pattern.has_edge(a, b))
        throw std::invalid_argument("poor_pairs: ab must be an edge of the pattern");

    const auto host = unite(dense, minus_pair(ghat, a, b));
    const auto dv = degree_vector(host, pattern.without_edge(a, b), a, b);
    const double threshold = gamma_pp * mu_e.value() / 2;
    const int n = host.n();

    PoorPairs out{BitMatrix(n, n, false), 0};
    for (int u = 0 ; u < n ; ++u)
        for (int v = 0 ; v < n ; ++v)
            if (dv.at(u, v).convert_to<double>() < threshold) {
                if (a < b)
                    out.indicator.set(u, v);
                else
                    out.indicator.set(v, u);
                ++out.count;
            }
    return out;
}

double moment_ratio(double second_moment, LogScale mu_e)
{
    if (second_moment == 0)
        return 0;
    return std::exp(std::log(second_moment) - 2 * mu_e.ln);
}

std::int64_t per_block_edges(const BlowupGraph & g, const PatternGraph & pattern)
{
    if (pattern.edge_count() == 0)
        return 0;
    std::size_t total = 0;
    for (auto & e : pattern.edges())
        total += g.block_edge_count(e.u, e.v);
    return static_cast<std::int64_t>(total / pattern.edge_count());
}

CensusReport census(const BlowupGraph & g, const PatternGraph & pattern, int a, int b, double gamma, std::int64_t m)
{
    CensusReport r;
    r.z = count_canonical(g, pattern);
    auto dv = degree_vector(g, pattern, a, b);
    r.degree_sum = dv.total();
    r.square_sum = sum_of_squares(dv);
    r.second_moment = r.square_sum.convert_to<double>() / (static_cast<double>(g.n()) * g.n());
    r.mu_e = expected_copies(pattern, g.n(), m, true);
    const auto pairs = static_cast<std::size_t>(g.n()) * g.n();
    r.rich_count = r.mu_e.is_zero() ? pairs : rich_pairs(dv, gamma, r.mu_e);
    r.poor_count = pairs - r.rich_count;
    r.ratio_t = moment_ratio(r.second_moment, r.mu_e);
    return r;
}

std::string to_string(const Count & c)
{
    return c.str();
}

} // namespace klr
