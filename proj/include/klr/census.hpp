#pragma once

#include "klr/blowup.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <map>
#include <span>
#include <vector>

namespace klr {

using Count = boost::multiprecision::cpp_int;

// A pattern placed into host parts: vertex x must land in part parts[x]. Vertices sharing a part are
// mapped to distinct host vertices. Canonical copies of a plain pattern use parts[x] = x.
struct Template
{
    PatternGraph graph;
    std::vector<int> parts;

    static Template canonical(const PatternGraph & pattern);
    static Template from(const GluedPattern & glued);
};

// Backtracking counter over one host graph. Candidate sets are bitset row intersections; the next
// vertex is the one with the fewest candidates (ties to the lower part, then the lower vertex).
// Independent components of the template are counted separately and multiplied.
class CopyCounter
{
public:
    CopyCounter(const BlowupGraph & host, Template tmpl);

    // False when a template edge falls on a part pair without a block.
    bool feasible() const { return feasible_; }

    Count count() const;
    // Copies with template vertex a at host vertex u and b at v.
    Count count_rooted(int a, int u, int b, int v) const;
    // count_rooted(a, u, b, v) for all (u, v), row-major.
    std::vector<Count> rooted_table(int a, int b) const;

    // Visits copies in backtracking order with the assignment indexed by template vertex. The visitor
    // returns false to stop; the return value says whether the enumeration ran to completion.
    bool enumerate(const std::function<bool(std::span<const int>)> & visit) const;

    const Template & templ() const { return tmpl_; }

private:
    struct Workspace;

    Count extend(Workspace & ws, int depth, VertexMask todo) const;
    bool enumerate_from(Workspace & ws, int depth, VertexMask todo, const std::function<bool(std::span<const int>)> & visit) const;
    Workspace workspace() const;
    bool assign(Workspace & ws, int depth, int x, int u, VertexMask todo) const;
    int pick(const Workspace & ws, int depth, VertexMask todo) const;

    Template tmpl_;
    int n_ = 0;
    bool feasible_ = true;
    std::vector<std::vector<const BitMatrix *>> oriented_;   // [x][y]: rows in part of x, cols in part of y
    std::map<std::pair<int, int>, BitMatrix> transposes_;
    std::vector<VertexMask> components_;
};

Count count_canonical(const BlowupGraph & g, const PatternGraph & pattern);
Count count_canonical(const BlowupGraph & g, const GluedPattern & glued);

// deg(e) for every e = (u, v) in V_a x V_b: copies with a at u and b at v, edge or not.
struct DegreeVector
{
    int a = 0;
    int b = 0;
    int n = 0;
    PatternGraph pattern;
    std::vector<Count> values;   // row-major, u * n + v

    const Count & at(int u, int v) const { return values[static_cast<std::size_t>(u) * n + v]; }
    Count total() const;
};

DegreeVector degree_vector(const BlowupGraph & g, const PatternGraph & pattern, int a, int b);

// sum_e deg(e)^2, exact.
Count sum_of_squares(const DegreeVector & dv);
// (1 / n^2) sum_e deg(e)^2.
double second_moment(const DegreeVector & dv);

// sum_e deg(e)^2 against the total number of canonical copies of every glued pattern over (a, b).
struct GluedIdentity
{
    Count squares;
    Count glued_copies;
    bool holds() const { return squares == glued_copies; }
};
GluedIdentity glued_identity(const BlowupGraph & g, const PatternGraph & pattern, int a, int b);
bool glued_identity_check(const BlowupGraph & g, const PatternGraph & pattern, int a, int b);

// |{e : deg(e) >= gamma mu_e / 2}|
std::size_t rich_pairs(const DegreeVector & dv, double gamma, LogScale mu_e);

// Pairs e in V_a x V_b with deg_{H - ab}(e, D u (Ghat without its (a, b) block)) < gamma'' mu_e / 2.
struct PoorPairs
{
    BitMatrix indicator;   // rows in the lower of a, b
    std::size_t count = 0;
};
PoorPairs poor_pairs(const BlowupGraph & dense, const BlowupGraph & ghat, const PatternGraph & pattern, int a, int b, double gamma_pp, LogScale mu_e);

struct CensusReport
{
    Count z;
    Count degree_sum;
    Count square_sum;
    double second_moment = 0;
    LogScale mu_e;
    std::size_t rich_count = 0;
    std::size_t poor_count = 0;
    double ratio_t = 0;   // second_moment / mu_e^2
};

// Full report for a pattern rooted at (a, b); mu_e is the rooted expectation at m edges per block.
CensusReport census(const BlowupGraph & g, const PatternGraph & pattern, int a, int b, double gamma, std::int64_t m);

// second_moment / mu_e^2 with 0 / 0 = 0.
double moment_ratio(double second_moment, LogScale mu_e);

// Mean edge count over the pattern's blocks, rounded down.
std::int64_t per_block_edges(const BlowupGraph & g, const PatternGraph & pattern);

std::string to_string(const Count & c);

} // namespace klr
