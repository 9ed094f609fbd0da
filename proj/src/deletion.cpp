#include "klr/deletion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace klr {

namespace
{
    std::vector<HostEdge> copy_edges(const Template & tmpl, std::span<const int> assignment)
    {
        std::vector<HostEdge> out;
        out.reserve(tmpl.graph.edges().size());
        for (auto & e : tmpl.graph.edges()) {
            const int p = tmpl.parts[e.u], q = tmpl.parts[e.v];
            if (p < q)
                out.push_back({{p, q}, assignment[e.u], assignment[e.v]});
            else
                out.push_back({{q, p}, assignment[e.v], assignment[e.u]});
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    DeletionOutcome run_deletion(const BlowupGraph & g, const Template & tmpl, std::int64_t budget, const std::string & label)
    {
        const auto s = static_cast<std::int64_t>(tmpl.graph.edge_count());
        if (s == 0)
            throw std::invalid_argument("deletion_set: the pattern has no edges");
        if (budget < s)
            throw std::invalid_argument("deletion_set: budget " + std::to_string(budget) + " is below e(pattern) = " + std::to_string(s));

        const auto cap = static_cast<std::size_t>((budget + s - 1) / s);
        auto family = greedy_disjoint_family(g, tmpl, cap);

        DeletionOutcome out;
        if (family.maximal && family.copies.size() < cap) {
            out.status = DeletionStatus::success;
            for (auto & c : family.copies)
                out.removed.insert(out.removed.end(), c.edges.begin(), c.edges.end());
            std::sort(out.removed.begin(), out.removed.end());
        }
        out.removed_size = out.removed.size();
        out.residual[label] = CopyCounter(difference(g, out.removed), tmpl).count();
        return out;
    }
}

std::string to_string(DeletionStatus s)
{
    return s == DeletionStatus::success ? "success" : "fail";
}

DisjointFamily greedy_disjoint_family(const BlowupGraph & g, const Template & tmpl, std::size_t cap)
{
    if (cap < 1)
        throw std::invalid_argument("greedy_disjoint_family: cap must be at least 1");

    DisjointFamily family;
    BlowupGraph used(g.pattern(), g.n());
    CopyCounter counter(g, tmpl);
    family.maximal = counter.enumerate([&] (std::span<const int> assignment) {
        auto edges = copy_edges(tmpl, assignment);
        for (auto & e : edges)
            if (used.has_edge(e))
                return true;
        for (auto & e : edges)
            used.add_edge(e);
        family.copies.push_back({std::vector<int>(assignment.begin(), assignment.end()), std::move(edges)});
        return family.copies.size() < cap;
    });
    return family;
}

DisjointFamily greedy_disjoint_family(const BlowupGraph & g, const PatternGraph & pattern, std::size_t cap)
{
    return greedy_disjoint_family(g, Template::canonical(pattern), cap);
}

DeletionOutcome deletion_set(const BlowupGraph & g, const Template & tmpl, std::int64_t budget)
{
    return run_deletion(g, tmpl, budget, tmpl.graph.to_spec());
}

DeletionOutcome deletion_set(const BlowupGraph & g, const PatternGraph & pattern, std::int64_t budget)
{
    return run_deletion(g, Template::canonical(pattern), budget, pattern.to_spec());
}

DeletionOutcome deletion_for_second_moment(const BlowupGraph & g, const PatternGraph & pattern, int a, int b, double xi, double reference_t)
{
    if (pattern.has_edge(a, b))
        throw std::invalid_argument("deletion_for_second_moment: ab must not be an edge of the pattern");
    if (! (xi > 0))
        throw std::invalid_argument("deletion_for_second_moment: xi must be positive");

    const auto m = per_block_edges(g, pattern);
    const auto mu_e = expected_copies(pattern, g.n(), m, true);
    const auto budget = static_cast<std::int64_t>(std::floor(xi * std::ldexp(1.0, -pattern.k()) * static_cast<double>(m)));

    DeletionOutcome out;
    out.status = DeletionStatus::success;
    out.ratio_before = moment_ratio(second_moment(degree_vector(g, pattern, a, b)), mu_e);

    const auto glued = glued_patterns(pattern, a, b);
    std::vector<HostEdge> removed;
    for (auto & gp : glued) {
        const auto tmpl = Template::from(gp);
        if (budget < gp.result.edge_count()) {
            if (CopyCounter(g, tmpl).count() != 0)
                out.status = DeletionStatus::fail;
            continue;
        }
        auto part = run_deletion(g, tmpl, budget, gp.label());
        if (part.status == DeletionStatus::success)
            removed.insert(removed.end(), part.removed.begin(), part.removed.end());
        else
            out.status = DeletionStatus::fail;
    }
    std::sort(removed.begin(), removed.end());
    removed.erase(std::unique(removed.begin(), removed.end()), removed.end());

    const auto after = difference(g, removed);
    for (auto & gp : glued)
        out.residual[gp.label()] = count_canonical(after, gp);
    out.removed = std::move(removed);
    out.removed_size = out.removed.size();
    out.measured_t = moment_ratio(second_moment(degree_vector(after, pattern, a, b)), mu_e);
    out.below_reference_t = out.measured_t < reference_t;
    return out;
}

} // namespace klr
