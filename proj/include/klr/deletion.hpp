#pragma once

#include "klr/census.hpp"

#include <map>
#include <string>
#include <vector>

namespace klr {

// One canonical copy: the host vertex of every template vertex, and its edge set (sorted).
struct CopyRecord
{
    std::vector<int> assignment;
    std::vector<HostEdge> edges;
};

struct DisjointFamily
{
    std::vector<CopyRecord> copies;
    // True when the scan finished: every copy then shares an edge with the family.
    bool maximal = false;
};

// Greedy edge-disjoint family in backtracking order, stopping at cap copies.
DisjointFamily greedy_disjoint_family(const BlowupGraph & g, const Template & tmpl, std::size_t cap);
DisjointFamily greedy_disjoint_family(const BlowupGraph & g, const PatternGraph & pattern, std::size_t cap);

enum class DeletionStatus { success, fail };
std::string to_string(DeletionStatus s);

struct DeletionOutcome
{
    DeletionStatus status = DeletionStatus::fail;
    std::vector<HostEdge> removed;   // sorted
    std::size_t removed_size = 0;
    std::map<std::string, Count> residual;   // copies left after removal, per pattern label
    double ratio_before = 0;   // second_moment / mu_e^2 before removal (second-moment variant)
    double measured_t = 0;     // the same after removal
    bool below_reference_t = false;   // measured_t < the reference T supplied by the caller
};

// Removes the edges of a maximal edge-disjoint family when it has fewer than ceil(budget / s) copies,
// s = e(pattern); the residual is then 0. Otherwise fails and removes nothing.
DeletionOutcome deletion_set(const BlowupGraph & g, const Template & tmpl, std::int64_t budget);
DeletionOutcome deletion_set(const BlowupGraph & g, const PatternGraph & pattern, std::int64_t budget);

// Tames sum_e deg(e)^2 over V_a x V_b: for every glued pattern of `pattern` over (a, b), one
// deletion_set with budget floor(xi 2^-k m), m the per-block edge count. The removed set is the union
// of the successful deletions. Requires ab not in pattern.
DeletionOutcome deletion_for_second_moment(const BlowupGraph & g, const PatternGraph & pattern, int a, int b, double xi, double reference_t);

} // namespace klr
