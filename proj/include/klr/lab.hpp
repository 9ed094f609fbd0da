#pragma once

#include "klr/census.hpp"
#include "klr/regularity.hpp"
#include "klr/sampler.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace klr {

// ---------------------------------------------------------------------------------------------
// Constants of the inductive step for (H, H'), H' spanning the same vertices with e(H') >= 1.

struct ConstantInputs
{
    double lambda = 0.5;
    double beta = 0.5;
    double d = 0.5;
    double eps = 0.1;
    double xi_pp = 0.1;      // xi''
    double gamma_pp = 0.01;  // gamma''
    double t = 100;          // T
    std::int64_t n = 100;
    std::int64_t m = 1000;
};

struct ConstantLedger
{
    ConstantInputs inputs;
    int vertices = 0;          // v(H)
    int sub_edges = 0;         // e(H')

    double d0 = 0;             // delta_0(1)
    double d_eff = 0;          // min(d, d0)
    double beta1 = 0;          // beta 3^-e(H')
    double beta2 = 0;          // beta1^2 2^-4e(H')
    double xi_prime = 0;       // min(xi'' / 2, lambda eps^2 / 4)
    std::int64_t z = 0;        // ceil(4 T / gamma''^2)
    double xi = 0;             // xi' / 2z
    double gamma_prime = 0;    // gamma'' lambda eps^2 / 8
    double gamma = 0;          // gamma' / (2z)^e(H')
    double m_prime = 0;        // m / 2z
    LogScale mu;               // n^v(H) (m'/n^2)^e(H')
    LogScale mu_e;             // n^v(H) (m'/n^2)^(e(H') - 1) / n^2
};

ConstantLedger derive_constants(const PatternGraph & h, const PatternGraph & h_prime, const ConstantInputs & in);

// ---------------------------------------------------------------------------------------------

struct Interval
{
    double lo = 0;
    double hi = 1;
};

// Wilson score interval; [0, 1] for zero trials.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

// ---------------------------------------------------------------------------------------------

struct ExperimentConfig
{
    PatternGraph pattern;
    int n = 12;
    std::optional<std::int64_t> m;
    std::optional<double> c;   // m = ceil(C n^(2 - 1/m_2(H))) when m is absent
    double eps = 0.25;
    double lambda = 0.5;
    double gamma = 0.1;
    std::size_t samples = 100;
    std::uint64_t seed = 1;
    RegularityMode mode = RegularityMode::exact;
    int restarts = 8;
    std::uint64_t enumeration_cap = 100'000'000;
    int max_n = 64;
    std::string output;        // directory for artifacts; empty for none
    unsigned threads = 0;      // 0: KLR_LAB_THREADS or hardware concurrency
    bool deterministic = false;

    // "estimate" or "expose"; the rest is read by the exposure run only.
    std::string experiment = "estimate";
    int z = 2;
    int a = 0;
    int b = 1;
    bool cumulative = true;
};

std::int64_t resolve_m(const ExperimentConfig & cfg);

enum class SampleClass { regular, irregular, unknown };
std::string to_string(SampleClass c);

struct SampleRecord
{
    std::size_t index = 0;
    std::uint64_t seed = 0;
    SampleClass cls = SampleClass::unknown;
    Count z;
    bool event = false;
};

struct EstimateReport
{
    std::size_t total = 0;
    std::size_t regular = 0;
    std::size_t irregular = 0;
    std::size_t unknown = 0;
    std::size_t events = 0;
    double point = 0;
    Interval wilson95;
    bool degenerate = false;   // no regular samples
    std::int64_t m = 0;
    double threshold = 0;      // gamma n^v (m/n^2)^e
    std::vector<SampleRecord> records;
};

// Worker count from KLR_LAB_THREADS (or the hardware) capped at `requested` when nonzero.
unsigned worker_count(unsigned requested);

EstimateReport estimate_hfree_probability(const ExperimentConfig & cfg);

// Rebuilds the counts and interval from per-sample records alone.
EstimateReport summarize(std::vector<SampleRecord> records, std::int64_t m, double threshold);

std::string samples_csv(const EstimateReport & report);
std::string report_json(const ExperimentConfig & cfg, const EstimateReport & report);

// ---------------------------------------------------------------------------------------------

enum class AdvancingClause { a, b, neither };
std::string to_string(AdvancingClause c);

struct AdvancingVerdict
{
    AdvancingClause clause = AdvancingClause::neither;
    Count copies;               // Z_H(D u Ghat u (G - X))
    double copy_threshold = 0;  // gamma' mu
    std::size_t poor_before = 0;
    std::size_t poor_after = 0;
    double required_drop = 0;   // n^2 / z
};

// h = ab must be an edge of H'. D carries the H - H' pairs, Ghat and G the H' pairs.
AdvancingVerdict advancing_check(const BlowupGraph & dense, const BlowupGraph & ghat, const BlowupGraph & g,
        std::span<const HostEdge> removed, const ConstantLedger & ledger, const PatternGraph & h,
        const PatternGraph & h_prime, int a, int b);

// ---------------------------------------------------------------------------------------------

struct ExposureTrace
{
    std::int64_t m_requested = 0;
    std::int64_t m_used = 0;          // rounded down to a multiple of 2z
    int rounds = 0;
    std::vector<std::size_t> d_sizes; // |D| before round 1, then after every round
    std::size_t g_star = 0;           // edges of G on (a, b)
    std::size_t survivors = 0;        // of those, still inside D at the end
    Count copies;                     // Z_H(G)
};

// Samples G from G^H_{n,m}, exposes G without its (a, b) block in 2z chunks, and starting from the
// complete D on (a, b) removes every pair that closes a copy of H. With cumulative set, round i uses
// the union of chunks 1..i; otherwise chunk i alone.
ExposureTrace multi_exposure_experiment(const PatternGraph & h, int n, std::int64_t m, int z, int a, int b,
        const SeedSpec & seed, bool cumulative = true);

// The D-update alone over given chunks: |D| before the first round and after each one. D starts
// complete on (a, b); `final_d` receives it at the end (rows in the lower part).
std::vector<std::size_t> exposure_rounds(const PatternGraph & h, int a, int b, std::span<const BlowupGraph> chunks,
        bool cumulative, BitMatrix * final_d = nullptr);

std::string trace_json(const ExposureTrace & trace);

} // namespace klr
