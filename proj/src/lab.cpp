#include "klr/lab.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace klr {

using ojson = nlohmann::ordered_json;

namespace
{
    void require_positive(double x, const char * name)
    {
        if (! (x > 0) || ! std::isfinite(x))
            throw std::invalid_argument(std::string("derive_constants: ") + name + " must be positive");
    }

    void require_unit_open(double x, const char * name)
    {
        if (! (x > 0 && x < 1))
            throw std::invalid_argument(std::string("derive_constants: ") + name + " must lie in (0, 1)");
    }

    bool is_subgraph(const PatternGraph & small, const PatternGraph & big)
    {
        if (small.k() != big.k())
            return false;
        for (auto & e : small.edges())
            if (! big.has_edge(e.u, e.v))
                return false;
        return true;
    }
}

ConstantLedger derive_constants(const PatternGraph & h, const PatternGraph & h_prime, const ConstantInputs & in)
{
    if (! is_subgraph(h_prime, h))
        throw std::invalid_argument("derive_constants: H' must be a spanning subgraph of H");
    if (h_prime.edge_count() == 0)
        throw std::invalid_argument("derive_constants: H' needs at least one edge");
    require_unit_open(in.lambda, "lambda");
    require_unit_open(in.beta, "beta");
    require_unit_open(in.d, "d");
    require_unit_open(in.eps, "eps");
    require_positive(in.xi_pp, "xi''");
    require_positive(in.gamma_pp, "gamma''");
    require_positive(in.t, "T");
    if (in.n < 1 || in.m < 1)
        throw std::invalid_argument("derive_constants: n and m must be positive");

    ConstantLedger c;
    c.inputs = in;
    c.vertices = h.k();
    c.sub_edges = static_cast<int>(h_prime.edge_count());
    const int e = c.sub_edges;

    c.d0 = delta_schedule(in.lambda, in.beta)(1.0);
    c.d_eff = std::min(in.d, c.d0);
    c.beta1 = in.beta * std::pow(3.0, -e);
    c.beta2 = c.beta1 * c.beta1 * std::ldexp(1.0, -4 * e);
    c.xi_prime = std::min(in.xi_pp / 2, in.lambda * in.eps * in.eps / 4);
    const double zr = 4 * in.t / (in.gamma_pp * in.gamma_pp);
    c.z = static_cast<std::int64_t>(std::ceil(zr * (1 - 1e-15)));
    c.xi = c.xi_prime / (2.0 * static_cast<double>(c.z));
    c.gamma_prime = in.gamma_pp * in.lambda * in.eps * in.eps / 8;
    c.gamma = c.gamma_prime / std::pow(2.0 * static_cast<double>(c.z), e);
    c.m_prime = static_cast<double>(in.m) / (2.0 * static_cast<double>(c.z));

    const double ln_n = std::log(static_cast<double>(in.n));
    const double ln_p = std::log(c.m_prime) - 2 * ln_n;
    c.mu = LogScale{c.vertices * ln_n + e * ln_p};
    c.mu_e = LogScale{c.vertices * ln_n + (e - 1) * ln_p - 2 * ln_n};
    return c;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z)
{
    if (trials == 0)
        return {0, 1};
    if (successes > trials)
        throw std::invalid_argument("wilson_interval: more successes than trials");
    const double nt = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / nt;
    const double z2 = z * z;
    const double denom = 1 + z2 / nt;
    const double centre = (p + z2 / (2 * nt)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / nt + z2 / (4 * nt * nt)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

// ---------------------------------------------------------------------------------------------

std::int64_t resolve_m(const ExperimentConfig & cfg)
{
    const auto n2 = static_cast<std::int64_t>(cfg.n) * cfg.n;
    if (cfg.m) {
        if (*cfg.m < 0 || *cfg.m > n2)
            throw std::invalid_argument("config: m must lie in [0, n^2]");
        return *cfg.m;
    }
    if (! cfg.c)
        throw std::invalid_argument("config: one of 'm' or 'C' is required");
    if (! (*cfg.c > 0))
        throw std::invalid_argument("config: C must be positive");
    const double m2 = two_density(cfg.pattern).value.to_double();
    const double m = std::ceil(*cfg.c * std::pow(static_cast<double>(cfg.n), 2 - 1 / m2));
    return std::min<std::int64_t>(n2, static_cast<std::int64_t>(m));
}

std::string to_string(SampleClass c)
{
    switch (c) {
    case SampleClass::regular: return "regular";
    case SampleClass::irregular: return "irregular";
    default: return "unknown";
    }
}

unsigned worker_count(unsigned requested)
{
    unsigned w = requested;
    if (w == 0) {
        if (const char * env = std::getenv("KLR_LAB_THREADS")) {
            try {
                w = static_cast<unsigned>(std::stoul(env));
            }
            catch (const std::exception &) {
                throw std::invalid_argument(std::string("KLR_LAB_THREADS: not a number: ") + env);
            }
        }
        else
            w = std::max(1u, std::thread::hardware_concurrency());
    }
    return std::max(1u, w);
}

namespace
{
    void validate(const ExperimentConfig & cfg)
    {
        if (cfg.n < 1)
            throw std::invalid_argument("config: n must be positive");
        if (cfg.n > cfg.max_n)
            throw std::invalid_argument("config: n = " + std::to_string(cfg.n) + " exceeds the cap max_n = " + std::to_string(cfg.max_n));
        if (cfg.pattern.edge_count() == 0)
            throw std::invalid_argument("config: pattern needs at least one edge");
        if (! (cfg.gamma > 0))
            throw std::invalid_argument("config: gamma must be positive");
        RegularityParams{cfg.eps, cfg.lambda, std::nullopt}.validate();
    }

    SampleRecord run_sample(const ExperimentConfig & cfg, std::int64_t m, double threshold, std::size_t i)
    {
        const SeedSpec seed{cfg.seed, "sample:" + std::to_string(i)};
        const auto g = sample_gnm_h(cfg.pattern, cfg.n, m, seed);

        CheckOptions opt;
        opt.mode = cfg.mode;
        opt.exact.enumeration_cap = cfg.enumeration_cap;
        opt.restarts = cfg.restarts;
        opt.seed = seed.child("regularity");
        const auto verdict = check_blowup(g, RegularityParams{cfg.eps, cfg.lambda, std::nullopt}, opt);

        SampleRecord r;
        r.index = i;
        r.seed = seed.derived();
        r.cls = verdict.all_certified ? SampleClass::regular
              : verdict.any_irregular ? SampleClass::irregular
              : SampleClass::unknown;
        r.z = count_canonical(g, cfg.pattern);
        r.event = r.cls == SampleClass::regular && r.z.convert_to<long double>() <= static_cast<long double>(threshold);
        return r;
    }
}

EstimateReport summarize(std::vector<SampleRecord> records, std::int64_t m, double threshold)
{
    EstimateReport rep;
    rep.m = m;
    rep.threshold = threshold;
    rep.total = records.size();
    for (auto & r : records) {
        switch (r.cls) {
        case SampleClass::regular: ++rep.regular; break;
        case SampleClass::irregular: ++rep.irregular; break;
        default: ++rep.unknown; break;
        }
        if (r.event)
            ++rep.events;
    }
    rep.degenerate = rep.regular == 0;
    rep.point = rep.degenerate ? 0 : static_cast<double>(rep.events) / static_cast<double>(rep.regular);
    rep.wilson95 = wilson_interval(rep.events, rep.regular);
    rep.records = std::move(records);
    return rep;
}

EstimateReport estimate_hfree_probability(const ExperimentConfig & cfg)
{
    validate(cfg);
    const auto m = resolve_m(cfg);
    const double threshold = cfg.gamma * expected_copies(cfg.pattern, cfg.n, m, false).value();

    std::vector<SampleRecord> records(cfg.samples);
    const unsigned workers = cfg.deterministic ? 1u
        : static_cast<unsigned>(std::min<std::size_t>(worker_count(cfg.threads), std::max<std::size_t>(1, cfg.samples)));

    if (workers == 1) {
        for (std::size_t i = 0 ; i < cfg.samples ; ++i)
            records[i] = run_sample(cfg, m, threshold, i);
    }
    else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (unsigned w = 0 ; w < workers ; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i ; (i = next.fetch_add(1)) < cfg.samples ; )
                        records[i] = run_sample(cfg, m, threshold, i);
                }
                catch (...) {
                    errors[w] = std::current_exception();
                    next = cfg.samples;
                }
            });
        for (auto & t : pool)
            t.join();
        for (auto & e : errors)
            if (e)
                std::rethrow_exception(e);
    }
    return summarize(std::move(records), m, threshold);
}

std::string samples_csv(const EstimateReport & report)
{
    std::ostringstream out;
    out << "sample,seed,regular,zcount,event\n";
    for (auto & r : report.records)
        out << r.index << ',' << r.seed << ',' << to_string(r.cls) << ',' << r.z.str() << ',' << (r.event ? 1 : 0) << '\n';
    return out.str();
}

std::string report_json(const ExperimentConfig & cfg, const EstimateReport & report)
{
    ojson j;
    j["pattern"] = cfg.pattern.to_spec();
    j["n"] = cfg.n;
    j["m"] = report.m;
    j["eps"] = cfg.eps;
    j["lambda"] = cfg.lambda;
    j["gamma"] = cfg.gamma;
    j["mode"] = to_string(cfg.mode);
    j["threshold"] = report.threshold;
    j["total_samples"] = report.total;
    j["regular"] = report.regular;
    j["irregular"] = report.irregular;
    j["unknown"] = report.unknown;
    j["events"] = report.events;
    j["point_estimate"] = report.point;
    j["wilson95"] = {report.wilson95.lo, report.wilson95.hi};
    j["degenerate"] = report.degenerate;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------------------------

std::string to_string(AdvancingClause c)
{
    switch (c) {
    case AdvancingClause::a: return "A";
    case AdvancingClause::b: return "B";
    default: return "neither";
    }
}

AdvancingVerdict advancing_check(const BlowupGraph & dense, const BlowupGraph & ghat, const BlowupGraph & g,
        std::span<const HostEdge> removed, const ConstantLedger & ledger, const PatternGraph & h,
        const PatternGraph & h_prime, int a, int b)
{
    if (! h_prime.has_edge(a, b))
        throw std::invalid_argument("advancing_check: ab must be an edge of H'");
    if (! (dense.pattern() == h) || ! (ghat.pattern() == h) || ! (g.pattern() == h))
        throw std::invalid_argument("advancing_check: D, Ghat and G must live on the host of H");
    if (dense.n() != g.n() || ghat.n() != g.n())
        throw std::invalid_argument("advancing_check: D, Ghat and G must share n");
    if (static_cast<double>(removed.size()) > ledger.xi_prime * ledger.m_prime)
        throw std::invalid_argument("advancing_check: |X| = " + std::to_string(removed.size()) + " exceeds xi' m'");

    const auto rest = difference(g, removed);
    const auto grown = unite(ghat, rest);

    AdvancingVerdict v;
    v.copies = count_canonical(unite(dense, grown), h);
    v.copy_threshold = ledger.gamma_prime * ledger.mu.value();
    v.poor_before = poor_pairs(dense, ghat, h, a, b, ledger.inputs.gamma_pp, ledger.mu_e).count;
    v.poor_after = poor_pairs(dense, grown, h, a, b, ledger.inputs.gamma_pp, ledger.mu_e).count;
    const double n = static_cast<double>(g.n());
    v.required_drop = n * n / static_cast<double>(ledger.z);

    if (v.copies.convert_to<long double>() >= static_cast<long double>(v.copy_threshold))
        v.clause = AdvancingClause::a;
    else if (static_cast<double>(v.poor_after) < static_cast<double>(v.poor_before) - v.required_drop)
        v.clause = AdvancingClause::b;
    return v;
}

// ---------------------------------------------------------------------------------------------

ExposureTrace multi_exposure_experiment(const PatternGraph & h, int n, std::int64_t m, int z, int a, int b,
        const SeedSpec & seed, bool cumulative)
{
    if (z < 1)
        throw std::invalid_argument("multi_exposure_experiment: z must be at least 1");
    if (! h.has_edge(a, b))
        throw std::invalid_argument("multi_exposure_experiment: ab must be an edge of the pattern");

    ExposureTrace t;
    t.rounds = 2 * z;
    t.m_requested = m;
    t.m_used = m - m % t.rounds;

    const auto g = sample_gnm_h(h, n, t.m_used, seed.child("graph"));
    t.copies = count_canonical(g, h);
    const auto chunks = partition_exposure(minus_pair(g, a, b), t.rounds, seed.child("expose"));
    BitMatrix d;
    t.d_sizes = exposure_rounds(h, a, b, chunks, cumulative, &d);

    const int lo = std::min(a, b), hi = std::max(a, b);
    if (auto * star = g.block(lo, hi)) {
        t.g_star = star->count();
        BitMatrix left = *star;
        left &= d;
        t.survivors = left.count();
    }
    return t;
}

std::vector<std::size_t> exposure_rounds(const PatternGraph & h, int a, int b, std::span<const BlowupGraph> chunks,
        bool cumulative, BitMatrix * final_d)
{
    if (! h.has_edge(a, b))
        throw std::invalid_argument("exposure_rounds: ab must be an edge of the pattern");
    if (chunks.empty())
        throw std::invalid_argument("exposure_rounds: no chunks");
    const int n = chunks.front().n();
    const auto rest = h.without_edge(a, b);
    const int lo = std::min(a, b), hi = std::max(a, b);

    BitMatrix d(n, n, true);
    std::vector<std::size_t> sizes{d.count()};
    BlowupGraph acc(chunks.front().pattern(), n);
    for (auto & chunk : chunks) {
        if (chunk.n() != n)
            throw std::invalid_argument("exposure_rounds: chunks differ in n");
        // the (a, b) block of a chunk is never used
        acc = cumulative ? unite(acc, minus_pair(chunk, lo, hi)) : minus_pair(chunk, lo, hi);
        const auto dv = degree_vector(acc, rest, lo, hi);
        for (int u = 0 ; u < n ; ++u)
            for (int v = 0 ; v < n ; ++v)
                if (dv.at(u, v) != 0)
                    d.set(u, v, false);
        sizes.push_back(d.count());
    }
    if (final_d)
        *final_d = std::move(d);
    return sizes;
}

std::string trace_json(const ExposureTrace & trace)
{
    ojson j;
    j["m_requested"] = trace.m_requested;
    j["m_used"] = trace.m_used;
    j["rounds"] = trace.rounds;
    j["d_sizes"] = trace.d_sizes;
    j["g_star"] = trace.g_star;
    j["survivors"] = trace.survivors;
    j["copies"] = trace.copies.str();
    return j.dump(2) + "\n";
}

} // namespace klr
