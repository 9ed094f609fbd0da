#include "klr/regularity.hpp"

#include "klr/logmath.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace klr {

DeltaSchedule DeltaSchedule::extremal(double lambda, double beta)
{
    if (! (lambda > 0 && lambda <= 1))
        throw std::invalid_argument("delta_schedule: lambda must lie in (0, 1]");
    if (! (beta > 0 && beta < 1))
        throw std::invalid_argument("delta_schedule: beta must lie in (0, 1)");
    DeltaSchedule d;
    d.lambda_ = lambda;
    d.beta_ = beta;
    return d;
}

DeltaSchedule DeltaSchedule::constant(double c)
{
    if (! (c > 0 && c <= 1))
        throw std::invalid_argument("constant schedule must lie in (0, 1]");
    DeltaSchedule d;
    d.lambda_ = c;
    d.constant_ = true;
    return d;
}

double DeltaSchedule::log_at(double x) const
{
    if (! (x > 0 && x <= 1))
        throw std::invalid_argument("delta schedule evaluated outside (0, 1]");
    if (constant_)
        return std::log(lambda_);
    return std::log(lambda_ / (4 * std::exp(1.0))) + std::log(beta_ / 2) / (lambda_ * x * x);
}

DeltaSchedule delta_schedule(double lambda, double beta)
{
    return DeltaSchedule::extremal(lambda, beta);
}

void RegularityParams::validate() const
{
    if (! (eps > 0 && eps <= 1))
        throw std::invalid_argument("eps must lie in (0, 1]");
    if (! delta && ! (lambda > 0 && lambda <= 1))
        throw std::invalid_argument("lambda must lie in (0, 1]");
}

bool RegularityParams::violates(std::size_t edges_ab, int a, int b, std::size_t block_edges, int n) const
{
    // cross-multiplied so that dyadic thresholds compare exactly
    const double lhs = static_cast<double>(edges_ab) * n * n;
    const double area = static_cast<double>(block_edges) * a * b;
    if (! delta)
        return lhs < lambda * area;
    const double alpha = static_cast<double>(std::min(a, b)) / n;
    return ! (lhs > (*delta)(alpha) * area);
}

std::string to_string(RegularityStatus s)
{
    switch (s) {
        case RegularityStatus::certified_regular: return "certified-regular";
        case RegularityStatus::irregular: return "irregular";
        case RegularityStatus::unknown: return "unknown";
    }
    return "?";
}

std::string to_string(RegularityMode m)
{
    switch (m) {
        case RegularityMode::exact: return "exact";
        case RegularityMode::heuristic: return "heuristic";
        case RegularityMode::spectral: return "spectral";
    }
    return "?";
}

RegularityMode parse_mode(const std::string & s)
{
    if (s == "exact")
        return RegularityMode::exact;
    if (s == "heuristic")
        return RegularityMode::heuristic;
    if (s == "spectral")
        return RegularityMode::spectral;
    throw std::invalid_argument("unknown regularity mode '" + s + "' (expected exact, heuristic or spectral)");
}

namespace
{
    void check_square(const BitMatrix & block)
    {
        if (block.rows() != block.cols() || block.rows() < 1)
            throw std::invalid_argument("regularity checks need a nonempty square block");
    }

    // Sizes s for which s x s pairs must be examined. Shrinking the larger side of a violating pair to
    // the smaller one keeps alpha and never raises the density; in the constant form shrinking both
    // sides to a0 is enough.
    std::vector<int> critical_sizes(const RegularityParams & params, int n)
    {
        const int a0 = std::max(1, min_subset_size(params.eps, n));
        std::vector<int> sizes;
        if (a0 > n)
            return sizes;
        if (! params.delta || params.delta->is_constant())
            sizes.push_back(a0);
        else
            for (int s = a0 ; s <= n ; ++s)
                sizes.push_back(s);
        return sizes;
    }

    // The s columns of least degree into `rows` (ties to the lower index) and their edge total.
    std::pair<Bits, std::size_t> lightest_columns(const BitMatrix & transposed, const Bits & rows, int s)
    {
        const int n = transposed.rows();
        std::vector<std::pair<std::size_t, int>> deg(n);
        for (int c = 0 ; c < n ; ++c)
            deg[c] = {and_count(transposed.row(c), rows), c};
        std::partial_sort(deg.begin(), deg.begin() + s, deg.end());
        Bits cols(n);
        std::size_t total = 0;
        for (int t = 0 ; t < s ; ++t) {
            cols.set(deg[t].second);
            total += deg[t].first;
        }
        return {cols, total};
    }

    std::size_t edges_between(const BitMatrix & block, const Bits & rows, const Bits & cols)
    {
        std::size_t e = 0;
        for (auto r = rows.find_first() ; r != Bits::npos ; r = rows.find_next(r))
            e += and_count(block.row(static_cast<int>(r)), cols);
        return e;
    }

    Witness make_witness(const BitMatrix & block, Bits rows, Bits cols)
    {
        auto e = edges_between(block, rows, cols);
        double d = static_cast<double>(e) / (static_cast<double>(rows.count()) * static_cast<double>(cols.count()));
        return {std::move(rows), std::move(cols), d};
    }

    std::uint64_t binomial_capped(int n, int k, std::uint64_t cap)
    {
        if (k < 0 || k > n)
            return 0;
        k = std::min(k, n - k);
        unsigned __int128 r = 1;
        for (int i = 1 ; i <= k ; ++i) {
            r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
            if (r > cap)
                return cap + 1;
        }
        return static_cast<std::uint64_t>(r);
    }
}

RegularityVerdict check_exact(const BitMatrix & block, const RegularityParams & params, ExactOptions options)
{
    check_square(block);
    params.validate();
    const int n = block.rows();
    const auto sizes = critical_sizes(params, n);

    std::uint64_t work = 0;
    for (int s : sizes) {
        work += binomial_capped(n, s, options.enumeration_cap);
        if (work > options.enumeration_cap)
            throw std::length_error("check_exact: enumeration exceeds the configured cap; use heuristic or spectral mode");
    }

    RegularityVerdict verdict;
    verdict.mode = RegularityMode::exact;
    verdict.status = RegularityStatus::certified_regular;

    const std::size_t total = block.count();
    const BitMatrix transposed = block.transposed();
    for (int s : sizes) {
        std::vector<int> idx(s);
        std::iota(idx.begin(), idx.end(), 0);
        Bits rows(n);
        for (;;) {
            rows.reset();
            for (int i : idx)
                rows.set(i);
            auto [cols, e] = lightest_columns(transposed, rows, s);
            if (params.violates(e, s, s, total, n)) {
                verdict.status = RegularityStatus::irregular;
                verdict.witness = make_witness(block, rows, cols);
                return verdict;
            }

            int pos = s - 1;
            while (pos >= 0 && idx[pos] == n - s + pos)
                --pos;
            if (pos < 0)
                break;
            ++idx[pos];
            for (int t = pos + 1 ; t < s ; ++t)
                idx[t] = idx[t - 1] + 1;
        }
    }
    return verdict;
}

RegularityVerdict check_heuristic(const BitMatrix & block, const RegularityParams & params, int restarts, const SeedSpec & seed)
{
    check_square(block);
    params.validate();
    const int n = block.rows();
    const std::size_t total = block.count();
    const BitMatrix transposed = block.transposed();

    RegularityVerdict verdict;
    verdict.mode = RegularityMode::heuristic;
    verdict.status = RegularityStatus::unknown;

    for (int s : critical_sizes(params, n)) {
        for (int r = 0 ; r < std::max(1, restarts) ; ++r) {
            Bits rows(n);
            if (r == 0) {
                // Rows of smallest total degree.
                std::vector<std::pair<std::size_t, int>> deg(n);
                for (int u = 0 ; u < n ; ++u)
                    deg[u] = {block.row(u).count(), u};
                std::partial_sort(deg.begin(), deg.begin() + s, deg.end());
                for (int t = 0 ; t < s ; ++t)
                    rows.set(deg[t].second);
            }
            else {
                auto rng = seed.child("restart:" + std::to_string(s) + ":" + std::to_string(r)).stream();
                std::vector<int> perm(n);
                std::iota(perm.begin(), perm.end(), 0);
                for (int t = 0 ; t < s ; ++t)
                    std::swap(perm[t], perm[t + rng.below(n - t)]);
                for (int t = 0 ; t < s ; ++t)
                    rows.set(perm[t]);
            }

            std::size_t best = static_cast<std::size_t>(-1);
            for (int step = 0 ; step < 4 * n + 4 ; ++step) {
                auto cols = lightest_columns(transposed, rows, s).first;
                auto [next_rows, e] = lightest_columns(block, cols, s);
                if (params.violates(e, s, s, total, n)) {
                    Witness w = make_witness(block, next_rows, cols);
                    if (witness_violates(block, w, params)) {
                        verdict.status = RegularityStatus::irregular;
                        verdict.witness = std::move(w);
                        return verdict;
                    }
                }
                if (e >= best)
                    break;
                best = e;
                rows = std::move(next_rows);
            }
        }
    }
    return verdict;
}

NormBound centred_norm_bound(const BitMatrix & block)
{
    const int rows = block.rows(), cols = block.cols();
    const double d = static_cast<double>(block.count()) / (static_cast<double>(rows) * cols);
    Eigen::MatrixXd centred(rows, cols);
    for (int r = 0 ; r < rows ; ++r)
        for (int c = 0 ; c < cols ; ++c)
            centred(r, c) = (block.test(r, c) ? 1.0 : 0.0) - d;

    const double frobenius = centred.norm();
    if (frobenius == 0)
        return {0, 0};

    const Eigen::MatrixXd gram = centred.transpose() * centred;

    // lambda_max(S)^(2^q) <= tr(S^(2^q)) for positive semidefinite S; powers are rescaled on the way
    // to stay in range.
    constexpr int squarings = 6;
    Eigen::MatrixXd power = gram;
    double log_scale = 0;
    double c = power.trace();
    power /= c;
    log_scale = std::log(c);
    for (int q = 0 ; q < squarings ; ++q) {
        power = (power * power).eval();
        c = power.trace();
        power /= c;
        log_scale = 2 * log_scale + std::log(c);
    }
    const double log_lambda_max = log_scale / static_cast<double>(1 << squarings);
    double upper = std::exp(0.5 * log_lambda_max);
    // Floating-point slack, far above the accumulated rounding of a few dozen products.
    upper = std::min(upper * (1 + 1e-6), frobenius * (1 + 1e-12)) + 1e-12;

    Eigen::VectorXd x = Eigen::VectorXd::Ones(cols);
    for (int i = 0 ; i < cols ; ++i)
        x(i) += 1e-3 * (i % 7);
    x.normalize();
    double rayleigh = 0;
    for (int it = 0 ; it < 1000 ; ++it) {
        Eigen::VectorXd y = gram * x;
        double next = x.dot(y);
        double norm = y.norm();
        if (norm == 0)
            break;
        x = y / norm;
        if (std::abs(next - rayleigh) <= 1e-9 * std::max(1.0, next)) {
            rayleigh = next;
            break;
        }
        rayleigh = next;
    }
    return {upper, std::sqrt(std::max(0.0, rayleigh))};
}

RegularityVerdict check_spectral(const BitMatrix & block, const RegularityParams & params)
{
    check_square(block);
    params.validate();
    const int n = block.rows();

    RegularityVerdict verdict;
    verdict.mode = RegularityMode::spectral;
    verdict.status = RegularityStatus::unknown;

    const std::size_t total = block.count();
    if (total == 0)
        return verdict;
    const double d = static_cast<double>(total) / (static_cast<double>(n) * n);

    auto bound = centred_norm_bound(block);
    verdict.norm_bound = bound.upper;
    verdict.norm_estimate = bound.estimate;

    const int a0 = std::max(1, min_subset_size(params.eps, n));
    if (a0 > n) {
        verdict.status = RegularityStatus::certified_regular;
        return verdict;
    }

    bool ok = true;
    if (! params.delta)
        ok = bound.upper <= (1 - params.lambda) * d * a0;
    else
        for (int t = a0 ; t <= n && ok ; ++t)
            ok = bound.upper < (1 - (*params.delta)(static_cast<double>(t) / n)) * d * t;
    if (ok)
        verdict.status = RegularityStatus::certified_regular;
    return verdict;
}

bool witness_violates(const BitMatrix & block, const Witness & w, const RegularityParams & params)
{
    const int n = block.rows();
    const int a0 = std::max(1, min_subset_size(params.eps, n));
    const int a = static_cast<int>(w.rows.count()), b = static_cast<int>(w.cols.count());
    if (a < a0 || b < a0)
        return false;
    std::size_t e = 0;
    for (int r = 0 ; r < n ; ++r)
        if (w.rows.test(r))
            for (int c = 0 ; c < n ; ++c)
                if (w.cols.test(c) && block.test(r, c))
                    ++e;
    return params.violates(e, a, b, block.count(), n);
}

BlowupVerdict check_blowup(const BlowupGraph & g, const RegularityParams & params, const CheckOptions & options)
{
    BlowupVerdict out;
    out.all_certified = true;
    bool counts_match = true;
    for (auto & e : g.pattern().edges()) {
        auto key = PairKey{e.u, e.v};
        // A missing pattern block is the empty block.
        BitMatrix empty;
        const BitMatrix * blk = g.block(e.u, e.v);
        if (! blk) {
            empty = BitMatrix(g.n(), g.n(), false);
            blk = &empty;
        }
        RegularityVerdict v;
        if (options.mode == RegularityMode::exact)
            v = check_exact(*blk, params, options.exact);
        else if (options.mode == RegularityMode::heuristic)
            v = check_heuristic(*blk, params, options.restarts, options.seed.child("pair:" + key.to_string()));
        else
            v = check_spectral(*blk, params);

        if (v.status != RegularityStatus::certified_regular)
            out.all_certified = false;
        if (v.status == RegularityStatus::irregular)
            out.any_irregular = true;
        if (options.target_m && g.block_edge_count(e.u, e.v) != static_cast<std::size_t>(*options.target_m))
            counts_match = false;
        out.pairs.emplace(key, std::move(v));
    }
    if (options.target_m)
        out.in_family = out.all_certified && counts_match;
    return out;
}

} // namespace klr
