#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace klr {

// A positive magnitude carried by its natural logarithm. Zero is ln = -inf.
struct LogScale
{
    double ln = -std::numeric_limits<double>::infinity();

    static LogScale of(double value) { return {value > 0 ? std::log(value) : -std::numeric_limits<double>::infinity()}; }
    static LogScale zero() { return {}; }

    double value() const { return std::exp(ln); }
    bool is_zero() const { return std::isinf(ln) && ln < 0; }

    friend LogScale operator*(LogScale a, LogScale b) { return {a.ln + b.ln}; }
    friend LogScale operator/(LogScale a, LogScale b) { return {a.ln - b.ln}; }
    friend auto operator<=>(LogScale a, LogScale b) = default;
};

// ln C(n, k) through lgamma; -inf when k is outside [0, n].
inline double log_binomial(double n, double k)
{
    if (k < 0 || k > n)
        return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

// ln( n^v * (m / n^2)^e ), the expected canonical copy count of a pattern with v vertices and e edges
// in G^H_{n,m}.
inline LogScale log_copy_expectation(std::int64_t n, double m, int vertices, int edges)
{
    if (edges > 0 && m <= 0)
        return LogScale::zero();
    const double ln_n = std::log(static_cast<double>(n));
    const double ln_p = edges > 0 ? std::log(m) - 2 * ln_n : 0.0;
    return {vertices * ln_n + edges * ln_p};
}

// ceil(eps * n) guarded against representation error in eps (0.25 * 12 must give 3, not 4).
inline int min_subset_size(double eps, int n)
{
    const double x = eps * n;
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, x))
        return static_cast<int>(r);
    return static_cast<int>(std::ceil(x));
}

} // namespace klr
