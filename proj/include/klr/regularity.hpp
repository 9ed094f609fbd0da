#pragma once

#include "klr/blowup.hpp"
#include "klr/sampler.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace klr {

// Threshold function delta: (0, 1] -> (0, 1) for (eps, delta)-lower-regularity.
class DeltaSchedule
{
public:
    // delta_0(x) = (lambda / 4e) (beta / 2)^(1 / (lambda x^2)), the largest admissible schedule.
    static DeltaSchedule extremal(double lambda, double beta);
    // delta(x) = c for every x.
    static DeltaSchedule constant(double c);

    double operator()(double x) const { return std::exp(log_at(x)); }
    double log_at(double x) const;

    double lambda() const { return lambda_; }
    double beta() const { return beta_; }
    bool is_constant() const { return constant_; }

private:
    double lambda_ = 0;
    double beta_ = 0;
    bool constant_ = false;
};

DeltaSchedule delta_schedule(double lambda, double beta);

// Constant form (eps, lambda): d(A', B') >= lambda d(A, B).
// Function form (eps, delta): d(A', B') > delta(alpha) d(A, B), alpha = min(|A'|, |B'|) / n.
struct RegularityParams
{
    double eps = 0.25;
    double lambda = 0.5;
    std::optional<DeltaSchedule> delta;

    void validate() const;
    // Whether a pair of sizes (a, b) with e(A', B') edges violates the condition.
    bool violates(std::size_t edges_ab, int a, int b, std::size_t block_edges, int n) const;
};

enum class RegularityStatus { certified_regular, irregular, unknown };
enum class RegularityMode { exact, heuristic, spectral };

std::string to_string(RegularityStatus s);
std::string to_string(RegularityMode m);
RegularityMode parse_mode(const std::string & s);

struct Witness
{
    Bits rows;      // A' within the lower part
    Bits cols;      // B' within the upper part
    double density = 0;
};

struct RegularityVerdict
{
    RegularityStatus status = RegularityStatus::unknown;
    RegularityMode mode = RegularityMode::exact;
    std::optional<Witness> witness;
    // Spectral mode only: certified upper bound and power-iteration estimate of the centred norm.
    double norm_bound = 0;
    double norm_estimate = 0;
};

struct ExactOptions
{
    // Limit on the number of enumerated row subsets.
    std::uint64_t enumeration_cap = 100'000'000;
};

// Exact decision. Enumerates row sets A' of the critical sizes and pairs each with the |A'| columns of
// smallest degree into A', which is the minimum-density partner. Throws std::length_error above the cap.
RegularityVerdict check_exact(const BitMatrix & block, const RegularityParams & params, ExactOptions options = {});

// Alternating lowest-degree descent from several starts. Returns irregular (with a re-verified witness)
// or unknown, never certified_regular.
RegularityVerdict check_heuristic(const BitMatrix & block, const RegularityParams & params, int restarts, const SeedSpec & seed);

// Sound certificate from the centred matrix M - d J: e(A', B') >= d|A'||B'| - s sqrt(|A'||B'|) for any
// s >= ||M - d J||. Returns certified_regular or unknown, never irregular.
RegularityVerdict check_spectral(const BitMatrix & block, const RegularityParams & params);

// Certified upper bound on the operator norm of the centred block, and a power-iteration estimate.
struct NormBound
{
    double upper = 0;
    double estimate = 0;
};
NormBound centred_norm_bound(const BitMatrix & block);

// Recomputes a witness from scratch: true when it really violates the condition.
bool witness_violates(const BitMatrix & block, const Witness & w, const RegularityParams & params);

struct BlowupVerdict
{
    std::map<PairKey, RegularityVerdict> pairs;
    bool all_certified = false;
    bool any_irregular = false;
    // Membership in G(H, n, m, eps, lambda) when a target m is supplied.
    std::optional<bool> in_family;
};

struct CheckOptions
{
    RegularityMode mode = RegularityMode::exact;
    ExactOptions exact;
    int restarts = 8;
    SeedSpec seed{};
    std::optional<std::int64_t> target_m;
};

BlowupVerdict check_blowup(const BlowupGraph & g, const RegularityParams & params, const CheckOptions & options);

} // namespace klr
