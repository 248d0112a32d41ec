#pragma once

#include "qfp/fourier.hpp"
#include "qfp/market.hpp"

#include <cstdint>
#include <vector>

namespace qfp {

struct QaeConfig {
    double epsilon = 0.01;     // target half-width on the amplitude
    double gamma = 0.05;       // total failure probability
    int shots_per_round = 32;
    int max_rounds = 512;
    bool noiseless = false;    // bypass sampling, return the true value

    void validate() const;
};

struct QaeResult {
    double estimate = 0.0;   // signed, rescaled by the target normalization
    double half_width = 0.0; // certified, on the same scale
    long long total_shots = 0;
    int rounds = 0;
    bool converged = true;   // false when max_rounds ran out
};

struct CoeffTarget {
    int k = 0;
    bool sine = false;       // false: A_k (cosine), true: B_k
    double true_value = 0.0;
    double normalization = 1.0;
};

// Midpoint-rule discretization of the density coefficient integrals on a
// uniform n_points grid; normalization = max(1, 2/(b-a)) embeds every target
// in [-1,1].
std::vector<CoeffTarget> discretized_coeffs(const MarketParams& market, const Interval& interval,
                                            int n_terms, int n_points);

// Sign-aware iterative amplitude estimation, simulated at the statistics
// level. The signed value embeds through the shift alpha = (1 + a)/2 and
// each round draws Binomial(shots_per_round, sin^2((2m+1) theta)) at Grover
// power m. Chernoff-Hoeffding intervals are intersected across rounds and m
// grows geometrically whenever the scaled interval fits one monotone piece
// of sin^2. total_shots counts oracle applications, shots * (2m+1) per
// round, which is what the ~1/epsilon scaling refers to.
QaeResult mrqae_estimate(const CoeffTarget& target, const QaeConfig& config, std::uint64_t seed);

// Ledger record for one estimated coefficient.
struct ShotRecord {
    int k = 0;
    bool sine = false;
    double estimate = 0.0;
    long long shots = 0;
    int rounds = 0;
    bool converged = true;
};

// Estimates all 2K+1 coefficients, pairs them with the closed-form payoff
// coefficients and prices via the PDF-series formula.
PriceResult pipeline_method3(const MarketParams& market, int n_terms, const QaeConfig& config,
                             std::uint64_t seed, std::vector<ShotRecord>* ledger = nullptr,
                             int n_points = 1 << 14);

} // namespace qfp
