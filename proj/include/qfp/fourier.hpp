#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace qfp {

struct MarketParams; // market.hpp

struct Interval {
    double a = 0.0;
    double b = 1.0;

    double length() const { return b - a; }
    void validate() const;
};

// Truncated trigonometric series anchored at interval.a:
//   S(y) = A_0/2 + sum_{k=1..K} A_k cos(w_k (y-a)) + B_k sin(w_k (y-a)),
// with w_k = 2 pi k / period. The anchor window always spans one full period.
struct FourierSeries {
    int n_terms = 0;                 // K
    std::vector<double> a_coeffs;    // A_0 .. A_K
    std::vector<double> b_coeffs;    // B_1 .. B_K
    Interval interval;
    double period = 1.0;

    void validate() const;
};

double eval_series(const FourierSeries& series, double y);
double eval_series_derivative(const FourierSeries& series, double y);

// Term-wise derivative: A_k -> w_k B_k, B_k -> -w_k A_k, A_0 -> 0.
FourierSeries differentiate_series(const FourierSeries& series);

// Trigonometric coefficients of `evaluator` sampled on a uniform grid of
// `grid_points` over one period starting at interval.a. Exact for evaluators
// bandlimited to n_terms when grid_points >= 2 n_terms + 1. Throws if the
// grid is below that Nyquist count. When the top quarter of the sampled
// spectrum carries more than 1e-6 of the peak coefficient magnitude a
// warning is emitted once on stderr (disable with warn_aliasing = false).
FourierSeries extract_series(const std::function<double(double)>& evaluator,
                             const Interval& interval, double period, int n_terms,
                             int grid_points, bool warn_aliasing = true);

enum class PayoffVariant { PdfMethod, CdfMethod };

// Closed-form payoff-side coefficients for the European vanilla put in
// log-moneyness units, h(y) = K max(1 - e^y, 0).
//
// PdfMethod:  C_k, D_k  = (2/(b-a)) * int_a^b h(y) {cos,sin}(w_k (y-a)) dy.
// CdfMethod:  C_k^a, D_k^a = int_a^c h'(y) {cos,sin}(w_k (y-a_hat)) dy and the
//             [c,b] companions, anchored on the extended interval with period
//             2(b-a); c is the payoff-kink location clamped into [a,b].
struct PayoffCoeffs {
    PayoffVariant variant = PayoffVariant::PdfMethod;
    int n_terms = 0;
    Interval interval;          // data interval [a,b]
    double period = 1.0;        // kernel period (b-a or 2(b-a))
    double split_point = 0.0;   // c

    // pdf-method
    std::vector<double> c_coeffs, d_coeffs;
    // cdf-method
    std::vector<double> c_a, d_a, c_b, d_b;
    double h_at_a = 0.0, h_at_b = 0.0;
};

PayoffCoeffs payoff_coeffs_pdf(const MarketParams& market, const Interval& interval, int n_terms);
PayoffCoeffs payoff_coeffs_cdf(const MarketParams& market, const Interval& interval,
                               const Interval& extended, int n_terms);

// Extended window [(3a-b)/2, (3b-a)/2] used by the CDF-side series.
Interval extended_interval(const Interval& interval);

// V = (b-a)/2 * exp(-r dt) * (A_0 C_0 / 2 + sum A_k C_k + B_k D_k).
// Mismatched term counts are truncated to the shorter side with a one-line
// warning on stderr; interval/period mismatches throw.
double price_pdf(const FourierSeries& density_series, const PayoffCoeffs& payoff,
                 const MarketParams& market);

// V = exp(-r dt) * (h(b) F_b - h(a) F_a - sum_a - sum_b), each sum carrying
// its own A_0 C_0/2 term (the two half-interval integrals are independent).
double price_cdf(const FourierSeries& cdf_series, const PayoffCoeffs& payoff,
                 const MarketParams& market, double F_a, double F_b);

// Result of a pricing pipeline. total_shots and the per-coefficient counts
// are populated by the amplitude-estimation route only.
struct PriceResult {
    double price = 0.0;
    FourierSeries series;
    long long total_shots = 0;
    std::vector<long long> shots_per_coefficient;
};

// Flat text record: n_terms, a, b, period, A_0..A_K, B_1..B_K.
void write_series(std::ostream& os, const FourierSeries& series);
FourierSeries read_series(std::istream& is);

} // namespace qfp
