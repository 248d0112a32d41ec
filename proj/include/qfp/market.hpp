#pragma once

#include "qfp/fourier.hpp"

#include <cstdint>
#include <vector>

namespace qfp {

// Black-Scholes contract and model inputs. Work happens in log-moneyness
// y = log(S/K), which is normal with the law below.
struct MarketParams {
    double s0 = 100.0;      // spot
    double rate = 0.1;      // risk-free rate, 1/year
    double sigma = 0.25;    // volatility, 1/sqrt(year)
    double maturity = 1.0;  // T, years
    double strike = 100.0;  // K
    double t0 = 0.0;        // valuation date, years

    void validate() const;
    double dt() const { return maturity - t0; }
};

struct LogPriceLaw {
    double mean = 0.0;      // log(S0/K) + (r - sigma^2/2) dt
    double variance = 1.0;  // sigma^2 dt

    double stddev() const;
};

LogPriceLaw log_price_law(const MarketParams& market);

// [mean - L sigma sqrt(dt), mean + L sigma sqrt(dt)]. Throws for L < 1.
Interval truncation_interval(const MarketParams& market, double width_l = 10.0);

double pdf(const MarketParams& market, double y);
double cdf(const MarketParams& market, double y);
double pdf_derivative(const MarketParams& market, double y);

// i.i.d. draws from the log-price law by inverse-CDF transform; reproducible
// per seed.
std::vector<double> sample(const MarketParams& market, int count, std::uint64_t seed);

double analytic_put_price(const MarketParams& market);
double analytic_call_price(const MarketParams& market);

// Ground-truth series references, computed by adaptive Gauss-Kronrod
// quadrature to 1e-12 absolute tolerance.
//
// exact_cdf_coeffs expands the mirror extension of the CDF: F(y) on [a,b],
// reflected about the endpoints onto the outer half-windows. The reflection
// closes the period smoothly (both the value and every derivative match at
// the wrap point), which is what a converged model with freedom outside the
// data window realizes; the raw truncated CDF would keep an O(1) jump at the
// wrap and its series would converge too slowly to price against.
FourierSeries exact_density_coeffs(const MarketParams& market, const Interval& interval,
                                   int n_terms);
FourierSeries exact_cdf_coeffs(const MarketParams& market, const Interval& extended,
                               int n_terms);

} // namespace qfp
