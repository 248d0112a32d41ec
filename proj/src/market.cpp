#include "qfp/market.hpp"

#include "qfp/rng.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;

double integrate(const std::function<double(double)>& f, double lo, double hi) {
    double err = 0.0;
    double val = Quad::integrate(f, lo, hi, 15, 1e-12, &err);
    if (err > 1e-9) {
        throw std::runtime_error("quadrature failed to reach tolerance");
    }
    return val;
}

} // namespace

void MarketParams::validate() const {
    if (!(s0 > 0.0)) throw std::invalid_argument("MarketParams: s0 must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("MarketParams: sigma must be positive");
    if (!(strike > 0.0)) throw std::invalid_argument("MarketParams: strike must be positive");
    if (!(maturity > t0) || t0 < 0.0) throw std::invalid_argument("MarketParams: requires T > t0 >= 0");
}

double LogPriceLaw::stddev() const { return std::sqrt(variance); }

LogPriceLaw log_price_law(const MarketParams& market) {
    market.validate();
    LogPriceLaw law;
    const double dt = market.dt();
    law.mean = std::log(market.s0 / market.strike) + (market.rate - 0.5 * market.sigma * market.sigma) * dt;
    law.variance = market.sigma * market.sigma * dt;
    return law;
}

Interval truncation_interval(const MarketParams& market, double width_l) {
    if (width_l < 1.0) {
        throw std::invalid_argument("truncation_interval: width below L_min = 1");
    }
    const LogPriceLaw law = log_price_law(market);
    const double half = width_l * law.stddev();
    return Interval{law.mean - half, law.mean + half};
}

double pdf(const MarketParams& market, double y) {
    const LogPriceLaw law = log_price_law(market);
    return normal_pdf((y - law.mean) / law.stddev()) / law.stddev();
}

double cdf(const MarketParams& market, double y) {
    const LogPriceLaw law = log_price_law(market);
    return normal_cdf((y - law.mean) / law.stddev());
}

double pdf_derivative(const MarketParams& market, double y) {
    const LogPriceLaw law = log_price_law(market);
    const double z = (y - law.mean) / law.stddev();
    return -z * normal_pdf(z) / law.variance;
}

std::vector<double> sample(const MarketParams& market, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
    const LogPriceLaw law = log_price_law(market);
    CounterRng rng(seed);
    std::vector<double> out(count);
    const double sd = law.stddev();
    for (int i = 0; i < count; ++i) {
        out[i] = law.mean + sd * inverse_normal_cdf(rng.next_double());
    }
    return out;
}

double analytic_put_price(const MarketParams& market) {
    market.validate();
    const double dt = market.dt();
    const double sd = market.sigma * std::sqrt(dt);
    const double d1 = (std::log(market.s0 / market.strike) + (market.rate + 0.5 * market.sigma * market.sigma) * dt) / sd;
    const double d2 = d1 - sd;
    return market.strike * std::exp(-market.rate * dt) * normal_cdf(-d2) - market.s0 * normal_cdf(-d1);
}

double analytic_call_price(const MarketParams& market) {
    market.validate();
    const double dt = market.dt();
    const double sd = market.sigma * std::sqrt(dt);
    const double d1 = (std::log(market.s0 / market.strike) + (market.rate + 0.5 * market.sigma * market.sigma) * dt) / sd;
    const double d2 = d1 - sd;
    return market.s0 * normal_cdf(d1) - market.strike * std::exp(-market.rate * dt) * normal_cdf(d2);
}

FourierSeries exact_density_coeffs(const MarketParams& market, const Interval& interval,
                                   int n_terms) {
    interval.validate();
    if (n_terms < 0) throw std::invalid_argument("exact_density_coeffs: negative n_terms");
    const double a = interval.a, period = interval.length();

    FourierSeries s;
    s.n_terms = n_terms;
    s.interval = interval;
    s.period = period;
    s.a_coeffs.assign(n_terms + 1, 0.0);
    s.b_coeffs.assign(n_terms, 0.0);
    for (int k = 0; k <= n_terms; ++k) {
        const double w = 2.0 * kPi * k / period;
        s.a_coeffs[k] = 2.0 / period *
                        integrate([&](double y) { return pdf(market, y) * std::cos(w * (y - a)); },
                                  interval.a, interval.b);
        if (k >= 1) {
            s.b_coeffs[k - 1] = 2.0 / period *
                                integrate([&](double y) { return pdf(market, y) * std::sin(w * (y - a)); },
                                          interval.a, interval.b);
        }
    }
    return s;
}

FourierSeries exact_cdf_coeffs(const MarketParams& market, const Interval& extended,
                               int n_terms) {
    extended.validate();
    if (n_terms < 0) throw std::invalid_argument("exact_cdf_coeffs: negative n_terms");
    // Recover the data window [a,b]: the extended window is centered on it
    // with twice the length.
    const double center = 0.5 * (extended.a + extended.b);
    const double data_half = 0.25 * (extended.b - extended.a);
    const double a = center - data_half;
    const double b = center + data_half;
    const double period = extended.length();

    auto mirrored_cdf = [&](double y) {
        if (y < a) return cdf(market, 2.0 * a - y);
        if (y > b) return cdf(market, 2.0 * b - y);
        return cdf(market, y);
    };

    FourierSeries s;
    s.n_terms = n_terms;
    s.interval = extended;
    s.period = period;
    s.a_coeffs.assign(n_terms + 1, 0.0);
    s.b_coeffs.assign(n_terms, 0.0);
    for (int k = 0; k <= n_terms; ++k) {
        const double w = 2.0 * kPi * k / period;
        // split at the reflection joints so each piece is smooth
        auto piece = [&](double lo, double hi, bool sin_kernel) {
            return integrate(
                [&](double y) {
                    const double ph = w * (y - extended.a);
                    return mirrored_cdf(y) * (sin_kernel ? std::sin(ph) : std::cos(ph));
                },
                lo, hi);
        };
        s.a_coeffs[k] = 2.0 / period * (piece(extended.a, a, false) + piece(a, b, false) + piece(b, extended.b, false));
        if (k >= 1) {
            s.b_coeffs[k - 1] = 2.0 / period * (piece(extended.a, a, true) + piece(a, b, true) + piece(b, extended.b, true));
        }
    }
    return s;
}

} // namespace qfp
