#include "qfp/fourier.hpp"

#include "qfp/market.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qfp {

namespace {

constexpr double kPi = std::numbers::pi;

// Antiderivative building blocks for the put payoff coefficients, all with
// kernel phase anchored at `anchor` and angular frequency w:
//   int e^y cos(w (y - anchor)) dy = e^y (cos + w sin) / (1 + w^2)
//   int e^y sin(w (y - anchor)) dy = e^y (sin - w cos) / (1 + w^2)
double int_exp_cos(double u, double v, double w, double anchor) {
    auto prim = [&](double y) {
        const double ph = w * (y - anchor);
        return std::exp(y) * (std::cos(ph) + w * std::sin(ph)) / (1.0 + w * w);
    };
    return prim(v) - prim(u);
}

double int_exp_sin(double u, double v, double w, double anchor) {
    auto prim = [&](double y) {
        const double ph = w * (y - anchor);
        return std::exp(y) * (std::sin(ph) - w * std::cos(ph)) / (1.0 + w * w);
    };
    return prim(v) - prim(u);
}

double int_cos(double u, double v, double w, double anchor) {
    if (w == 0.0) return v - u;
    return (std::sin(w * (v - anchor)) - std::sin(w * (u - anchor))) / w;
}

double int_sin(double u, double v, double w, double anchor) {
    if (w == 0.0) return 0.0;
    return (std::cos(w * (u - anchor)) - std::cos(w * (v - anchor))) / w;
}

void check_pairing(const FourierSeries& series, const PayoffCoeffs& payoff) {
    const double rel = std::max(1.0, std::abs(series.period));
    if (std::abs(series.period - payoff.period) > 1e-9 * rel) {
        throw std::invalid_argument("price: series/payoff period mismatch");
    }
    if (std::abs(series.interval.a - (payoff.variant == PayoffVariant::PdfMethod
                                          ? payoff.interval.a
                                          : extended_interval(payoff.interval).a)) > 1e-9 * rel) {
        throw std::invalid_argument("price: series/payoff anchor mismatch");
    }
}

int paired_terms(const FourierSeries& series, const PayoffCoeffs& payoff) {
    if (series.n_terms != payoff.n_terms) {
        std::cerr << "[qfp] warning: pairing series with " << series.n_terms
                  << " terms against payoff with " << payoff.n_terms
                  << "; truncating to the smaller count\n";
    }
    return std::min(series.n_terms, payoff.n_terms);
}

} // namespace

void Interval::validate() const {
    if (!(a < b)) throw std::invalid_argument("Interval: requires a < b");
    if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("Interval: non-finite bound");
}

void FourierSeries::validate() const {
    interval.validate();
    if (n_terms < 0) throw std::invalid_argument("FourierSeries: negative n_terms");
    if (a_coeffs.size() != static_cast<std::size_t>(n_terms) + 1 ||
        b_coeffs.size() != static_cast<std::size_t>(n_terms)) {
        throw std::invalid_argument("FourierSeries: coefficient array length mismatch");
    }
    if (!(period > 0.0)) throw std::invalid_argument("FourierSeries: period must be positive");
}

double eval_series(const FourierSeries& series, double y) {
    const double w1 = 2.0 * kPi / series.period;
    const double ph = w1 * (y - series.interval.a);
    double acc = 0.5 * series.a_coeffs[0];
    for (int k = 1; k <= series.n_terms; ++k) {
        acc += series.a_coeffs[k] * std::cos(k * ph) + series.b_coeffs[k - 1] * std::sin(k * ph);
    }
    return acc;
}

double eval_series_derivative(const FourierSeries& series, double y) {
    const double w1 = 2.0 * kPi / series.period;
    const double ph = w1 * (y - series.interval.a);
    double acc = 0.0;
    for (int k = 1; k <= series.n_terms; ++k) {
        const double wk = k * w1;
        acc += -series.a_coeffs[k] * wk * std::sin(k * ph) + series.b_coeffs[k - 1] * wk * std::cos(k * ph);
    }
    return acc;
}

FourierSeries differentiate_series(const FourierSeries& series) {
    FourierSeries out = series;
    out.a_coeffs[0] = 0.0;
    const double w1 = 2.0 * kPi / series.period;
    for (int k = 1; k <= series.n_terms; ++k) {
        const double wk = k * w1;
        out.a_coeffs[k] = wk * series.b_coeffs[k - 1];
        out.b_coeffs[k - 1] = -wk * series.a_coeffs[k];
    }
    return out;
}

FourierSeries extract_series(const std::function<double(double)>& evaluator,
                             const Interval& interval, double period, int n_terms,
                             int grid_points, bool warn_aliasing) {
    interval.validate();
    if (!(period > 0.0)) throw std::invalid_argument("extract_series: period must be positive");
    if (n_terms < 0) throw std::invalid_argument("extract_series: negative n_terms");
    if (grid_points < 2 * n_terms + 1) {
        throw std::invalid_argument("extract_series: grid_points below Nyquist count 2K+1");
    }

    const int n = grid_points;
    std::vector<double> f(n);
    for (int j = 0; j < n; ++j) {
        f[j] = evaluator(interval.a + period * j / n);
    }

    // Direct real DFT; k up to floor(n/2) so the aliasing diagnostic can see
    // above the requested band.
    const int k_max = n / 2;
    std::vector<double> ac(k_max + 1, 0.0), bc(k_max + 1, 0.0);
    for (int k = 0; k <= k_max; ++k) {
        double ca = 0.0, sa = 0.0;
        const double step = 2.0 * kPi * k / n;
        for (int j = 0; j < n; ++j) {
            ca += f[j] * std::cos(step * j);
            sa += f[j] * std::sin(step * j);
        }
        ac[k] = 2.0 * ca / n;
        bc[k] = 2.0 * sa / n;
    }

    if (warn_aliasing && k_max > n_terms) {
        double peak = 0.0, tail = 0.0;
        for (int k = 0; k <= k_max; ++k) {
            peak = std::max(peak, std::hypot(ac[k], bc[k]));
        }
        for (int k = k_max - (k_max - n_terms) / 4; k <= k_max; ++k) {
            tail = std::max(tail, std::hypot(ac[k], bc[k]));
        }
        if (tail > 1e-6 * std::max(peak, 1e-300)) {
            std::cerr << "[qfp] warning: extract_series top-quarter spectrum carries "
                      << tail / peak << " of the peak; evaluator may not be bandlimited to K="
                      << n_terms << "\n";
        }
    }

    FourierSeries s;
    s.n_terms = n_terms;
    s.interval = interval;
    s.period = period;
    s.a_coeffs.assign(n_terms + 1, 0.0);
    s.b_coeffs.assign(n_terms, 0.0);
    for (int k = 0; k <= n_terms; ++k) s.a_coeffs[k] = ac[k];
    for (int k = 1; k <= n_terms; ++k) s.b_coeffs[k - 1] = bc[k];
    return s;
}

Interval extended_interval(const Interval& interval) {
    interval.validate();
    return Interval{(3.0 * interval.a - interval.b) / 2.0, (3.0 * interval.b - interval.a) / 2.0};
}

PayoffCoeffs payoff_coeffs_pdf(const MarketParams& market, const Interval& interval, int n_terms) {
    interval.validate();
    if (n_terms < 0) throw std::invalid_argument("payoff_coeffs_pdf: negative n_terms");
    const double a = interval.a, b = interval.b;
    const double K = market.strike;
    const double c = std::clamp(0.0, a, b); // put kink in log-moneyness
    const double P = b - a;

    PayoffCoeffs pc;
    pc.variant = PayoffVariant::PdfMethod;
    pc.n_terms = n_terms;
    pc.interval = interval;
    pc.period = P;
    pc.split_point = c;
    pc.h_at_a = K * std::max(1.0 - std::exp(a), 0.0);
    pc.h_at_b = K * std::max(1.0 - std::exp(b), 0.0);
    pc.c_coeffs.assign(n_terms + 1, 0.0);
    pc.d_coeffs.assign(n_terms, 0.0);

    // h(y) = K (1 - e^y) on [a, c], zero above the kink.
    for (int k = 0; k <= n_terms; ++k) {
        const double w = 2.0 * kPi * k / P;
        pc.c_coeffs[k] = (2.0 * K / P) * (int_cos(a, c, w, a) - int_exp_cos(a, c, w, a));
        if (k >= 1) {
            pc.d_coeffs[k - 1] = (2.0 * K / P) * (int_sin(a, c, w, a) - int_exp_sin(a, c, w, a));
        }
    }
    return pc;
}

PayoffCoeffs payoff_coeffs_cdf(const MarketParams& market, const Interval& interval,
                               const Interval& extended, int n_terms) {
    interval.validate();
    extended.validate();
    const Interval expect = extended_interval(interval);
    if (std::abs(extended.a - expect.a) > 1e-9 || std::abs(extended.b - expect.b) > 1e-9) {
        throw std::invalid_argument("payoff_coeffs_cdf: extended interval must be [(3a-b)/2,(3b-a)/2]");
    }
    const double a = interval.a, b = interval.b;
    const double K = market.strike;
    const double c = std::clamp(0.0, a, b);
    if (c < a || c > b) throw std::invalid_argument("payoff_coeffs_cdf: split point outside interval");
    const double P = extended.b - extended.a; // 2(b-a)
    const double anchor = extended.a;

    PayoffCoeffs pc;
    pc.variant = PayoffVariant::CdfMethod;
    pc.n_terms = n_terms;
    pc.interval = interval;
    pc.period = P;
    pc.split_point = c;
    pc.h_at_a = K * std::max(1.0 - std::exp(a), 0.0);
    pc.h_at_b = K * std::max(1.0 - std::exp(b), 0.0);
    pc.c_a.assign(n_terms + 1, 0.0);
    pc.d_a.assign(n_terms, 0.0);
    pc.c_b.assign(n_terms + 1, 0.0);
    pc.d_b.assign(n_terms, 0.0);

    // h'(y) = -K e^y below the kink, 0 above; the [c,b] block vanishes for
    // the put but is kept for formula generality.
    for (int k = 0; k <= n_terms; ++k) {
        const double w = 2.0 * kPi * k / P;
        pc.c_a[k] = -K * int_exp_cos(a, c, w, anchor);
        if (k >= 1) pc.d_a[k - 1] = -K * int_exp_sin(a, c, w, anchor);
    }
    return pc;
}

double price_pdf(const FourierSeries& density_series, const PayoffCoeffs& payoff,
                 const MarketParams& market) {
    density_series.validate();
    if (payoff.variant != PayoffVariant::PdfMethod) {
        throw std::invalid_argument("price_pdf: payoff variant must be pdf-method");
    }
    check_pairing(density_series, payoff);
    const int K = paired_terms(density_series, payoff);
    double acc = 0.5 * density_series.a_coeffs[0] * payoff.c_coeffs[0];
    for (int k = 1; k <= K; ++k) {
        acc += density_series.a_coeffs[k] * payoff.c_coeffs[k] +
               density_series.b_coeffs[k - 1] * payoff.d_coeffs[k - 1];
    }
    const double dt = market.maturity - market.t0;
    return 0.5 * (payoff.interval.b - payoff.interval.a) * std::exp(-market.rate * dt) * acc;
}

double price_cdf(const FourierSeries& cdf_series, const PayoffCoeffs& payoff,
                 const MarketParams& market, double F_a, double F_b) {
    cdf_series.validate();
    if (payoff.variant != PayoffVariant::CdfMethod) {
        throw std::invalid_argument("price_cdf: payoff variant must be cdf-method");
    }
    check_pairing(cdf_series, payoff);
    const int K = paired_terms(cdf_series, payoff);
    // Each half-interval sum carries its own A_0 C_0 / 2 term: C_0^a and
    // C_0^b are integrals over disjoint ranges, not a shared constant.
    double sum_a = 0.5 * cdf_series.a_coeffs[0] * payoff.c_a[0];
    double sum_b = 0.5 * cdf_series.a_coeffs[0] * payoff.c_b[0];
    for (int k = 1; k <= K; ++k) {
        sum_a += cdf_series.a_coeffs[k] * payoff.c_a[k] + cdf_series.b_coeffs[k - 1] * payoff.d_a[k - 1];
        sum_b += cdf_series.a_coeffs[k] * payoff.c_b[k] + cdf_series.b_coeffs[k - 1] * payoff.d_b[k - 1];
    }
    const double dt = market.maturity - market.t0;
    return std::exp(-market.rate * dt) *
           (payoff.h_at_b * F_b - payoff.h_at_a * F_a - sum_a - sum_b);
}

void write_series(std::ostream& os, const FourierSeries& series) {
    series.validate();
    os.precision(17);
    os << series.n_terms << ' ' << series.interval.a << ' ' << series.interval.b << ' '
       << series.period;
    for (int k = 0; k <= series.n_terms; ++k) os << ' ' << series.a_coeffs[k];
    for (int k = 1; k <= series.n_terms; ++k) os << ' ' << series.b_coeffs[k - 1];
    os << '\n';
}

FourierSeries read_series(std::istream& is) {
    FourierSeries s;
    if (!(is >> s.n_terms >> s.interval.a >> s.interval.b >> s.period)) {
        throw std::runtime_error("read_series: malformed header");
    }
    if (s.n_terms < 0) throw std::runtime_error("read_series: negative n_terms");
    s.a_coeffs.assign(s.n_terms + 1, 0.0);
    s.b_coeffs.assign(s.n_terms, 0.0);
    for (int k = 0; k <= s.n_terms; ++k) {
        if (!(is >> s.a_coeffs[k])) throw std::runtime_error("read_series: truncated A block");
    }
    for (int k = 1; k <= s.n_terms; ++k) {
        if (!(is >> s.b_coeffs[k - 1])) throw std::runtime_error("read_series: truncated B block");
    }
    s.validate();
    return s;
}

} // namespace qfp
