#include "qfp/qamc.hpp"

#include "qfp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

// Largest Grover power m' with 2m'+1 <= cap*(2m+1)+1 whose scaled interval
// [K' lo, K' hi] stays inside one monotone half-period of sin^2.
int find_next_power(int m_cur, double th_lo, double th_hi, int cap_factor) {
    const long long k_cur = 2LL * m_cur + 1;
    const double width = th_hi - th_lo;
    if (width <= 1e-18) return m_cur;
    const double fit = kHalfPi / width;
    long long k_hi = cap_factor * k_cur + 1;
    if (fit < static_cast<double>(k_hi)) k_hi = static_cast<long long>(fit);
    if (k_hi % 2 == 0) k_hi -= 1;
    for (long long k = k_hi; k > k_cur; k -= 2) {
        const auto jl = static_cast<long long>(std::floor(k * th_lo / kHalfPi));
        const auto jh = static_cast<long long>(std::floor(k * th_hi / kHalfPi - 1e-15));
        if (jl == jh) return static_cast<int>((k - 1) / 2);
    }
    return m_cur;
}

int draw_binomial(CounterRng& rng, int n, double p) {
    int x = 0;
    for (int i = 0; i < n; ++i) x += rng.next_bernoulli(p) ? 1 : 0;
    return x;
}

} // namespace

void QaeConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("QaeConfig: epsilon in (0,1)");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("QaeConfig: gamma in (0,1)");
    if (shots_per_round < 1) throw std::invalid_argument("QaeConfig: shots_per_round >= 1");
    if (max_rounds < 1) throw std::invalid_argument("QaeConfig: max_rounds >= 1");
}

std::vector<CoeffTarget> discretized_coeffs(const MarketParams& market, const Interval& interval,
                                            int n_terms, int n_points) {
    interval.validate();
    if (n_points < 2 * n_terms + 1) {
        throw std::invalid_argument("discretized_coeffs: n_points below 2K+1");
    }
    const double a = interval.a;
    const double span = interval.length();
    const double dx = span / n_points;
    const double norm = std::max(1.0, 2.0 / span);

    std::vector<CoeffTarget> targets;
    targets.reserve(2 * n_terms + 1);
    std::vector<double> dens(n_points);
    for (int i = 0; i < n_points; ++i) {
        dens[i] = pdf(market, a + (i + 0.5) * dx);
    }
    for (int k = 0; k <= n_terms; ++k) {
        const double w = 2.0 * kPi * k / span;
        double ca = 0.0, sa = 0.0;
        for (int i = 0; i < n_points; ++i) {
            const double ph = w * (i + 0.5) * dx;
            ca += dens[i] * std::cos(ph);
            sa += dens[i] * std::sin(ph);
        }
        targets.push_back({k, false, 2.0 / span * ca * dx, norm});
        if (k >= 1) targets.push_back({k, true, 2.0 / span * sa * dx, norm});
    }
    return targets;
}

QaeResult mrqae_estimate(const CoeffTarget& target, const QaeConfig& config, std::uint64_t seed) {
    config.validate();
    const double a_true = target.true_value / target.normalization;
    if (std::abs(a_true) > 1.0) {
        throw std::invalid_argument("mrqae_estimate: |true_value/normalization| > 1");
    }
    if (config.noiseless) {
        return QaeResult{target.true_value, 0.0, 0, 0, true};
    }

    // sign-carrying shift: alpha = (1+a)/2 in [0,1], theta = asin(sqrt(alpha))
    const double alpha = 0.5 * (1.0 + a_true);
    const double theta_true = std::asin(std::sqrt(std::clamp(alpha, 0.0, 1.0)));

    CounterRng rng(seed);
    const int shots = config.shots_per_round;
    const double ln_term = std::log(2.0 * config.max_rounds / config.gamma);

    double th_lo = 0.0, th_hi = kHalfPi;
    long long queries = 0;
    int m = 0, n_acc = 0, x_acc = 0;
    int cap = 3, stuck = 0;
    QaeResult res;

    for (int round = 0; round < config.max_rounds; ++round) {
        const long long k_amp = 2LL * m + 1;
        const double p = std::pow(std::sin(k_amp * theta_true), 2);
        x_acc += draw_binomial(rng, shots, p);
        n_acc += shots;
        queries += shots * k_amp;
        res.rounds = round + 1;

        const double phat = static_cast<double>(x_acc) / n_acc;
        const double delta = std::sqrt(ln_term / (2.0 * n_acc));
        const double p_lo = std::max(0.0, phat - delta);
        const double p_hi = std::min(1.0, phat + delta);

        // invert on the monotone piece the current interval occupies
        const auto j = static_cast<long long>(std::floor(k_amp * th_lo / kHalfPi));
        double s_lo, s_hi;
        if (j % 2 == 0) {
            s_lo = (j / 2) * kPi + std::asin(std::sqrt(p_lo));
            s_hi = (j / 2) * kPi + std::asin(std::sqrt(p_hi));
        } else {
            s_lo = ((j + 1) / 2) * kPi - std::asin(std::sqrt(p_hi));
            s_hi = ((j + 1) / 2) * kPi - std::asin(std::sqrt(p_lo));
        }
        const double cand_lo = std::max(th_lo, s_lo / k_amp);
        const double cand_hi = std::min(th_hi, s_hi / k_amp);
        if (cand_hi >= cand_lo) { // ignore inconsistent rounds, keep the prior
            th_lo = cand_lo;
            th_hi = cand_hi;
        }

        const double a_lo = 2.0 * std::pow(std::sin(th_lo), 2) - 1.0;
        const double a_hi = 2.0 * std::pow(std::sin(th_hi), 2) - 1.0;
        res.estimate = target.normalization * 0.5 * (a_lo + a_hi);
        res.half_width = target.normalization * 0.5 * (a_hi - a_lo);
        res.total_shots = queries;
        if (res.half_width <= config.epsilon * target.normalization) {
            res.converged = true;
            return res;
        }

        const int m_next = find_next_power(m, th_lo, th_hi, cap);
        if (m_next != m) {
            m = m_next;
            n_acc = 0;
            x_acc = 0;
            cap = 3;
            stuck = 0;
        } else if (++stuck >= 2) {
            cap *= 2; // widen the power search when the interval hugs a turning point
        }
    }
    res.converged = false;
    return res;
}

PriceResult pipeline_method3(const MarketParams& market, int n_terms, const QaeConfig& config,
                             std::uint64_t seed, std::vector<ShotRecord>* ledger, int n_points) {
    const Interval interval = truncation_interval(market);
    const std::vector<CoeffTarget> targets = discretized_coeffs(market, interval, n_terms, n_points);

    FourierSeries series;
    series.n_terms = n_terms;
    series.interval = interval;
    series.period = interval.length();
    series.a_coeffs.assign(n_terms + 1, 0.0);
    series.b_coeffs.assign(n_terms, 0.0);

    PriceResult out;
    out.shots_per_coefficient.reserve(targets.size());
    if (ledger) ledger->clear();
    CounterRng stream(seed);
    for (const auto& t : targets) {
        const std::uint64_t coeff_seed = stream.split(2 * t.k + (t.sine ? 1 : 0)).seed();
        const QaeResult r = mrqae_estimate(t, config, coeff_seed);
        if (t.sine) {
            series.b_coeffs[t.k - 1] = r.estimate;
        } else {
            series.a_coeffs[t.k] = r.estimate;
        }
        out.total_shots += r.total_shots;
        out.shots_per_coefficient.push_back(r.total_shots);
        if (ledger) {
            ledger->push_back({t.k, t.sine, r.estimate, r.total_shots, r.rounds, r.converged});
        }
    }

    const PayoffCoeffs payoff = payoff_coeffs_pdf(market, interval, n_terms);
    out.price = price_pdf(series, payoff, market);
    out.series = std::move(series);
    return out;
}

} // namespace qfp
