#include "qfp/training.hpp"

#include "qfp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qfp {

namespace {

constexpr double kPi = std::numbers::pi;

} // namespace

// ---------------------------------------------------------------------------
// rescale map and datasets
// ---------------------------------------------------------------------------

double RescaleMap::to_x(double y) const {
    return -kPi + 2.0 * kPi * (y - source.a) / source.length();
}

double RescaleMap::to_y(double x) const {
    return source.a + source.length() * (x + kPi) / (2.0 * kPi);
}

double RescaleMap::jacobian() const { return 2.0 * kPi / source.length(); }

TrainingConfig TrainingConfig::method1_defaults() {
    TrainingConfig c;
    c.learning_rate = 0.005;
    c.supervised_weight = 0.9;
    c.differential_weight = 0.1;
    c.n_train = 2500;
    c.n_test = 100;
    return c;
}

TrainingConfig TrainingConfig::method2_defaults() {
    TrainingConfig c;
    c.learning_rate = 0.1;
    c.supervised_weight = 0.2;
    c.differential_weight = 0.8;
    c.n_train = 10000;
    c.n_test = 1000;
    return c;
}

DatasetI build_dataset_I(const MarketParams& market, const Interval& interval, int n_train,
                         std::uint64_t seed, bool grid) {
    if (n_train < 1) throw std::invalid_argument("build_dataset_I: n_train must be >= 1");
    const RescaleMap map{interval};
    const double jac = map.jacobian();
    DatasetI data;
    data.x.resize(n_train);
    if (grid) {
        for (int i = 0; i < n_train; ++i) {
            data.x[i] = n_train == 1 ? -kPi : -kPi + 2.0 * kPi * i / (n_train - 1);
        }
    } else {
        CounterRng rng(seed);
        for (int i = 0; i < n_train; ++i) data.x[i] = rng.next_uniform(-kPi, kPi);
        std::sort(data.x.begin(), data.x.end());
    }
    data.f.resize(n_train);
    data.df.resize(n_train);
    for (int i = 0; i < n_train; ++i) {
        const double y = map.to_y(data.x[i]);
        data.f[i] = pdf(market, y) / jac;
        data.df[i] = pdf_derivative(market, y) / (jac * jac);
    }
    return data;
}

DatasetII build_dataset_II(const MarketParams& market, const Interval& interval, int n_samples,
                           std::uint64_t seed) {
    if (n_samples < 3) throw std::invalid_argument("build_dataset_II: needs at least 3 samples");
    const RescaleMap map{interval};
    DatasetII data;
    data.x = sample(market, n_samples, seed);
    for (double& v : data.x) {
        v = std::clamp(map.to_x(v), -kPi, kPi);
    }
    std::sort(data.x.begin(), data.x.end());
    return data;
}

double empirical_cdf(const DatasetII& samples, double x) {
    if (samples.x.empty()) throw std::invalid_argument("empirical_cdf: empty sample set");
    const auto it = std::upper_bound(samples.x.begin(), samples.x.end(), x);
    return static_cast<double>(it - samples.x.begin()) / static_cast<double>(samples.x.size());
}

double quadrature_Q(const std::function<double(double)>& f, const Interval& interval,
                    int grid_points) {
    if (grid_points < 2) throw std::invalid_argument("quadrature_Q: needs at least 2 points");
    interval.validate();
    const double h = interval.length() / (grid_points - 1);
    double acc = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double v = f(interval.a + h * i);
        const double w = (i == 0 || i == grid_points - 1) ? 0.5 : 1.0;
        acc += w * v * v;
    }
    return acc * h;
}

// ---------------------------------------------------------------------------
// losses (direct implementations over a generic model)
// ---------------------------------------------------------------------------

ModelFunctions ModelFunctions::from(const TrainedModel& model) {
    return ModelFunctions{[&model](double x) { return model.value(x); },
                          [&model](double x) { return model.deriv(x); }};
}

double loss_method1(const ModelFunctions& model, const DatasetI& data, double supervised_weight,
                    double differential_weight) {
    if (data.x.size() != data.f.size() || data.x.size() != data.df.size() || data.x.empty()) {
        throw std::invalid_argument("loss_method1: inconsistent dataset");
    }
    const double inv = 1.0 / static_cast<double>(data.x.size());
    double sup = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < data.x.size(); ++i) {
        const double r = model.value(data.x[i]) - data.f[i];
        const double rd = model.deriv(data.x[i]) - data.df[i];
        sup += r * r;
        diff += rd * rd;
    }
    return supervised_weight * inv * sup + differential_weight * inv * diff;
}

double loss_method2(const ModelFunctions& model, const DatasetII& samples, int quadrature_grid,
                    double cdf_weight, double differential_weight, bool boundary_in_cdf_group) {
    const std::size_t n = samples.x.size();
    if (n < 3) throw std::invalid_argument("loss_method2: needs at least 3 samples");
    const double inv = 1.0 / static_cast<double>(n);

    double cdf_fit = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double femp = static_cast<double>(i + 1) * inv;
        const double r = femp - model.value(samples.x[i]);
        cdf_fit += inv * r * r;
    }
    const double b0 = model.value(samples.x.front());
    const double b1 = model.value(samples.x.back()) - 1.0;
    const double boundary = b0 * b0 + b1 * b1;

    double mc = 0.0;
    for (std::size_t i = 0; i < n; ++i) mc += model.deriv(samples.x[i]);
    mc *= -2.0 * inv;
    const double q = quadrature_Q(model.deriv, Interval{-kPi, kPi}, quadrature_grid);

    const double cdf_group = cdf_fit + (boundary_in_cdf_group ? boundary : 0.0);
    const double diff_group = mc + q + (boundary_in_cdf_group ? 0.0 : boundary);
    return cdf_weight * cdf_group + differential_weight * diff_group;
}

void adam_step(std::vector<double>& params, const std::vector<double>& grad, AdamState& state,
               double learning_rate) {
    if (params.size() != grad.size()) throw std::invalid_argument("adam_step: shape mismatch");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
        state.t = 0;
    }
    if (state.m.size() != params.size()) throw std::invalid_argument("adam_step: state shape mismatch");
    state.t += 1;
    const double b1t = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double b2t = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
        const double mhat = state.m[i] / b1t;
        const double vhat = state.v[i] / b2t;
        params[i] -= learning_rate * mhat / (std::sqrt(vhat) + state.eps);
    }
}

// ---------------------------------------------------------------------------
// gradient sweep
// ---------------------------------------------------------------------------

namespace detail {

namespace {

// Im(<P psi | lam>) for a Pauli on one qubit; stride is the target bit.
double im_pauli_bracket_y(const StateVector& psi, const StateVector& lam, std::size_t stride) {
    const std::size_t dim = psi.dim();
    double acc = 0.0;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            // (Y psi)_i0 = -i psi_i1, (Y psi)_i1 = +i psi_i0
            acc += std::real(std::conj(psi.amplitudes[i + stride]) * lam.amplitudes[i]);
            acc -= std::real(std::conj(psi.amplitudes[i]) * lam.amplitudes[i + stride]);
        }
    }
    return acc;
}

double im_pauli_bracket_z(const StateVector& psi, const StateVector& lam, std::size_t stride) {
    const std::size_t dim = psi.dim();
    double acc = 0.0;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            acc += std::imag(std::conj(psi.amplitudes[i]) * lam.amplitudes[i]);
            acc -= std::imag(std::conj(psi.amplitudes[i + stride]) * lam.amplitudes[i + stride]);
        }
    }
    return acc;
}

} // namespace

GradSweep::GradSweep(const AnsatzSpec& s) : spec(s) {
    psi_ = StateVector::zero_state(spec.n_qubits);
    lam_ = psi_;
}

double GradSweep::run(const std::vector<double>& theta, double u, std::vector<double>& grad) {
    const int n = spec.n_qubits;
    const int L = spec.n_layers;
    const int P = spec.parameter_count();
    if (theta.size() != static_cast<std::size_t>(P)) {
        throw std::invalid_argument("GradSweep: theta length mismatch");
    }
    grad.assign(P, 0.0);
    const bool ring = n > 1 && spec.ring_entangler;
    const GateKind enc = spec.encoding_axis == Axis::X   ? GateKind::RotationX
                         : spec.encoding_axis == Axis::Y ? GateKind::RotationY
                                                         : GateKind::RotationZ;

    // forward
    std::fill(psi_.amplitudes.begin(), psi_.amplitudes.end(), cdouble(0.0, 0.0));
    psi_.amplitudes[0] = 1.0;
    int t = 0;
    for (int l = 0; l < L; ++l) {
        for (int q = 0; q < n; ++q) apply_gate_in_place(psi_, Gate::ry(q, theta[t++]));
        for (int q = 0; q < n; ++q) apply_gate_in_place(psi_, Gate::rz(q, theta[t++]));
        if (ring) {
            for (int q = 0; q < n; ++q) apply_gate_in_place(psi_, Gate::cnot(q, (q + 1) % n));
        }
        for (int q = 0; q < n; ++q) apply_gate_in_place(psi_, Gate{enc, u, q, -1});
    }
    for (int q = 0; q < n; ++q) apply_gate_in_place(psi_, Gate::ry(q, theta[t++]));
    for (int q = 0; q < n; ++q) apply_gate_in_place(psi_, Gate::rz(q, theta[t++]));

    // lam = Z_0 psi; raw expectation = <psi|lam>
    const std::size_t msb = psi_.dim() >> 1;
    double raw = 0.0;
    for (std::size_t i = 0; i < psi_.dim(); ++i) {
        const double sign = (i & msb) ? -1.0 : 1.0;
        lam_.amplitudes[i] = sign * psi_.amplitudes[i];
        raw += sign * std::norm(psi_.amplitudes[i]);
    }

    // backward: visit gates last-to-first; at a trainable rotation the
    // parameter-shift value equals -Im(<P psi | lam>) with psi the state
    // after that gate and lam the back-propagated observable state.
    auto undo_both = [&](const Gate& g) {
        Gate inv = g;
        if (g.kind != GateKind::ControlledNot) inv.angle = -g.angle;
        apply_gate_in_place(psi_, inv);
        apply_gate_in_place(lam_, inv);
    };
    auto stride_of = [&](int q) { return std::size_t{1} << (n - 1 - q); };

    t = P;
    for (int q = n - 1; q >= 0; --q) { // final RZ column
        grad[--t] = -im_pauli_bracket_z(psi_, lam_, stride_of(q));
        undo_both(Gate::rz(q, theta[t]));
    }
    for (int q = n - 1; q >= 0; --q) { // final RY column
        grad[--t] = -im_pauli_bracket_y(psi_, lam_, stride_of(q));
        undo_both(Gate::ry(q, theta[t]));
    }
    for (int l = L - 1; l >= 0; --l) {
        for (int q = n - 1; q >= 0; --q) undo_both(Gate{enc, u, q, -1});
        if (ring) {
            for (int q = n - 1; q >= 0; --q) undo_both(Gate::cnot(q, (q + 1) % n));
        }
        int base = l * 2 * n + n;
        for (int q = n - 1; q >= 0; --q) { // layer RZ column
            grad[base + q] = -im_pauli_bracket_z(psi_, lam_, stride_of(q));
            undo_both(Gate::rz(q, theta[base + q]));
        }
        base = l * 2 * n;
        for (int q = n - 1; q >= 0; --q) { // layer RY column
            grad[base + q] = -im_pauli_bracket_y(psi_, lam_, stride_of(q));
            undo_both(Gate::ry(q, theta[base + q]));
        }
    }
    return raw;
}

} // namespace detail

// ---------------------------------------------------------------------------
// trainer
// ---------------------------------------------------------------------------

namespace {

// Trigonometric tables for one set of evaluation points u_i against the
// anchored basis cos(k (u + pi)), sin(k (u + pi)).
struct TrigTable {
    int count = 0;
    int n_terms = 0;
    std::vector<double> c, s; // [count * (n_terms+1)]

    void build(const std::vector<double>& u, int K) {
        count = static_cast<int>(u.size());
        n_terms = K;
        c.resize(static_cast<std::size_t>(count) * (K + 1));
        s.resize(static_cast<std::size_t>(count) * (K + 1));
        for (int i = 0; i < count; ++i) {
            const double ph = u[i] + kPi;
            for (int k = 0; k <= K; ++k) {
                c[static_cast<std::size_t>(i) * (K + 1) + k] = std::cos(k * ph);
                s[static_cast<std::size_t>(i) * (K + 1) + k] = std::sin(k * ph);
            }
        }
    }
    const double* cos_row(int i) const { return &c[static_cast<std::size_t>(i) * (n_terms + 1)]; }
    const double* sin_row(int i) const { return &s[static_cast<std::size_t>(i) * (n_terms + 1)]; }
};

struct SeriesAB {
    std::vector<double> A; // A_0..A_K
    std::vector<double> B; // B_0 unused .. B_K at index k

    void resize(int K) {
        A.assign(K + 1, 0.0);
        B.assign(K + 1, 0.0);
    }
    double value(const double* crow, const double* srow, int K) const {
        double acc = 0.5 * A[0];
        for (int k = 1; k <= K; ++k) acc += A[k] * crow[k] + B[k] * srow[k];
        return acc;
    }
    // derivative w.r.t. u
    double deriv(const double* crow, const double* srow, int K) const {
        double acc = 0.0;
        for (int k = 1; k <= K; ++k) acc += k * (-A[k] * srow[k] + B[k] * crow[k]);
        return acc;
    }
};

struct LossGrad {
    double loss = 0.0;
    std::vector<double> dA, dB; // same layout as SeriesAB

    void resize(int K) {
        loss = 0.0;
        dA.assign(K + 1, 0.0);
        dB.assign(K + 1, 0.0);
    }
};

struct EpochContext {
    int K = 0;
    double du_dx = 0.5;
    TrigTable data_table;
    TrigTable quad_table;
    std::vector<double> quad_weights;
};

void method1_loss_grad(const EpochContext& ctx, const SeriesAB& series, const DatasetI& data,
                       const TrainingConfig& cfg, LossGrad& out) {
    const int K = ctx.K;
    out.resize(K);
    const std::size_t n = data.x.size();
    const double inv = 1.0 / static_cast<double>(n);
    const double wsup = cfg.supervised_weight, wdiff = cfg.differential_weight;
    double sup = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* crow = ctx.data_table.cos_row(static_cast<int>(i));
        const double* srow = ctx.data_table.sin_row(static_cast<int>(i));
        const double r = series.value(crow, srow, K) - data.f[i];
        const double rd = ctx.du_dx * series.deriv(crow, srow, K) - data.df[i];
        sup += r * r;
        diff += rd * rd;
        const double gr = 2.0 * wsup * inv * r;
        const double gd = 2.0 * wdiff * inv * rd * ctx.du_dx;
        out.dA[0] += 0.5 * gr;
        for (int k = 1; k <= K; ++k) {
            out.dA[k] += gr * crow[k] - gd * k * srow[k];
            out.dB[k] += gr * srow[k] + gd * k * crow[k];
        }
    }
    out.loss = wsup * inv * sup + wdiff * inv * diff;
}

void method2_loss_grad(const EpochContext& ctx, const SeriesAB& series, const DatasetII& data,
                       const TrainingConfig& cfg, LossGrad& out) {
    const int K = ctx.K;
    out.resize(K);
    const std::size_t n = data.x.size();
    const double inv = 1.0 / static_cast<double>(n);
    const double wc = cfg.supervised_weight, wd = cfg.differential_weight;
    const double wb = cfg.boundary_in_cdf_group ? wc : wd;

    double cdf_fit = 0.0, mc = 0.0, qsum = 0.0, boundary = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* crow = ctx.data_table.cos_row(static_cast<int>(i));
        const double* srow = ctx.data_table.sin_row(static_cast<int>(i));
        const bool interior = i > 0 && i + 1 < n;
        if (interior) {
            const double femp = static_cast<double>(i + 1) * inv;
            const double r = series.value(crow, srow, K) - femp;
            cdf_fit += inv * r * r;
            const double gr = 2.0 * wc * inv * r;
            out.dA[0] += 0.5 * gr;
            for (int k = 1; k <= K; ++k) {
                out.dA[k] += gr * crow[k];
                out.dB[k] += gr * srow[k];
            }
        } else {
            const double target = i == 0 ? 0.0 : 1.0;
            const double r = series.value(crow, srow, K) - target;
            boundary += r * r;
            const double gr = 2.0 * wb * r;
            out.dA[0] += 0.5 * gr;
            for (int k = 1; k <= K; ++k) {
                out.dA[k] += gr * crow[k];
                out.dB[k] += gr * srow[k];
            }
        }
        // Monte Carlo term -(2/I) sum f(x_i) runs over every sample
        mc += ctx.du_dx * series.deriv(crow, srow, K);
        const double gm = -2.0 * wd * inv * ctx.du_dx;
        for (int k = 1; k <= K; ++k) {
            out.dA[k] += gm * (-static_cast<double>(k) * srow[k]);
            out.dB[k] += gm * (static_cast<double>(k) * crow[k]);
        }
    }
    mc *= -2.0 * inv;

    for (int iq = 0; iq < ctx.quad_table.count; ++iq) {
        const double* crow = ctx.quad_table.cos_row(iq);
        const double* srow = ctx.quad_table.sin_row(iq);
        const double f = ctx.du_dx * series.deriv(crow, srow, K);
        const double w = ctx.quad_weights[iq];
        qsum += w * f * f;
        const double gq = 2.0 * wd * w * f * ctx.du_dx;
        for (int k = 1; k <= K; ++k) {
            out.dA[k] += gq * (-static_cast<double>(k) * srow[k]);
            out.dB[k] += gq * (static_cast<double>(k) * crow[k]);
        }
    }

    out.loss = wc * cdf_fit + wd * (mc + qsum) + wb * boundary;
}

} // namespace

double TrainedModel::value(double x) const {
    return evaluate(spec, params, input_scale() * x).value;
}

double TrainedModel::deriv(double x) const {
    return grad_x(spec, params, input_scale() * x) * input_scale();
}

TrainedModel train(Method method, const MarketParams& market, const AnsatzSpec& spec,
                   const TrainingConfig& config) {
    spec.validate();
    market.validate();
    if (config.epochs < 0) throw std::invalid_argument("train: negative epochs");

    const Interval interval = truncation_interval(market, config.truncation_width);
    TrainedModel model;
    model.spec = spec;
    model.rescale = RescaleMap{interval};
    model.method = method;
    model.window = config.window;
    model.params = init_params(spec, config.seed);
    if (config.epochs == 0) return model;

    const int K = spec.spectrum_size();
    const int N = 2 * K + 1;
    const int P = spec.parameter_count();
    const double du_dx = config.window == WindowMode::Extended ? 0.5 : 1.0;

    DatasetI data1;
    DatasetII data2;
    std::vector<double> data_u;
    if (method == Method::I) {
        data1 = build_dataset_I(market, interval, config.n_train, hash_mix(config.seed, 1),
                                config.grid_data);
        data_u.resize(data1.x.size());
        for (std::size_t i = 0; i < data1.x.size(); ++i) data_u[i] = du_dx * data1.x[i];
        // start the affine output at the label scale instead of chasing it
        double peak = 0.0;
        for (double f : data1.f) peak = std::max(peak, std::abs(f));
        model.params.out_scale = std::max(peak, 0.1);
    } else {
        data2 = build_dataset_II(market, interval, config.n_train, hash_mix(config.seed, 1));
        data_u.resize(data2.x.size());
        for (std::size_t i = 0; i < data2.x.size(); ++i) data_u[i] = du_dx * data2.x[i];
        // CDF range [0,1]: raw in [-1,1] maps onto it exactly from 0.5/0.5
        model.params.out_scale = 0.5;
        model.params.out_bias = 0.5;
    }

    EpochContext ctx;
    ctx.K = K;
    ctx.du_dx = du_dx;
    ctx.data_table.build(data_u, K);
    if (method == Method::II) {
        std::vector<double> quad_u(config.quadrature_points);
        ctx.quad_weights.resize(config.quadrature_points);
        const double h = 2.0 * kPi / (config.quadrature_points - 1);
        for (int i = 0; i < config.quadrature_points; ++i) {
            quad_u[i] = du_dx * (-kPi + h * i);
            ctx.quad_weights[i] = (i == 0 || i + 1 == config.quadrature_points) ? 0.5 * h : h;
        }
        ctx.quad_table.build(quad_u, K);
    }

    // model-period grid over u in [-pi, pi)
    std::vector<double> u_grid(N);
    for (int g = 0; g < N; ++g) u_grid[g] = -kPi + 2.0 * kPi * g / N;
    TrigTable grid_table;
    grid_table.build(u_grid, K);

    detail::GradSweep sweep(spec);
    std::vector<double> f_raw(N);
    std::vector<double> grad_rows(static_cast<std::size_t>(N) * P);
    std::vector<double> gcol(P);
    SeriesAB series;
    LossGrad lg;
    std::vector<double> packed(P + 2), grad_packed(P + 2), qg(N);
    AdamState adam;

    model.loss_history.reserve(config.epochs);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double s_scale = model.params.out_scale;
        const double s_bias = model.params.out_bias;

        for (int g = 0; g < N; ++g) {
            f_raw[g] = sweep.run(model.params.theta, u_grid[g], gcol);
            std::copy(gcol.begin(), gcol.end(), grad_rows.begin() + static_cast<std::size_t>(g) * P);
        }

        // series of the affine-scaled model on the grid
        series.resize(K);
        for (int k = 0; k <= K; ++k) {
            double ca = 0.0, sa = 0.0;
            for (int g = 0; g < N; ++g) {
                const double v = s_scale * f_raw[g] + s_bias;
                ca += v * grid_table.cos_row(g)[k];
                sa += v * grid_table.sin_row(g)[k];
            }
            series.A[k] = 2.0 * ca / N;
            if (k >= 1) series.B[k] = 2.0 * sa / N;
        }

        if (method == Method::I) {
            method1_loss_grad(ctx, series, data1, config, lg);
        } else {
            method2_loss_grad(ctx, series, data2, config, lg);
        }
        if (!std::isfinite(lg.loss)) {
            std::ostringstream oss;
            oss << "train: non-finite loss at epoch " << epoch;
            throw std::runtime_error(oss.str());
        }
        model.loss_history.push_back(lg.loss);

        // pull the coefficient-space gradient back to the sample grid:
        // dL/df_g = (2/N) sum_k dL/dA_k cos + dL/dB_k sin
        for (int g = 0; g < N; ++g) {
            const double* crow = grid_table.cos_row(g);
            const double* srow = grid_table.sin_row(g);
            double acc = lg.dA[0] * crow[0];
            for (int k = 1; k <= K; ++k) acc += lg.dA[k] * crow[k] + lg.dB[k] * srow[k];
            qg[g] = 2.0 * acc / N;
        }

        std::copy(model.params.theta.begin(), model.params.theta.end(), packed.begin());
        packed[P] = s_scale;
        packed[P + 1] = s_bias;
        for (int j = 0; j < P; ++j) {
            double acc = 0.0;
            for (int g = 0; g < N; ++g) acc += qg[g] * grad_rows[static_cast<std::size_t>(g) * P + j];
            grad_packed[j] = s_scale * acc;
        }
        double ds = 0.0, db = 0.0;
        for (int g = 0; g < N; ++g) {
            ds += qg[g] * f_raw[g];
            db += qg[g];
        }
        grad_packed[P] = ds;
        grad_packed[P + 1] = db;

        adam_step(packed, grad_packed, adam, config.learning_rate);
        std::copy(packed.begin(), packed.begin() + P, model.params.theta.begin());
        model.params.out_scale = packed[P];
        model.params.out_bias = packed[P + 1];
    }
    return model;
}

PriceResult price_with_model(Method method, const TrainedModel& trained,
                             const MarketParams& market) {
    const Interval interval = trained.rescale.source;
    const int K = trained.spec.spectrum_size();
    const int grid = 4 * K + 1;
    PriceResult out;

    if (method != trained.method) {
        throw std::invalid_argument("price_with_model: model was trained for the other method");
    }

    if (method == Method::I) {
        FourierSeries sx = extract_series([&](double x) { return trained.value(x); },
                                          Interval{-kPi, kPi}, 2.0 * kPi, K, grid,
                                          /*warn_aliasing=*/false);
        // back to the [a,b] frame; density picks up the Jacobian
        FourierSeries sy = sx;
        sy.interval = interval;
        sy.period = interval.length();
        const double jac = trained.rescale.jacobian();
        for (auto& v : sy.a_coeffs) v *= jac;
        for (auto& v : sy.b_coeffs) v *= jac;
        const PayoffCoeffs payoff = payoff_coeffs_pdf(market, interval, K);
        out.price = price_pdf(sy, payoff, market);
        out.series = std::move(sy);
        return out;
    }

    if (trained.window != WindowMode::Extended) {
        throw std::invalid_argument("price_with_model: Method II pricing requires the extended window");
    }
    FourierSeries sx = extract_series([&](double x) { return trained.value(x); },
                                      Interval{-2.0 * kPi, 2.0 * kPi}, 4.0 * kPi, K, grid,
                                      /*warn_aliasing=*/false);
    FourierSeries sy = sx;
    sy.interval = extended_interval(interval);
    sy.period = sy.interval.length();
    const PayoffCoeffs payoff = payoff_coeffs_cdf(market, interval, sy.interval, K);
    const double f_a = trained.value(-kPi);
    const double f_b = trained.value(kPi);
    out.price = price_cdf(sy, payoff, market, f_a, f_b);
    out.series = std::move(sy);
    return out;
}

double model_test_mse(const TrainedModel& model, const MarketParams& market, int n_test) {
    if (n_test < 2) throw std::invalid_argument("model_test_mse: needs at least 2 points");
    const RescaleMap& map = model.rescale;
    double acc = 0.0;
    for (int i = 0; i < n_test; ++i) {
        const double x = -kPi + 2.0 * kPi * i / (n_test - 1);
        const double y = map.to_y(x);
        const double target = model.method == Method::I ? pdf(market, y) / map.jacobian()
                                                        : cdf(market, y);
        const double r = model.value(x) - target;
        acc += r * r;
    }
    return acc / n_test;
}

void write_model(std::ostream& os, const TrainedModel& model) {
    os.precision(17);
    os << model.spec.n_qubits << ' ' << model.spec.n_layers << ' '
       << (model.spec.ring_entangler ? 1 : 0) << ' ' << static_cast<int>(model.spec.encoding_axis)
       << ' ' << (model.method == Method::I ? 1 : 2) << ' '
       << (model.window == WindowMode::Extended ? 1 : 0) << '\n';
    os << model.rescale.source.a << ' ' << model.rescale.source.b << '\n';
    os << model.params.theta.size();
    for (double t : model.params.theta) os << ' ' << t;
    os << '\n' << model.params.out_scale << ' ' << model.params.out_bias << '\n';
    os << model.loss_history.size();
    for (double l : model.loss_history) os << ' ' << l;
    os << '\n';
}

TrainedModel read_model(std::istream& is) {
    TrainedModel m;
    int ring = 0, axis = 0, method = 0, window = 0;
    if (!(is >> m.spec.n_qubits >> m.spec.n_layers >> ring >> axis >> method >> window)) {
        throw std::runtime_error("read_model: malformed header");
    }
    m.spec.ring_entangler = ring != 0;
    m.spec.encoding_axis = static_cast<Axis>(axis);
    m.method = method == 1 ? Method::I : Method::II;
    m.window = window == 1 ? WindowMode::Extended : WindowMode::Plain;
    if (!(is >> m.rescale.source.a >> m.rescale.source.b)) {
        throw std::runtime_error("read_model: malformed interval");
    }
    std::size_t ntheta = 0;
    if (!(is >> ntheta)) throw std::runtime_error("read_model: malformed theta block");
    if (ntheta != static_cast<std::size_t>(m.spec.parameter_count())) {
        throw std::runtime_error("read_model: theta length mismatch with spec");
    }
    m.params.theta.resize(ntheta);
    for (auto& t : m.params.theta) {
        if (!(is >> t)) throw std::runtime_error("read_model: truncated theta block");
    }
    if (!(is >> m.params.out_scale >> m.params.out_bias)) {
        throw std::runtime_error("read_model: malformed affine block");
    }
    std::size_t nloss = 0;
    if (!(is >> nloss)) throw std::runtime_error("read_model: malformed loss block");
    m.loss_history.resize(nloss);
    for (auto& l : m.loss_history) {
        if (!(is >> l)) throw std::runtime_error("read_model: truncated loss block");
    }
    return m;
}

} // namespace qfp
