#pragma once

#include "qfp/ansatz.hpp"
#include "qfp/fourier.hpp"
#include "qfp/market.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace qfp {

// Affine map between the truncation interval [a,b] and the data window
// [-pi,pi]; density labels transform with the Jacobian dx/dy = 2 pi/(b-a).
struct RescaleMap {
    Interval source;

    double to_x(double y) const;
    double to_y(double x) const;
    double jacobian() const; // dx/dy
};

// Labeled (x, f(x), f'(x)) triples in rescaled units for supervised training.
struct DatasetI {
    std::vector<double> x;
    std::vector<double> f;
    std::vector<double> df;
};

// Sorted unlabeled samples in [-pi,pi] for self-supervised training.
struct DatasetII {
    std::vector<double> x;
};

enum class Method { I, II };

// Extended: the model input is compressed (u = x/2) so one model period
// spans [-2pi,2pi] in data units and the data window [-pi,pi] covers only
// half a period, leaving the outer half free; Plain pins the model period to
// the data window itself (the Gibbs-afflicted baseline).
enum class WindowMode { Extended, Plain };

struct TrainingConfig {
    double learning_rate = 0.005;
    int epochs = 300;
    double supervised_weight = 0.9;
    double differential_weight = 0.1;
    int n_train = 2500;
    int n_test = 100;
    int repetitions = 10;
    std::uint64_t seed = 0;
    bool grid_data = true;          // Method I inputs: uniform grid vs uniform draws
    int quadrature_points = 1000;   // trapezoid nodes for Q(f^2)
    WindowMode window = WindowMode::Extended;
    bool boundary_in_cdf_group = true;
    double truncation_width = 10.0; // L, in standard deviations

    static TrainingConfig method1_defaults();
    static TrainingConfig method2_defaults();
};

struct TrainedModel {
    AnsatzSpec spec;
    ParamVector params;
    std::vector<double> loss_history;
    RescaleMap rescale;
    Method method = Method::I;
    WindowMode window = WindowMode::Extended;

    // Model as a function of the rescaled coordinate, window squeeze included.
    double value(double x) const;
    double deriv(double x) const;
    double input_scale() const { return window == WindowMode::Extended ? 0.5 : 1.0; }
};

// Generic differentiable-model view used by the loss functions.
struct ModelFunctions {
    std::function<double(double)> value;
    std::function<double(double)> deriv;

    static ModelFunctions from(const TrainedModel& model);
};

DatasetI build_dataset_I(const MarketParams& market, const Interval& interval, int n_train,
                         std::uint64_t seed, bool grid = true);

DatasetII build_dataset_II(const MarketParams& market, const Interval& interval, int n_samples,
                           std::uint64_t seed);

// Right-continuous empirical CDF (1/I) #{x_i <= x}; samples must be sorted.
double empirical_cdf(const DatasetII& samples, double x);

// Composite trapezoid of f(x)^2 over the interval.
double quadrature_Q(const std::function<double(double)>& f, const Interval& interval,
                    int grid_points);

// w_sup * mean squared value error + w_diff * mean squared slope error.
double loss_method1(const ModelFunctions& model, const DatasetI& data, double supervised_weight,
                    double differential_weight);

// Empirical-CDF fit plus the derivative-risk group
//   -(2/I) sum f(x_i) + Q(f^2)
// with model-value boundary anchors at the extreme samples. Weights apply to
// the CDF-fit and derivative groups; boundary terms join the CDF group by
// default (configurable, see TrainingConfig).
double loss_method2(const ModelFunctions& model, const DatasetII& samples, int quadrature_grid,
                    double cdf_weight, double differential_weight,
                    bool boundary_in_cdf_group = true);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long long t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Standard Adam update with bias correction; state is created lazily on the
// first call.
void adam_step(std::vector<double>& params, const std::vector<double>& grad, AdamState& state,
               double learning_rate);

// Full-batch Adam over the method's loss. Deterministic in (spec, config):
// strictly serial with a fixed reduction order. Throws on non-finite loss.
TrainedModel train(Method method, const MarketParams& market, const AnsatzSpec& spec,
                   const TrainingConfig& config);

// DFT-extracts the trained model on the method's window, maps the series
// back to the [a,b] frame (Jacobian applied for Method I), pairs it with the
// closed-form payoff coefficients and prices.
PriceResult price_with_model(Method method, const TrainedModel& trained,
                             const MarketParams& market);

// Mean squared error of the model against the rescaled density (Method I) or
// CDF (Method II) on a uniform n_test grid over [-pi,pi].
double model_test_mse(const TrainedModel& model, const MarketParams& market, int n_test);

// Text record: spec fields, rescale interval, theta, out_scale, out_bias,
// loss history.
void write_model(std::ostream& os, const TrainedModel& model);
TrainedModel read_model(std::istream& is);

namespace detail {

// Raw expectation <Z_0> and its exact theta-gradient in one forward/backward
// pass. Numerically identical to per-gate parameter shifts (same identity,
// factored); used by the trainer where shifted re-execution per parameter
// would dominate the runtime.
struct GradSweep {
    explicit GradSweep(const AnsatzSpec& spec);

    // theta laid out as in build_circuit; grad must have parameter_count()
    // entries. Returns the raw expectation at encoding angle u.
    double run(const std::vector<double>& theta, double u, std::vector<double>& grad);

    const AnsatzSpec spec;

private:
    StateVector psi_, lam_;
};

} // namespace detail

} // namespace qfp
