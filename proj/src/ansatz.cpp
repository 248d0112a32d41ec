#include "qfp/ansatz.hpp"

#include "qfp/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfp {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

GateKind axis_gate(Axis axis) {
    switch (axis) {
    case Axis::X: return GateKind::RotationX;
    case Axis::Y: return GateKind::RotationY;
    case Axis::Z: return GateKind::RotationZ;
    }
    throw std::logic_error("unreachable");
}

double evaluate_gates(const std::vector<Gate>& gates, const AnsatzSpec& spec,
                      const ParamVector& params) {
    StateVector s = run_circuit(gates, spec.n_qubits);
    const double raw = expectation(s, Observable::z(0, spec.n_qubits));
    return params.out_scale * raw + params.out_bias;
}

// Indices of the encoding gates inside the build_circuit output.
std::vector<std::size_t> encoding_positions(const AnsatzSpec& spec) {
    std::vector<std::size_t> pos;
    const int n = spec.n_qubits;
    const std::size_t ring = (n > 1 && spec.ring_entangler) ? n : 0;
    std::size_t cursor = 0;
    for (int l = 0; l < spec.n_layers; ++l) {
        cursor += 2 * static_cast<std::size_t>(n) + ring;
        for (int q = 0; q < n; ++q) pos.push_back(cursor + q);
        cursor += n;
    }
    return pos;
}

// Positions of the trainable rotations, in theta order.
std::vector<std::size_t> trainable_positions(const AnsatzSpec& spec) {
    std::vector<std::size_t> pos;
    const int n = spec.n_qubits;
    const std::size_t ring = (n > 1 && spec.ring_entangler) ? n : 0;
    std::size_t cursor = 0;
    for (int l = 0; l < spec.n_layers; ++l) {
        for (int q = 0; q < 2 * n; ++q) pos.push_back(cursor + q);
        cursor += 2 * static_cast<std::size_t>(n) + ring + n;
    }
    for (int q = 0; q < 2 * n; ++q) pos.push_back(cursor + q);
    return pos;
}

} // namespace

void AnsatzSpec::validate() const {
    if (n_qubits < 1) throw std::invalid_argument("AnsatzSpec: n_qubits must be >= 1");
    if (n_layers < 1) throw std::invalid_argument("AnsatzSpec: n_layers must be >= 1");
}

ParamVector init_params(const AnsatzSpec& spec, std::uint64_t seed) {
    CounterRng rng(seed);
    ParamVector p;
    p.theta.resize(spec.parameter_count());
    for (auto& t : p.theta) t = rng.next_uniform(0.0, 2.0 * std::numbers::pi);
    p.out_scale = 1.0;
    p.out_bias = 0.0;
    return p;
}

std::vector<Gate> build_circuit(const AnsatzSpec& spec, const ParamVector& params, double x) {
    if (spec.n_qubits < 1 || spec.n_layers < 0) {
        throw std::invalid_argument("build_circuit: invalid spec");
    }
    if (!std::isfinite(x)) throw std::invalid_argument("build_circuit: x must be finite");
    if (params.theta.size() != static_cast<std::size_t>(spec.parameter_count())) {
        throw std::invalid_argument("build_circuit: theta length != parameter_count");
    }
    const int n = spec.n_qubits;
    const GateKind enc = axis_gate(spec.encoding_axis);
    std::vector<Gate> gates;
    gates.reserve(static_cast<std::size_t>(spec.n_layers) * 4 * n + 2 * n);
    std::size_t t = 0;
    for (int l = 0; l < spec.n_layers; ++l) {
        for (int q = 0; q < n; ++q) gates.push_back(Gate::ry(q, params.theta[t++]));
        for (int q = 0; q < n; ++q) gates.push_back(Gate::rz(q, params.theta[t++]));
        if (n > 1 && spec.ring_entangler) {
            for (int q = 0; q < n; ++q) gates.push_back(Gate::cnot(q, (q + 1) % n));
        }
        for (int q = 0; q < n; ++q) gates.push_back(Gate{enc, x, q, -1});
    }
    for (int q = 0; q < n; ++q) gates.push_back(Gate::ry(q, params.theta[t++]));
    for (int q = 0; q < n; ++q) gates.push_back(Gate::rz(q, params.theta[t++]));
    return gates;
}

ModelOutput evaluate(const AnsatzSpec& spec, const ParamVector& params, double x) {
    StateVector s = run_circuit(build_circuit(spec, params, x), spec.n_qubits);
    ModelOutput out;
    out.raw_expectation = expectation(s, Observable::z(0, spec.n_qubits));
    out.value = params.out_scale * out.raw_expectation + params.out_bias;
    return out;
}

std::vector<double> grad_theta(const AnsatzSpec& spec, const ParamVector& params, double x) {
    const int count = spec.parameter_count();
    std::vector<double> g(count, 0.0);
    ParamVector shifted = params;
    for (int j = 0; j < count; ++j) {
        shifted.theta[j] = params.theta[j] + kHalfPi;
        const double fp = evaluate(spec, shifted, x).value;
        shifted.theta[j] = params.theta[j] - kHalfPi;
        const double fm = evaluate(spec, shifted, x).value;
        shifted.theta[j] = params.theta[j];
        g[j] = 0.5 * (fp - fm);
    }
    return g;
}

double grad_x(const AnsatzSpec& spec, const ParamVector& params, double x) {
    std::vector<Gate> gates = build_circuit(spec, params, x);
    double acc = 0.0;
    for (std::size_t pos : encoding_positions(spec)) {
        gates[pos].angle = x + kHalfPi;
        const double fp = evaluate_gates(gates, spec, params);
        gates[pos].angle = x - kHalfPi;
        const double fm = evaluate_gates(gates, spec, params);
        gates[pos].angle = x;
        acc += 0.5 * (fp - fm);
    }
    return acc;
}

std::vector<double> grad_theta_of_grad_x(const AnsatzSpec& spec, const ParamVector& params,
                                         double x) {
    std::vector<Gate> gates = build_circuit(spec, params, x);
    const std::vector<std::size_t> enc = encoding_positions(spec);
    const std::vector<std::size_t> trainable = trainable_positions(spec);
    const int count = spec.parameter_count();
    std::vector<double> g(count, 0.0);
    for (int j = 0; j < count; ++j) {
        const std::size_t tpos = trainable[j];
        const double theta_j = gates[tpos].angle;
        for (std::size_t pos : enc) {
            const double x_angle = gates[pos].angle;
            double quad[4]; // (theta +-, x +-) parameter-shift corners
            int idx = 0;
            for (double ts : {kHalfPi, -kHalfPi}) {
                gates[tpos].angle = theta_j + ts;
                for (double xs : {kHalfPi, -kHalfPi}) {
                    gates[pos].angle = x_angle + xs;
                    quad[idx++] = evaluate_gates(gates, spec, params);
                }
            }
            gates[tpos].angle = theta_j;
            gates[pos].angle = x_angle;
            g[j] += 0.25 * (quad[0] - quad[1] - quad[2] + quad[3]);
        }
    }
    return g;
}

} // namespace qfp
