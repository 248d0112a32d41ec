#include "qfp/statevec.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qfp {

namespace {

void check_qubit(int q, int n, const char* what) {
    if (q < 0 || q >= n) {
        throw std::invalid_argument(std::string(what) + " qubit index " + std::to_string(q) +
                                    " out of range for " + std::to_string(n) + " qubits");
    }
}

} // namespace

StateVector StateVector::zero_state(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 24) {
        throw std::invalid_argument("zero_state: n_qubits must be in [1,24]");
    }
    StateVector s;
    s.n_qubits = n_qubits;
    s.amplitudes.assign(std::size_t{1} << n_qubits, cdouble(0.0, 0.0));
    s.amplitudes[0] = cdouble(1.0, 0.0);
    return s;
}

double StateVector::norm_sq() const {
    double acc = 0.0;
    for (const auto& a : amplitudes) acc += std::norm(a);
    return acc;
}

void apply_gate_in_place(StateVector& state, const Gate& gate) {
    const int n = state.n_qubits;
    check_qubit(gate.target, n, "target");
    const std::size_t dim = state.dim();
    // qubit 0 = MSB: stride of the target bit within the basis index
    const std::size_t stride = std::size_t{1} << (n - 1 - gate.target);
    cdouble* amp = state.amplitudes.data();

    switch (gate.kind) {
    case GateKind::RotationX: {
        const double c = std::cos(0.5 * gate.angle);
        const double s = std::sin(0.5 * gate.angle);
        const cdouble m01(0.0, -s); // exp(-i t X/2) = [[c, -is], [-is, c]]
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                const cdouble a0 = amp[i];
                const cdouble a1 = amp[i + stride];
                amp[i] = c * a0 + m01 * a1;
                amp[i + stride] = m01 * a0 + c * a1;
            }
        }
        break;
    }
    case GateKind::RotationY: {
        const double c = std::cos(0.5 * gate.angle);
        const double s = std::sin(0.5 * gate.angle);
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                const cdouble a0 = amp[i];
                const cdouble a1 = amp[i + stride];
                amp[i] = c * a0 - s * a1;
                amp[i + stride] = s * a0 + c * a1;
            }
        }
        break;
    }
    case GateKind::RotationZ: {
        const cdouble e0 = std::polar(1.0, -0.5 * gate.angle);
        const cdouble e1 = std::polar(1.0, 0.5 * gate.angle);
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                amp[i] *= e0;
                amp[i + stride] *= e1;
            }
        }
        break;
    }
    case GateKind::ControlledNot: {
        check_qubit(gate.control, n, "control");
        if (gate.control == gate.target) {
            throw std::invalid_argument("controlled-NOT requires distinct control and target");
        }
        const std::size_t cstride = std::size_t{1} << (n - 1 - gate.control);
        for (std::size_t i = 0; i < dim; ++i) {
            // swap each |c=1, t=0> with |c=1, t=1> once
            if ((i & cstride) != 0 && (i & stride) == 0) {
                std::swap(amp[i], amp[i | stride]);
            }
        }
        break;
    }
    }
}

StateVector apply_gate(const StateVector& state, const Gate& gate) {
    StateVector out = state;
    apply_gate_in_place(out, gate);
    return out;
}

Observable Observable::z(int qubit, int n_qubits) {
    check_qubit(qubit, n_qubits, "observable");
    Observable o;
    o.n_qubits = n_qubits;
    o.z_on_qubit.assign(n_qubits, false);
    o.z_on_qubit[qubit] = true;
    return o;
}

double expectation(const StateVector& state, const Observable& obs) {
    if (obs.n_qubits != state.n_qubits) {
        throw std::invalid_argument("expectation: observable/state qubit count mismatch");
    }
    std::size_t mask = 0;
    for (int q = 0; q < obs.n_qubits; ++q) {
        if (obs.z_on_qubit[q]) mask |= std::size_t{1} << (obs.n_qubits - 1 - q);
    }
    double acc = 0.0;
    const std::size_t dim = state.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        const int parity = __builtin_popcountll(i & mask) & 1;
        const double w = parity ? -1.0 : 1.0;
        acc += w * std::norm(state.amplitudes[i]);
    }
    return acc;
}

StateVector run_circuit(const std::vector<Gate>& gates, int n_qubits) {
    StateVector s = StateVector::zero_state(n_qubits);
    for (const auto& g : gates) apply_gate_in_place(s, g);
    return s;
}

} // namespace qfp
