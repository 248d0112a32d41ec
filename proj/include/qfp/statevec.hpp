#pragma once

#include <complex>
#include <vector>

namespace qfp {

using cdouble = std::complex<double>;

// Pure-state register. Amplitudes are indexed by computational basis integer
// with qubit 0 as the most significant bit. Normalization is the caller's
// responsibility; gate application preserves whatever norm it is given.
struct StateVector {
    int n_qubits = 0;
    std::vector<cdouble> amplitudes;

    static StateVector zero_state(int n_qubits);

    double norm_sq() const;
    std::size_t dim() const { return amplitudes.size(); }
};

enum class GateKind { RotationX, RotationY, RotationZ, ControlledNot };

struct Gate {
    GateKind kind = GateKind::RotationZ;
    double angle = 0.0; // radians, rotations only
    int target = -1;
    int control = -1;   // ControlledNot only

    static Gate rx(int target, double angle) { return {GateKind::RotationX, angle, target, -1}; }
    static Gate ry(int target, double angle) { return {GateKind::RotationY, angle, target, -1}; }
    static Gate rz(int target, double angle) { return {GateKind::RotationZ, angle, target, -1}; }
    static Gate cnot(int control, int target) { return {GateKind::ControlledNot, 0.0, target, control}; }
};

// Tensor product of I/Z factors; Hermitian with spectrum {-1,+1}.
struct Observable {
    int n_qubits = 0;
    std::vector<bool> z_on_qubit; // length n_qubits, true = Z factor

    static Observable z(int qubit, int n_qubits);
};

// Applies one gate, returning a new state. Throws std::invalid_argument on
// out-of-range targets or a ControlledNot with control == target.
StateVector apply_gate(const StateVector& state, const Gate& gate);

// In-place variant used by hot loops; same validation.
void apply_gate_in_place(StateVector& state, const Gate& gate);

// <psi|M|psi> for an I/Z string. Real by construction; in [-1,1] for
// normalized input. Throws on qubit-count mismatch.
double expectation(const StateVector& state, const Observable& obs);

// Runs |0...0> through the gate list in order.
StateVector run_circuit(const std::vector<Gate>& gates, int n_qubits);

} // namespace qfp
