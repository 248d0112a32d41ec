#pragma once

#include "qfp/statevec.hpp"

#include <vector>

namespace qfp {

enum class Axis { X, Y, Z };

// Data-reuploading circuit layout. Per layer: a trainable RY column and RZ
// column on every qubit, a ring of CNOTs (q -> q+1 mod n, skipped for n=1),
// then the encoding column rotating every qubit by the input x. One final
// trainable RY+RZ column follows the last encoding. The realized model is a
// trigonometric polynomial in x of degree n_qubits * n_layers.
struct AnsatzSpec {
    int n_qubits = 1;
    int n_layers = 1;
    bool ring_entangler = true;
    Axis encoding_axis = Axis::Z;

    int spectrum_size() const { return n_qubits * n_layers; }
    int parameter_count() const { return 2 * n_qubits * (n_layers + 1); }
    void validate() const;
};

struct ParamVector {
    std::vector<double> theta;
    double out_scale = 1.0;
    double out_bias = 0.0;
};

struct ModelOutput {
    double value = 0.0;           // out_scale * raw_expectation + out_bias
    double raw_expectation = 0.0; // <Z_0> in [-1,1]
};

// Uniform-angle initialization in [0, 2 pi), out_scale = 1, out_bias = 0.
ParamVector init_params(const AnsatzSpec& spec, std::uint64_t seed);

std::vector<Gate> build_circuit(const AnsatzSpec& spec, const ParamVector& params, double x);

ModelOutput evaluate(const AnsatzSpec& spec, const ParamVector& params, double x);

// Exact gradients by the parameter-shift identity
//   d<M>/dtheta = (f(theta + pi/2) - f(theta - pi/2)) / 2,
// applied per rotation gate; grad_x sums the shift over every encoding gate,
// and the mixed derivative nests the two shifts.
std::vector<double> grad_theta(const AnsatzSpec& spec, const ParamVector& params, double x);
double grad_x(const AnsatzSpec& spec, const ParamVector& params, double x);
std::vector<double> grad_theta_of_grad_x(const AnsatzSpec& spec, const ParamVector& params, double x);

} // namespace qfp
