#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qfp/rng.hpp"
#include "qfp/statevec.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace qfp;

namespace {

constexpr double kPi = std::numbers::pi;

// Brute-force oracle: build the full 2^n x 2^n gate matrix by Kronecker
// products (qubit 0 = leftmost factor) and apply it densely. Kept fully
// independent of the library's pair-update kernels.
using Matrix = std::vector<std::vector<cdouble>>;

Matrix kron(const Matrix& a, const Matrix& b) {
    const std::size_t ra = a.size(), ca = a[0].size();
    const std::size_t rb = b.size(), cb = b[0].size();
    Matrix out(ra * rb, std::vector<cdouble>(ca * cb));
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < ca; ++j)
            for (std::size_t k = 0; k < rb; ++k)
                for (std::size_t l = 0; l < cb; ++l)
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
    return out;
}

Matrix identity(std::size_t dim) {
    Matrix m(dim, std::vector<cdouble>(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i) m[i][i] = 1.0;
    return m;
}

Matrix single_qubit_matrix(const Gate& g) {
    const double c = std::cos(0.5 * g.angle), s = std::sin(0.5 * g.angle);
    switch (g.kind) {
    case GateKind::RotationX:
        return {{{c, 0.0}, {0.0, -s}}, {{0.0, -s}, {c, 0.0}}};
    case GateKind::RotationY:
        return {{{c, 0.0}, {-s, 0.0}}, {{s, 0.0}, {c, 0.0}}};
    case GateKind::RotationZ:
        return {{std::polar(1.0, -0.5 * g.angle), 0.0}, {0.0, std::polar(1.0, 0.5 * g.angle)}};
    default:
        throw std::logic_error("not a single-qubit gate");
    }
}

Matrix dense_gate_matrix(const Gate& g, int n) {
    if (g.kind == GateKind::ControlledNot) {
        const std::size_t dim = std::size_t{1} << n;
        Matrix m(dim, std::vector<cdouble>(dim, 0.0));
        for (std::size_t i = 0; i < dim; ++i) {
            const bool ctrl = (i >> (n - 1 - g.control)) & 1;
            std::size_t j = i;
            if (ctrl) j ^= std::size_t{1} << (n - 1 - g.target);
            m[j][i] = 1.0;
        }
        return m;
    }
    Matrix m = identity(1);
    for (int q = 0; q < n; ++q) {
        m = kron(m, q == g.target ? single_qubit_matrix(g) : identity(2));
    }
    return m;
}

std::vector<cdouble> dense_run(const std::vector<Gate>& gates, int n) {
    std::vector<cdouble> v(std::size_t{1} << n, 0.0);
    v[0] = 1.0;
    for (const auto& g : gates) {
        const Matrix m = dense_gate_matrix(g, n);
        std::vector<cdouble> out(v.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
        v = std::move(out);
    }
    return v;
}

std::vector<Gate> random_circuit(CounterRng& rng, int n, int depth) {
    std::vector<Gate> gates;
    for (int d = 0; d < depth; ++d) {
        const int kind = static_cast<int>(rng() % (n > 1 ? 4 : 3));
        const int target = static_cast<int>(rng() % n);
        const double angle = rng.next_uniform(-2.0 * kPi, 2.0 * kPi);
        switch (kind) {
        case 0: gates.push_back(Gate::rx(target, angle)); break;
        case 1: gates.push_back(Gate::ry(target, angle)); break;
        case 2: gates.push_back(Gate::rz(target, angle)); break;
        default: {
            int control = static_cast<int>(rng() % n);
            if (control == target) control = (control + 1) % n;
            gates.push_back(Gate::cnot(control, target));
        }
        }
    }
    return gates;
}

StateVector random_state(CounterRng& rng, int n) {
    StateVector s = StateVector::zero_state(n);
    for (auto& a : s.amplitudes) a = cdouble(rng.next_normal(), rng.next_normal());
    const double norm = std::sqrt(s.norm_sq());
    for (auto& a : s.amplitudes) a /= norm;
    return s;
}

} // namespace

TEST_CASE("rotation-Z with zero angle is the identity") {
    CounterRng rng(1);
    StateVector s = random_state(rng, 2);
    StateVector out = apply_gate(s, Gate::rz(0, 0.0));
    for (std::size_t i = 0; i < s.dim(); ++i) {
        CHECK(std::abs(out.amplitudes[i] - s.amplitudes[i]) < 1e-15);
    }
}

TEST_CASE("rotation-X(pi) maps |0> to -i|1>") {
    StateVector s = StateVector::zero_state(1);
    StateVector out = apply_gate(s, Gate::rx(0, kPi));
    CHECK(std::abs(out.amplitudes[0]) < 1e-15);
    CHECK(std::abs(out.amplitudes[1] - cdouble(0.0, -1.0)) < 1e-15);
}

TEST_CASE("controlled-NOT on |10> gives |11>") {
    StateVector s = StateVector::zero_state(2);
    s.amplitudes[0] = 0.0;
    s.amplitudes[2] = 1.0; // |10>: qubit 0 (MSB) set
    StateVector out = apply_gate(s, Gate::cnot(0, 1));
    CHECK(std::abs(out.amplitudes[3] - 1.0) < 1e-15);
    CHECK(std::abs(out.amplitudes[2]) < 1e-15);
}

TEST_CASE("expectation trivials") {
    StateVector zero = StateVector::zero_state(1);
    CHECK(expectation(zero, Observable::z(0, 1)) == doctest::Approx(1.0).epsilon(1e-14));

    StateVector plus = StateVector::zero_state(1);
    plus.amplitudes = {cdouble(std::sqrt(0.5), 0.0), cdouble(std::sqrt(0.5), 0.0)};
    CHECK(std::abs(expectation(plus, Observable::z(0, 1))) < 1e-15);
}

TEST_CASE("expectation of Z x I matches dense evaluation on random states") {
    CounterRng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        StateVector s = random_state(rng, 2);
        // dense oracle: diag(+1,+1,-1,-1) in MSB convention
        double expect = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            expect += ((i >> 1) ? -1.0 : 1.0) * std::norm(s.amplitudes[i]);
        }
        CHECK(expectation(s, Observable::z(0, 2)) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("empty circuit returns |0...0>") {
    StateVector s = run_circuit({}, 2);
    CHECK(std::abs(s.amplitudes[0] - 1.0) < 1e-15);
    CHECK(s.norm_sq() == doctest::Approx(1.0));
}

TEST_CASE("single RY(pi/2) yields (cos pi/4, sin pi/4)") {
    StateVector s = run_circuit({Gate::ry(0, kPi / 2)}, 1);
    CHECK(std::abs(s.amplitudes[0] - std::cos(kPi / 4)) < 1e-15);
    CHECK(std::abs(s.amplitudes[1] - std::sin(kPi / 4)) < 1e-15);
}

TEST_CASE("random circuits match the dense-matrix oracle") {
    CounterRng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 4);
        const int depth = 1 + static_cast<int>(rng() % 20);
        const auto gates = random_circuit(rng, n, depth);
        const StateVector fast = run_circuit(gates, n);
        const auto dense = dense_run(gates, n);
        double max_err = 0.0;
        for (std::size_t i = 0; i < dense.size(); ++i) {
            max_err = std::max(max_err, std::abs(fast.amplitudes[i] - dense[i]));
        }
        CHECK(max_err <= 1e-10);
        CHECK(fast.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("gate application is linear on unnormalized input") {
    CounterRng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        StateVector s1 = random_state(rng, 3);
        StateVector s2 = random_state(rng, 3);
        const cdouble alpha(0.7, -0.2), beta(-1.3, 0.4);
        StateVector mix = s1;
        for (std::size_t i = 0; i < mix.dim(); ++i) {
            mix.amplitudes[i] = alpha * s1.amplitudes[i] + beta * s2.amplitudes[i];
        }
        const auto gates = random_circuit(rng, 3, 5);
        StateVector lhs = mix, a1 = s1, a2 = s2;
        for (const auto& g : gates) {
            apply_gate_in_place(lhs, g);
            apply_gate_in_place(a1, g);
            apply_gate_in_place(a2, g);
        }
        for (std::size_t i = 0; i < lhs.dim(); ++i) {
            const cdouble expect = alpha * a1.amplitudes[i] + beta * a2.amplitudes[i];
            CHECK(std::abs(lhs.amplitudes[i] - expect) < 1e-12);
        }
    }
}

TEST_CASE("error paths") {
    StateVector s = StateVector::zero_state(2);
    CHECK_THROWS_AS((void)apply_gate(s, Gate::rx(2, 0.1)), std::invalid_argument);
    CHECK_THROWS_AS((void)apply_gate(s, Gate::cnot(1, 1)), std::invalid_argument);
    CHECK_THROWS_AS((void)expectation(s, Observable::z(0, 3)), std::invalid_argument);
}

TEST_CASE("rotation gate matrices are unitary") {
    for (double angle : {0.3, -1.7, 2.9}) {
        for (auto kind : {GateKind::RotationX, GateKind::RotationY, GateKind::RotationZ}) {
            const Matrix m = single_qubit_matrix(Gate{kind, angle, 0, -1});
            // U U^dag = I
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    cdouble acc = 0.0;
                    for (int k = 0; k < 2; ++k) acc += m[i][k] * std::conj(m[j][k]);
                    CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) < 1e-12);
                }
            }
        }
    }
}
