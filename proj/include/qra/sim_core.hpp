// Copyright 2026 The QRA Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense state-vector simulation core: Pauli strings, Pauli-sum Hamiltonians,
// gates, dense time evolution and measurement statistics.
//
// Basis convention: qubit q corresponds to bit q of the basis-state index.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qra/rng.hpp"

#ifndef NDEBUG
#define QRA_ASSERT_NORMALIZED(state) \
    assert(std::abs((state).norm_squared() - 1.0) < 1e-10 && "state lost normalization")
#else
#define QRA_ASSERT_NORMALIZED(state) ((void)0)
#endif

namespace qra {

using cplx = std::complex<double>;

inline constexpr int kMaxDenseQubits = 14;

enum class Axis : std::uint8_t { X, Y, Z };

inline char axis_char(Axis a) {
    switch (a) {
        case Axis::X: return 'X';
        case Axis::Y: return 'Y';
        case Axis::Z: return 'Z';
    }
    return '?';
}

struct PauliOp {
    int qubit = 0;
    Axis axis = Axis::Z;

    friend bool operator==(const PauliOp&, const PauliOp&) = default;
    friend auto operator<=>(const PauliOp&, const PauliOp&) = default;
};

/// Tensor product of 1 to 4 single-qubit Paulis on distinct qubits. Terms are
/// kept sorted by qubit index so equal operators compare equal.
class PauliString {
public:
    PauliString() = default;

    explicit PauliString(std::vector<PauliOp> ops) : ops_(std::move(ops)) {
        std::sort(ops_.begin(), ops_.end());
        if (ops_.empty() || ops_.size() > 4)
            throw std::invalid_argument("PauliString weight must be between 1 and 4");
        for (std::size_t i = 0; i < ops_.size(); ++i) {
            if (ops_[i].qubit < 0) throw std::out_of_range("negative qubit index");
            if (i > 0 && ops_[i].qubit == ops_[i - 1].qubit)
                throw std::invalid_argument("PauliString qubit indices must be distinct");
        }
    }

    static PauliString single(int qubit, Axis axis) { return PauliString({{qubit, axis}}); }
    static PauliString zz(int i, int j) { return PauliString({{i, Axis::Z}, {j, Axis::Z}}); }

    const std::vector<PauliOp>& ops() const noexcept { return ops_; }
    int weight() const noexcept { return static_cast<int>(ops_.size()); }
    int max_qubit() const noexcept { return ops_.empty() ? -1 : ops_.back().qubit; }

    void check_fits(int n_qubits) const {
        if (max_qubit() >= n_qubits)
            throw std::out_of_range("PauliString acts on qubit " + std::to_string(max_qubit()) +
                                    " outside a " + std::to_string(n_qubits) + "-qubit register");
    }

    /// Bits flipped by X or Y factors.
    std::uint64_t flip_mask() const noexcept {
        std::uint64_t m = 0;
        for (const auto& op : ops_)
            if (op.axis != Axis::Z) m |= (1ULL << op.qubit);
        return m;
    }
    /// Bits whose value contributes a sign (Y or Z factors).
    std::uint64_t sign_mask() const noexcept {
        std::uint64_t m = 0;
        for (const auto& op : ops_)
            if (op.axis != Axis::X) m |= (1ULL << op.qubit);
        return m;
    }
    int y_count() const noexcept {
        return static_cast<int>(std::count_if(ops_.begin(), ops_.end(),
                                              [](const PauliOp& o) { return o.axis == Axis::Y; }));
    }

    /// P|b> = phase(b) |b ^ flip_mask()>.
    cplx phase(std::uint64_t basis) const noexcept {
        static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        const int sign = std::popcount(basis & sign_mask()) & 1;
        // Y|0> = i|1>, Y|1> = -i|0>: i^{#Y} times (-1)^{bits under Y or Z}.
        cplx p = kIPow[y_count() & 3];
        return sign ? -p : p;
    }

    std::string label() const {
        std::string s;
        for (const auto& op : ops_) {
            s += axis_char(op.axis);
            s += std::to_string(op.qubit);
        }
        return s;
    }

    friend bool operator==(const PauliString&, const PauliString&) = default;
    friend auto operator<=>(const PauliString& a, const PauliString& b) { return a.ops_ <=> b.ops_; }

private:
    std::vector<PauliOp> ops_;
};

struct HamiltonianTerm {
    PauliString op;
    double coefficient = 0.0;
};

/// Real-weighted sum of Pauli strings. Coefficients lie in [-1, 1] and no
/// Pauli string appears twice.
class HamiltonianSpec {
public:
    HamiltonianSpec() = default;
    HamiltonianSpec(int n_qubits, std::vector<HamiltonianTerm> terms)
        : n_qubits_(n_qubits), terms_(std::move(terms)) {
        if (n_qubits_ < 1) throw std::invalid_argument("Hamiltonian needs at least one qubit");
        std::vector<const PauliString*> seen;
        seen.reserve(terms_.size());
        for (const auto& t : terms_) {
            t.op.check_fits(n_qubits_);
            if (!(t.coefficient >= -1.0 && t.coefficient <= 1.0))
                throw std::invalid_argument("Hamiltonian coefficient outside [-1, 1]");
            seen.push_back(&t.op);
        }
        std::sort(seen.begin(), seen.end(), [](auto* a, auto* b) { return *a < *b; });
        for (std::size_t i = 1; i < seen.size(); ++i)
            if (*seen[i] == *seen[i - 1])
                throw std::invalid_argument("duplicate Pauli term " + seen[i]->label());
    }

    int n_qubits() const noexcept { return n_qubits_; }
    const std::vector<HamiltonianTerm>& terms() const noexcept { return terms_; }

private:
    int n_qubits_ = 0;
    std::vector<HamiltonianTerm> terms_;
};

class StateVector {
public:
    StateVector() = default;

    /// |0...0> on n qubits.
    explicit StateVector(int n_qubits) : n_qubits_(n_qubits) {
        if (n_qubits < 1 || n_qubits > kMaxDenseQubits)
            throw std::invalid_argument("StateVector supports 1.." + std::to_string(kMaxDenseQubits) +
                                        " qubits");
        amps_ = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_qubits);
        amps_(0) = 1.0;
    }

    StateVector(int n_qubits, Eigen::VectorXcd amplitudes)
        : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
        if (n_qubits < 1 || n_qubits > kMaxDenseQubits)
            throw std::invalid_argument("StateVector qubit count out of range");
        if (amps_.size() != (Eigen::Index{1} << n_qubits))
            throw std::invalid_argument("amplitude count must equal 2^n_qubits");
    }

    int n_qubits() const noexcept { return n_qubits_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }
    const Eigen::VectorXcd& amplitudes() const noexcept { return amps_; }
    Eigen::VectorXcd& amplitudes() noexcept { return amps_; }
    cplx operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

    double norm_squared() const { return amps_.squaredNorm(); }
    void normalize() { amps_ /= amps_.norm(); }

    void check_qubit(int q) const {
        if (q < 0 || q >= n_qubits_)
            throw std::out_of_range("qubit " + std::to_string(q) + " outside a " +
                                    std::to_string(n_qubits_) + "-qubit register");
    }

private:
    int n_qubits_ = 0;
    Eigen::VectorXcd amps_;
};

using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

inline bool is_unitary(const Eigen::MatrixXcd& u, double tol) {
    if (u.rows() != u.cols()) return false;
    const Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff() <= tol;
}

inline Matrix2c ry_matrix(double angle) {
    const double c = std::cos(angle / 2), s = std::sin(angle / 2);
    Matrix2c m;
    m << c, -s, s, c;
    return m;
}

inline Matrix2c rz_matrix(double angle) {
    Matrix2c m;
    m << std::polar(1.0, -angle / 2), 0, 0, std::polar(1.0, angle / 2);
    return m;
}

inline Matrix4c cnot_matrix() {
    Matrix4c m = Matrix4c::Zero();
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}

inline void apply_single_qubit_unitary(StateVector& state, int qubit, const Matrix2c& u) {
    state.check_qubit(qubit);
    auto& a = state.amplitudes();
    const std::size_t bit = std::size_t{1} << qubit;
    const std::size_t n = state.dim();
    for (std::size_t i = 0; i < n; ++i) {
        if (i & bit) continue;
        const cplx a0 = a(i), a1 = a(i | bit);
        a(i) = u(0, 0) * a0 + u(0, 1) * a1;
        a(i | bit) = u(1, 0) * a0 + u(1, 1) * a1;
    }
    QRA_ASSERT_NORMALIZED(state);
}

/// exp(-i angle Y / 2) on one qubit.
inline void apply_ry(StateVector& state, int qubit, double angle) {
    apply_single_qubit_unitary(state, qubit, ry_matrix(angle));
}

/// exp(-i angle Z / 2) on one qubit.
inline void apply_rz(StateVector& state, int qubit, double angle) {
    state.check_qubit(qubit);
    auto& a = state.amplitudes();
    const std::size_t bit = std::size_t{1} << qubit;
    const cplx p0 = std::polar(1.0, -angle / 2), p1 = std::polar(1.0, angle / 2);
    for (std::size_t i = 0; i < state.dim(); ++i) a(i) *= (i & bit) ? p1 : p0;
    QRA_ASSERT_NORMALIZED(state);
}

inline void apply_x(StateVector& state, int qubit) {
    state.check_qubit(qubit);
    auto& a = state.amplitudes();
    const std::size_t bit = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < state.dim(); ++i)
        if (!(i & bit)) std::swap(a(i), a(i | bit));
}

inline void apply_cnot(StateVector& state, int control, int target) {
    state.check_qubit(control);
    state.check_qubit(target);
    if (control == target) throw std::invalid_argument("CNOT control equals target");
    auto& a = state.amplitudes();
    const std::size_t cb = std::size_t{1} << control, tb = std::size_t{1} << target;
    for (std::size_t i = 0; i < state.dim(); ++i)
        if ((i & cb) && !(i & tb)) std::swap(a(i), a(i | tb));
    QRA_ASSERT_NORMALIZED(state);
}

/// Applies a 4x4 unitary on (qubit_a, qubit_b). Local index = 2*bit_a + bit_b,
/// so cnot_matrix() with qubit_a as control reproduces apply_cnot.
inline void apply_two_qubit_unitary(StateVector& state, int qubit_a, int qubit_b, const Matrix4c& u) {
    state.check_qubit(qubit_a);
    state.check_qubit(qubit_b);
    if (qubit_a == qubit_b) throw std::invalid_argument("two-qubit gate needs distinct qubits");
    if (!is_unitary(u, 1e-10)) throw std::invalid_argument("two-qubit gate matrix is not unitary");
    auto& a = state.amplitudes();
    const std::size_t ba = std::size_t{1} << qubit_a, bb = std::size_t{1} << qubit_b;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if (i & (ba | bb)) continue;
        const std::size_t idx[4] = {i, i | bb, i | ba, i | ba | bb};
        Eigen::Vector4cd v(a(idx[0]), a(idx[1]), a(idx[2]), a(idx[3]));
        const Eigen::Vector4cd w = u * v;
        for (int k = 0; k < 4; ++k) a(idx[k]) = w(k);
    }
    QRA_ASSERT_NORMALIZED(state);
}

inline void apply_unitary(StateVector& state, const Eigen::MatrixXcd& u) {
    if (u.rows() != static_cast<Eigen::Index>(state.dim()) || u.cols() != u.rows())
        throw std::invalid_argument("unitary dimension does not match state");
    Eigen::VectorXcd next = u * state.amplitudes();
    state.amplitudes() = std::move(next);
    QRA_ASSERT_NORMALIZED(state);
}

/// Dense 2^n x 2^n matrix of a Pauli-sum Hamiltonian.
inline Eigen::MatrixXcd dense_hamiltonian(const HamiltonianSpec& h) {
    if (h.n_qubits() > kMaxDenseQubits)
        throw std::length_error("dense Hamiltonian limited to " + std::to_string(kMaxDenseQubits) +
                                " qubits");
    const std::size_t dim = std::size_t{1} << h.n_qubits();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& t : h.terms()) {
        const auto flip = t.op.flip_mask();
        for (std::size_t b = 0; b < dim; ++b) m(b ^ flip, b) += t.coefficient * t.op.phase(b);
    }
    return m;
}

/// exp(-i H dt) by scaling-and-squaring Pade approximation on the dense matrix.
inline Eigen::MatrixXcd build_evolution_unitary(const HamiltonianSpec& h, double dt) {
    if (h.n_qubits() > kMaxDenseQubits)
        throw std::length_error("evolution unitary limited to " + std::to_string(kMaxDenseQubits) +
                                " qubits");
    const Eigen::MatrixXcd generator = cplx(0.0, -dt) * dense_hamiltonian(h);
    return generator.exp();
}

/// <psi|P|psi>; real because P is Hermitian.
inline double expectation(const StateVector& state, const PauliString& p) {
    p.check_fits(state.n_qubits());
    const auto& a = state.amplitudes();
    const auto flip = p.flip_mask();
    cplx acc = 0.0;
    for (std::size_t b = 0; b < state.dim(); ++b) acc += std::conj(a(b ^ flip)) * p.phase(b) * a(b);
    return acc.real();
}

inline std::vector<double> born_probabilities(const StateVector& state) {
    std::vector<double> p(state.dim());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(state[i]);
    return p;
}

/// Marginalizes one qubit out of a basis-state distribution:
/// P_red(phi) = P(phi, 0) + P(phi, 1), with the remaining bits kept in order.
inline std::vector<double> trace_out_ancilla(std::span<const double> probs, int ancilla_index) {
    const std::size_t n = probs.size();
    if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("probability vector length must be 2^n");
    if (ancilla_index < 0 || (std::size_t{1} << ancilla_index) >= n)
        throw std::out_of_range("ancilla index outside register");
    const std::size_t bit = std::size_t{1} << ancilla_index;
    const std::size_t low = bit - 1;
    std::vector<double> out(n / 2, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t reduced = (i & low) | ((i >> 1) & ~low);
        out[reduced] += probs[i];
    }
    return out;
}

/// Haar-distributed pure state: normalized vector of i.i.d. complex Gaussians.
inline StateVector haar_random_state(int n_qubits, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXcd v(Eigen::Index{1} << n_qubits);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double re = g(rng);
        const double im = g(rng);
        v(i) = cplx(re, im);
    }
    v /= v.norm();
    return StateVector(n_qubits, std::move(v));
}

}  // namespace qra
