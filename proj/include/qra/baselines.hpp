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

// Comparison feature extractors: Henon-map and delay-embedding preprocessing
// feeding a fixed layered circuit, a tree tensor network circuit, and a
// classical two-layer network trained by SPSA.
//
// The circuit baselines share the reservoir register layout (data qubits
// 0..Nq-1, ancilla Nq) and satisfy FeatureExtractor, so they drop into
// solve_qra unchanged.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qra/features.hpp"
#include "qra/noise.hpp"
#include "qra/protocol.hpp"
#include "qra/rng.hpp"
#include "qra/sim_core.hpp"

namespace qra {

enum class BaselineKind { Henon, Delay, Nn, Ttn };

inline std::string to_string(BaselineKind k) {
    switch (k) {
        case BaselineKind::Henon: return "henon";
        case BaselineKind::Delay: return "delay";
        case BaselineKind::Nn: return "nn";
        case BaselineKind::Ttn: return "ttn";
    }
    return "?";
}

/// How a delay-embedding vector drives the circuit input.
enum class DelayEncoding { Mean, FirstElement, PerQubitLayer };

struct SpsaSettings {
    double c = 0.1;
    double a = 0.01;
    int iters = 100;
};

/// Depolarizing rates for the baseline circuits (distinct from the
/// reservoir's p_dep).
struct BaselineNoiseRates {
    double p_1q = 0.01;
    double p_2q = 0.02;
};

struct BaselineSpec {
    BaselineKind kind = BaselineKind::Henon;
    int n_data_qubits = 10;
    Vec circuit_params;
    double henon_a = 1.4;
    double henon_b = 0.3;
    int n_map = 3;
    int tau = 1;
    int d_e = 11;
    DelayEncoding delay_encoding = DelayEncoding::Mean;
    Vec nn_params;
    SpsaSettings spsa;
    BaselineNoiseRates rates;
    bool nn_hybrid = false;

    int n_qubits() const noexcept { return n_data_qubits + 1; }

    std::size_t expected_circuit_params() const {
        switch (kind) {
            case BaselineKind::Henon:
            case BaselineKind::Delay: return static_cast<std::size_t>(3 * 2 * n_qubits());
            case BaselineKind::Ttn: return 240;
            case BaselineKind::Nn: return 0;
        }
        return 0;
    }

    void validate() const {
        if (kind == BaselineKind::Henon) {
            if (henon_a < 1.2 || henon_a > 1.4) throw std::invalid_argument("henon_a must lie in [1.2, 1.4]");
            if (henon_b < 0.25 || henon_b > 0.33) throw std::invalid_argument("henon_b must lie in [0.25, 0.33]");
            if (n_map < 1) throw std::invalid_argument("n_map must be at least 1");
        }
        if (kind == BaselineKind::Delay && (tau < 1 || d_e < 1))
            throw std::invalid_argument("delay embedding needs tau >= 1 and d_e >= 1");
        if (kind != BaselineKind::Nn && circuit_params.size() != expected_circuit_params())
            throw std::invalid_argument("baseline circuit expects " + std::to_string(expected_circuit_params()) +
                                        " parameters, got " + std::to_string(circuit_params.size()));
    }
};

/// Draws per-trial baseline parameters: circuit angles from U(-pi, pi), Henon
/// (a, b) uniformly inside their chaotic ranges.
inline BaselineSpec make_baseline_spec(BaselineKind kind, int n_data_qubits, Rng& rng) {
    BaselineSpec s;
    s.kind = kind;
    s.n_data_qubits = n_data_qubits;
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    s.circuit_params.resize(s.expected_circuit_params());
    for (auto& p : s.circuit_params) p = angle(rng);
    if (kind == BaselineKind::Henon) {
        s.henon_a = std::uniform_real_distribution<double>(1.2, 1.4)(rng);
        s.henon_b = std::uniform_real_distribution<double>(0.25, 0.33)(rng);
    }
    return s;
}

/// Iterates x' = 1 - a x^2 + y, y' = b x n_map times from (u_t, 0) for each
/// element and returns the final x.
inline Vec henon_preprocess(std::span<const double> u, double a, double b, int n_map) {
    if (n_map < 1) throw std::invalid_argument("n_map must be at least 1");
    Vec out(u.size());
    for (std::size_t t = 0; t < u.size(); ++t) {
        double x = u[t], y = 0.0;
        for (int k = 0; k < n_map; ++k) {
            const double xn = 1.0 - a * x * x + y;
            y = b * x;
            x = xn;
        }
        out[t] = x;
    }
    return out;
}

/// v(t) = [u(t), u(t - tau), ..., u(t - (d_e - 1) tau)], zero before the start.
inline std::vector<Vec> delay_embed(std::span<const double> u, int tau = 1, int d_e = 11) {
    if (tau < 1 || d_e < 1) throw std::invalid_argument("delay embedding needs tau >= 1 and d_e >= 1");
    std::vector<Vec> out(u.size(), Vec(static_cast<std::size_t>(d_e), 0.0));
    for (std::size_t t = 0; t < u.size(); ++t)
        for (int k = 0; k < d_e; ++k) {
            const long idx = static_cast<long>(t) - static_cast<long>(k) * tau;
            if (idx >= 0) out[t][static_cast<std::size_t>(k)] = u[static_cast<std::size_t>(idx)];
        }
    return out;
}

/// General single-qubit rotation Rz(c) Ry(b) Rz(a); identity at zero.
inline Matrix2c euler_rotation(double a, double b, double c) { return rz_matrix(c) * ry_matrix(b) * rz_matrix(a); }

/// 24-parameter two-qubit block: four layers of paired Euler rotations with a
/// CNOT (first qubit controls) between consecutive layers.
inline Matrix4c ttn_block_unitary(std::span<const double> p) {
    if (p.size() != 24) throw std::invalid_argument("TTN block takes 24 parameters");
    Matrix4c u = Matrix4c::Identity();
    for (int layer = 0; layer < 4; ++layer) {
        const double* q = p.data() + 6 * layer;
        const Matrix2c ra = euler_rotation(q[0], q[1], q[2]);
        const Matrix2c rb = euler_rotation(q[3], q[4], q[5]);
        // Local index 2*bit_a + bit_b => kron(ra, rb).
        Matrix4c k;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int r = 0; r < 2; ++r)
                    for (int s = 0; s < 2; ++s) k(2 * i + r, 2 * j + s) = ra(i, j) * rb(r, s);
        u = k * u;
        if (layer < 3) u = cnot_matrix() * u;
    }
    return u;
}

/// Binary-tree pairing of 11 qubits: 5 leaves, 3, 1 and a root block.
inline std::vector<std::pair<int, int>> ttn_layout_11() {
    return {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}, {1, 3}, {5, 7}, {9, 10}, {3, 7}, {7, 10}};
}

namespace detail {

/// Exact X/Y/Z on every data qubit followed by gate-counted damping, shot
/// sampling and the bias; 3 Nq + 1 entries.
template <typename Row>
void measure_single_qubit_row(const StateVector& psi, int nq, std::span<const double> damping, ShotBudget shots,
                              Rng& rng, Row&& row) {
    Eigen::Index col = 0;
    for (int q = 0; q < nq; ++q) {
        const double f[1] = {damping[static_cast<std::size_t>(q)]};
        for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
            const double exact = std::clamp(expectation(psi, PauliString::single(q, ax)), -1.0, 1.0);
            row(col++) = noisy_expectation(exact, 1, f, shots, rng);
        }
    }
    row(col) = 1.0;
}

inline std::vector<std::string> single_qubit_labels(int nq) {
    std::vector<std::string> labels;
    for (int q = 0; q < nq; ++q)
        for (Axis a : {Axis::X, Axis::Y, Axis::Z}) labels.push_back(PauliString::single(q, a).label());
    labels.emplace_back("1");
    return labels;
}

/// Per-qubit damping after t + 1 steps of a circuit with the given per-step
/// gate counts.
inline std::vector<double> gate_count_damping(const std::vector<int>& n1q, const std::vector<int>& n2q,
                                              const BaselineNoiseRates& rates, bool enabled, int t) {
    std::vector<double> a(n1q.size(), 1.0);
    if (!enabled) return a;
    const double l1 = damping_factor(1, rates.p_1q), l2 = damping_factor(2, rates.p_2q);
    for (std::size_t q = 0; q < a.size(); ++q)
        a[q] = std::pow(std::pow(l1, n1q[q]) * std::pow(l2, n2q[q]), t + 1);
    return a;
}

}  // namespace detail

/// [RY layer -> CNOT ladder -> RZ layer] x 3 with the preprocessed input
/// applied as RZ on the ancilla before each step. The register starts in a
/// fixed Haar state and carries over between steps. Henon and
/// delay-embedding baselines share this circuit.
class LayeredCircuitExtractor {
public:
    LayeredCircuitExtractor(BaselineSpec spec, StateVector initial_state)
        : spec_(std::move(spec)), initial_(std::move(initial_state)) {
        if (spec_.kind != BaselineKind::Henon && spec_.kind != BaselineKind::Delay)
            throw std::invalid_argument("layered circuit serves the henon and delay baselines");
        spec_.validate();
        if (initial_.n_qubits() != spec_.n_qubits()) throw std::invalid_argument("initial state size mismatch");
    }

    static LayeredCircuitExtractor sample(BaselineKind kind, int n_data_qubits, Rng& rng) {
        auto spec = make_baseline_spec(kind, n_data_qubits, rng);
        auto psi = haar_random_state(n_data_qubits + 1, rng);
        return LayeredCircuitExtractor(std::move(spec), std::move(psi));
    }

    const BaselineSpec& spec() const noexcept { return spec_; }
    const StateVector& initial_state() const noexcept { return initial_; }
    int n_data_qubits() const noexcept { return spec_.n_data_qubits; }
    int feature_dim(const NoiseConfig&) const noexcept { return 3 * spec_.n_data_qubits + 1; }

    /// One timestep in place. A single value is the RZ angle on the ancilla;
    /// a vector drives one RZ per qubit.
    void step(StateVector& psi, std::span<const double> v) const {
        const int n = spec_.n_qubits();
        if (v.size() == 1) {
            apply_rz(psi, spec_.n_data_qubits, v[0]);
        } else {
            for (int q = 0; q < n && q < static_cast<int>(v.size()); ++q)
                apply_rz(psi, q, v[static_cast<std::size_t>(q)]);
        }
        const auto& p = spec_.circuit_params;
        for (int layer = 0; layer < 3; ++layer) {
            const std::size_t base = static_cast<std::size_t>(layer * 2 * n);
            for (int q = 0; q < n; ++q) apply_ry(psi, q, p[base + static_cast<std::size_t>(q)]);
            for (int q = 0; q + 1 < n; ++q) apply_cnot(psi, q, q + 1);
            for (int q = 0; q < n; ++q) apply_rz(psi, q, p[base + static_cast<std::size_t>(n + q)]);
        }
    }

    /// Per-step gate counts per qubit: (single-qubit, two-qubit).
    std::pair<std::vector<int>, std::vector<int>> gate_counts(bool per_qubit_input) const {
        const int n = spec_.n_qubits();
        std::vector<int> n1q(static_cast<std::size_t>(n), 6), n2q(static_cast<std::size_t>(n), 0);
        if (per_qubit_input) {
            for (auto& c : n1q) ++c;
        } else {
            ++n1q[static_cast<std::size_t>(spec_.n_data_qubits)];
        }
        for (int q = 0; q + 1 < n; ++q) {
            n2q[static_cast<std::size_t>(q)] += 3;
            n2q[static_cast<std::size_t>(q + 1)] += 3;
        }
        return {n1q, n2q};
    }

    /// Per-timestep circuit inputs after preprocessing.
    std::vector<Vec> circuit_inputs(std::span<const double> inputs) const {
        std::vector<Vec> out;
        if (spec_.kind == BaselineKind::Henon) {
            for (double x : henon_preprocess(inputs, spec_.henon_a, spec_.henon_b, spec_.n_map)) out.push_back({x});
            return out;
        }
        for (auto& v : delay_embed(inputs, spec_.tau, spec_.d_e)) {
            switch (spec_.delay_encoding) {
                case DelayEncoding::Mean: {
                    double s = 0.0;
                    for (double e : v) s += e;
                    out.push_back({s / static_cast<double>(v.size())});
                    break;
                }
                case DelayEncoding::FirstElement: out.push_back({v.front()}); break;
                case DelayEncoding::PerQubitLayer: out.push_back(std::move(v)); break;
            }
        }
        return out;
    }

    FeatureMatrix extract(std::span<const double> inputs, const NoiseConfig& noise, ShotBudget shots, Rng& rng,
                          MeasurementTally* tally = nullptr) const {
        if (noise.mode != MeasurementMode::Pauli) throw std::invalid_argument("baselines measure Pauli features only");
        FeatureMatrix fm;
        fm.values.resize(static_cast<Eigen::Index>(inputs.size()), feature_dim(noise));
        fm.column_labels = detail::single_qubit_labels(spec_.n_data_qubits);
        const bool per_qubit = spec_.kind == BaselineKind::Delay && spec_.delay_encoding == DelayEncoding::PerQubitLayer;
        const auto [n1q, n2q] = gate_counts(per_qubit);
        StateVector psi = initial_;
        const auto v = circuit_inputs(inputs);
        for (std::size_t t = 0; t < v.size(); ++t) {
            step(psi, v[t]);
            QRA_ASSERT_NORMALIZED(psi);
            const auto a = detail::gate_count_damping(n1q, n2q, spec_.rates, noise.p_dep > 0.0, static_cast<int>(t));
            detail::measure_single_qubit_row(psi, spec_.n_data_qubits, a, shots, rng,
                                             fm.values.row(static_cast<Eigen::Index>(t)));
        }
        if (tally) tally->record(shots, static_cast<std::size_t>(fm.values.size()));
        return fm;
    }

private:
    BaselineSpec spec_;
    StateVector initial_;
};

/// Ten 24-parameter two-qubit blocks in a binary tree after RZ(u_t) on the
/// ancilla; the register carries over between steps.
class TtnExtractor {
public:
    TtnExtractor(BaselineSpec spec, StateVector initial_state)
        : spec_(std::move(spec)), initial_(std::move(initial_state)) {
        if (spec_.kind != BaselineKind::Ttn) throw std::invalid_argument("TtnExtractor needs a ttn spec");
        if (spec_.n_data_qubits != 10) throw std::invalid_argument("TTN layout is defined for 10 data qubits");
        spec_.validate();
        if (initial_.n_qubits() != spec_.n_qubits()) throw std::invalid_argument("initial state size mismatch");
        for (std::size_t b = 0; b < 10; ++b)
            blocks_.push_back(ttn_block_unitary(std::span<const double>(spec_.circuit_params).subspan(24 * b, 24)));
    }

    static TtnExtractor sample(Rng& rng) {
        auto spec = make_baseline_spec(BaselineKind::Ttn, 10, rng);
        auto psi = haar_random_state(11, rng);
        return TtnExtractor(std::move(spec), std::move(psi));
    }

    /// Replaces the parameterized blocks, e.g. with identities for checks.
    void override_blocks(std::vector<Matrix4c> blocks) {
        if (blocks.size() != 10) throw std::invalid_argument("TTN needs 10 blocks");
        blocks_ = std::move(blocks);
    }

    const BaselineSpec& spec() const noexcept { return spec_; }
    const StateVector& initial_state() const noexcept { return initial_; }
    int n_data_qubits() const noexcept { return spec_.n_data_qubits; }
    int feature_dim(const NoiseConfig&) const noexcept { return 3 * spec_.n_data_qubits + 1; }

    void step(StateVector& psi, double input) const {
        apply_rz(psi, spec_.n_data_qubits, input);
        const auto layout = ttn_layout_11();
        for (std::size_t b = 0; b < layout.size(); ++b)
            apply_two_qubit_unitary(psi, layout[b].first, layout[b].second, blocks_[b]);
    }

    FeatureMatrix extract(std::span<const double> inputs, const NoiseConfig& noise, ShotBudget shots, Rng& rng,
                          MeasurementTally* tally = nullptr) const {
        if (noise.mode != MeasurementMode::Pauli) throw std::invalid_argument("baselines measure Pauli features only");
        const int n = spec_.n_qubits();
        std::vector<int> n1q(static_cast<std::size_t>(n), 0), n2q(static_cast<std::size_t>(n), 0);
        ++n1q[static_cast<std::size_t>(spec_.n_data_qubits)];
        for (auto [qa, qb] : ttn_layout_11()) {
            // Each block: 4 Euler rotations and 3 CNOTs per qubit.
            n1q[static_cast<std::size_t>(qa)] += 4;
            n1q[static_cast<std::size_t>(qb)] += 4;
            n2q[static_cast<std::size_t>(qa)] += 3;
            n2q[static_cast<std::size_t>(qb)] += 3;
        }
        FeatureMatrix fm;
        fm.values.resize(static_cast<Eigen::Index>(inputs.size()), feature_dim(noise));
        fm.column_labels = detail::single_qubit_labels(spec_.n_data_qubits);
        StateVector psi = initial_;
        for (std::size_t t = 0; t < inputs.size(); ++t) {
            step(psi, inputs[t]);
            QRA_ASSERT_NORMALIZED(psi);
            const auto a = detail::gate_count_damping(n1q, n2q, spec_.rates, noise.p_dep > 0.0, static_cast<int>(t));
            detail::measure_single_qubit_row(psi, spec_.n_data_qubits, a, shots, rng,
                                             fm.values.row(static_cast<Eigen::Index>(t)));
        }
        if (tally) tally->record(shots, static_cast<std::size_t>(fm.values.size()));
        return fm;
    }

private:
    BaselineSpec spec_;
    StateVector initial_;
    std::vector<Matrix4c> blocks_;
};

// ---------------------------------------------------------------------------
// Classical network baseline

inline constexpr int kNnHidden = 11;

/// Parameter count of an in -> hidden -> out tanh network.
inline std::size_t nn_param_count(int in, int out, int hidden = kNnHidden) {
    return static_cast<std::size_t>(hidden * (in + 1) + out * (hidden + 1));
}

/// Two-layer network: h = tanh(W1 x + b1), y = W2 h + b2. Parameters are laid
/// out as W1 (row-major), b1, W2 (row-major), b2.
inline Vec nn_forward(std::span<const double> x, std::span<const double> params, int out_dim,
                      int hidden = kNnHidden) {
    const int in = static_cast<int>(x.size());
    if (params.size() != nn_param_count(in, out_dim, hidden))
        throw std::invalid_argument("network parameter count mismatch");
    const double* w1 = params.data();
    const double* b1 = w1 + hidden * in;
    const double* w2 = b1 + hidden;
    const double* b2 = w2 + out_dim * hidden;
    Vec h(static_cast<std::size_t>(hidden));
    for (int j = 0; j < hidden; ++j) {
        double s = b1[j];
        for (int i = 0; i < in; ++i) s += w1[j * in + i] * x[static_cast<std::size_t>(i)];
        h[static_cast<std::size_t>(j)] = std::tanh(s);
    }
    Vec y(static_cast<std::size_t>(out_dim));
    for (int k = 0; k < out_dim; ++k) {
        double s = b2[k];
        for (int j = 0; j < hidden; ++j) s += w2[k * hidden + j] * h[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(k)] = s;
    }
    return y;
}

struct SpsaResult {
    Vec params;
    std::vector<double> loss_history;  // loss at the iterate after each update
};

/// Simultaneous-perturbation gradient estimate for one Rademacher draw.
inline Vec spsa_gradient(const std::function<double(std::span<const double>)>& loss, std::span<const double> theta,
                         double c, Rng& rng) {
    std::bernoulli_distribution coin(0.5);
    Vec delta(theta.size()), plus(theta.begin(), theta.end()), minus(theta.begin(), theta.end());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        delta[i] = coin(rng) ? 1.0 : -1.0;
        plus[i] += c * delta[i];
        minus[i] -= c * delta[i];
    }
    const double lp = loss(plus), lm = loss(minus);
    if (!std::isfinite(lp) || !std::isfinite(lm)) throw std::runtime_error("SPSA: non-finite loss at perturbation");
    Vec g(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) g[i] = (lp - lm) / (2.0 * c) / delta[i];
    return g;
}

inline SpsaResult spsa_optimize(const std::function<double(std::span<const double>)>& loss, Vec params,
                                const SpsaSettings& s, Rng& rng) {
    SpsaResult r;
    for (int it = 0; it < s.iters; ++it) {
        const Vec g = spsa_gradient(loss, params, s.c, rng);
        for (std::size_t i = 0; i < params.size(); ++i) params[i] -= s.a * g[i];
        const double l = loss(params);
        if (!std::isfinite(l))
            throw std::runtime_error("SPSA: non-finite loss after iteration " + std::to_string(it + 1));
        r.loss_history.push_back(l);
    }
    r.params = std::move(params);
    return r;
}

struct NnProtocolResult {
    double mse1 = 0.0, mse2 = 0.0, loss = 0.0;
    Vec params;
    std::vector<double> loss_history;
};

/// Runs the cross-key protocol with two networks standing in for R_a and R_b.
/// Direct mode maps the whole encoded sequence (Nc -> 11 -> Nc). Hybrid mode
/// first passes every element through the layered circuit and applies a
/// shared 3Nq -> 11 -> 1 network per timestep.
class NnProtocol {
public:
    NnProtocol(const SecretData& c, const KeySet& keys, int n_data_qubits, const BaselineSpec& spec,
               const LayeredCircuitExtractor* hybrid_features = nullptr)
        : c_(c), keys_(keys), nq_(n_data_qubits), spec_(spec), hybrid_(hybrid_features) {
        if (spec_.nn_hybrid && !hybrid_) throw std::invalid_argument("hybrid network needs a circuit extractor");
    }

    std::size_t params_per_net() const {
        const int nc = static_cast<int>(c_.values.size());
        return spec_.nn_hybrid ? nn_param_count(3 * nq_, 1) : nn_param_count(nc, nc);
    }

    Vec apply_net(std::span<const double> x, std::span<const double> p) const {
        const int nc = static_cast<int>(x.size());
        if (!spec_.nn_hybrid) return nn_forward(x, p, nc);
        NoiseConfig ideal;
        Rng unused(0);
        const auto fm = hybrid_->extract(x, ideal, ShotBudget::infinite(), unused);
        Vec out(x.size());
        for (int t = 0; t < nc; ++t) {
            Vec row(static_cast<std::size_t>(3 * nq_));
            for (int k = 0; k < 3 * nq_; ++k) row[static_cast<std::size_t>(k)] = fm.values(t, k);
            out[static_cast<std::size_t>(t)] = nn_forward(row, p, 1)[0];
        }
        return out;
    }

    std::array<double, 3> evaluate(std::span<const double> params) const {
        const std::size_t n = params_per_net();
        const auto pa = params.subspan(0, n), pb = params.subspan(n, n);
        const Vec gamma = apply_net(encode(keys_.A, c_.values, nq_), pa);
        const Vec c1 = apply_net(encode(keys_.beta, gamma, nq_), pb);
        const Vec gamma_p = apply_net(encode(keys_.B, c_.values, nq_), pb);
        const Vec c2 = apply_net(encode(keys_.alpha, gamma_p, nq_), pa);
        const double m1 = mse(c_.values, c1), m2 = mse(c_.values, c2);
        return {m1, m2, 0.5 * (m1 + m2)};
    }

    NnProtocolResult run(Rng& rng, double init_scale = 0.1) const {
        Vec theta(2 * params_per_net());
        std::uniform_real_distribution<double> init(-init_scale, init_scale);
        for (auto& p : theta) p = init(rng);
        auto loss = [this](std::span<const double> p) { return evaluate(p)[2]; };
        auto opt = spsa_optimize(loss, std::move(theta), spec_.spsa, rng);
        NnProtocolResult r;
        const auto m = evaluate(opt.params);
        r.mse1 = m[0];
        r.mse2 = m[1];
        r.loss = m[2];
        r.params = std::move(opt.params);
        r.loss_history = std::move(opt.loss_history);
        return r;
    }

private:
    const SecretData& c_;
    const KeySet& keys_;
    int nq_;
    BaselineSpec spec_;
    const LayeredCircuitExtractor* hybrid_;
};

}  // namespace qra
