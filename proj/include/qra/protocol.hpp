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

// Cross-key encode/decode protocol over two feature extractors and the
// alternating solver that fits its four readouts.
//
//   path 1: C --F(A)--> R_a --> gamma  --G(beta)-->  R_b --> C
//   path 2: C --F(B)--> R_b --> gamma' --G(alpha)--> R_a --> C

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <concepts>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qra/features.hpp"
#include "qra/noise.hpp"
#include "qra/readout.hpp"
#include "qra/rng.hpp"

namespace qra {

/// Anything that maps an input sequence to an Nc x d feature matrix.
template <typename E>
concept FeatureExtractor = requires(const E& e, std::span<const double> u, const NoiseConfig& n, ShotBudget s,
                                    Rng& r, MeasurementTally* tally) {
    { e.n_data_qubits() } -> std::convertible_to<int>;
    { e.feature_dim(n) } -> std::convertible_to<int>;
    { e.extract(u, n, s, r, tally) } -> std::same_as<FeatureMatrix>;
};

using Vec = std::vector<double>;

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}
inline Vec to_vec(const Eigen::VectorXd& v) { return Vec(v.data(), v.data() + v.size()); }

struct KeySet {
    Vec A, B, alpha, beta;
};

struct SecretData {
    Vec values;
};

inline std::size_t key_length(int nc, int nq) { return static_cast<std::size_t>(nc + nq + 1); }

/// out_i = tanh(key_i * x_i + key_{Nc + (i mod (Nq+1))}); serves both as the
/// encoder F and the decoder G.
inline Vec encode(std::span<const double> key, std::span<const double> data, int n_data_qubits) {
    const std::size_t nc = data.size();
    if (key.size() < nc + static_cast<std::size_t>(n_data_qubits) + 1)
        throw std::invalid_argument("key shorter than Nc + Nq + 1");
    Vec out(nc);
    const std::size_t period = static_cast<std::size_t>(n_data_qubits) + 1;
    for (std::size_t i = 0; i < nc; ++i) out[i] = std::tanh(key[i] * data[i] + key[nc + (i % period)]);
    return out;
}

inline KeySet generate_keys(Rng& rng, int nc, int nq) {
    const auto len = key_length(nc, nq);
    auto draw = [&] {
        Vec k(len);
        for (auto& x : k) x = uniform_open(rng, -1.0, 1.0);
        return k;
    };
    KeySet keys;
    keys.A = draw();
    keys.B = draw();
    keys.alpha = draw();
    keys.beta = draw();
    return keys;
}

inline SecretData generate_data(Rng& rng, int nc) {
    SecretData c;
    c.values.resize(static_cast<std::size_t>(nc));
    for (auto& x : c.values) x = uniform_open(rng, -0.5, 0.5);
    return c;
}

struct Ciphertexts {
    Vec gamma, gamma_prime;
};

inline Ciphertexts init_ciphertexts(Rng& rng, int nc) {
    Ciphertexts c;
    c.gamma.resize(static_cast<std::size_t>(nc));
    c.gamma_prime.resize(static_cast<std::size_t>(nc));
    for (auto& x : c.gamma) x = uniform_open(rng, -0.3, 0.3);
    for (auto& x : c.gamma_prime) x = uniform_open(rng, -0.3, 0.3);
    return c;
}

struct SolverOptions {
    int n_iter = 30;
    double loss_threshold = 1e-12;
    double lambda = kDefaultTikhonovLambda;
};

struct IterationRecord {
    int iteration = 0;  // 1-based
    double mse1 = 0.0;
    double mse2 = 0.0;
    double loss = 0.0;
};

struct ExtractionCounts {
    int enc_a = 0, enc_b = 0, dec_a = 0, dec_b = 0;
};

struct ProtocolState {
    Vec gamma, gamma_prime;
    ReadoutWeights w_a_enc, w_b_enc, w_a_dec, w_b_dec;
    std::vector<IterationRecord> loss_history;
    std::optional<int> converged_at;

    FeatureMatrix v_a_enc, v_b_enc;
    ExtractionCounts counts;
    MeasurementTally enc_tally, dec_tally;

    double final_loss() const { return loss_history.empty() ? std::nan("") : loss_history.back().loss; }
};

namespace detail {

struct HalfStep {
    Vec cipher;
    ReadoutWeights w_enc, w_dec;
    double mse = 0.0;
};

/// Encryption refit on a fixed feature matrix followed by decryption on the
/// other reservoir: steps 5-8 (or 9-12) of one solver iteration.
template <FeatureExtractor E>
HalfStep half_step(const FeatureMatrix& v_enc, std::span<const double> cipher, const E& dec_reservoir,
                   std::span<const double> dec_key, const Eigen::VectorXd& c, const NoiseConfig& noise,
                   const SolverOptions& opt, Rng& rng, MeasurementTally* tally) {
    HalfStep h;
    h.w_enc = tikhonov_solve(v_enc, to_eigen(cipher), opt.lambda);
    h.cipher = to_vec(predict(v_enc, h.w_enc));
    const Vec dec_in = encode(dec_key, h.cipher, dec_reservoir.n_data_qubits());
    const FeatureMatrix v_dec = dec_reservoir.extract(dec_in, noise, noise.shots_dec, rng, tally);
    h.w_dec = tikhonov_solve(v_dec, c, opt.lambda);
    h.mse = mse(c, predict(v_dec, h.w_dec));
    return h;
}

template <FeatureExtractor E>
void check_protocol_inputs(const E& res_a, const E& res_b, const SecretData& c, const KeySet& keys,
                           const NoiseConfig& noise, const SolverOptions& opt) {
    if (opt.n_iter < 1) throw std::invalid_argument("n_iter must be at least 1");
    const int nc = static_cast<int>(c.values.size());
    if (nc < 1) throw std::invalid_argument("secret data is empty");
    if (res_a.n_data_qubits() != res_b.n_data_qubits())
        throw std::invalid_argument("both reservoirs must have the same data-qubit count");
    if (nc > res_a.feature_dim(noise) || nc > res_b.feature_dim(noise))
        throw std::invalid_argument("data length exceeds feature dimension");
    const auto need = key_length(nc, res_a.n_data_qubits());
    for (const Vec* k : {&keys.A, &keys.B, &keys.alpha, &keys.beta})
        if (k->size() < need) throw std::invalid_argument("key shorter than Nc + Nq + 1");
}

}  // namespace detail

/// Alternating solver for the four-equation system. Encryption features are
/// extracted once at shots_enc; each iteration re-extracts both decryption
/// matrices at shots_dec. Stops early once the mean path MSE drops below
/// opt.loss_threshold.
template <FeatureExtractor E>
ProtocolState solve_qra(const E& res_a, const E& res_b, const SecretData& c, const KeySet& keys,
                        const Ciphertexts& initial, const NoiseConfig& noise, const SolverOptions& opt, Rng& rng) {
    noise.validate();
    detail::check_protocol_inputs(res_a, res_b, c, keys, noise, opt);
    const int nq = res_a.n_data_qubits();
    if (initial.gamma.size() != c.values.size() || initial.gamma_prime.size() != c.values.size())
        throw std::invalid_argument("initial ciphertexts must have length Nc");

    ProtocolState st;
    st.gamma = initial.gamma;
    st.gamma_prime = initial.gamma_prime;
    const Eigen::VectorXd cv = to_eigen(c.values);

    st.v_a_enc = res_a.extract(encode(keys.A, c.values, nq), noise, noise.shots_enc, rng, &st.enc_tally);
    ++st.counts.enc_a;
    st.v_b_enc = res_b.extract(encode(keys.B, c.values, nq), noise, noise.shots_enc, rng, &st.enc_tally);
    ++st.counts.enc_b;

    for (int it = 1; it <= opt.n_iter; ++it) {
        auto p1 = detail::half_step(st.v_a_enc, st.gamma, res_b, keys.beta, cv, noise, opt, rng, &st.dec_tally);
        ++st.counts.dec_b;
        auto p2 =
            detail::half_step(st.v_b_enc, st.gamma_prime, res_a, keys.alpha, cv, noise, opt, rng, &st.dec_tally);
        ++st.counts.dec_a;

        st.gamma = std::move(p1.cipher);
        st.w_a_enc = std::move(p1.w_enc);
        st.w_b_dec = std::move(p1.w_dec);
        st.gamma_prime = std::move(p2.cipher);
        st.w_b_enc = std::move(p2.w_enc);
        st.w_a_dec = std::move(p2.w_dec);

        const double loss = 0.5 * (p1.mse + p2.mse);
        st.loss_history.push_back({it, p1.mse, p2.mse, loss});
        if (loss < opt.loss_threshold) {
            st.converged_at = it;
            break;
        }
    }
    return st;
}

/// Convenience overload drawing the initial ciphertexts from rng first.
template <FeatureExtractor E>
ProtocolState solve_qra(const E& res_a, const E& res_b, const SecretData& c, const KeySet& keys,
                        const NoiseConfig& noise, const SolverOptions& opt, Rng& rng) {
    const auto init = init_ciphertexts(rng, static_cast<int>(c.values.size()));
    return solve_qra(res_a, res_b, c, keys, init, noise, opt, rng);
}

/// Decrypts one path with the stored decryption weights on a fresh
/// extraction of the decryption features at shots_dec.
///   path 1: R_b(G(beta, gamma)) W_b_dec
///   path 2: R_a(G(alpha, gamma')) W_a_dec
template <FeatureExtractor E>
Vec reconstruct(int path, const ProtocolState& st, const E& res_a, const E& res_b, const KeySet& keys,
                const NoiseConfig& noise, Rng& rng, MeasurementTally* tally = nullptr) {
    if (path != 1 && path != 2) throw std::invalid_argument("path must be 1 or 2");
    if (st.loss_history.empty()) throw std::invalid_argument("protocol state has no fitted weights");
    const int nq = res_a.n_data_qubits();
    if (path == 1) {
        const auto v = res_b.extract(encode(keys.beta, st.gamma, nq), noise, noise.shots_dec, rng, tally);
        return to_vec(predict(v, st.w_b_dec));
    }
    const auto v = res_a.extract(encode(keys.alpha, st.gamma_prime, nq), noise, noise.shots_dec, rng, tally);
    return to_vec(predict(v, st.w_a_dec));
}

/// Spectral radius of the Jacobian of phi at x0: central differences build
/// the dense Jacobian column by column, then power iteration estimates the
/// dominant eigenvalue magnitude.
inline double spectral_radius_of_map(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& phi,
                                     const Eigen::VectorXd& x0, double epsilon = 1e-6, int power_steps = 50) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    const Eigen::Index n = x0.size();
    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::VectorXd xp = x0, xm = x0;
        xp(k) += epsilon;
        xm(k) -= epsilon;
        const Eigen::VectorXd fp = phi(xp), fm = phi(xm);
        if (fp.size() != n || fm.size() != n) throw std::invalid_argument("map must preserve dimension");
        jac.col(k) = (fp - fm) / (2.0 * epsilon);
    }
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
    v.normalize();
    double radius = 0.0;
    for (int s = 0; s < power_steps; ++s) {
        Eigen::VectorXd w = jac * v;
        radius = w.norm();
        if (radius == 0.0) return 0.0;
        v = w / radius;
    }
    return radius;
}

/// One full solver iteration viewed as a map (gamma, gamma') -> (gamma+, gamma'+).
template <FeatureExtractor E>
Eigen::VectorXd solver_iteration_map(const Eigen::VectorXd& x, const ProtocolState& st, const E& res_a,
                                     const E& res_b, const SecretData& c, const KeySet& keys,
                                     const NoiseConfig& noise, const SolverOptions& opt) {
    const Eigen::Index nc = static_cast<Eigen::Index>(c.values.size());
    const Vec g = to_vec(x.head(nc));
    const Vec gp = to_vec(x.tail(nc));
    const Eigen::VectorXd cv = to_eigen(c.values);
    Rng unused(0);
    auto p1 = detail::half_step(st.v_a_enc, g, res_b, keys.beta, cv, noise, opt, unused, nullptr);
    auto p2 = detail::half_step(st.v_b_enc, gp, res_a, keys.alpha, cv, noise, opt, unused, nullptr);
    Eigen::VectorXd out(2 * nc);
    out << to_eigen(p1.cipher), to_eigen(p2.cipher);
    return out;
}

/// Local contraction probe at a converged ideal-noise solution.
template <FeatureExtractor E>
double spectral_radius_probe(const ProtocolState& st, const E& res_a, const E& res_b, const SecretData& c,
                             const KeySet& keys, const NoiseConfig& noise, const SolverOptions& opt = {},
                             double epsilon = 1e-6) {
    if (!st.converged_at) throw std::invalid_argument("spectral radius probe needs a converged state");
    if (!noise.is_ideal()) throw std::invalid_argument("spectral radius probe requires ideal noise");
    const Eigen::Index nc = static_cast<Eigen::Index>(st.gamma.size());
    Eigen::VectorXd x0(2 * nc);
    x0 << to_eigen(st.gamma), to_eigen(st.gamma_prime);
    auto phi = [&](const Eigen::VectorXd& x) { return solver_iteration_map(x, st, res_a, res_b, c, keys, noise, opt); };
    return spectral_radius_of_map(phi, x0, epsilon);
}

}  // namespace qra
