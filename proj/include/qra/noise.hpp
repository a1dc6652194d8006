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

// Measurement and channel noise: binomial shot sampling, analytic
// depolarizing damping accumulated per qubit along the input sequence, and
// the single-measurement probability aggregation (YOMO) feature map.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qra/rng.hpp"
#include "qra/sim_core.hpp"

namespace qra {

/// Number of measurement shots; an empty budget means exact expectations.
class ShotBudget {
public:
    constexpr ShotBudget() = default;
    static constexpr ShotBudget infinite() { return ShotBudget(); }
    static ShotBudget finite(std::uint64_t shots) {
        if (shots == 0) throw std::invalid_argument("shot budget must be positive");
        ShotBudget b;
        b.shots_ = shots;
        return b;
    }

    constexpr bool is_infinite() const noexcept { return !shots_.has_value(); }
    constexpr std::uint64_t count() const { return shots_.value(); }
    /// 0 encodes infinity; used for tallies and serialization.
    constexpr std::uint64_t key() const noexcept { return shots_.value_or(0); }
    std::string to_string() const { return shots_ ? std::to_string(*shots_) : std::string("inf"); }

    static ShotBudget parse(const std::string& s) {
        if (s == "inf" || s == "infinite") return infinite();
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size() || v <= 0) throw std::invalid_argument("bad shot budget '" + s + "'");
        return finite(static_cast<std::uint64_t>(v));
    }

    friend constexpr bool operator==(const ShotBudget&, const ShotBudget&) = default;

private:
    std::optional<std::uint64_t> shots_;
};

enum class MeasurementMode { Pauli, Yomo };

inline std::string to_string(MeasurementMode m) { return m == MeasurementMode::Pauli ? "pauli" : "yomo"; }
inline MeasurementMode parse_measurement_mode(const std::string& s) {
    if (s == "pauli") return MeasurementMode::Pauli;
    if (s == "yomo") return MeasurementMode::Yomo;
    throw std::invalid_argument("unknown measurement mode '" + s + "'");
}

/// Effective single- and two-qubit gate counts acting on each qubit per
/// input timestep, used to accumulate analytic depolarizing damping.
struct DampingSchedule {
    int g1 = 2;
    int g2 = 4;
};

struct NoiseConfig {
    ShotBudget shots_enc;
    ShotBudget shots_dec;
    double p_dep = 0.0;
    DampingSchedule schedule;
    MeasurementMode mode = MeasurementMode::Pauli;
    int yomo_k = 56;

    bool is_ideal() const noexcept {
        return shots_enc.is_infinite() && shots_dec.is_infinite() && p_dep == 0.0 &&
               mode == MeasurementMode::Pauli;
    }

    void validate() const {
        if (!(p_dep >= 0.0 && p_dep < 1.0)) throw std::invalid_argument("p_dep must lie in [0, 1)");
        if (schedule.g1 < 0 || schedule.g2 < 0)
            throw std::invalid_argument("damping schedule gate counts must be non-negative");
        if (mode == MeasurementMode::Yomo && yomo_k < 1)
            throw std::invalid_argument("yomo_k must be positive");
    }
};

/// Counts of measured feature entries keyed by shot budget (0 = infinite).
struct MeasurementTally {
    std::size_t extractions = 0;
    std::map<std::uint64_t, std::size_t> entries_by_shots;

    void record(ShotBudget shots, std::size_t entries) {
        ++extractions;
        entries_by_shots[shots.key()] += entries;
    }
    std::size_t entries_at(ShotBudget shots) const {
        auto it = entries_by_shots.find(shots.key());
        return it == entries_by_shots.end() ? 0 : it->second;
    }
};

/// Binomial estimate of a +-1 valued observable: p = (1 + <O>)/2,
/// k ~ Binomial(shots, p), estimate = 2k/shots - 1.
inline double shot_sample(double exact, ShotBudget shots, Rng& rng) {
    if (!std::isfinite(exact) || std::abs(exact) > 1.0 + 1e-9)
        throw std::domain_error("expectation value outside [-1, 1]");
    if (shots.is_infinite()) return exact;
    const double p = std::clamp((1.0 + exact) / 2.0, 0.0, 1.0);
    const auto n = shots.count();
    std::binomial_distribution<std::uint64_t> dist(n, p);
    const auto k = dist(rng);
    return 2.0 * static_cast<double>(k) / static_cast<double>(n) - 1.0;
}

/// Depolarizing damping of a Pauli expectation: 1 - 4p/3 for one-qubit and
/// 1 - 16p/15 for two-qubit channels.
inline double damping_factor(int weight, double p_dep) {
    if (weight == 1) return 1.0 - 4.0 * p_dep / 3.0;
    if (weight == 2) return 1.0 - 16.0 * p_dep / 15.0;
    throw std::invalid_argument("damping factor defined for weight 1 or 2");
}

/// a_i(t) = (lambda_1q^g1 * lambda_2q^g2)^(t+1); identical for every qubit
/// under a uniform schedule. t is the zero-based timestep.
inline double accumulate_damping(const DampingSchedule& s, double p_dep, int t) {
    if (t < 0) throw std::invalid_argument("timestep must be non-negative");
    const double per_step =
        std::pow(damping_factor(1, p_dep), s.g1) * std::pow(damping_factor(2, p_dep), s.g2);
    return std::pow(per_step, t + 1);
}

inline std::vector<double> per_qubit_damping(const DampingSchedule& s, double p_dep, int t, int n_qubits) {
    return std::vector<double>(static_cast<std::size_t>(n_qubits), accumulate_damping(s, p_dep, t));
}

/// Damps an exact expectation by the product of the accumulated factors of
/// the qubits it is supported on, then applies shot noise.
inline double noisy_expectation(double exact, int observable_weight, std::span<const double> support_factors,
                                ShotBudget shots, Rng& rng) {
    if (static_cast<int>(support_factors.size()) != observable_weight)
        throw std::invalid_argument("one damping factor per support qubit required");
    double damped = exact;
    for (double a : support_factors) damped *= a;
    return shot_sample(damped, shots, rng);
}

/// Consecutive partition of n_states into k groups; the first n % k groups
/// hold one extra state.
inline std::vector<std::size_t> yomo_group_sizes(std::size_t n_states, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > n_states)
        throw std::invalid_argument("YOMO group count must lie in [1, number of states]");
    const std::size_t base = n_states / static_cast<std::size_t>(k);
    const std::size_t extra = n_states % static_cast<std::size_t>(k);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), base);
    for (std::size_t g = 0; g < extra; ++g) ++sizes[g];
    return sizes;
}

/// Multinomial counts via sequential binomial conditioning.
inline std::vector<std::uint64_t> multinomial_sample(std::span<const double> probs, std::uint64_t shots,
                                                     Rng& rng) {
    std::vector<std::uint64_t> counts(probs.size(), 0);
    std::uint64_t remaining = shots;
    double mass_left = 0.0;
    for (double p : probs) mass_left += p;
    for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
        if (i + 1 == probs.size()) {
            counts[i] = remaining;
            break;
        }
        const double q = mass_left > 0.0 ? std::clamp(probs[i] / mass_left, 0.0, 1.0) : 0.0;
        std::binomial_distribution<std::uint64_t> dist(remaining, q);
        counts[i] = dist(rng);
        remaining -= counts[i];
        mass_left -= probs[i];
    }
    return counts;
}

/// Depolarizing mix of a reduced distribution toward uniform.
inline std::vector<double> depolarize_distribution(std::span<const double> probs, double lambda_global) {
    const double floor = (1.0 - lambda_global) / static_cast<double>(probs.size());
    std::vector<double> out(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) out[i] = lambda_global * probs[i] + floor;
    return out;
}

/// Single computational-basis measurement aggregated into k group means plus
/// a trailing bias entry. The ancilla is the highest qubit of the register.
inline std::vector<double> yomo_features(const StateVector& state, ShotBudget shots, double lambda_global, int k,
                                         Rng& rng) {
    const auto full = born_probabilities(state);
    const auto reduced = trace_out_ancilla(full, state.n_qubits() - 1);
    const auto mixed = depolarize_distribution(reduced, lambda_global);

    std::vector<double> freq(mixed.size());
    if (shots.is_infinite()) {
        freq = mixed;
    } else {
        const auto counts = multinomial_sample(mixed, shots.count(), rng);
        for (std::size_t i = 0; i < freq.size(); ++i)
            freq[i] = static_cast<double>(counts[i]) / static_cast<double>(shots.count());
    }

    const auto sizes = yomo_group_sizes(freq.size(), k);
    std::vector<double> out;
    out.reserve(sizes.size() + 1);
    std::size_t offset = 0;
    for (auto sz : sizes) {
        double sum = 0.0;
        for (std::size_t i = 0; i < sz; ++i) sum += freq[offset + i];
        out.push_back(sum / static_cast<double>(sz));
        offset += sz;
    }
    out.push_back(1.0);
    return out;
}

}  // namespace qra
