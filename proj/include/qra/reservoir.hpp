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

// Fixed random XYZ-Hamiltonian reservoir driven through an ancilla qubit.
//
// Register layout: data qubits 0..Nq-1, ancilla at index Nq. Each timestep
// resets the ancilla to |0>, rotates it by theta*u(t), evolves the whole
// register with one of two cached unitaries (period 6, three steps each) and
// measures single-qubit X/Y/Z plus Z_iZ_j correlators on the data qubits.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qra/features.hpp"
#include "qra/noise.hpp"
#include "qra/rng.hpp"
#include "qra/sim_core.hpp"

namespace qra {

enum class InputGate { RY, RZ };
enum class AncillaReset {
    Project,  // zero the ancilla-|1> branch and renormalize
    None,
};

inline std::string to_string(InputGate g) { return g == InputGate::RY ? "ry" : "rz"; }
inline std::string to_string(AncillaReset r) { return r == AncillaReset::Project ? "project" : "none"; }

/// Which Pauli terms enter each reservoir Hamiltonian.
struct TermFamily {
    bool one_body = true;       // X, Y, Z on every qubit
    bool two_body = true;       // all 9 axis pairs on every qubit pair
    bool three_body_zzz = true;
    bool four_body_zzzz = true;
};

struct ReservoirConfig {
    double dt = 1.0;
    double theta = 1.0;
    InputGate input_gate = InputGate::RY;
    AncillaReset ancilla_reset = AncillaReset::Project;
    TermFamily terms;
};

struct ReservoirSpec {
    std::uint64_t seed = 0;
    int n_data_qubits = 10;
    HamiltonianSpec hamiltonian_1;
    HamiltonianSpec hamiltonian_2;
    ReservoirConfig config;
    std::size_t total_parameter_count = 0;

    int n_qubits() const noexcept { return n_data_qubits + 1; }
    int ancilla() const noexcept { return n_data_qubits; }
};

inline int feature_dimension(int n_data_qubits) {
    if (n_data_qubits < 1) throw std::invalid_argument("need at least one data qubit");
    return 3 * n_data_qubits + n_data_qubits * (n_data_qubits - 1) / 2 + 1;
}

/// Enumerates the Pauli strings of the configured family in a fixed order.
inline std::vector<PauliString> reservoir_term_family(int n_qubits, const TermFamily& fam) {
    static constexpr Axis kAxes[3] = {Axis::X, Axis::Y, Axis::Z};
    std::vector<PauliString> ops;
    if (fam.one_body)
        for (int q = 0; q < n_qubits; ++q)
            for (Axis a : kAxes) ops.push_back(PauliString::single(q, a));
    if (fam.two_body)
        for (int i = 0; i < n_qubits; ++i)
            for (int j = i + 1; j < n_qubits; ++j)
                for (Axis a : kAxes)
                    for (Axis b : kAxes) ops.push_back(PauliString({{i, a}, {j, b}}));
    if (fam.three_body_zzz)
        for (int i = 0; i < n_qubits; ++i)
            for (int j = i + 1; j < n_qubits; ++j)
                for (int k = j + 1; k < n_qubits; ++k)
                    ops.push_back(PauliString({{i, Axis::Z}, {j, Axis::Z}, {k, Axis::Z}}));
    if (fam.four_body_zzzz)
        for (int i = 0; i < n_qubits; ++i)
            for (int j = i + 1; j < n_qubits; ++j)
                for (int k = j + 1; k < n_qubits; ++k)
                    for (int l = k + 1; l < n_qubits; ++l)
                        ops.push_back(PauliString({{i, Axis::Z}, {j, Axis::Z}, {k, Axis::Z}, {l, Axis::Z}}));
    return ops;
}

/// Two independent Hamiltonians with coefficients drawn uniformly from
/// [-1, 1) out of one stream keyed by the seed.
inline ReservoirSpec build_reservoir(std::uint64_t seed, int n_data_qubits, const ReservoirConfig& config = {}) {
    if (n_data_qubits < 1 || n_data_qubits + 1 > kMaxDenseQubits)
        throw std::invalid_argument("reservoir data-qubit count out of range");
    ReservoirSpec spec;
    spec.seed = seed;
    spec.n_data_qubits = n_data_qubits;
    spec.config = config;

    const auto ops = reservoir_term_family(spec.n_qubits(), config.terms);
    Rng rng = derive_stream({0x52455356ULL, seed});
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    auto draw = [&] {
        std::vector<HamiltonianTerm> terms;
        terms.reserve(ops.size());
        for (const auto& op : ops) terms.push_back({op, coef(rng)});
        return HamiltonianSpec(spec.n_qubits(), std::move(terms));
    };
    spec.hamiltonian_1 = draw();
    spec.hamiltonian_2 = draw();
    spec.total_parameter_count = 2 * ops.size();
    return spec;
}

/// Content hash of a Hamiltonian plus time step; identifies a unitary.
inline std::uint64_t evolution_key(const HamiltonianSpec& h, double dt) {
    Fnv1a f;
    f.update_value(h.n_qubits());
    f.update_value(dt);
    for (const auto& t : h.terms()) {
        for (const auto& op : t.op.ops()) {
            f.update_value(op.qubit);
            f.update_value(op.axis);
        }
        f.update_value(t.coefficient);
    }
    return f.digest();
}

/// Process-wide store of evolution unitaries with an optional on-disk
/// mirror, so a 2^11-dimensional exponential is computed once per reservoir.
class UnitaryCache {
public:
    using Ptr = std::shared_ptr<const Eigen::MatrixXcd>;

    explicit UnitaryCache(std::filesystem::path disk_dir = {}) : disk_dir_(std::move(disk_dir)) {}

    Ptr get(const HamiltonianSpec& h, double dt) {
        const auto key = evolution_key(h, dt);
        std::lock_guard lock(mu_);
        if (auto it = mem_.find(key); it != mem_.end()) return it->second;
        Ptr u;
        if (!disk_dir_.empty()) u = load(key, std::size_t{1} << h.n_qubits());
        if (!u) {
            u = std::make_shared<const Eigen::MatrixXcd>(build_evolution_unitary(h, dt));
            ++computed_;
            if (!disk_dir_.empty()) store(key, *u);
        }
        mem_.emplace(key, u);
        return u;
    }

    std::size_t computed() const noexcept { return computed_; }
    void clear_memory() {
        std::lock_guard lock(mu_);
        mem_.clear();
    }
    const std::filesystem::path& disk_dir() const noexcept { return disk_dir_; }

private:
    static constexpr std::uint64_t kMagic = 0x31554152514bULL;

    std::filesystem::path file_for(std::uint64_t key) const {
        std::ostringstream name;
        name << "unitary_" << std::hex << std::setw(16) << std::setfill('0') << key << ".bin";
        return disk_dir_ / name.str();
    }

    Ptr load(std::uint64_t key, std::size_t dim) const {
        std::ifstream in(file_for(key), std::ios::binary);
        if (!in) return nullptr;
        std::uint64_t magic = 0, stored_key = 0, stored_dim = 0;
        in.read(reinterpret_cast<char*>(&magic), sizeof magic);
        in.read(reinterpret_cast<char*>(&stored_key), sizeof stored_key);
        in.read(reinterpret_cast<char*>(&stored_dim), sizeof stored_dim);
        if (!in || magic != kMagic || stored_key != key || stored_dim != dim) return nullptr;
        auto m = std::make_shared<Eigen::MatrixXcd>(dim, dim);
        in.read(reinterpret_cast<char*>(m->data()), static_cast<std::streamsize>(dim * dim * sizeof(cplx)));
        if (!in) return nullptr;
        return m;
    }

    void store(std::uint64_t key, const Eigen::MatrixXcd& u) const {
        std::error_code ec;
        std::filesystem::create_directories(disk_dir_, ec);
        const auto path = file_for(key);
        const auto tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) return;
            const std::uint64_t dim = static_cast<std::uint64_t>(u.rows());
            out.write(reinterpret_cast<const char*>(&kMagic), sizeof kMagic);
            out.write(reinterpret_cast<const char*>(&key), sizeof key);
            out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
            out.write(reinterpret_cast<const char*>(u.data()),
                      static_cast<std::streamsize>(u.size() * sizeof(cplx)));
            if (!out) return;
        }
        std::filesystem::rename(tmp, path, ec);
    }

    std::filesystem::path disk_dir_;
    std::mutex mu_;
    std::map<std::uint64_t, Ptr> mem_;
    std::size_t computed_ = 0;
};

/// Observer for each timestep: (t, index of the circuit applied: 0 or 1).
using CircuitHook = std::function<void(int, int)>;

/// A reservoir spec with its two evolution unitaries resolved.
class Reservoir {
public:
    Reservoir(ReservoirSpec spec, UnitaryCache& cache)
        : spec_(std::move(spec)),
          u1_(cache.get(spec_.hamiltonian_1, spec_.config.dt)),
          u2_(cache.get(spec_.hamiltonian_2, spec_.config.dt)) {}

    const ReservoirSpec& spec() const noexcept { return spec_; }
    int n_data_qubits() const noexcept { return spec_.n_data_qubits; }

    int feature_dim(const NoiseConfig& noise) const {
        return noise.mode == MeasurementMode::Yomo ? noise.yomo_k + 1 : feature_dimension(spec_.n_data_qubits);
    }

    static int circuit_index(int t) noexcept { return (t % 6) < 3 ? 0 : 1; }

    std::vector<std::string> column_labels(const NoiseConfig& noise) const {
        std::vector<std::string> labels;
        const int nq = spec_.n_data_qubits;
        if (noise.mode == MeasurementMode::Yomo) {
            for (int g = 0; g < noise.yomo_k; ++g) labels.push_back("G" + std::to_string(g));
        } else {
            for (int q = 0; q < nq; ++q)
                for (Axis a : {Axis::X, Axis::Y, Axis::Z}) labels.push_back(PauliString::single(q, a).label());
            for (int i = 0; i < nq; ++i)
                for (int j = i + 1; j < nq; ++j) labels.push_back(PauliString::zz(i, j).label());
        }
        labels.emplace_back("1");
        return labels;
    }

    /// Runs the input sequence from |0...0> and returns one feature row per
    /// timestep, measured through the noise pipeline at the given budget.
    FeatureMatrix extract(std::span<const double> inputs, const NoiseConfig& noise, ShotBudget shots, Rng& rng,
                          MeasurementTally* tally = nullptr, const CircuitHook& hook = {}) const {
        noise.validate();
        const int nq = spec_.n_data_qubits;
        if (noise.mode == MeasurementMode::Yomo && noise.yomo_k > (1 << nq))
            throw std::invalid_argument("yomo_k exceeds the number of data-register basis states");
        for (double u : inputs)
            if (!std::isfinite(u)) throw std::invalid_argument("reservoir input must be finite");

        const int d = feature_dim(noise);
        FeatureMatrix fm;
        fm.values.resize(static_cast<Eigen::Index>(inputs.size()), d);
        fm.column_labels = column_labels(noise);

        StateVector psi(spec_.n_qubits());
        const int anc = spec_.ancilla();
        for (std::size_t t = 0; t < inputs.size(); ++t) {
            const int ti = static_cast<int>(t);
            if (spec_.config.ancilla_reset == AncillaReset::Project) reset_to_zero(psi, anc);
            const double angle = spec_.config.theta * inputs[t];
            if (spec_.config.input_gate == InputGate::RY)
                apply_ry(psi, anc, angle);
            else
                apply_rz(psi, anc, angle);
            const int c = circuit_index(ti);
            apply_unitary(psi, c == 0 ? *u1_ : *u2_);
            if (hook) hook(ti, c);

            const double a = noise.p_dep > 0.0 ? accumulate_damping(noise.schedule, noise.p_dep, ti) : 1.0;
            auto row = fm.values.row(static_cast<Eigen::Index>(t));
            if (noise.mode == MeasurementMode::Yomo) {
                const double lambda_global = std::pow(a, nq);
                const auto f = yomo_features(psi, shots, lambda_global, noise.yomo_k, rng);
                for (int k = 0; k < d; ++k) row(k) = f[static_cast<std::size_t>(k)];
            } else {
                measure_pauli_row(psi, a, shots, rng, row);
            }
        }
        if (tally) tally->record(shots, static_cast<std::size_t>(fm.values.size()));
        return fm;
    }

private:
    static void reset_to_zero(StateVector& psi, int qubit) {
        auto& amp = psi.amplitudes();
        const std::size_t bit = std::size_t{1} << qubit;
        double keep = 0.0;
        for (std::size_t i = 0; i < psi.dim(); ++i)
            if (!(i & bit)) keep += std::norm(amp(i));
        if (keep < 1e-300) {
            // Ancilla is exactly |1>: flip it instead of projecting onto a null branch.
            apply_x(psi, qubit);
            return;
        }
        for (std::size_t i = 0; i < psi.dim(); ++i)
            if (i & bit) amp(i) = 0.0;
        amp /= std::sqrt(keep);
    }

    template <typename Row>
    void measure_pauli_row(const StateVector& psi, double a, ShotBudget shots, Rng& rng, Row&& row) const {
        const int nq = spec_.n_data_qubits;
        const auto& amp = psi.amplitudes();
        std::vector<double> x(nq, 0.0), y(nq, 0.0), z(nq, 0.0);
        std::vector<double> zz(static_cast<std::size_t>(nq * (nq - 1) / 2), 0.0);
        std::vector<double> sign(nq);
        for (std::size_t b = 0; b < psi.dim(); ++b) {
            const double p = std::norm(amp(b));
            for (int q = 0; q < nq; ++q) {
                sign[q] = (b >> q) & 1 ? -1.0 : 1.0;
                z[q] += sign[q] * p;
                const std::size_t partner = b ^ (std::size_t{1} << q);
                const cplx overlap = std::conj(amp(partner)) * amp(b);
                x[q] += overlap.real();
                // Y|0> = i|1>, Y|1> = -i|0>
                y[q] += sign[q] * (cplx(0, 1) * overlap).real();
            }
            std::size_t k = 0;
            for (int i = 0; i < nq; ++i)
                for (int j = i + 1; j < nq; ++j) zz[k++] += sign[i] * sign[j] * p;
        }
        const double single[1] = {a};
        const double pair[2] = {a, a};
        Eigen::Index col = 0;
        for (int q = 0; q < nq; ++q) {
            row(col++) = noisy_expectation(clamp_unit(x[q]), 1, single, shots, rng);
            row(col++) = noisy_expectation(clamp_unit(y[q]), 1, single, shots, rng);
            row(col++) = noisy_expectation(clamp_unit(z[q]), 1, single, shots, rng);
        }
        for (double v : zz) row(col++) = noisy_expectation(clamp_unit(v), 2, pair, shots, rng);
        row(col) = 1.0;
    }

    static double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

    ReservoirSpec spec_;
    UnitaryCache::Ptr u1_;
    UnitaryCache::Ptr u2_;
};

inline FeatureMatrix extract_features(const Reservoir& reservoir, std::span<const double> inputs,
                                      const NoiseConfig& noise, ShotBudget shots, Rng& rng) {
    return reservoir.extract(inputs, noise, shots, rng);
}

}  // namespace qra
