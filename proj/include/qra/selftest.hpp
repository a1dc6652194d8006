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

// Invariant checks run by `qra selftest`.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "qra/harness.hpp"
#include "qra/noise.hpp"
#include "qra/readout.hpp"
#include "qra/reservoir.hpp"
#include "qra/sim_core.hpp"

namespace qra {

struct SelfTestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct SelfTestOptions {
    std::vector<std::uint64_t> rank_seeds = {0, 1, 2, 3};
    std::vector<int> rank_nc = {5, 8, 10, 12, 15, 18, 20, 25, 30};
    int n_data_qubits = 10;
};

namespace selftest {

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

inline SelfTestCheck gate_norms(int n_qubits) {
    Rng rng = derive_stream({0x4e4f524dULL});
    StateVector psi = haar_random_state(n_qubits, rng);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    std::uniform_int_distribution<int> q(0, n_qubits - 1);
    double worst = 0.0;
    auto check = [&] { worst = std::max(worst, std::abs(psi.norm_squared() - 1.0)); };
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Random(4, 4);
    const Matrix4c u4 = Eigen::HouseholderQR<Eigen::MatrixXcd>(g).householderQ();
    int gates = 0;
    for (int k = 0; k < 200; ++k, ++gates) {
        const int a = q(rng);
        int b = q(rng);
        if (b == a) b = (a + 1) % n_qubits;
        switch (k % 5) {
            case 0: apply_ry(psi, a, ang(rng)); break;
            case 1: apply_rz(psi, a, ang(rng)); break;
            case 2: apply_x(psi, a); break;
            case 3: apply_cnot(psi, a, b); break;
            case 4: apply_two_qubit_unitary(psi, a, b, u4); break;
        }
        check();
    }
    return {"norm preserved after every gate", worst <= 1e-10,
            std::to_string(gates) + " gates, max |<psi|psi> - 1| = " + sci(worst)};
}

inline SelfTestCheck evolution_unitarity(UnitaryCache& cache, std::uint64_t seed, int nq) {
    const auto spec = build_reservoir(seed, nq);
    double worst = 0.0;
    for (const auto* h : {&spec.hamiltonian_1, &spec.hamiltonian_2}) {
        const auto u = cache.get(*h, spec.config.dt);
        const Eigen::MatrixXcd d = u->adjoint() * *u - Eigen::MatrixXcd::Identity(u->rows(), u->cols());
        worst = std::max(worst, d.cwiseAbs().maxCoeff());
    }
    return {"evolution unitarity", worst <= 1e-9, "max |U^dag U - I| = " + sci(worst)};
}

inline SelfTestCheck tikhonov_stationarity(UnitaryCache& cache, std::uint64_t seed, int nq) {
    Reservoir res(build_reservoir(seed, nq), cache);
    double worst = 0.0;
    for (int nc : {5, 20, 30}) {
        Rng rng = trial_stream(seed, 0, nc);
        const auto keys = generate_keys(rng, nc, nq);
        const auto c = generate_data(rng, nc);
        Rng unused(0);
        const auto v = res.extract(encode(keys.A, c.values, nq), NoiseConfig{}, ShotBudget::infinite(), unused);
        const Eigen::VectorXd y = to_eigen(c.values);
        for (double lambda : {1e-10, 1e-4}) {
            const auto w = tikhonov_solve(v, y, lambda);
            const Eigen::MatrixXd& m = v.values;
            const Eigen::VectorXd rhs = m.transpose() * y;
            const Eigen::VectorXd r = m.transpose() * (m * w.values) + lambda * w.values - rhs;
            worst = std::max(worst, r.norm() / rhs.norm());
        }
    }
    return {"Tikhonov stationarity residual", worst <= 1e-8, "max relative residual = " + sci(worst)};
}

inline SelfTestCheck shot_unbiasedness() {
    Rng rng = derive_stream({0x53484f54ULL});
    constexpr int kDraws = 100000;
    const auto shots = ShotBudget::finite(1000);
    double worst_z = 0.0;
    for (double x : {-0.9, -0.3, 0.0, 0.5, 0.95}) {
        double sum = 0.0;
        for (int i = 0; i < kDraws; ++i) sum += shot_sample(x, shots, rng);
        const double sigma = std::sqrt((1.0 - x * x) / 1000.0 / kDraws);
        worst_z = std::max(worst_z, std::abs(sum / kDraws - x) / sigma);
    }
    return {"shot-sample unbiasedness", worst_z <= 4.0, "max |z| over 5 values = " + sci(worst_z)};
}

inline SelfTestCheck yomo_normalization(int n_qubits) {
    Rng rng = derive_stream({0x594f4d4fULL});
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        const auto psi = haar_random_state(n_qubits, rng);
        const auto reduced = trace_out_ancilla(born_probabilities(psi), n_qubits - 1);
        double s0 = 0.0;
        for (double p : reduced) s0 += p;
        worst = std::max(worst, std::abs(s0 - 1.0));
        for (double lg : {0.0, 2.6e-6, 0.5, 1.0}) {
            double s1 = 0.0;
            for (double p : depolarize_distribution(reduced, lg)) s1 += p;
            worst = std::max(worst, std::abs(s1 - 1.0));
        }
    }
    return {"YOMO probability normalization", worst <= 1e-10, "max |sum P - 1| = " + sci(worst)};
}

inline SelfTestCheck feature_rank(UnitaryCache& cache, const SelfTestOptions& opt) {
    int checked = 0, failed = 0;
    std::string first_failure;
    double worst_cond = 0.0;
    for (auto seed : opt.rank_seeds) {
        Reservoir a(build_reservoir(seed, opt.n_data_qubits), cache);
        Reservoir b(build_reservoir(seed + 10000, opt.n_data_qubits), cache);
        for (int nc : opt.rank_nc) {
            if (nc > 30) continue;
            Rng rng = trial_stream(seed, 0, nc);
            const auto keys = generate_keys(rng, nc, opt.n_data_qubits);
            const auto c = generate_data(rng, nc);
            for (const auto& [res, key] : {std::pair{&a, &keys.A}, std::pair{&b, &keys.B}}) {
                Rng unused(0);
                const auto v = res->extract(encode(*key, c.values, opt.n_data_qubits), NoiseConfig{},
                                            ShotBudget::infinite(), unused);
                const auto d = condition_diagnostics(v);
                ++checked;
                worst_cond = std::max(worst_cond, d.condition_number);
                if (d.numerical_rank != nc) {
                    ++failed;
                    if (first_failure.empty())
                        first_failure = "; seed " + std::to_string(seed) + " Nc " + std::to_string(nc) + " rank " +
                                        std::to_string(d.numerical_rank);
                }
            }
        }
    }
    return {"full row rank of ideal feature matrices (Nc <= 30)", failed == 0,
            std::to_string(checked - failed) + "/" + std::to_string(checked) +
                " full rank, worst condition number " + sci(worst_cond) + first_failure};
}

inline SelfTestCheck rerun_determinism(UnitaryCache& cache, int nq) {
    auto run = [&](int threads, std::vector<std::uint64_t> seeds) {
        auto cfg = ExperimentConfig::preset("2");
        cfg.n_data_qubits = nq;
        cfg.seeds = std::move(seeds);
        cfg.trials = 2;
        cfg.nc_list = {5, 10};
        cfg.threads = threads;
        const auto out = run_experiment(cfg, cache);
        return std::pair{to_csv(out.results), results_json(cfg, out.results).dump(2)};
    };
    const auto first = run(1, {0});
    const auto second = run(2, {0});
    const bool same = first == second;
    return {"byte-identical rerun determinism", same,
            same ? "CSV and JSON identical across reruns (1 and 2 threads)" : "outputs differ between reruns"};
}

}  // namespace selftest

/// Runs every check; the reservoir-backed ones use the given cache.
inline std::vector<SelfTestCheck> run_selftest(UnitaryCache& cache, const SelfTestOptions& opt = {},
                                               const std::function<void(const SelfTestCheck&)>& on_check = {}) {
    const int nq = opt.n_data_qubits;
    const std::uint64_t seed0 = opt.rank_seeds.empty() ? 0 : opt.rank_seeds.front();
    const std::vector<std::pair<std::string, std::function<SelfTestCheck()>>> checks = {
        {"gate norms", [&] { return selftest::gate_norms(nq + 1); }},
        {"evolution unitarity", [&] { return selftest::evolution_unitarity(cache, seed0, nq); }},
        {"Tikhonov stationarity", [&] { return selftest::tikhonov_stationarity(cache, seed0, nq); }},
        {"shot-sample unbiasedness", [] { return selftest::shot_unbiasedness(); }},
        {"YOMO normalization", [&] { return selftest::yomo_normalization(nq + 1); }},
        {"feature rank", [&] { return selftest::feature_rank(cache, opt); }},
        {"rerun determinism", [&] { return selftest::rerun_determinism(cache, nq); }},
    };
    std::vector<SelfTestCheck> out;
    for (const auto& [name, fn] : checks) {
        const auto t0 = std::chrono::steady_clock::now();
        SelfTestCheck c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.name = name;
            c.passed = false;
            c.detail = std::string("exception: ") + e.what();
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on_check) on_check(c);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace qra
