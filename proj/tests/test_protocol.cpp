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

#include <gtest/gtest.h>

#include <cmath>

#include "qra/protocol.hpp"
#include "qra/reservoir.hpp"
#include "test_util.hpp"

namespace {

using qra::NoiseConfig;
using qra::ShotBudget;

struct Fixture {
    qra::UnitaryCache cache;
    qra::Reservoir a, b;
    explicit Fixture(int nq, std::uint64_t seed = 0)
        : a(qra::build_reservoir(seed, nq), cache), b(qra::build_reservoir(seed + 10000, nq), cache) {}
};

struct Problem {
    qra::KeySet keys;
    qra::SecretData c;
    qra::Ciphertexts init;
};

Problem make_problem(int nc, int nq, std::uint64_t seed) {
    auto rng = qra::derive_stream({seed, 77});
    Problem p;
    p.keys = qra::generate_keys(rng, nc, nq);
    p.c = qra::generate_data(rng, nc);
    p.init = qra::init_ciphertexts(rng, nc);
    return p;
}

TEST(Protocol, EncodeExamples) {
    // Nc = 2, Nq = 1: offsets come from key[2], key[3].
    const std::vector<double> key = {1.0, 2.0, 0.0, -0.2};
    const std::vector<double> x = {0.3, -0.0};
    const auto y = qra::encode(key, x, 1);
    EXPECT_DOUBLE_EQ(y[0], std::tanh(0.3));
    EXPECT_DOUBLE_EQ(y[1], std::tanh(-0.2));
    EXPECT_THROW(qra::encode(std::vector<double>{1.0, 2.0, 0.0}, x, 1), std::invalid_argument);
}

TEST(Protocol, EncodeIsElementwiseAndMonotone) {
    auto rng = qra::derive_stream({5});
    const int nc = 9, nq = 3;
    auto key = qra::generate_keys(rng, nc, nq).A;
    std::vector<double> x(nc, 0.1);
    const auto base = qra::encode(key, x, nq);
    for (int i = 0; i < nc; ++i) {
        auto xp = x;
        xp[i] += 0.05;
        const auto y = qra::encode(key, xp, nq);
        for (int j = 0; j < nc; ++j) {
            if (j == i) {
                if (key[i] > 0) EXPECT_GT(y[j], base[j]);
                if (key[i] < 0) EXPECT_LT(y[j], base[j]);
            } else {
                EXPECT_EQ(y[j], base[j]);
            }
        }
        EXPECT_DOUBLE_EQ(base[i], std::tanh(key[i] * 0.1 + key[nc + i % (nq + 1)]));
    }
}

TEST(Protocol, GeneratedRanges) {
    auto rng = qra::derive_stream({6});
    const auto keys = qra::generate_keys(rng, 30, 10);
    EXPECT_EQ(keys.A.size(), 41u);
    EXPECT_NE(keys.A, keys.B);
    for (const auto* k : {&keys.A, &keys.B, &keys.alpha, &keys.beta})
        for (double v : *k) {
            EXPECT_GT(v, -1.0);
            EXPECT_LT(v, 1.0);
        }
    for (double v : qra::generate_data(rng, 30).values) EXPECT_LE(std::abs(v), 0.5);
    const auto init = qra::init_ciphertexts(rng, 30);
    for (double v : init.gamma) EXPECT_LE(std::abs(v), 0.3);
    for (double v : init.gamma_prime) EXPECT_LE(std::abs(v), 0.3);
}

TEST(Protocol, IdealSolveConvergesAndReconstructs) {
    Fixture f(3);
    const int nc = 8;
    const auto p = make_problem(nc, 3, 1);
    qra::Rng rng(0);
    const auto st = qra::solve_qra(f.a, f.b, p.c, p.keys, p.init, NoiseConfig{}, {}, rng);
    ASSERT_TRUE(st.converged_at.has_value());
    EXPECT_LE(st.final_loss(), 1e-12);
    EXPECT_EQ(*st.converged_at, static_cast<int>(st.loss_history.size()));
    EXPECT_EQ(st.counts.enc_a, 1);
    EXPECT_EQ(st.counts.enc_b, 1);
    EXPECT_EQ(st.counts.dec_a, *st.converged_at);
    EXPECT_EQ(st.counts.dec_b, *st.converged_at);

    const Eigen::VectorXd cv = qra::to_eigen(p.c.values);
    for (int path : {1, 2}) {
        const auto y = qra::reconstruct(path, st, f.a, f.b, p.keys, NoiseConfig{}, rng);
        EXPECT_LE(qra::mse(cv, qra::to_eigen(y)), 1e-10);
    }
    EXPECT_THROW(qra::reconstruct(3, st, f.a, f.b, p.keys, NoiseConfig{}, rng), std::invalid_argument);

    // A wrong decryption key still runs; its error is only observed.
    auto wrong = p.keys;
    wrong.beta = p.keys.alpha;
    const auto y = qra::reconstruct(1, st, f.a, f.b, wrong, NoiseConfig{}, rng);
    const double e = qra::mse(cv, qra::to_eigen(y));
    EXPECT_TRUE(std::isfinite(e));
    RecordProperty("wrong_key_mse", std::to_string(e));
}

TEST(Protocol, ConvergedFlagTracksThreshold) {
    Fixture f(3);
    const auto p = make_problem(6, 3, 2);
    qra::Rng rng(0);
    qra::SolverOptions opt;
    opt.loss_threshold = 0.0;
    opt.n_iter = 6;
    const auto st = qra::solve_qra(f.a, f.b, p.c, p.keys, p.init, NoiseConfig{}, opt, rng);
    EXPECT_FALSE(st.converged_at.has_value());
    ASSERT_EQ(st.loss_history.size(), 6u);
    for (std::size_t i = 1; i < st.loss_history.size(); ++i)
        EXPECT_LE(st.loss_history[i].loss, st.loss_history[i - 1].loss + 1e-14);
    for (const auto& r : st.loss_history) EXPECT_DOUBLE_EQ(r.loss, 0.5 * (r.mse1 + r.mse2));
}

TEST(Protocol, MirrorSymmetry) {
    Fixture f(3);
    const auto p = make_problem(7, 3, 3);
    qra::Rng r1(0), r2(0);
    const auto st = qra::solve_qra(f.a, f.b, p.c, p.keys, p.init, NoiseConfig{}, {}, r1);
    qra::KeySet swapped{p.keys.B, p.keys.A, p.keys.beta, p.keys.alpha};
    qra::Ciphertexts init{p.init.gamma_prime, p.init.gamma};
    const auto ms = qra::solve_qra(f.b, f.a, p.c, swapped, init, NoiseConfig{}, {}, r2);
    ASSERT_EQ(st.loss_history.size(), ms.loss_history.size());
    for (std::size_t i = 0; i < st.loss_history.size(); ++i) {
        EXPECT_DOUBLE_EQ(st.loss_history[i].mse1, ms.loss_history[i].mse2);
        EXPECT_DOUBLE_EQ(st.loss_history[i].mse2, ms.loss_history[i].mse1);
    }
    EXPECT_EQ(st.gamma, ms.gamma_prime);
}

TEST(Protocol, AsymmetricShotTallies) {
    Fixture f(3);
    const int nc = 6;
    const auto p = make_problem(nc, 3, 4);
    NoiseConfig n;
    n.shots_enc = ShotBudget::finite(10);
    n.shots_dec = ShotBudget::finite(100000);
    qra::Rng rng(1);
    qra::SolverOptions opt;
    opt.n_iter = 3;
    const auto st = qra::solve_qra(f.a, f.b, p.c, p.keys, p.init, n, opt, rng);
    const std::size_t d = qra::feature_dimension(3);
    EXPECT_EQ(st.enc_tally.entries_at(n.shots_enc), 2 * nc * d);
    EXPECT_EQ(st.enc_tally.entries_at(n.shots_dec), 0u);
    EXPECT_EQ(st.dec_tally.entries_at(n.shots_dec), 2 * nc * d * st.loss_history.size());
    EXPECT_EQ(st.dec_tally.entries_at(n.shots_enc), 0u);

    qra::MeasurementTally t;
    double m[2];
    for (int path : {1, 2}) {
        const auto y = qra::reconstruct(path, st, f.a, f.b, p.keys, n, rng, &t);
        m[path - 1] = qra::mse(qra::to_eigen(p.c.values), qra::to_eigen(y));
    }
    EXPECT_EQ(t.entries_at(n.shots_dec), 2 * nc * d);
    EXPECT_LT(m[0], 10 * m[1] + 1e-6);
    EXPECT_LT(m[1], 10 * m[0] + 1e-6);
}

TEST(Protocol, RejectsBadInputs) {
    Fixture f(2);
    auto p = make_problem(4, 2, 5);
    qra::Rng rng(0);
    auto short_keys = p.keys;
    short_keys.alpha.pop_back();
    short_keys.alpha.pop_back();
    short_keys.alpha.pop_back();
    short_keys.alpha.pop_back();
    EXPECT_THROW(qra::solve_qra(f.a, f.b, p.c, short_keys, p.init, NoiseConfig{}, {}, rng), std::invalid_argument);
    auto big = make_problem(qra::feature_dimension(2) + 1, 2, 5);
    EXPECT_THROW(qra::solve_qra(f.a, f.b, big.c, big.keys, big.init, NoiseConfig{}, {}, rng), std::invalid_argument);
    qra::SolverOptions opt;
    opt.n_iter = 0;
    EXPECT_THROW(qra::solve_qra(f.a, f.b, p.c, p.keys, p.init, NoiseConfig{}, opt, rng), std::invalid_argument);
    qra::ProtocolState empty;
    EXPECT_THROW(qra::reconstruct(1, empty, f.a, f.b, p.keys, NoiseConfig{}, rng), std::invalid_argument);
}

TEST(Protocol, SpectralRadiusOfKnownMaps) {
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(4, 0.2);
    auto half = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 0.5 * x; };
    auto id = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; };
    EXPECT_NEAR(qra::spectral_radius_of_map(half, x0), 0.5, 1e-8);
    EXPECT_NEAR(qra::spectral_radius_of_map(id, x0), 1.0, 1e-8);
    Eigen::Matrix2d m;
    m << 0.3, 0.4, 0.0, -0.6;
    auto lin = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return m * x; };
    EXPECT_NEAR(qra::spectral_radius_of_map(lin, Eigen::VectorXd::Zero(2)), 0.6, 1e-6);
    EXPECT_THROW(qra::spectral_radius_of_map(half, x0, 0.0), std::invalid_argument);
}

TEST(Protocol, SpectralProbePreconditions) {
    Fixture f(3);
    const auto p = make_problem(6, 3, 6);
    qra::Rng rng(0);
    qra::SolverOptions opt;
    opt.loss_threshold = 0.0;
    opt.n_iter = 1;
    const auto open = qra::solve_qra(f.a, f.b, p.c, p.keys, p.init, NoiseConfig{}, opt, rng);
    EXPECT_THROW(qra::spectral_radius_probe(open, f.a, f.b, p.c, p.keys, NoiseConfig{}), std::invalid_argument);

    const auto st = qra::solve_qra(f.a, f.b, p.c, p.keys, p.init, NoiseConfig{}, {}, rng);
    NoiseConfig noisy;
    noisy.p_dep = 0.01;
    EXPECT_THROW(qra::spectral_radius_probe(st, f.a, f.b, p.c, p.keys, noisy), std::invalid_argument);
    const double r = qra::spectral_radius_probe(st, f.a, f.b, p.c, p.keys, NoiseConfig{});
    EXPECT_TRUE(std::isfinite(r));
    EXPECT_GE(r, 0.0);
}

}  // namespace
