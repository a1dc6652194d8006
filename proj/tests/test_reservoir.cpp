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

#include <filesystem>
#include <random>

#include "qra/protocol.hpp"
#include "qra/readout.hpp"
#include "qra/reservoir.hpp"
#include "test_util.hpp"

namespace {

using qra::Axis;
using qra::NoiseConfig;
using qra::PauliString;
using qra::ShotBudget;

std::vector<double> inputs_for(int nc, std::uint64_t seed) {
    auto rng = qra::derive_stream({seed, 0x1234ULL});
    std::vector<double> u(nc);
    for (auto& x : u) x = qra::uniform_open(rng, -1.0, 1.0);
    return u;
}

qra::FeatureMatrix ideal(const qra::Reservoir& r, const std::vector<double>& u) {
    qra::Rng rng(0);
    return r.extract(u, NoiseConfig{}, ShotBudget::infinite(), rng);
}

TEST(Reservoir, FeatureDimension) {
    EXPECT_EQ(qra::feature_dimension(10), 76);
    EXPECT_EQ(qra::feature_dimension(15), 151);
    EXPECT_EQ(qra::feature_dimension(1), 4);
    EXPECT_THROW(qra::feature_dimension(0), std::invalid_argument);
}

TEST(Reservoir, BuildIsDeterministicAndInRange) {
    const auto a = qra::build_reservoir(0, 10), b = qra::build_reservoir(0, 10), c = qra::build_reservoir(1, 10);
    ASSERT_EQ(a.hamiltonian_1.terms().size(), 1023u);
    EXPECT_EQ(a.total_parameter_count, 2046u);
    bool differs = false;
    for (std::size_t i = 0; i < a.hamiltonian_1.terms().size(); ++i) {
        const auto ca = a.hamiltonian_1.terms()[i].coefficient;
        EXPECT_EQ(ca, b.hamiltonian_1.terms()[i].coefficient);
        EXPECT_EQ(a.hamiltonian_2.terms()[i].coefficient, b.hamiltonian_2.terms()[i].coefficient);
        differs |= ca != c.hamiltonian_1.terms()[i].coefficient;
        EXPECT_GE(ca, -1.0);
        EXPECT_LE(ca, 1.0);
    }
    EXPECT_TRUE(differs);
    EXPECT_EQ(a.hamiltonian_1.n_qubits(), 11);
    EXPECT_EQ(a.hamiltonian_2.n_qubits(), 11);
}

TEST(Reservoir, TermFamilyCensus) {
    EXPECT_EQ(qra::reservoir_term_family(11, {}).size(), 33u + 495u + 165u + 330u);
    EXPECT_EQ(qra::reservoir_term_family(11, {true, false, false, false}).size(), 33u);
}

TEST(Reservoir, ShapeBiasAndRange) {
    qra::UnitaryCache cache;
    qra::Reservoir r(qra::build_reservoir(3, 3), cache);
    const auto v = ideal(r, inputs_for(5, 1));
    EXPECT_EQ(v.rows(), 5);
    EXPECT_EQ(v.cols(), qra::feature_dimension(3));
    EXPECT_EQ(v.column_labels.size(), static_cast<std::size_t>(v.cols()));
    EXPECT_EQ(v.column_labels.front(), "X0");
    EXPECT_EQ(v.column_labels.back(), "1");
    for (Eigen::Index t = 0; t < v.rows(); ++t) {
        EXPECT_EQ(v.values(t, v.cols() - 1), 1.0);
        for (Eigen::Index k = 0; k + 1 < v.cols(); ++k) EXPECT_LE(std::abs(v.values(t, k)), 1.0);
    }
}

TEST(Reservoir, ExtractionMatchesManualSimulation) {
    const int nq = 3;
    qra::UnitaryCache cache;
    const auto spec = qra::build_reservoir(4, nq);
    qra::Reservoir r(spec, cache);
    const auto u = inputs_for(8, 2);
    const auto v = ideal(r, u);

    const auto u1 = qra::build_evolution_unitary(spec.hamiltonian_1, 1.0);
    const auto u2 = qra::build_evolution_unitary(spec.hamiltonian_2, 1.0);
    qra::StateVector psi(nq + 1);
    const std::size_t anc_bit = std::size_t{1} << nq;
    for (std::size_t t = 0; t < u.size(); ++t) {
        // Projective ancilla reset.
        auto& a = psi.amplitudes();
        for (std::size_t i = 0; i < psi.dim(); ++i)
            if (i & anc_bit) a(static_cast<Eigen::Index>(i)) = 0.0;
        psi.normalize();
        qra::apply_ry(psi, nq, u[t]);
        qra::apply_unitary(psi, (t % 6) < 3 ? u1 : u2);
        int col = 0;
        for (int q = 0; q < nq; ++q)
            for (Axis ax : {Axis::X, Axis::Y, Axis::Z})
                EXPECT_NEAR(v.values(t, col++), qra::expectation(psi, PauliString::single(q, ax)), 1e-12);
        for (int i = 0; i < nq; ++i)
            for (int j = i + 1; j < nq; ++j)
                EXPECT_NEAR(v.values(t, col++), qra::expectation(psi, PauliString::zz(i, j)), 1e-12);
    }
}

TEST(Reservoir, DeterministicAndIdealEquivalence) {
    qra::UnitaryCache cache;
    qra::Reservoir r(qra::build_reservoir(5, 3), cache);
    const auto u = inputs_for(12, 3);
    const auto a = ideal(r, u), b = ideal(r, u);
    EXPECT_EQ(a.values, b.values);
    NoiseConfig n;
    n.p_dep = 0.0;
    n.schedule = {7, 9};
    qra::Rng rng(99);
    EXPECT_EQ(r.extract(u, n, ShotBudget::infinite(), rng).values, a.values);

    n.shots_enc = ShotBudget::finite(100);
    qra::Rng r1(5), r2(5);
    EXPECT_EQ(r.extract(u, n, n.shots_enc, r1).values, r.extract(u, n, n.shots_enc, r2).values);
}

TEST(Reservoir, CircuitAlternation) {
    qra::UnitaryCache cache;
    qra::Reservoir r(qra::build_reservoir(6, 2), cache);
    std::vector<int> seen;
    qra::Rng rng(0);
    r.extract(inputs_for(14, 4), NoiseConfig{}, ShotBudget::infinite(), rng, nullptr,
              [&](int t, int c) {
                  EXPECT_EQ(t, static_cast<int>(seen.size()));
                  seen.push_back(c);
              });
    const std::vector<int> expected = {0, 0, 0, 1, 1, 1, 0, 0, 0, 1, 1, 1, 0, 0};
    EXPECT_EQ(seen, expected);
}

TEST(Reservoir, OneBodyOnlyCorrelatorsFactor) {
    qra::ReservoirConfig cfg;
    cfg.terms = {true, false, false, false};
    qra::UnitaryCache cache;
    const int nq = 4;
    qra::Reservoir r(qra::build_reservoir(7, nq, cfg), cache);
    const auto v = ideal(r, inputs_for(10, 5));
    for (Eigen::Index t = 0; t < v.rows(); ++t) {
        int col = 3 * nq;
        for (int i = 0; i < nq; ++i)
            for (int j = i + 1; j < nq; ++j)
                EXPECT_NEAR(v.values(t, col++), v.values(t, 3 * i + 2) * v.values(t, 3 * j + 2), 1e-12);
    }
}

TEST(Reservoir, FullRowRankAtThirtySeedZero) {
    qra::Reservoir r(qra::build_reservoir(0, 10), qra::testing::shared_cache());
    const auto d = qra::condition_diagnostics(ideal(r, inputs_for(30, 6)));
    EXPECT_EQ(d.numerical_rank, 30);
    EXPECT_GT(d.singular_values(29), 1e-10 * d.singular_values(0));
}

TEST(Reservoir, YomoModeDimensions) {
    qra::Reservoir r(qra::build_reservoir(0, 10), qra::testing::shared_cache());
    NoiseConfig n;
    n.mode = qra::MeasurementMode::Yomo;
    n.shots_enc = ShotBudget::finite(1000);
    EXPECT_EQ(r.feature_dim(n), 57);
    qra::Rng rng(1);
    const auto v = r.extract(inputs_for(6, 7), n, n.shots_enc, rng);
    EXPECT_EQ(v.cols(), 57);
    for (Eigen::Index t = 0; t < v.rows(); ++t) EXPECT_EQ(v.values(t, 56), 1.0);

    qra::UnitaryCache small;
    qra::Reservoir r3(qra::build_reservoir(1, 3), small);
    qra::Rng rng2(1);
    EXPECT_THROW(r3.extract(inputs_for(3, 8), n, n.shots_enc, rng2), std::invalid_argument);
}

TEST(Reservoir, DampingScalesIdealFeatures) {
    qra::UnitaryCache cache;
    qra::Reservoir r(qra::build_reservoir(8, 3), cache);
    const auto u = inputs_for(7, 9);
    const auto clean = ideal(r, u);
    NoiseConfig n;
    n.p_dep = 0.01;
    qra::Rng rng(0);
    const auto damped = r.extract(u, n, ShotBudget::infinite(), rng);
    for (Eigen::Index t = 0; t < clean.rows(); ++t) {
        const double a = qra::accumulate_damping(n.schedule, n.p_dep, static_cast<int>(t));
        EXPECT_NEAR(damped.values(t, 0), a * clean.values(t, 0), 1e-14);
        EXPECT_NEAR(damped.values(t, 9), a * a * clean.values(t, 9), 1e-14);
    }
}

TEST(Reservoir, RejectsNonFiniteInput) {
    qra::UnitaryCache cache;
    qra::Reservoir r(qra::build_reservoir(9, 2), cache);
    std::vector<double> u = {0.1, std::nan("")};
    qra::Rng rng(0);
    EXPECT_THROW(r.extract(u, NoiseConfig{}, ShotBudget::infinite(), rng), std::invalid_argument);
}

TEST(Reservoir, UnitaryCacheRoundTripsThroughDisk) {
    const auto dir = std::filesystem::temp_directory_path() / "qra_cache_test";
    std::filesystem::remove_all(dir);
    const auto spec = qra::build_reservoir(10, 3);
    Eigen::MatrixXcd first;
    {
        qra::UnitaryCache c(dir);
        first = *c.get(spec.hamiltonian_1, 1.0);
        c.get(spec.hamiltonian_1, 1.0);
        EXPECT_EQ(c.computed(), 1u);
    }
    qra::UnitaryCache c2(dir);
    EXPECT_EQ(*c2.get(spec.hamiltonian_1, 1.0), first);
    EXPECT_EQ(c2.computed(), 0u);
    EXPECT_NE(qra::evolution_key(spec.hamiltonian_1, 1.0), qra::evolution_key(spec.hamiltonian_1, 0.5));
    std::filesystem::remove_all(dir);
}

}  // namespace
