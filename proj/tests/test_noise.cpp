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
#include <numeric>

#include "qra/noise.hpp"
#include "qra/sim_core.hpp"

namespace {

using qra::ShotBudget;

TEST(Noise, ShotSampleDegenerateAndInfinite) {
    auto rng = qra::derive_stream({1});
    for (int i = 0; i < 100; ++i) EXPECT_EQ(qra::shot_sample(1.0, ShotBudget::finite(1000), rng), 1.0);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(qra::shot_sample(-1.0, ShotBudget::finite(7), rng), -1.0);
    EXPECT_EQ(qra::shot_sample(0.123, ShotBudget::infinite(), rng), 0.123);
    EXPECT_THROW(qra::shot_sample(1.1, ShotBudget::finite(10), rng), std::domain_error);
    EXPECT_NO_THROW(qra::shot_sample(1.0 + 1e-10, ShotBudget::finite(10), rng));
}

TEST(Noise, ShotSampleVarianceMatchesBinomial) {
    auto rng = qra::derive_stream({2});
    const int n = 100000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = qra::shot_sample(0.0, ShotBudget::finite(1000), rng);
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    EXPECT_NEAR(var, 1.0 / 1000, 0.05 / 1000);
}

TEST(Noise, ShotSampleUnbiasedWithinFourSigma) {
    auto rng = qra::derive_stream({3});
    const int n = 100000;
    for (double x : {-0.7, 0.2, 0.9}) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += qra::shot_sample(x, ShotBudget::finite(1000), rng);
        const double sigma = std::sqrt((1 - x * x) / 1000 / n);
        EXPECT_LT(std::abs(s / n - x), 4 * sigma) << x;
    }
}

TEST(Noise, DampingFactors) {
    EXPECT_NEAR(qra::damping_factor(1, 0.005), 1 - 0.02 / 3, 1e-15);
    EXPECT_NEAR(qra::damping_factor(2, 0.005), 1 - 0.08 / 15, 1e-15);
    EXPECT_NEAR(qra::damping_factor(2, 0.005), 0.99467, 1e-5);
    EXPECT_EQ(qra::damping_factor(1, 0.0), 1.0);
    EXPECT_EQ(qra::damping_factor(2, 0.0), 1.0);
    EXPECT_NEAR(qra::damping_factor(1, 0.75), 0.0, 1e-15);
    EXPECT_THROW(qra::damping_factor(3, 0.1), std::invalid_argument);
}

TEST(Noise, AccumulatedDamping) {
    const qra::DampingSchedule sched;
    for (int t = 0; t < 40; ++t) EXPECT_EQ(qra::accumulate_damping(sched, 0.0, t), 1.0);
    EXPECT_NEAR(qra::accumulate_damping({1, 0}, 0.005, 0), qra::damping_factor(1, 0.005), 1e-15);

    // Closed form at t = 29, then the global product over 10 qubits.
    const double l1 = 1 - 4 * 0.005 / 3, l2 = 1 - 16 * 0.005 / 15;
    const double oracle = std::pow(std::pow(l1, 2) * std::pow(l2, 4), 30);
    const double a = qra::accumulate_damping(sched, 0.005, 29);
    EXPECT_NEAR(a / oracle, 1.0, 1e-12);
    const double global = std::pow(a, 10);
    EXPECT_GT(global, 1e-6);
    EXPECT_LT(global, 1e-4);

    double prev = 1.0;
    for (int t = 0; t < 100; ++t) {
        const double v = qra::accumulate_damping(sched, 0.005, t);
        EXPECT_GT(v, 0.0);
        EXPECT_LE(v, prev);
        prev = v;
    }
    const auto per = qra::per_qubit_damping(sched, 0.005, 3, 10);
    ASSERT_EQ(per.size(), 10u);
    for (double v : per) EXPECT_EQ(v, qra::accumulate_damping(sched, 0.005, 3));
}

TEST(Noise, NoisyExpectation) {
    auto rng = qra::derive_stream({4});
    const double one[1] = {1.0};
    EXPECT_EQ(qra::noisy_expectation(0.4, 1, one, ShotBudget::infinite(), rng), 0.4);
    const double nine[1] = {0.9};
    EXPECT_NEAR(qra::noisy_expectation(1.0, 1, nine, ShotBudget::infinite(), rng), 0.9, 1e-15);
    const double pair[2] = {0.9, 0.8};
    EXPECT_NEAR(qra::noisy_expectation(0.5, 2, pair, ShotBudget::infinite(), rng), 0.36, 1e-15);
    EXPECT_THROW(qra::noisy_expectation(0.5, 2, one, ShotBudget::infinite(), rng), std::invalid_argument);

    const int n = 10000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += qra::noisy_expectation(0.6, 1, nine, ShotBudget::finite(1000), rng);
    const double damped = 0.54;
    const double sigma = std::sqrt((1 - damped * damped) / 1000 / n);
    EXPECT_LT(std::abs(s / n - damped), 3 * sigma);
}

TEST(Noise, YomoGroupSizes) {
    const auto sizes = qra::yomo_group_sizes(1024, 56);
    ASSERT_EQ(sizes.size(), 56u);
    for (int g = 0; g < 16; ++g) EXPECT_EQ(sizes[g], 19u);
    for (int g = 16; g < 56; ++g) EXPECT_EQ(sizes[g], 18u);
    EXPECT_EQ(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}), 1024u);
    EXPECT_THROW(qra::yomo_group_sizes(8, 9), std::invalid_argument);
}

// 11-qubit state whose reduced 10-qubit distribution is uniform.
qra::StateVector uniform_data_state() {
    qra::StateVector s(11);
    for (int q = 0; q < 10; ++q) qra::apply_ry(s, q, std::numbers::pi / 2);
    return s;
}

TEST(Noise, YomoUniformDistribution) {
    auto rng = qra::derive_stream({5});
    const auto f = qra::yomo_features(uniform_data_state(), ShotBudget::infinite(), 1.0, 56, rng);
    ASSERT_EQ(f.size(), 57u);
    for (int g = 0; g < 56; ++g) EXPECT_NEAR(f[g], 1.0 / 1024, 1e-12);
    EXPECT_EQ(f[56], 1.0);
}

TEST(Noise, YomoFullyDepolarizedIgnoresState) {
    auto rng = qra::derive_stream({6});
    const auto psi = qra::haar_random_state(11, rng);
    const auto f = qra::yomo_features(psi, ShotBudget::infinite(), 0.0, 56, rng);
    const auto g = qra::yomo_features(uniform_data_state(), ShotBudget::infinite(), 1.0, 56, rng);
    for (int k = 0; k < 57; ++k) EXPECT_NEAR(f[k], g[k], 1e-15);
}

TEST(Noise, YomoExactGroupMeansOracle) {
    auto rng = qra::derive_stream({7});
    const auto psi = qra::haar_random_state(11, rng);
    const double lg = 0.3;
    const auto f = qra::yomo_features(psi, ShotBudget::infinite(), lg, 56, rng);
    // Oracle: marginalize the top qubit by index arithmetic, mix, group.
    std::vector<double> red(1024, 0.0);
    for (std::size_t i = 0; i < 2048; ++i) red[i % 1024] += std::norm(psi[i]);
    std::size_t offset = 0;
    for (int g = 0; g < 56; ++g) {
        const std::size_t sz = g < 16 ? 19 : 18;
        double s = 0;
        for (std::size_t i = 0; i < sz; ++i) s += lg * red[offset + i] + (1 - lg) / 1024;
        EXPECT_NEAR(f[g], s / sz, 1e-14);
        offset += sz;
    }
}

TEST(Noise, YomoNormalizationAndSampling) {
    auto rng = qra::derive_stream({8});
    const auto psi = qra::haar_random_state(11, rng);
    const auto red = qra::trace_out_ancilla(qra::born_probabilities(psi), 10);
    EXPECT_NEAR(std::accumulate(red.begin(), red.end(), 0.0), 1.0, 1e-10);
    for (double lg : {0.0, 1e-5, 0.7, 1.0}) {
        const auto mixed = qra::depolarize_distribution(red, lg);
        EXPECT_NEAR(std::accumulate(mixed.begin(), mixed.end(), 0.0), 1.0, 1e-10);
    }
    const auto counts = qra::multinomial_sample(red, 1000, rng);
    EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}), 1000u);
    const auto f = qra::yomo_features(psi, ShotBudget::finite(1000), 0.5, 56, rng);
    double weighted = 0;
    const auto sizes = qra::yomo_group_sizes(1024, 56);
    for (int g = 0; g < 56; ++g) weighted += f[g] * static_cast<double>(sizes[g]);
    EXPECT_NEAR(weighted, 1.0, 1e-12);
}

TEST(Noise, MultinomialMeansMatchProbabilities) {
    auto rng = qra::derive_stream({9});
    const std::vector<double> p = {0.5, 0.25, 0.125, 0.125};
    std::vector<double> acc(4, 0.0);
    const int reps = 20000;
    for (int r = 0; r < reps; ++r) {
        const auto c = qra::multinomial_sample(p, 100, rng);
        for (int i = 0; i < 4; ++i) acc[i] += c[i];
    }
    for (int i = 0; i < 4; ++i) {
        const double sigma = std::sqrt(100 * p[i] * (1 - p[i]) / reps);
        EXPECT_LT(std::abs(acc[i] / reps - 100 * p[i]), 4 * sigma);
    }
}

TEST(Noise, ShotBudgetAndConfig) {
    EXPECT_TRUE(ShotBudget::parse("inf").is_infinite());
    EXPECT_EQ(ShotBudget::parse("1000").count(), 1000u);
    EXPECT_THROW(ShotBudget::parse("0"), std::invalid_argument);
    EXPECT_THROW(ShotBudget::parse("ten"), std::invalid_argument);
    EXPECT_THROW(ShotBudget::finite(0), std::invalid_argument);
    qra::NoiseConfig n;
    EXPECT_TRUE(n.is_ideal());
    n.p_dep = 1.0;
    EXPECT_THROW(n.validate(), std::invalid_argument);
    n.p_dep = 0.0;
    n.mode = qra::MeasurementMode::Yomo;
    EXPECT_FALSE(n.is_ideal());
    EXPECT_EQ(qra::parse_measurement_mode("yomo"), qra::MeasurementMode::Yomo);
    EXPECT_THROW(qra::parse_measurement_mode("bogus"), std::invalid_argument);
}

}  // namespace
