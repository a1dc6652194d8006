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

// Paired significance tests: Wilcoxon signed-rank and Student's paired t.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace qra {

struct PairedSample {
    std::vector<double> a;
    std::vector<double> b;

    void validate() const {
        if (a.size() != b.size()) throw std::invalid_argument("paired sample: length mismatch");
        if (a.size() < 5) throw std::invalid_argument("paired sample: at least 5 pairs required");
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!std::isfinite(a[i]) || !std::isfinite(b[i]))
                throw std::invalid_argument("paired sample: non-finite value");
    }

    std::vector<double> differences() const {
        std::vector<double> d(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
        return d;
    }
};

struct TestResult {
    double statistic = 0.0;
    double p_two_sided = 1.0;
    int n_effective = 0;
    bool exact = false;
};

inline constexpr int kWilcoxonExactLimit = 20;

/// Midranks (1-based) of |d|, ties averaged.
inline std::vector<double> midranks(std::span<const double> absd) {
    const std::size_t n = absd.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return absd[i] < absd[j]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && absd[idx[j + 1]] == absd[idx[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mid;
        i = j + 1;
    }
    return r;
}

/// Null distribution of W+ over all 2^n sign patterns for the given ranks,
/// indexed by 2 W+ (midranks are half-integers). Entries are probabilities.
inline std::vector<double> wilcoxon_null_distribution(std::span<const double> ranks) {
    std::vector<int> twice(ranks.size());
    int total = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        twice[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
        total += twice[i];
    }
    std::vector<double> dist(static_cast<std::size_t>(total) + 1, 0.0);
    dist[0] = 1.0;
    int reach = 0;
    for (int w : twice) {
        for (int s = reach; s >= 0; --s)
            if (dist[static_cast<std::size_t>(s)] != 0.0) {
                dist[static_cast<std::size_t>(s + w)] += 0.5 * dist[static_cast<std::size_t>(s)];
                dist[static_cast<std::size_t>(s)] *= 0.5;
            }
        reach += w;
    }
    return dist;
}

/// W = min(W+, W-) over nonzero differences. Exact two-sided p by full
/// enumeration for n <= 20, normal approximation with continuity and tie
/// correction above.
inline TestResult wilcoxon_signed_rank(const PairedSample& s) {
    s.validate();
    std::vector<double> d;
    for (double x : s.differences())
        if (x != 0.0) d.push_back(x);
    if (d.empty()) throw std::invalid_argument("wilcoxon: all differences are zero");
    std::vector<double> absd(d.size());
    std::transform(d.begin(), d.end(), absd.begin(), [](double x) { return std::abs(x); });
    const auto r = midranks(absd);
    double wplus = 0.0, wminus = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) (d[i] > 0 ? wplus : wminus) += r[i];

    TestResult res;
    res.statistic = std::min(wplus, wminus);
    res.n_effective = static_cast<int>(d.size());
    const double n = static_cast<double>(d.size());
    if (res.n_effective <= kWilcoxonExactLimit) {
        res.exact = true;
        const auto dist = wilcoxon_null_distribution(r);
        const long w2 = std::lround(2.0 * res.statistic);
        double lower = 0.0;
        for (long k = 0; k <= w2 && k < static_cast<long>(dist.size()); ++k) lower += dist[static_cast<std::size_t>(k)];
        res.p_two_sided = std::min(1.0, 2.0 * lower);
    } else {
        const double mean = n * (n + 1.0) / 4.0;
        double tie = 0.0;
        std::vector<double> sorted = absd;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie += t * t * t - t;
            i = j + 1;
        }
        const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie / 48.0;
        if (var <= 0.0) {
            res.p_two_sided = 1.0;
            return res;
        }
        const double z = std::max(0.0, std::abs(res.statistic - mean) - 0.5) / std::sqrt(var);
        res.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    }
    return res;
}

namespace detail {

// Lentz continued fraction for the regularized incomplete beta.
inline double beta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300, eps = 1e-15;
    double c = 1.0, d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw std::runtime_error("incomplete beta: continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw std::domain_error("incomplete beta: x outside [0, 1]");
    if (x == 0.0 || x == 1.0) return x;
    const double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(lbt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::beta_cf(a, b, x) / a;
    return 1.0 - bt * detail::beta_cf(b, a, 1.0 - x) / b;
}

/// Two-sided tail probability of Student's t with nu degrees of freedom.
inline double student_t_two_sided(double t, double nu) {
    if (!std::isfinite(t)) return 0.0;
    return incomplete_beta(0.5 * nu, 0.5, nu / (nu + t * t));
}

/// Paired t on d = a - b. Zero variance with nonzero mean reports the
/// largest finite |t| and p = 0; zero variance with zero mean gives t = 0,
/// p = 1.
inline TestResult paired_t_test(const PairedSample& s) {
    s.validate();
    const auto d = s.differences();
    const double n = static_cast<double>(d.size());
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : d) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    TestResult r;
    r.n_effective = static_cast<int>(d.size());
    r.exact = true;
    if (sd == 0.0 || sd <= 1e-15 * std::abs(mean)) {
        if (mean == 0.0) return r;
        r.statistic = std::copysign(std::numeric_limits<double>::max(), mean);
        r.p_two_sided = 0.0;
        return r;
    }
    r.statistic = mean / (sd / std::sqrt(n));
    r.p_two_sided = std::clamp(student_t_two_sided(r.statistic, n - 1.0), 0.0, 1.0);
    return r;
}

}  // namespace qra
