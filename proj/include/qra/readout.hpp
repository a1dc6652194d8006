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

// Ridge-regularized linear readout.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <span>
#include <stdexcept>
#include <vector>

#include "qra/features.hpp"

namespace qra {

inline constexpr double kDefaultTikhonovLambda = 1e-10;
inline constexpr double kRankTolerance = 1e-10;

enum class TikhonovMethod { Auto, Cholesky, Svd };

struct ReadoutWeights {
    Eigen::VectorXd values;
    double lambda_used = 0.0;
    TikhonovMethod method_used = TikhonovMethod::Auto;
};

namespace detail {

inline void require_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) throw std::domain_error(std::string(what) + " contains non-finite values");
}

inline Eigen::VectorXd tikhonov_svd(const Eigen::MatrixXd& v, const Eigen::VectorXd& y, double lambda) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    Eigen::VectorXd filt = (svd.matrixU().transpose() * y).array() * (s.array() / (s.array().square() + lambda));
    return svd.matrixV() * filt;
}

}  // namespace detail

/// W = argmin |VW - y|^2 + lambda |W|^2. Auto factors (V^T V + lambda I) with
/// Cholesky and falls back to the SVD filter form when the factorization
/// fails or produces non-finite weights.
inline ReadoutWeights tikhonov_solve(const Eigen::MatrixXd& v, const Eigen::VectorXd& y,
                                     double lambda = kDefaultTikhonovLambda,
                                     TikhonovMethod method = TikhonovMethod::Auto) {
    if (!(lambda > 0.0)) throw std::invalid_argument("Tikhonov lambda must be positive");
    if (v.rows() != y.size()) throw std::invalid_argument("feature rows must match target length");
    detail::require_finite(v, "feature matrix");
    detail::require_finite(y, "target vector");

    ReadoutWeights w;
    w.lambda_used = lambda;
    if (method != TikhonovMethod::Svd) {
        Eigen::MatrixXd gram = v.transpose() * v;
        gram.diagonal().array() += lambda;
        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        if (llt.info() == Eigen::Success) {
            w.values = llt.solve(v.transpose() * y);
            w.method_used = TikhonovMethod::Cholesky;
            if (w.values.allFinite()) return w;
        }
        if (method == TikhonovMethod::Cholesky)
            throw std::runtime_error("Cholesky factorization of the regularized Gram matrix failed");
    }
    w.values = detail::tikhonov_svd(v, y, lambda);
    w.method_used = TikhonovMethod::Svd;
    return w;
}

inline ReadoutWeights tikhonov_solve(const FeatureMatrix& v, const Eigen::VectorXd& y,
                                     double lambda = kDefaultTikhonovLambda,
                                     TikhonovMethod method = TikhonovMethod::Auto) {
    return tikhonov_solve(v.values, y, lambda, method);
}

inline Eigen::VectorXd predict(const Eigen::MatrixXd& v, const ReadoutWeights& w) {
    if (v.cols() != w.values.size()) throw std::invalid_argument("weight length must match feature dimension");
    return v * w.values;
}

inline Eigen::VectorXd predict(const FeatureMatrix& v, const ReadoutWeights& w) { return predict(v.values, w); }

inline double mse(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size()) throw std::invalid_argument("mse: length mismatch");
    if (y.empty()) throw std::invalid_argument("mse: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i];
        acc += d * d;
    }
    return acc / static_cast<double>(y.size());
}

inline double mse(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
    return mse(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
               std::span<const double>(yhat.data(), static_cast<std::size_t>(yhat.size())));
}

struct ConditionDiagnostics {
    int numerical_rank = 0;
    double condition_number = 0.0;
    Eigen::VectorXd singular_values;  // descending
};

/// Rank counts singular values above kRankTolerance * s_max; the condition
/// number is s_max / s_min over the min(rows, cols) singular values.
inline ConditionDiagnostics condition_diagnostics(const Eigen::MatrixXd& v) {
    detail::require_finite(v, "feature matrix");
    ConditionDiagnostics d;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(v);
    d.singular_values = svd.singularValues();
    if (d.singular_values.size() == 0) return d;
    const double smax = d.singular_values(0);
    const double smin = d.singular_values(d.singular_values.size() - 1);
    for (Eigen::Index i = 0; i < d.singular_values.size(); ++i)
        if (d.singular_values(i) > kRankTolerance * smax) ++d.numerical_rank;
    d.condition_number = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    return d;
}

inline ConditionDiagnostics condition_diagnostics(const FeatureMatrix& v) { return condition_diagnostics(v.values); }

}  // namespace qra
