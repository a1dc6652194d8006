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

// JSON dumps of reservoir specifications and solver state.

#include <Eigen/Dense>

#include "json.hpp"

#include "qra/noise.hpp"
#include "qra/protocol.hpp"
#include "qra/reservoir.hpp"

namespace qra {

using json = nlohmann::ordered_json;

inline json to_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline json to_json(const HamiltonianSpec& h) {
    json terms = json::array();
    for (const auto& t : h.terms()) terms.push_back({{"op", t.op.label()}, {"coefficient", t.coefficient}});
    return {{"n_qubits", h.n_qubits()}, {"terms", std::move(terms)}};
}

inline json to_json(const ReservoirSpec& s) {
    return {{"seed", s.seed},
            {"n_data_qubits", s.n_data_qubits},
            {"dt", s.config.dt},
            {"theta", s.config.theta},
            {"input_gate", to_string(s.config.input_gate)},
            {"ancilla_reset", to_string(s.config.ancilla_reset)},
            {"total_parameter_count", s.total_parameter_count},
            {"hamiltonian_1", to_json(s.hamiltonian_1)},
            {"hamiltonian_2", to_json(s.hamiltonian_2)}};
}

inline json to_json(const NoiseConfig& n) {
    return {{"shots_enc", n.shots_enc.to_string()}, {"shots_dec", n.shots_dec.to_string()},
            {"p_dep", n.p_dep},                     {"g1", n.schedule.g1},
            {"g2", n.schedule.g2},                  {"mode", to_string(n.mode)},
            {"yomo_k", n.yomo_k}};
}

inline json to_json(const ProtocolState& st) {
    json hist = json::array();
    for (const auto& r : st.loss_history)
        hist.push_back({{"iteration", r.iteration}, {"mse1", r.mse1}, {"mse2", r.mse2}, {"loss", r.loss}});
    return {{"gamma", st.gamma},
            {"gamma_prime", st.gamma_prime},
            {"w_a_enc", to_json(st.w_a_enc.values)},
            {"w_b_enc", to_json(st.w_b_enc.values)},
            {"w_a_dec", to_json(st.w_a_dec.values)},
            {"w_b_dec", to_json(st.w_b_dec.values)},
            {"loss_history", std::move(hist)},
            {"converged_at", st.converged_at ? json(*st.converged_at) : json(nullptr)},
            {"extractions",
             {{"enc_a", st.counts.enc_a}, {"enc_b", st.counts.enc_b}, {"dec_a", st.counts.dec_a},
              {"dec_b", st.counts.dec_b}}}};
}

}  // namespace qra
