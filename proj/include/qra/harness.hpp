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

// Experiment runner: condition presets, deterministic per-run streams, a
// thread pool over (seed, trial, Nc) tuples, CSV/JSON output, summaries.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qra/baselines.hpp"
#include "qra/noise.hpp"
#include "qra/protocol.hpp"
#include "qra/reservoir.hpp"
#include "qra/rng.hpp"
#include "qra/serialization.hpp"
#include "qra/stats.hpp"

namespace qra {

inline const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> ids = {"1", "2", "3", "5", "6", "7", "8", "henon", "delay", "nn", "ttn"};
    return ids;
}

inline bool is_baseline(const std::string& id) { return id == "henon" || id == "delay" || id == "nn" || id == "ttn"; }

inline void check_exp_id(const std::string& id) {
    const auto& ids = known_experiments();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) throw std::invalid_argument("unknown exp_id '" + id + "'");
}

/// Stable numeric tag mixed into noise streams.
inline std::uint64_t exp_code(const std::string& id) {
    check_exp_id(id);
    if (is_baseline(id)) {
        Fnv1a h;
        h.update(id.data(), id.size());
        return h.digest();
    }
    return static_cast<std::uint64_t>(std::stoi(id));
}

inline BaselineKind baseline_kind(const std::string& id) {
    if (id == "henon") return BaselineKind::Henon;
    if (id == "delay") return BaselineKind::Delay;
    if (id == "nn") return BaselineKind::Nn;
    if (id == "ttn") return BaselineKind::Ttn;
    throw std::invalid_argument("'" + id + "' is not a baseline");
}

/// Noise preset for each experimental condition.
inline NoiseConfig default_noise(const std::string& id) {
    check_exp_id(id);
    NoiseConfig n;
    const auto s = [](std::uint64_t k) { return ShotBudget::finite(k); };
    if (id == "2") {
        n.shots_enc = n.shots_dec = s(1000);
    } else if (id == "3") {
        n.shots_enc = n.shots_dec = s(1000);
        n.p_dep = 0.005;
    } else if (id == "5") {
        n.shots_enc = n.shots_dec = s(1000);
        n.mode = MeasurementMode::Yomo;
    } else if (id == "6") {
        n.shots_enc = n.shots_dec = s(1000);
        n.mode = MeasurementMode::Yomo;
        n.p_dep = 0.005;
    } else if (id == "7") {
        n.shots_enc = s(10);
        n.shots_dec = s(100000);
    } else if (id == "8") {
        n.shots_enc = s(10);
        n.shots_dec = s(100000);
        n.p_dep = 0.005;
    }
    return n;
}

struct ExperimentConfig {
    std::string exp_id = "1";
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3};
    int trials = 3;
    std::vector<int> nc_list = {5, 8, 10, 12, 15, 18, 20, 25, 30, 35};
    NoiseConfig noise;
    std::filesystem::path output_dir;
    int n_iter = 30;
    double lambda = kDefaultTikhonovLambda;

    int n_data_qubits = 10;
    ReservoirConfig reservoir;
    std::uint64_t reservoir_b_offset = 10000;
    std::filesystem::path cache_dir;
    int threads = 0;  // 0: hardware concurrency
    bool record_timing = false;
    bool dump_state = false;

    DelayEncoding delay_encoding = DelayEncoding::Mean;
    bool nn_hybrid = false;
    SpsaSettings spsa;

    /// Preset for exp_id with the desk-scale seed count.
    static ExperimentConfig preset(const std::string& id) {
        ExperimentConfig c;
        c.exp_id = id;
        c.noise = default_noise(id);
        if (id == "1" || id == "2" || id == "3")
            c.seeds = {0, 1, 2, 3};
        else
            c.seeds = {0};
        if (is_baseline(id)) c.nc_list = {10};
        return c;
    }

    void validate() const {
        check_exp_id(exp_id);
        noise.validate();
        if (seeds.empty()) throw std::invalid_argument("at least one seed required");
        if (trials < 1) throw std::invalid_argument("trials must be at least 1");
        if (nc_list.empty()) throw std::invalid_argument("nc list is empty");
        for (int nc : nc_list)
            if (nc < 1) throw std::invalid_argument("Nc must be positive");
        if (n_iter < 1) throw std::invalid_argument("n_iter must be at least 1");
        if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
        if (is_baseline(exp_id) && exp_id != "nn" && noise.mode == MeasurementMode::Yomo)
            throw std::invalid_argument("baselines do not support yomo measurement");
    }
};

struct RunResult {
    std::string exp_id;
    std::uint64_t seed = 0;
    int trial = 0;
    int nc = 0;
    double mse_path1 = 0.0;
    double mse_path2 = 0.0;
    double final_loss = 0.0;
    std::optional<int> converged_at;
    double wall_time_ms = 0.0;
    std::uint64_t rng_fingerprint = 0;

    double mse() const { return 0.5 * (mse_path1 + mse_path2); }
};

struct RunOutput {
    RunResult result;
    json state;  // filled when dump_state is set
};

/// Keys, data and initial ciphertexts: shared by every condition for a given
/// (seed, trial, Nc) so that conditions pair up in significance tests.
inline Rng trial_stream(std::uint64_t seed, int trial, int nc) {
    return derive_stream({seed, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(nc)});
}

inline Rng noise_stream(const std::string& exp_id, std::uint64_t seed, int trial, int nc) {
    return derive_stream(
        {exp_code(exp_id), seed, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(nc)});
}

inline std::uint64_t fingerprint(std::uint64_t trial_key, Rng& noise_rng_after) {
    Fnv1a h;
    h.update_value(trial_key);
    h.update_value(noise_rng_after());
    return h.digest();
}

/// Holds the two reservoirs of every seed in use.
class ReservoirPool {
public:
    ReservoirPool(const ExperimentConfig& cfg, UnitaryCache& cache) : cfg_(cfg), cache_(cache) {}

    std::pair<std::shared_ptr<const Reservoir>, std::shared_ptr<const Reservoir>> get(std::uint64_t seed) {
        std::lock_guard lock(mu_);
        auto& slot = pool_[seed];
        if (!slot.first) {
            slot.first = std::make_shared<Reservoir>(build_reservoir(seed, cfg_.n_data_qubits, cfg_.reservoir), cache_);
            slot.second = std::make_shared<Reservoir>(
                build_reservoir(seed + cfg_.reservoir_b_offset, cfg_.n_data_qubits, cfg_.reservoir), cache_);
        }
        return slot;
    }

private:
    const ExperimentConfig& cfg_;
    UnitaryCache& cache_;
    std::mutex mu_;
    std::map<std::uint64_t, std::pair<std::shared_ptr<const Reservoir>, std::shared_ptr<const Reservoir>>> pool_;
};

namespace detail {

template <FeatureExtractor E>
void finish_protocol_run(RunOutput& out, const E& a, const E& b, const SecretData& c, const KeySet& keys,
                         const Ciphertexts& init, const ExperimentConfig& cfg, Rng& noise_rng) {
    SolverOptions opt;
    opt.n_iter = cfg.n_iter;
    opt.lambda = cfg.lambda;
    const auto st = solve_qra(a, b, c, keys, init, cfg.noise, opt, noise_rng);
    out.result.final_loss = st.final_loss();
    out.result.converged_at = st.converged_at;
    out.result.mse_path1 = mse(c.values, reconstruct(1, st, a, b, keys, cfg.noise, noise_rng));
    out.result.mse_path2 = mse(c.values, reconstruct(2, st, a, b, keys, cfg.noise, noise_rng));
    if (cfg.dump_state) out.state = to_json(st);
}

}  // namespace detail

/// One (seed, trial, Nc) tuple.
inline RunOutput run_single(const ExperimentConfig& cfg, ReservoirPool& pool, std::uint64_t seed, int trial,
                            int nc) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput out;
    auto& r = out.result;
    r.exp_id = cfg.exp_id;
    r.seed = seed;
    r.trial = trial;
    r.nc = nc;
    const int nq = cfg.n_data_qubits;

    Rng trng = trial_stream(seed, trial, nc);
    const std::uint64_t trial_key = hash_keys({seed, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(nc)});
    const KeySet keys = generate_keys(trng, nc, nq);
    const SecretData c = generate_data(trng, nc);
    const Ciphertexts init = init_ciphertexts(trng, nc);
    Rng nrng = noise_stream(cfg.exp_id, seed, trial, nc);

    if (!is_baseline(cfg.exp_id)) {
        auto [a, b] = pool.get(seed);
        detail::finish_protocol_run(out, *a, *b, c, keys, init, cfg, nrng);
    } else {
        const auto kind = baseline_kind(cfg.exp_id);
        Rng brng = derive_stream({exp_code(cfg.exp_id), seed, static_cast<std::uint64_t>(trial), 0x42415345ULL});
        if (kind == BaselineKind::Ttn) {
            if (nq != 10) throw std::invalid_argument("ttn baseline requires 10 data qubits");
            const auto a = TtnExtractor::sample(brng);
            const auto b = TtnExtractor::sample(brng);
            detail::finish_protocol_run(out, a, b, c, keys, init, cfg, nrng);
        } else if (kind == BaselineKind::Nn) {
            BaselineSpec spec;
            spec.kind = BaselineKind::Nn;
            spec.n_data_qubits = nq;
            spec.spsa = cfg.spsa;
            spec.nn_hybrid = cfg.nn_hybrid;
            std::optional<LayeredCircuitExtractor> feat;
            if (cfg.nn_hybrid) feat.emplace(LayeredCircuitExtractor::sample(BaselineKind::Henon, nq, brng));
            NnProtocol proto(c, keys, nq, spec, feat ? &*feat : nullptr);
            const auto res = proto.run(nrng);
            r.mse_path1 = res.mse1;
            r.mse_path2 = res.mse2;
            r.final_loss = res.loss;
            if (cfg.dump_state) out.state = {{"params", res.params}, {"loss_history", res.loss_history}};
        } else {
            auto spec_a = make_baseline_spec(kind, nq, brng);
            auto psi_a = haar_random_state(nq + 1, brng);
            auto spec_b = make_baseline_spec(kind, nq, brng);
            auto psi_b = haar_random_state(nq + 1, brng);
            spec_a.delay_encoding = spec_b.delay_encoding = cfg.delay_encoding;
            const LayeredCircuitExtractor a(std::move(spec_a), std::move(psi_a));
            const LayeredCircuitExtractor b(std::move(spec_b), std::move(psi_b));
            detail::finish_protocol_run(out, a, b, c, keys, init, cfg, nrng);
        }
    }
    r.rng_fingerprint = fingerprint(trial_key, nrng);
    if (!std::isfinite(r.mse_path1) || !std::isfinite(r.mse_path2))
        throw std::runtime_error("non-finite MSE in run seed=" + std::to_string(seed) +
                                 " trial=" + std::to_string(trial) + " nc=" + std::to_string(nc));
    if (cfg.record_timing)
        r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

struct ExperimentOutput {
    std::vector<RunResult> results;
    json states = json::array();
};

/// Runs every (seed, trial, Nc) tuple on a thread pool; results come back in
/// (seed, trial, Nc) order regardless of completion order.
inline ExperimentOutput run_experiment(const ExperimentConfig& cfg, UnitaryCache& cache) {
    cfg.validate();
    struct Task {
        std::uint64_t seed;
        int trial, nc;
    };
    std::vector<Task> tasks;
    std::vector<std::uint64_t> seeds = cfg.seeds;
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    std::vector<int> ncs = cfg.nc_list;
    std::sort(ncs.begin(), ncs.end());
    ncs.erase(std::unique(ncs.begin(), ncs.end()), ncs.end());
    for (auto s : seeds)
        for (int t = 0; t < cfg.trials; ++t)
            for (int nc : ncs) tasks.push_back({s, t, nc});

    ReservoirPool pool(cfg, cache);
    // Build reservoirs up front so workers never stall on the same unitary.
    if (!is_baseline(cfg.exp_id))
        for (auto s : seeds) pool.get(s);

    std::vector<std::optional<RunOutput>> slots(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex fail_mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                slots[i] = run_single(cfg, pool, tasks[i].seed, tasks[i].trial, tasks[i].nc);
            } catch (...) {
                std::lock_guard lock(fail_mu);
                if (!failure) failure = std::current_exception();
                next = tasks.size();
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads =
        std::min<unsigned>(cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw, static_cast<unsigned>(tasks.size()));
    {
        std::vector<std::jthread> workers;
        for (unsigned k = 1; k < n_threads; ++k) workers.emplace_back(worker);
        worker();
    }
    if (failure) std::rethrow_exception(failure);

    ExperimentOutput out;
    for (auto& s : slots) {
        out.results.push_back(s->result);
        if (cfg.dump_state)
            out.states.push_back({{"seed", s->result.seed},
                                  {"trial", s->result.trial},
                                  {"nc", s->result.nc},
                                  {"state", std::move(s->state)}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output

inline const char* kCsvHeader = "exp_id,seed,trial,nc,mse_path1,mse_path2,final_loss,converged_at,wall_time_ms";

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string to_csv(const std::vector<RunResult>& rows) {
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.exp_id << ',' << r.seed << ',' << r.trial << ',' << r.nc << ',' << format_double(r.mse_path1) << ','
           << format_double(r.mse_path2) << ',' << format_double(r.final_loss) << ','
           << (r.converged_at ? std::to_string(*r.converged_at) : std::string()) << ','
           << format_double(r.wall_time_ms) << '\n';
    }
    return os.str();
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<RunResult> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCsvHeader) throw std::runtime_error("unexpected CSV header");
    std::vector<RunResult> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto f = split(trim(line), ',');
        if (f.size() != 9) throw std::runtime_error("malformed CSV row: " + line);
        RunResult r;
        r.exp_id = f[0];
        r.seed = std::stoull(f[1]);
        r.trial = std::stoi(f[2]);
        r.nc = std::stoi(f[3]);
        r.mse_path1 = std::stod(f[4]);
        r.mse_path2 = std::stod(f[5]);
        r.final_loss = std::stod(f[6]);
        if (!f[7].empty()) r.converged_at = std::stoi(f[7]);
        r.wall_time_ms = std::stod(f[8]);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline json config_json(const ExperimentConfig& c) {
    return {{"exp_id", c.exp_id},       {"seeds", c.seeds},
            {"trials", c.trials},       {"nc_list", c.nc_list},
            {"noise", to_json(c.noise)}, {"n_iter", c.n_iter},
            {"lambda", c.lambda},       {"n_data_qubits", c.n_data_qubits},
            {"dt", c.reservoir.dt},     {"theta", c.reservoir.theta},
            {"record_timing", c.record_timing}};
}

inline json results_json(const ExperimentConfig& cfg, const std::vector<RunResult>& rows) {
    json runs = json::array();
    for (const auto& r : rows)
        runs.push_back({{"exp_id", r.exp_id},
                        {"seed", r.seed},
                        {"trial", r.trial},
                        {"nc", r.nc},
                        {"mse_path1", r.mse_path1},
                        {"mse_path2", r.mse_path2},
                        {"final_loss", r.final_loss},
                        {"converged_at", r.converged_at ? json(*r.converged_at) : json(nullptr)},
                        {"wall_time_ms", r.wall_time_ms},
                        {"rng_fingerprint", hex64(r.rng_fingerprint)}});
    return {{"config", config_json(cfg)}, {"runs", std::move(runs)}};
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
    if (!f) throw std::runtime_error("write failed for " + p.string());
}

/// Writes exp_<id>.csv, exp_<id>.json and, when requested, exp_<id>_state.json.
inline std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& cfg, const ExperimentOutput& out,
                                                        UnitaryCache& cache) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw std::runtime_error("cannot create output dir " + cfg.output_dir.string() + ": " + ec.message());
    const std::string stem = "exp_" + cfg.exp_id;
    std::vector<std::filesystem::path> files = {cfg.output_dir / (stem + ".csv"), cfg.output_dir / (stem + ".json")};
    write_text(files[0], to_csv(out.results));
    write_text(files[1], results_json(cfg, out.results).dump(2) + "\n");
    if (cfg.dump_state) {
        json reservoirs = json::array();
        if (!is_baseline(cfg.exp_id)) {
            ReservoirPool pool(cfg, cache);
            for (auto s : cfg.seeds) {
                auto [a, b] = pool.get(s);
                reservoirs.push_back({{"seed", s}, {"a", to_json(a->spec())}, {"b", to_json(b->spec())}});
            }
        }
        files.push_back(cfg.output_dir / (stem + "_state.json"));
        write_text(files.back(), json{{"reservoirs", std::move(reservoirs)}, {"runs", out.states}}.dump(1) + "\n");
    }
    return files;
}

// ---------------------------------------------------------------------------
// Summary

struct ConditionSummary {
    std::string exp_id;
    int nc = 0;
    int n = 0;
    double mean_mse = 0.0, std_mse = 0.0;
    double mean_loss = 0.0, std_loss = 0.0;
};

struct ComparisonSummary {
    std::string exp_a, exp_b;
    int nc = 0;
    int n = 0;
    std::optional<TestResult> wilcoxon, t_test;
    std::string note;
};

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
    if (v.empty()) return {std::nan(""), std::nan("")};
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    if (v.size() == 1) return {m, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

/// Mean and sample standard deviation per (exp_id, Nc). Run MSE is the mean
/// of the two path MSEs.
inline std::vector<ConditionSummary> summarize_conditions(const std::vector<RunResult>& rows) {
    std::map<std::pair<std::string, int>, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : rows) {
        auto& g = groups[{r.exp_id, r.nc}];
        g.first.push_back(r.mse());
        g.second.push_back(r.final_loss);
    }
    std::vector<ConditionSummary> out;
    for (const auto& [key, g] : groups) {
        ConditionSummary s;
        s.exp_id = key.first;
        s.nc = key.second;
        s.n = static_cast<int>(g.first.size());
        std::tie(s.mean_mse, s.std_mse) = mean_std(g.first);
        std::tie(s.mean_loss, s.std_loss) = mean_std(g.second);
        out.push_back(s);
    }
    return out;
}

/// Pairs runs of two conditions on shared (seed, trial, Nc) and tests the
/// run MSEs per Nc.
inline std::vector<ComparisonSummary> compare_conditions(const std::vector<RunResult>& rows,
                                                         const std::string& exp_a, const std::string& exp_b) {
    using Key = std::tuple<int, std::uint64_t, int>;
    std::map<Key, double> ma, mb;
    for (const auto& r : rows) {
        if (r.exp_id == exp_a) ma[{r.nc, r.seed, r.trial}] = r.mse();
        if (r.exp_id == exp_b) mb[{r.nc, r.seed, r.trial}] = r.mse();
    }
    std::map<int, PairedSample> by_nc;
    for (const auto& [k, va] : ma) {
        auto it = mb.find(k);
        if (it == mb.end()) continue;
        auto& s = by_nc[std::get<0>(k)];
        s.a.push_back(va);
        s.b.push_back(it->second);
    }
    std::vector<ComparisonSummary> out;
    for (const auto& [nc, s] : by_nc) {
        ComparisonSummary c;
        c.exp_a = exp_a;
        c.exp_b = exp_b;
        c.nc = nc;
        c.n = static_cast<int>(s.a.size());
        if (c.n < 5) {
            c.note = "insufficient pairs";
        } else {
            try {
                c.wilcoxon = wilcoxon_signed_rank(s);
            } catch (const std::invalid_argument&) {
                c.note = "degenerate: all differences zero";
            }
            c.t_test = paired_t_test(s);
        }
        out.push_back(std::move(c));
    }
    return out;
}

inline std::string summary_csv(const std::vector<ConditionSummary>& rows) {
    std::ostringstream os;
    os << "exp_id,nc,n,mean_mse,std_mse,mean_final_loss,std_final_loss\n";
    for (const auto& r : rows)
        os << r.exp_id << ',' << r.nc << ',' << r.n << ',' << format_double(r.mean_mse) << ','
           << format_double(r.std_mse) << ',' << format_double(r.mean_loss) << ',' << format_double(r.std_loss)
           << '\n';
    return os.str();
}

inline std::string comparison_csv(const std::vector<ComparisonSummary>& rows) {
    std::ostringstream os;
    os << "exp_a,exp_b,nc,n,wilcoxon_w,wilcoxon_p,t,t_p,note\n";
    auto opt = [](const std::optional<TestResult>& t, bool stat) {
        return t ? format_double(stat ? t->statistic : t->p_two_sided) : std::string();
    };
    for (const auto& r : rows)
        os << r.exp_a << ',' << r.exp_b << ',' << r.nc << ',' << r.n << ',' << opt(r.wilcoxon, true) << ','
           << opt(r.wilcoxon, false) << ',' << opt(r.t_test, true) << ',' << opt(r.t_test, false) << ',' << r.note
           << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Config file

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const auto s = trim(v);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument("bad value for " + key + ": '" + v + "'");
    return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(trim(v), &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for " + key + ": '" + v + "'");
    }
    if (pos != trim(v).size()) throw std::invalid_argument("bad value for " + key + ": '" + v + "'");
    return d;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    const auto s = trim(v);
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw std::invalid_argument("bad boolean for " + key + ": '" + v + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& v) {
    std::vector<T> out;
    for (const auto& part : split(v, ','))
        if (!trim(part).empty()) out.push_back(parse_number<T>(key, part));
    return out;
}

inline DelayEncoding parse_delay_encoding(const std::string& s) {
    if (s == "mean") return DelayEncoding::Mean;
    if (s == "first") return DelayEncoding::FirstElement;
    if (s == "per_qubit") return DelayEncoding::PerQubitLayer;
    throw std::invalid_argument("delay_encoding must be mean, first or per_qubit");
}

/// Applies one key=value setting. Setting exp_id resets the noise preset.
inline void apply_setting(ExperimentConfig& c, const std::string& key_in, const std::string& value) {
    const auto key = trim(key_in);
    const auto v = trim(value);
    if (key == "exp_id") {
        check_exp_id(v);
        const auto keep = c;
        c = ExperimentConfig::preset(v);
        c.output_dir = keep.output_dir;
        c.cache_dir = keep.cache_dir;
    } else if (key == "seeds") c.seeds = parse_list<std::uint64_t>(key, v);
    else if (key == "trials") c.trials = parse_number<int>(key, v);
    else if (key == "nc_list" || key == "nc") c.nc_list = parse_list<int>(key, v);
    else if (key == "shots_enc") c.noise.shots_enc = ShotBudget::parse(v);
    else if (key == "shots_dec") c.noise.shots_dec = ShotBudget::parse(v);
    else if (key == "shots") c.noise.shots_enc = c.noise.shots_dec = ShotBudget::parse(v);
    else if (key == "p_dep") c.noise.p_dep = parse_real(key, v);
    else if (key == "g1") c.noise.schedule.g1 = parse_number<int>(key, v);
    else if (key == "g2") c.noise.schedule.g2 = parse_number<int>(key, v);
    else if (key == "mode") c.noise.mode = parse_measurement_mode(v);
    else if (key == "yomo_k") c.noise.yomo_k = parse_number<int>(key, v);
    else if (key == "output_dir") c.output_dir = v;
    else if (key == "cache_dir") c.cache_dir = v;
    else if (key == "n_iter") c.n_iter = parse_number<int>(key, v);
    else if (key == "lambda") c.lambda = parse_real(key, v);
    else if (key == "n_data_qubits") c.n_data_qubits = parse_number<int>(key, v);
    else if (key == "dt") c.reservoir.dt = parse_real(key, v);
    else if (key == "theta") c.reservoir.theta = parse_real(key, v);
    else if (key == "threads") c.threads = parse_number<int>(key, v);
    else if (key == "record_timing") c.record_timing = parse_bool(key, v);
    else if (key == "dump_state") c.dump_state = parse_bool(key, v);
    else if (key == "delay_encoding") c.delay_encoding = parse_delay_encoding(v);
    else if (key == "nn_hybrid") c.nn_hybrid = parse_bool(key, v);
    else if (key == "spsa_iters") c.spsa.iters = parse_number<int>(key, v);
    else if (key == "spsa_c") c.spsa.c = parse_real(key, v);
    else if (key == "spsa_a") c.spsa.a = parse_real(key, v);
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

/// Line-oriented key=value file; '#' starts a comment. exp_id, when
/// present, is applied first so later keys override its preset.
inline void load_config(ExperimentConfig& c, std::istream& in) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    std::stable_partition(kv.begin(), kv.end(), [](const auto& p) { return p.first == "exp_id"; });
    for (const auto& [k, v] : kv) apply_setting(c, k, v);
}

inline void load_config_file(ExperimentConfig& c, const std::filesystem::path& p) {
    std::ifstream f(p);
    if (!f) throw std::runtime_error("cannot open config " + p.string());
    load_config(c, f);
}

/// Output directory when none was given: $OUTPUT_DIR, else ./results.
inline std::filesystem::path default_output_dir() {
    if (const char* e = std::getenv("OUTPUT_DIR"); e && *e) return e;
    return "results";
}

}  // namespace qra
