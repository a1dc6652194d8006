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

// qra: command-line runner for the reservoir autoencoder experiments.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qra/qra.hpp"

#ifndef QRA_DEFAULT_CACHE_DIR
#define QRA_DEFAULT_CACHE_DIR ""
#endif

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunArgs {
    std::string exp;
    std::string config;
    std::string seeds, nc, out, cache_dir = QRA_DEFAULT_CACHE_DIR;
    std::string shots_enc, shots_dec, mode;
    std::optional<int> trials, threads, n_iter;
    std::optional<double> p_dep, lambda;
    bool timing = false, dump_state = false;
    std::vector<std::string> set;
};

struct SummarizeArgs {
    std::vector<std::string> inputs;
    std::vector<std::string> compare;
    std::string out;
};

struct ProbeArgs {
    std::string seeds = "0", nc = "10,20", out, cache_dir = QRA_DEFAULT_CACHE_DIR;
    double epsilon = 1e-6;
};

struct SelftestArgs {
    std::string seeds = "0,1,2,3", cache_dir = QRA_DEFAULT_CACHE_DIR;
};

qra::ExperimentConfig build_config(const RunArgs& a) {
    qra::ExperimentConfig cfg;
    try {
        if (!a.config.empty()) {
            std::ifstream f(a.config);
            if (!f) throw UsageError("cannot open config " + a.config);
            // --exp wins over an exp_id line in the file.
            std::string text, line;
            while (std::getline(f, line))
                if (a.exp.empty() || qra::trim(line).rfind("exp_id", 0) != 0) text += line + '\n';
            cfg = qra::ExperimentConfig::preset(a.exp.empty() ? "1" : a.exp);
            std::istringstream in(text);
            qra::load_config(cfg, in);
        } else {
            if (a.exp.empty()) throw UsageError("--exp or --config with exp_id is required");
            cfg = qra::ExperimentConfig::preset(a.exp);
        }
        if (!a.seeds.empty()) qra::apply_setting(cfg, "seeds", a.seeds);
        if (!a.nc.empty()) qra::apply_setting(cfg, "nc_list", a.nc);
        if (a.trials) cfg.trials = *a.trials;
        if (a.threads) cfg.threads = *a.threads;
        if (a.n_iter) cfg.n_iter = *a.n_iter;
        if (a.lambda) cfg.lambda = *a.lambda;
        if (!a.shots_enc.empty()) qra::apply_setting(cfg, "shots_enc", a.shots_enc);
        if (!a.shots_dec.empty()) qra::apply_setting(cfg, "shots_dec", a.shots_dec);
        if (!a.mode.empty()) qra::apply_setting(cfg, "mode", a.mode);
        if (a.p_dep) cfg.noise.p_dep = *a.p_dep;
        if (a.timing) cfg.record_timing = true;
        if (a.dump_state) cfg.dump_state = true;
        for (const auto& kv : a.set) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
            qra::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!a.out.empty()) cfg.output_dir = a.out;
        if (cfg.output_dir.empty()) cfg.output_dir = qra::default_output_dir();
        if (cfg.cache_dir.empty()) cfg.cache_dir = a.cache_dir;
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

int cmd_run(const RunArgs& a) {
    const auto cfg = build_config(a);
    qra::UnitaryCache cache(cfg.cache_dir);
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = qra::run_experiment(cfg, cache);
    const auto files = qra::write_outputs(cfg, out, cache);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
    std::cerr << "exp " << cfg.exp_id << ": " << out.results.size() << " runs in " << secs << " s\n";
    return 0;
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            for (const auto& e : fs::directory_iterator(p))
                if (e.path().extension() == ".csv" && e.path().filename().string().rfind("exp_", 0) == 0)
                    files.push_back(e.path());
        } else if (fs::exists(p)) {
            files.push_back(p);
        } else {
            throw UsageError("no such input: " + in);
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

int cmd_summarize(const SummarizeArgs& a) {
    std::vector<qra::RunResult> rows;
    for (const auto& f : expand_inputs(a.inputs)) {
        std::ifstream in(f);
        auto part = qra::parse_csv(in);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    if (rows.empty()) throw std::runtime_error("no result rows found");
    const auto summary = qra::summary_csv(qra::summarize_conditions(rows));
    std::vector<qra::ComparisonSummary> comps;
    for (const auto& c : a.compare) {
        const auto colon = c.find(':');
        if (colon == std::string::npos) throw UsageError("--compare expects EXPa:EXPb, got '" + c + "'");
        auto part = qra::compare_conditions(rows, c.substr(0, colon), c.substr(colon + 1));
        comps.insert(comps.end(), part.begin(), part.end());
    }
    const auto comparison = qra::comparison_csv(comps);
    if (a.out.empty()) {
        std::cout << summary;
        if (!a.compare.empty()) std::cout << '\n' << comparison;
    } else {
        fs::create_directories(a.out);
        qra::write_text(fs::path(a.out) / "summary.csv", summary);
        std::cout << "wrote " << (fs::path(a.out) / "summary.csv").string() << '\n';
        if (!a.compare.empty()) {
            qra::write_text(fs::path(a.out) / "comparisons.csv", comparison);
            std::cout << "wrote " << (fs::path(a.out) / "comparisons.csv").string() << '\n';
        }
    }
    return 0;
}

int cmd_probe(const ProbeArgs& a) {
    qra::ExperimentConfig cfg = qra::ExperimentConfig::preset("1");
    try {
        qra::apply_setting(cfg, "seeds", a.seeds);
        qra::apply_setting(cfg, "nc_list", a.nc);
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    qra::UnitaryCache cache(a.cache_dir);
    qra::ReservoirPool pool(cfg, cache);
    std::ostringstream csv;
    csv << "seed,nc,final_loss,converged_at,spectral_radius\n";
    for (auto seed : cfg.seeds) {
        auto [ra, rb] = pool.get(seed);
        for (int nc : cfg.nc_list) {
            qra::Rng trng = qra::trial_stream(seed, 0, nc);
            const auto keys = qra::generate_keys(trng, nc, cfg.n_data_qubits);
            const auto c = qra::generate_data(trng, nc);
            const auto init = qra::init_ciphertexts(trng, nc);
            qra::Rng nrng = qra::noise_stream("1", seed, 0, nc);
            const auto st = qra::solve_qra(*ra, *rb, c, keys, init, cfg.noise, qra::SolverOptions{}, nrng);
            std::string radius = "";
            if (st.converged_at)
                radius = qra::format_double(
                    qra::spectral_radius_probe(st, *ra, *rb, c, keys, cfg.noise, qra::SolverOptions{}, a.epsilon));
            csv << seed << ',' << nc << ',' << qra::format_double(st.final_loss()) << ','
                << (st.converged_at ? std::to_string(*st.converged_at) : "") << ',' << radius << '\n';
        }
    }
    if (a.out.empty()) {
        std::cout << csv.str();
    } else {
        fs::create_directories(a.out);
        qra::write_text(fs::path(a.out) / "probe.csv", csv.str());
        std::cout << "wrote " << (fs::path(a.out) / "probe.csv").string() << '\n';
    }
    return 0;
}

int cmd_selftest(const SelftestArgs& a) {
    qra::SelfTestOptions opt;
    try {
        opt.rank_seeds = qra::parse_list<std::uint64_t>("seeds", a.seeds);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    qra::UnitaryCache cache(a.cache_dir);
    int failed = 0;
    qra::run_selftest(cache, opt, [&](const qra::SelfTestCheck& c) {
        std::printf("[%s] %s: %s (%.1f s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str(),
                    c.seconds);
        std::fflush(stdout);
        if (!c.passed) ++failed;
    });
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum reservoir autoencoder experiments"};
    app.require_subcommand(1);

    RunArgs run;
    auto* r = app.add_subcommand("run", "Run one experimental condition");
    r->add_option("--exp", run.exp, "Experiment: 1,2,3,5,6,7,8,henon,delay,nn,ttn");
    r->add_option("--config", run.config, "key=value config file");
    r->add_option("--seeds", run.seeds, "Comma-separated seeds");
    r->add_option("--trials", run.trials, "Trials per seed");
    r->add_option("--nc", run.nc, "Comma-separated data lengths");
    r->add_option("--out", run.out, "Output directory (default $OUTPUT_DIR or ./results)");
    r->add_option("--cache-dir", run.cache_dir, "Directory for cached evolution unitaries");
    r->add_option("--threads", run.threads, "Worker threads (0: all cores)");
    r->add_option("--n-iter", run.n_iter, "Solver iterations");
    r->add_option("--lambda", run.lambda, "Tikhonov regularization");
    r->add_option("--shots-enc", run.shots_enc, "Encryption shots (integer or inf)");
    r->add_option("--shots-dec", run.shots_dec, "Decryption shots (integer or inf)");
    r->add_option("--p-dep", run.p_dep, "Depolarizing probability");
    r->add_option("--mode", run.mode, "Measurement mode: pauli or yomo");
    r->add_flag("--timing", run.timing, "Record per-run wall time");
    r->add_flag("--dump-state", run.dump_state, "Write reservoir and solver state JSON");
    r->add_option("--set", run.set, "Extra key=value override (repeatable)");

    SummarizeArgs sum;
    auto* s = app.add_subcommand("summarize", "Aggregate result CSVs");
    s->add_option("--in", sum.inputs, "Result CSV files or directories")->required();
    s->add_option("--compare", sum.compare, "EXPa:EXPb paired comparison (repeatable)");
    s->add_option("--out", sum.out, "Directory for summary.csv / comparisons.csv (default stdout)");

    ProbeArgs probe;
    auto* p = app.add_subcommand("probe", "Spectral radius of the solver map at converged ideal runs");
    p->add_option("--seeds", probe.seeds, "Comma-separated seeds");
    p->add_option("--nc", probe.nc, "Comma-separated data lengths");
    p->add_option("--epsilon", probe.epsilon, "Finite-difference step");
    p->add_option("--out", probe.out, "Output directory (default stdout)");
    p->add_option("--cache-dir", probe.cache_dir, "Directory for cached evolution unitaries");

    SelftestArgs st;
    auto* t = app.add_subcommand("selftest", "Run the invariant suite");
    t->add_option("--seeds", st.seeds, "Seeds for the feature-rank check");
    t->add_option("--cache-dir", st.cache_dir, "Directory for cached evolution unitaries");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (r->parsed()) return cmd_run(run);
        if (s->parsed()) return cmd_summarize(sum);
        if (p->parsed()) return cmd_probe(probe);
        if (t->parsed()) return cmd_selftest(st);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
