// dspr: dictionary-sparse phase retrieval experiment harness.
//
// Subcommands: gen, solve, drip, verify, phase-diagram, lemma-test.
// Every command's file and stdout output is a pure function of
// (config, seed); wall-clock timings are emitted only with --timings.
// Exit codes: 0 success, 2 invalid configuration, 3 numeric failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "dspr/core.hpp"
#include "dspr/drip.hpp"
#include "dspr/instance.hpp"
#include "dspr/lemmas.hpp"
#include "dspr/serialize.hpp"
#include "dspr/solver.hpp"

namespace {

using namespace dspr;

struct Config {
    // instance geometry
    int n = 8;
    int N = 8;
    int m = 64;
    int k = 2;
    std::string family = "identity";
    double q = 1.0;
    double epsilon = 0.0;
    double r = 4.0;
    int trials = 1;
    std::uint64_t seed = 1;
    std::string solver = "oracle"; // l1 | lq | oracle
    std::string output_dir = "out";
    // descent solver knobs
    double lambda = 1e-6;
    int max_iters = 5000;
    double step_size = 0.0;
    double tol_rel_change = 1e-9;
    double smoothing_delta0 = 1.0;
    double smoothing_decay = 0.5;
    // drip estimation
    int s = 2;
    int num_samples = 1000;
    bool enumerate_supports = false;
    int drip_samples = 300; // advisory estimates inside solve/verify
    double band_lo = 0.12;
    double band_hi = 2.45;
    // verify
    std::string t0_choice = "top_k"; // top_k | support_z0 | analysis_support
    bool inject = false;
    // phase diagram
    std::string m_grid;
    std::string k_grid;
    // execution
    int threads = 1;
    bool timings = false;
};

void apply_key(Config& cfg, const std::string& key, const std::string& value) {
    const auto to_int = [&](const std::string& v) { return std::stoi(v); };
    const auto to_u64 = [&](const std::string& v) { return std::stoull(v); };
    const auto to_real = [&](const std::string& v) { return std::stod(v); };
    const auto to_bool = [&](const std::string& v) {
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw InvalidParameter("boolean config value expected for " + key);
    };
    if (key == "n") cfg.n = to_int(value);
    else if (key == "N") cfg.N = to_int(value);
    else if (key == "m") cfg.m = to_int(value);
    else if (key == "k") cfg.k = to_int(value);
    else if (key == "family") cfg.family = value;
    else if (key == "q") cfg.q = to_real(value);
    else if (key == "epsilon") cfg.epsilon = to_real(value);
    else if (key == "r") cfg.r = to_real(value);
    else if (key == "trials") cfg.trials = to_int(value);
    else if (key == "seed") cfg.seed = to_u64(value);
    else if (key == "solver") cfg.solver = value;
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "lambda") cfg.lambda = to_real(value);
    else if (key == "max_iters") cfg.max_iters = to_int(value);
    else if (key == "step_size") cfg.step_size = to_real(value);
    else if (key == "tol_rel_change") cfg.tol_rel_change = to_real(value);
    else if (key == "smoothing_delta0") cfg.smoothing_delta0 = to_real(value);
    else if (key == "smoothing_decay") cfg.smoothing_decay = to_real(value);
    else if (key == "s") cfg.s = to_int(value);
    else if (key == "num_samples") cfg.num_samples = to_int(value);
    else if (key == "enumerate_supports") cfg.enumerate_supports = to_bool(value);
    else if (key == "drip_samples") cfg.drip_samples = to_int(value);
    else if (key == "band_lo") cfg.band_lo = to_real(value);
    else if (key == "band_hi") cfg.band_hi = to_real(value);
    else if (key == "t0_choice") cfg.t0_choice = value;
    else if (key == "inject") cfg.inject = to_bool(value);
    else if (key == "m_grid") cfg.m_grid = value;
    else if (key == "k_grid") cfg.k_grid = value;
    else if (key == "threads") cfg.threads = to_int(value);
    else if (key == "timings") cfg.timings = to_bool(value);
    else throw InvalidParameter("unknown config key: " + key);
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

void load_config_file(Config& cfg, const std::string& path) {
    const std::string text = io::read_text_file(path);
    const std::string body = trim(text);
    if (!body.empty() && body.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::parse_error& e) {
            throw InvalidParameter(std::string("malformed JSON config: ") + e.what());
        }
        for (const auto& [key, value] : j.items()) {
            if (value.is_string()) {
                apply_key(cfg, key, value.get<std::string>());
            } else if (value.is_boolean()) {
                apply_key(cfg, key, value.get<bool>() ? "true" : "false");
            } else {
                apply_key(cfg, key, value.dump());
            }
        }
        return;
    }
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw InvalidParameter("config line is not key=value: " + stripped);
        apply_key(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
}

InstanceParams instance_params(const Config& cfg) {
    InstanceParams params;
    params.n = cfg.n;
    params.N = cfg.N;
    params.m = cfg.m;
    params.k = cfg.k;
    params.family = dictionary_family_from_string(cfg.family);
    params.epsilon = cfg.epsilon;
    params.r = cfg.r;
    params.q = cfg.q;
    return params;
}

SolverConfig solver_config(const Config& cfg) {
    SolverConfig sc;
    sc.lambda = cfg.lambda;
    sc.max_iters = cfg.max_iters;
    sc.step_size = cfg.step_size;
    sc.tol_rel_change = cfg.tol_rel_change;
    sc.q = cfg.q;
    sc.smoothing_delta0 = cfg.smoothing_delta0;
    sc.smoothing_decay = cfg.smoothing_decay;
    return sc;
}

T0Choice t0_choice_of(const Config& cfg) {
    if (cfg.t0_choice == "top_k") return T0Choice::top_k_analysis;
    if (cfg.t0_choice == "support_z0") return T0Choice::support_z0;
    if (cfg.t0_choice == "analysis_support") return T0Choice::analysis_support;
    throw InvalidParameter("unknown t0_choice: " + cfg.t0_choice);
}

SolveResult run_solver(const Config& cfg, const ProblemInstance& inst) {
    if (cfg.solver == "oracle") return oracle_support_solver(inst, inst.k);
    if (cfg.solver == "l1") return solve_l1_analysis(inst, solver_config(cfg));
    if (cfg.solver == "lq") return solve_lq_analysis(inst, solver_config(cfg));
    throw InvalidParameter("unknown solver: " + cfg.solver);
}

void parallel_trials(int count, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - std::floor(pos);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

std::vector<int> parse_grid(const std::string& text, int fallback) {
    if (text.empty()) return {fallback};
    std::vector<int> out;
    for (const auto& token : io::split(text, ',')) {
        const std::string t = trim(token);
        if (t.empty()) continue;
        out.push_back(std::stoi(t));
    }
    if (out.empty()) throw InvalidParameter("empty grid specification");
    return out;
}

std::filesystem::path ensure_out_dir(const Config& cfg) {
    std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.output_dir);
    return dir;
}

// ---------------------------------------------------------------- commands

int cmd_gen(const Config& cfg) {
    const auto dir = ensure_out_dir(cfg);
    const auto inst = make_instance(instance_params(cfg), cfg.seed);
    save_instance(inst, dir.string());
    std::cout << "instance written to " << dir.string() << "\n";
    return 0;
}

struct TrialRow {
    int trial = 0;
    std::uint64_t seed = 0;
    std::string status;
    double residual = 0.0;
    double error_lifted = 0.0;
    double error_phase = 0.0;
    double bound_lifted = 0.0;
    bool bound_applicable = false;
    bool bound_satisfied = false;
    double runtime_ms = 0.0;
    double rel_phase_error = 0.0;
};

TrialRow run_trial(const Config& cfg, int trial) {
    const std::uint64_t trial_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial));
    const auto inst = make_instance(instance_params(cfg), trial_seed);
    const auto res = run_solver(cfg, inst);

    TrialRow row;
    row.trial = trial;
    row.seed = trial_seed;
    row.status = to_string(res.status);
    row.residual = res.residual;
    row.error_lifted = lifted_distance(res.xhat, inst.x0);
    row.error_phase = phase_aligned_distance(res.xhat, inst.x0);
    row.rel_phase_error = row.error_phase / std::max(1e-300, core::norm2(inst.x0));
    row.runtime_ms = res.runtime_ms;

    // Advisory bound from sampled constants at order (2, 2 ceil(r k)).
    DripQuery query;
    query.s = 2;
    query.k = std::min(inst.dict.atoms(),
                       static_cast<int>(std::ceil(2.0 * inst.r * static_cast<double>(inst.k))));
    query.q = 1.0;
    query.num_samples = cfg.drip_samples;
    const auto est = estimate_drip(inst.dict, inst.ensemble, query, derive_seed(trial_seed, 99));
    const double margin =
        est.lower - 4.0 * est.upper / std::sqrt(inst.r) - est.upper / inst.r;
    if (margin > 0.0 && est.lower > 0.0) {
        const double c = l1_stability_constant(est.lower, est.upper, inst.r);
        row.bound_lifted = theoretical_error_bound(c, inst.record.epsilon, cfg.m).lifted;
        row.bound_applicable = true;
        row.bound_satisfied = row.error_lifted <= row.bound_lifted;
    }
    return row;
}

void write_trial_outputs(const Config& cfg, const std::vector<TrialRow>& rows,
                         const std::filesystem::path& dir) {
    std::ostringstream csv;
    csv << "trial,seed,status,residual,error_lifted,error_phase_aligned,bound_lifted,bound_satisfied";
    if (cfg.timings) csv << ",runtime_ms";
    csv << '\n';
    for (const auto& row : rows) {
        csv << row.trial << ',' << row.seed << ',' << row.status << ','
            << io::real_token(row.residual) << ',' << io::real_token(row.error_lifted) << ','
            << io::real_token(row.error_phase) << ',';
        if (row.bound_applicable) {
            csv << io::real_token(row.bound_lifted) << ','
                << (row.bound_satisfied ? "true" : "false");
        } else {
            csv << "n/a,n/a";
        }
        if (cfg.timings) csv << ',' << io::real_token(row.runtime_ms);
        csv << '\n';
    }
    io::write_text_file((dir / "trials.csv").string(), csv.str());

    std::vector<double> lifted, phase;
    int successes = 0;
    int failures = 0;
    for (const auto& row : rows) {
        lifted.push_back(row.error_lifted);
        phase.push_back(row.error_phase);
        if (row.rel_phase_error < 1e-3) ++successes;
        if (row.status.rfind("failed", 0) == 0) ++failures;
    }
    nlohmann::ordered_json summary;
    summary["trials"] = rows.size();
    summary["solver"] = cfg.solver;
    summary["success_rate"] = static_cast<double>(successes) / static_cast<double>(rows.size());
    summary["failed"] = failures;
    summary["error_lifted_q25"] = quantile(lifted, 0.25);
    summary["error_lifted_median"] = quantile(lifted, 0.5);
    summary["error_lifted_q75"] = quantile(lifted, 0.75);
    summary["error_phase_q25"] = quantile(phase, 0.25);
    summary["error_phase_median"] = quantile(phase, 0.5);
    summary["error_phase_q75"] = quantile(phase, 0.75);
    const std::string summary_text = summary.dump(2) + "\n";
    io::write_text_file((dir / "summary.json").string(), summary_text);
    std::cout << summary_text;
}

int cmd_solve(const Config& cfg) {
    if (cfg.trials < 1) throw InvalidParameter("trials must be >= 1");
    const auto dir = ensure_out_dir(cfg);
    std::vector<TrialRow> rows(static_cast<std::size_t>(cfg.trials));
    std::atomic<bool> numeric_failure{false};
    parallel_trials(cfg.trials, cfg.threads, [&](int trial) {
        try {
            rows[static_cast<std::size_t>(trial)] = run_trial(cfg, trial);
        } catch (const std::exception& e) {
            // per-row failure never aborts the batch
            TrialRow row;
            row.trial = trial;
            row.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial));
            row.status = std::string("failed:") + e.what();
            rows[static_cast<std::size_t>(trial)] = row;
            numeric_failure = true;
        }
    });
    write_trial_outputs(cfg, rows, dir);
    return numeric_failure ? 3 : 0;
}

int cmd_drip(const Config& cfg, bool probe_offdiag) {
    const auto dir = ensure_out_dir(cfg);
    const auto params = instance_params(cfg);
    const auto dict = make_dictionary(params.family, cfg.n, cfg.N, derive_seed(cfg.seed, 0));
    const auto ens = gaussian_ensemble(cfg.m, cfg.n, derive_seed(cfg.seed, 1));

    DripQuery query;
    query.s = cfg.s;
    query.k = cfg.k;
    query.q = cfg.q;
    query.num_samples = cfg.num_samples;
    query.enumerate_supports = cfg.enumerate_supports;

    std::vector<CMat> probes;
    if (probe_offdiag && cfg.N >= 2) {
        CMat z = CMat::Zero(cfg.N, cfg.N);
        z(0, 1) = 1.0;
        z(1, 0) = 1.0;
        probes.push_back(std::move(z));
    }

    std::vector<double> ratios;
    const auto est = estimate_drip(dict, ens, query, derive_seed(cfg.seed, 2), probes, &ratios);
    const auto report =
        drip_report_json(dict, ens, query, est, ratios, cfg.r, cfg.band_lo, cfg.band_hi);
    io::write_text_file((dir / "drip_report.json").string(), report);
    std::cout << report;
    return 0;
}

CVec corrupt_candidate(const ProblemInstance& inst, const CVec& xhat, T0Choice choice) {
    // Push coefficient mass outside T0 so the cone constraint must fail.
    const CVec c0 = analysis(inst.dict, inst.x0);
    const IndexSet t0 =
        choice == T0Choice::support_z0 ? inst.z0.support : top_k_indices(c0, inst.k);
    CVec corrupted = xhat;
    const double scale = 0.5 * core::norm2(inst.x0);
    int injected = 0;
    for (int j = 0; j < inst.dict.atoms() && injected < 4; ++j) {
        if (t0.contains(j)) continue;
        corrupted +=
            scale * std::polar(1.0, 0.4 * static_cast<double>(j)) * inst.dict.matrix.col(j);
        ++injected;
    }
    return corrupted;
}

int cmd_verify(const Config& cfg) {
    if (cfg.trials < 1) throw InvalidParameter("trials must be >= 1");
    const auto dir = ensure_out_dir(cfg);
    const T0Choice choice = t0_choice_of(cfg);

    struct VerifyOutcome {
        ProofCheckReport l1;
        ProofCheckReport lq;
        std::string error;
    };
    std::vector<VerifyOutcome> outcomes(static_cast<std::size_t>(cfg.trials));

    parallel_trials(cfg.trials, cfg.threads, [&](int trial) {
        auto& out = outcomes[static_cast<std::size_t>(trial)];
        try {
            const std::uint64_t trial_seed =
                derive_seed(cfg.seed, static_cast<std::uint64_t>(trial));
            const auto inst = make_instance(instance_params(cfg), trial_seed);
            auto res = run_solver(cfg, inst);
            CVec candidate = res.xhat;
            if (cfg.inject) candidate = corrupt_candidate(inst, candidate, choice);

            DripQuery query;
            query.s = 2;
            query.k = std::min(inst.dict.atoms(), static_cast<int>(std::ceil(
                                                      2.0 * inst.r * static_cast<double>(inst.k))));
            query.num_samples = cfg.drip_samples;
            const auto est =
                estimate_drip(inst.dict, inst.ensemble, query, derive_seed(trial_seed, 99));
            const double alpha = std::max(est.lower, 1e-12);
            const double beta = std::max(est.upper, 1e-12);

            out.l1 = verify_l1_proof_chain(inst, candidate, alpha, beta, choice);
            out.lq = verify_lq_proof_chain(inst, candidate, cfg.q, choice);
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    });

    int failed_checks = 0;
    int errored_trials = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < cfg.trials; ++trial) {
        const auto& out = outcomes[static_cast<std::size_t>(trial)];
        if (!out.error.empty()) {
            ++errored_trials;
            continue;
        }
        const auto tag = std::to_string(trial);
        io::write_text_file((dir / ("verify_l1_trial" + tag + ".csv")).string(),
                            proof_report_csv(out.l1));
        io::write_text_file((dir / ("verify_lq_trial" + tag + ".csv")).string(),
                            proof_report_csv(out.lq));
        for (const auto* report : {&out.l1, &out.lq}) {
            for (const auto& check : report->checks) {
                if (!check.passed) ++failed_checks;
                min_slack = std::min(min_slack, check.slack());
            }
        }
    }

    nlohmann::ordered_json summary;
    summary["trials"] = cfg.trials;
    summary["errored_trials"] = errored_trials;
    summary["failed_checks"] = failed_checks;
    if (std::isfinite(min_slack)) {
        summary["min_slack"] = min_slack;
    } else {
        summary["min_slack"] = nullptr;
    }
    summary["injected_corruption"] = cfg.inject;
    const std::string text = summary.dump(2) + "\n";
    io::write_text_file((dir / "verify_summary.json").string(), text);
    std::cout << text;
    return errored_trials > 0 ? 3 : 0;
}

int cmd_phase_diagram(const Config& cfg) {
    if (cfg.trials < 1) throw InvalidParameter("trials must be >= 1");
    const auto dir = ensure_out_dir(cfg);
    const auto m_values = parse_grid(cfg.m_grid, cfg.m);
    const auto k_values = parse_grid(cfg.k_grid, cfg.k);

    struct Cell {
        int m = 0, k = 0;
        double success = 0.0;
        double median_error = 0.0;
    };
    std::vector<std::pair<int, int>> grid;
    for (int m : m_values)
        for (int k : k_values) grid.emplace_back(m, k);
    std::vector<Cell> cells(grid.size());

    parallel_trials(static_cast<int>(grid.size()), cfg.threads, [&](int cell_idx) {
        const auto [m, k] = grid[static_cast<std::size_t>(cell_idx)];
        Config local = cfg;
        local.m = m;
        local.k = k;
        int successes = 0;
        std::vector<double> errors;
        for (int trial = 0; trial < cfg.trials; ++trial) {
            const std::uint64_t cell_seed =
                derive_seed(cfg.seed, 10007ULL * static_cast<std::uint64_t>(cell_idx) +
                                          static_cast<std::uint64_t>(trial));
            const auto inst = make_instance(instance_params(local), cell_seed);
            try {
                const auto res = run_solver(local, inst);
                const double rel = phase_aligned_distance(res.xhat, inst.x0) /
                                   std::max(1e-300, core::norm2(inst.x0));
                errors.push_back(rel);
                if (rel < 1e-3) ++successes;
            } catch (const std::exception&) {
                errors.push_back(std::numeric_limits<double>::infinity());
            }
        }
        cells[static_cast<std::size_t>(cell_idx)] =
            Cell{m, k, static_cast<double>(successes) / static_cast<double>(cfg.trials),
                 quantile(errors, 0.5)};
    });

    std::ostringstream csv;
    csv << "m,k,q,success_rate,median_error\n";
    for (const auto& cell : cells) {
        csv << cell.m << ',' << cell.k << ',' << io::real_token(cfg.q) << ','
            << io::real_token(cell.success) << ',' << io::real_token(cell.median_error) << '\n';
    }
    io::write_text_file((dir / "phase_diagram.csv").string(), csv.str());
    std::cout << csv.str();
    return 0;
}

int cmd_lemma_test(const Config& cfg) {
    const auto dir = ensure_out_dir(cfg);
    nlohmann::ordered_json report;
    bool all_ok = true;

    { // sparse convex decomposition suite
        Rng rng(derive_seed(cfg.seed, 1));
        int failures = 0;
        const int trials = cfg.trials > 1 ? cfg.trials : 1000;
        for (int trial = 0; trial < trials; ++trial) {
            const int n = 3 + static_cast<int>(rng.below(22));
            const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            const double mu = 0.1 + 2.0 * rng.uniform();
            RVec v(n);
            for (int i = 0; i < n; ++i) v(i) = rng.uniform();
            const double mass = v.sum();
            if (mass > 0.0) v *= (0.2 + 0.8 * rng.uniform()) * static_cast<double>(k) * mu / mass;
            for (int i = 0; i < n; ++i) {
                v(i) = std::min(v(i), mu);
                if (rng.below(2) == 0) v(i) = -v(i);
            }
            const auto dec = sparse_convex_decompose(v, k, mu);
            const auto check = validate_decomposition(dec, v, k, mu);
            const double bound = std::sqrt(mu * v.cwiseAbs().sum()) + 1e-10;
            bool atom_ok = true;
            for (const auto& atom : dec.atoms) atom_ok = atom_ok && atom.norm() <= bound;
            if (!check.ok || !atom_ok) ++failures;
        }
        report["decomposition_trials"] = trials;
        report["decomposition_failures"] = failures;
        all_ok = all_ok && failures == 0;
        std::cout << "decomposition: " << (trials - failures) << "/" << trials << " ok\n";
    }

    { // rank-one distance lemma suite
        Rng rng(derive_seed(cfg.seed, 2));
        int failures = 0;
        const int trials = 10000;
        for (int trial = 0; trial < trials; ++trial) {
            const int n = 2 + static_cast<int>(rng.below(15));
            CVec u(n), v(n);
            for (int i = 0; i < n; ++i) {
                u(i) = rng.cnormal();
                v(i) = rng.cnormal();
            }
            u = phase_align(u, v);
            const double lhs = std::pow(lifted_distance(u, v), 2);
            const double diff = (u - v).squaredNorm();
            if (lhs < 0.5 * core::norm2_sq(u) * diff - 1e-10 ||
                lhs < 0.5 * core::norm2_sq(v) * diff - 1e-10)
                ++failures;
        }
        report["rank_one_trials"] = trials;
        report["rank_one_failures"] = failures;
        all_ok = all_ok && failures == 0;
        std::cout << "rank-one distance: " << (trials - failures) << "/" << trials << " ok\n";
    }

    { // tight-frame identity suite
        Rng rng(derive_seed(cfg.seed, 3));
        int failures = 0;
        int trials = 0;
        for (const auto family : {DictionaryFamily::identity, DictionaryFamily::truncated_unitary,
                                  DictionaryFamily::harmonic_frame}) {
            const int n = 6;
            const int N = family == DictionaryFamily::identity ? n : 10;
            for (int rep = 0; rep < 100; ++rep, ++trials) {
                const auto dict = make_dictionary(family, n, N, rng.next_u64());
                CMat y(n, n);
                for (int j = 0; j < n; ++j)
                    for (int i = 0; i < n; ++i) y(i, j) = rng.cnormal();
                y = core::hermitian_part(y);
                CVec x(n);
                for (int i = 0; i < n; ++i) x(i) = rng.cnormal();
                const double f1 = core::frobenius_norm(dict.matrix.adjoint() * y * dict.matrix);
                const double f2 = core::frobenius_norm(y);
                const double n1 = core::norm2(analysis(dict, x));
                const double n2 = core::norm2(x);
                if (std::abs(f1 - f2) > 1e-8 * std::max(1.0, f2) ||
                    std::abs(n1 - n2) > 1e-8 * std::max(1.0, n2))
                    ++failures;
            }
        }
        report["tight_frame_trials"] = trials;
        report["tight_frame_failures"] = failures;
        all_ok = all_ok && failures == 0;
        std::cout << "tight-frame identities: " << (trials - failures) << "/" << trials << " ok\n";
    }

    report["all_ok"] = all_ok;
    io::write_text_file((dir / "lemma_report.json").string(), report.dump(2) + "\n");
    return all_ok ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dictionary-sparse phase retrieval experiments"};
    app.require_subcommand(1);

    std::string config_path;
    Config cfg;
    std::uint64_t seed_flag = 0;
    std::string out_flag;
    int threads_flag = 0;
    bool timings_flag = false;

    app.add_option("--config", config_path, "configuration file (key=value lines or JSON)");
    auto* seed_opt = app.add_option("--seed", seed_flag, "master seed (overrides config)");
    auto* out_opt = app.add_option("--out", out_flag, "output directory (overrides config)");
    auto* threads_opt =
        app.add_option("--threads", threads_flag, "worker threads (overrides config)");
    auto* timings_opt = app.add_flag("--timings", timings_flag,
                                     "include wall-clock timings in outputs (not deterministic)");

    auto* gen = app.add_subcommand("gen", "generate and persist a problem instance");
    auto* solve = app.add_subcommand("solve", "run recovery trials and report errors");
    std::string solver_flag;
    solve->add_option("--solver", solver_flag, "l1 | lq | oracle (overrides config)");
    auto* drip = app.add_subcommand("drip", "sample restricted-isometry constants");
    bool probe_offdiag = false;
    drip->add_flag("--probe-offdiag", probe_offdiag,
                   "include the rank-two off-diagonal witness candidate");
    auto* verify = app.add_subcommand("verify", "check the stability-proof inequality panels");
    bool inject_flag = false;
    verify->add_flag("--inject", inject_flag, "corrupt candidates to exercise failing checks");
    auto* phase = app.add_subcommand("phase-diagram", "success-rate grid over (m, k)");
    auto* lemma = app.add_subcommand("lemma-test", "run the lemma verification suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) load_config_file(cfg, config_path);
        if (seed_opt->count() > 0) cfg.seed = seed_flag;
        if (out_opt->count() > 0) cfg.output_dir = out_flag;
        if (threads_opt->count() > 0) cfg.threads = threads_flag;
        if (timings_opt->count() > 0) cfg.timings = timings_flag;
        if (!solver_flag.empty()) cfg.solver = solver_flag;
        if (inject_flag) cfg.inject = true;

        if (gen->parsed()) return cmd_gen(cfg);
        if (solve->parsed()) return cmd_solve(cfg);
        if (drip->parsed()) return cmd_drip(cfg, probe_offdiag);
        if (verify->parsed()) return cmd_verify(cfg);
        if (phase->parsed()) return cmd_phase_diagram(cfg);
        if (lemma->parsed()) return cmd_lemma_test(cfg);
        return 2;
    } catch (const InvalidParameter& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
}
