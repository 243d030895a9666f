#include "tpca/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "tpca/adversary.hpp"
#include "tpca/baselines.hpp"
#include "tpca/coefficients.hpp"
#include "tpca/errors.hpp"
#include "tpca/fourier.hpp"
#include "tpca/labeling.hpp"
#include "tpca/model.hpp"
#include "tpca/poisson_structure.hpp"
#include "tpca/rademacher.hpp"
#include "tpca/rng.hpp"
#include "tpca/sq_algorithms.hpp"
#include "tpca/statdim.hpp"

#ifndef TPCA_VERSION
#define TPCA_VERSION "unknown"
#endif

namespace tpca {

using nlohmann::json;

std::string build_version() { return TPCA_VERSION; }

namespace {

const std::set<std::string> kTasks = {"test", "estimate", "coeffs", "statdim", "verify", "adversary-demo", "baseline"};

std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
}

template <class T>
T field(const json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("field '" + key + "': " + e.what());
    }
}

}  // namespace

void validate(const ExperimentConfig& c) {
    if (!kTasks.count(c.task)) throw ConfigError("field 'task': unknown task '" + c.task + "'");
    if (!c.seed) throw ConfigError("field 'seed': required");
    if (c.trials < 1) throw ConfigError("field 'trials': must be at least 1");
    if (c.threads < 1) throw ConfigError("field 'threads': must be at least 1");
    if (c.d_grid.empty() && c.task != "verify") throw ConfigError("field 'd_grid': must be nonempty");
    for (int d : c.d_grid)
        if (d < 1) throw ConfigError("field 'd_grid': entries must be positive");
    bool needs_n = c.task == "test" || c.task == "estimate" || c.task == "statdim" || c.task == "baseline";
    if (needs_n && c.n_grid.empty()) throw ConfigError("field 'n_grid': must be nonempty");
    for (double n : c.n_grid)
        if (!(n >= 1.0)) throw ConfigError("field 'n_grid': entries must be at least 1");
    if (!(c.sigma2 > 0.0)) throw ConfigError("field 'sigma2': must be positive");
    for (double s : c.sigma2_grid)
        if (!(s > 0.0)) throw ConfigError("field 'sigma2_grid': entries must be positive");
    try {
        parse_labeling(c.labelling);
    } catch (const Error& e) {
        throw ConfigError(std::string("field 'labelling': ") + e.what());
    }
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known = {"labelling", "d_grid", "n_grid", "sigma2", "sigma2_grid", "strategy",
                                                "trials", "seed", "output", "task", "transcripts", "threads"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ConfigError("field '" + it.key() + "': unknown");
    ExperimentConfig c;
    if (j.contains("labelling")) c.labelling = field<std::string>(j, "labelling");
    if (j.contains("d_grid")) c.d_grid = field<std::vector<int>>(j, "d_grid");
    if (j.contains("n_grid")) c.n_grid = field<std::vector<double>>(j, "n_grid");
    if (j.contains("sigma2")) c.sigma2 = field<double>(j, "sigma2");
    if (j.contains("sigma2_grid")) c.sigma2_grid = field<std::vector<double>>(j, "sigma2_grid");
    if (j.contains("strategy")) {
        try {
            c.strategy = parse_strategy(field<std::string>(j, "strategy"));
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(std::string("field 'strategy': ") + e.what());
        }
    }
    if (j.contains("trials")) c.trials = field<int>(j, "trials");
    if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed");
    if (j.contains("output")) c.output = field<std::string>(j, "output");
    if (j.contains("task")) c.task = field<std::string>(j, "task");
    if (j.contains("transcripts")) c.transcripts = field<bool>(j, "transcripts");
    if (j.contains("threads")) c.threads = field<int>(j, "threads");
    validate(c);
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["labelling"] = c.labelling;
    j["d_grid"] = c.d_grid;
    j["n_grid"] = c.n_grid;
    j["sigma2"] = c.sigma2;
    j["sigma2_grid"] = c.sigma2_grid;
    j["strategy"] = to_string(c.strategy);
    j["trials"] = c.trials;
    if (c.seed) j["seed"] = *c.seed;
    j["output"] = c.output;
    j["task"] = c.task;
    j["transcripts"] = c.transcripts;
    j["threads"] = c.threads;
    return j;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (j.is_object() && j.value("kind", "") == "tpca-manifest") return config_from_json(j.at("config"));
    return config_from_json(j);
}

namespace {

struct Cell {
    int d;
    double n;
    int trial;
};

TrialRow run_one(const ExperimentConfig& c, const LabelingFunction& lf, const Cell& cell, const std::string& dir) {
    auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t seed = derive_seed(*c.seed, {static_cast<std::uint64_t>(cell.d),
                                                     static_cast<std::uint64_t>(std::llround(cell.n)),
                                                     static_cast<std::uint64_t>(cell.trial)});
    TrialRow row;
    row.d = cell.d;
    row.n = cell.n;
    row.trial = cell.trial;
    auto factors = random_hypercube_factors(lf.K, cell.d, derive_seed(seed, {1}));
    DistributionSpec spiked = DistributionSpec::spiked(lf, factors, c.sigma2);
    bool use_null = c.task == "test" && cell.trial % 2 == 0;
    DistributionSpec target = use_null ? DistributionSpec::null(cell.d, lf.k, c.sigma2) : spiked;
    row.variant = use_null ? "null" : "spiked";

    if (c.task == "baseline") {
        SampleSet s = sample(target, static_cast<std::size_t>(cell.n), derive_seed(seed, {2}));
        SpectralResult r = flatten_spectral(empirical_mean(s), lf, 1e-10, 5000, derive_seed(seed, {3}), false);
        row.error = spectral_alignment(r, factors[lf.assignment[lf.k - 1] - 1]);
        row.success = row.error >= 0.8;
    } else {
        OracleOptions opt;
        opt.strategy = c.strategy;
        opt.n = cell.n;
        opt.seed = derive_seed(seed, {4});
        opt.record = c.transcripts;
        VstatOracle oracle(target, opt);
        if (c.task == "test") {
            SqResult r = sq_test_general(oracle, lf);
            row.decision = r.decision && *r.decision == Variant::Spiked ? "spiked" : "null";
            row.error = r.statistic;
            row.success = row.decision == row.variant;
            row.queries_used = r.queries_used;
        } else {
            SqResult r = sq_estimate(oracle, lf);
            row.error = r.estimate ? (*r.estimate - target.mean()).norm() : target.mean().norm();
            row.success = row.error <= 0.25;
            row.queries_used = r.queries_used;
        }
        row.violations = oracle.violations();
        if (c.transcripts) {
            std::ofstream out(dir + "/" + std::to_string(cell.d) + "_" + fmt(cell.n) + "_" +
                              std::to_string(cell.trial) + ".jsonl");
            write_transcript_jsonl(oracle.transcript(), out);
        }
    }
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

}  // namespace

std::vector<TrialRow> run_trials(const ExperimentConfig& c) {
    validate(c);
    if (c.task != "test" && c.task != "estimate" && c.task != "baseline")
        throw ConfigError("field 'task': run_trials handles test, estimate and baseline");
    LabelingFunction lf = parse_labeling(c.labelling);
    std::vector<Cell> cells;
    for (int d : c.d_grid)
        for (double n : c.n_grid)
            for (int t = 0; t < c.trials; ++t) cells.push_back({d, n, t});
    std::string dir;
    if (c.transcripts) {
        dir = c.output + ".transcripts";
        std::filesystem::create_directories(dir);
    }
    std::vector<TrialRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < cells.size();) {
            try {
                rows[i] = run_one(c, lf, cells[i], dir);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
            }
        }
    };
    if (c.threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < c.threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (err) std::rethrow_exception(err);
    std::sort(rows.begin(), rows.end(), [](const TrialRow& a, const TrialRow& b) {
        return std::tie(a.d, a.n, a.trial) < std::tie(b.d, b.n, b.trial);
    });
    return rows;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRow>& rows) {
    std::vector<SummaryRow> out;
    for (const TrialRow& r : rows) {
        if (out.empty() || out.back().d != r.d || out.back().n != r.n) out.push_back({r.d, r.n, 0, 0.0, 0.0, 0});
        SummaryRow& s = out.back();
        ++s.trials;
        s.success_rate += r.success;
        s.mean_error += r.error;
        s.violations += r.violations;
    }
    for (SummaryRow& s : out) {
        s.success_rate /= s.trials;
        s.mean_error /= s.trials;
    }
    return out;
}

namespace {

void write_trial_csv(const std::vector<TrialRow>& rows, std::ostream& out) {
    out << "d,n,trial,variant,decision,error,success,queries_used,violations\n";
    for (const TrialRow& r : rows)
        out << r.d << ',' << fmt(r.n) << ',' << r.trial << ',' << r.variant << ',' << r.decision << ','
            << fmt(r.error) << ',' << (r.success ? 1 : 0) << ',' << r.queries_used << ',' << r.violations << '\n';
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
    out << "d,n,trials,success_rate,mean_error,violations\n";
    for (const SummaryRow& s : rows)
        out << s.d << ',' << fmt(s.n) << ',' << s.trials << ',' << fmt(s.success_rate) << ',' << fmt(s.mean_error)
            << ',' << s.violations << '\n';
}

std::string pattern_string(const Pattern& l) {
    std::string s;
    for (std::size_t i = 0; i < l.size(); ++i) s += (i ? ";" : "") + std::to_string(l[i]);
    return s;
}

void write_coeffs_csv(const ExperimentConfig& c, std::ostream& out) {
    LabelingFunction lf = parse_labeling(c.labelling);
    out << "lf,d,pattern,method,value,bound\n";
    for (int d : c.d_grid) {
        for (const Pattern& l : patterns_up_to(lf, std::min(d, 4), 4)) {
            std::vector<CoeffResult> res = {p_pi_series(lf, d, l)};
            try {
                res.push_back(p_pi_enumeration(lf, d, l));
            } catch (const TooLarge&) {
            }
            for (const CoeffResult& r : res)
                out << to_string(lf) << ',' << d << ',' << pattern_string(l) << ',' << to_string(r.method) << ','
                    << fmt(r.value) << ',' << fmt(r.bound) << '\n';
        }
    }
}

void write_statdim_csv(const ExperimentConfig& c, std::ostream& out) {
    LabelingFunction lf = parse_labeling(c.labelling);
    out << "lf,d,n,reference,u_star,log10_bound,certified\n";
    for (int d : c.d_grid)
        for (double n : c.n_grid)
            for (Reference ref : {Reference::D0, Reference::Prior}) {
                Task task = ref == Reference::D0 ? Task::Testing : Task::Estimation;
                SdnBound b = sdn_lower_bound(lf, d, n, ref, task);
                out << to_string(lf) << ',' << d << ',' << fmt(n) << ',' << to_string(ref) << ',' << b.u_star << ','
                    << fmt(b.log10_bound) << ',' << (b.certified ? 1 : 0) << '\n';
            }
}

std::size_t write_adversary_csv(const ExperimentConfig& c, std::ostream& out) {
    LabelingFunction lf = parse_labeling(c.labelling);
    out << "d,n,queries,vertices,survivors,found,mean_distance,worst_ratio_first,worst_ratio_second\n";
    std::size_t violations = 0;
    for (int d : c.d_grid) {
        std::vector<double> ns = c.n_grid.empty() ? std::vector<double>{std::max(1.0, d / 4.0)} : c.n_grid;
        for (double n : ns) {
            DistributionSpec null = DistributionSpec::null(d, lf.k, c.sigma2);
            OracleOptions opt;
            opt.strategy = Strategy::GraphAdversary;
            opt.n = n;
            opt.seed = derive_seed(*c.seed, {static_cast<std::uint64_t>(d)});
            opt.record = true;
            VstatOracle oracle(null, opt);
            sq_estimate(oracle, lf);
            violations += oracle.violations();
            auto cert = graph_adversary_certificate(oracle.transcript(), lf, d, n, c.sigma2);
            out << d << ',' << fmt(n) << ',' << oracle.queries_used() << ',';
            if (cert)
                out << cert->vertices << ',' << cert->survivors << ",1," << fmt(cert->mean_distance) << ','
                    << fmt(cert->worst_ratio_first) << ',' << fmt(cert->worst_ratio_second) << '\n';
            else
                out << (std::size_t{1} << (d * lf.K)) << ",0,0,0,0,0\n";
        }
    }
    return violations;
}

void write_verify_csv(const std::vector<VerifyLine>& lines, std::ostream& out) {
    out << "identity,value,tolerance,pass\n";
    for (const VerifyLine& l : lines)
        out << l.name << ',' << fmt(l.value) << ',' << fmt(l.tolerance) << ',' << (l.pass ? 1 : 0) << '\n';
}

}  // namespace

RunResult run(const ExperimentConfig& c) {
    validate(c);
    RunResult res;
    const std::string main_csv = c.output + ".csv";
    {
        std::filesystem::path p(main_csv);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream out(main_csv, std::ios::binary);
    if (!out) throw ConfigError("field 'output': cannot write '" + main_csv + "'");
    res.files.push_back(main_csv);
    if (c.task == "test" || c.task == "estimate" || c.task == "baseline") {
        res.rows = run_trials(c);
        write_trial_csv(res.rows, out);
        std::ofstream sum(c.output + ".summary.csv", std::ios::binary);
        write_summary_csv(summarize(res.rows), sum);
        res.files.push_back(c.output + ".summary.csv");
        std::ofstream timing(c.output + ".timing.csv", std::ios::binary);
        timing << "d,n,trial,wall_seconds\n";
        for (const TrialRow& r : res.rows)
            timing << r.d << ',' << fmt(r.n) << ',' << r.trial << ',' << fmt(r.wall_seconds) << '\n';
        res.files.push_back(c.output + ".timing.csv");
        for (const TrialRow& r : res.rows) res.violations += r.violations;
    } else if (c.task == "coeffs") {
        write_coeffs_csv(c, out);
    } else if (c.task == "statdim") {
        write_statdim_csv(c, out);
    } else if (c.task == "adversary-demo") {
        res.violations = write_adversary_csv(c, out);
    } else {
        write_verify_csv(verify_suite(*c.seed), out);
    }
    out.close();

    json m;
    m["kind"] = "tpca-manifest";
    m["version"] = build_version();
    m["config"] = config_to_json(c);
    std::vector<std::string> names;
    for (const std::string& f : res.files) names.push_back(std::filesystem::path(f).filename().string());
    m["files"] = names;
    m["envelope_violations"] = res.violations;
    const std::string manifest = c.output + ".manifest.json";
    std::ofstream mo(manifest, std::ios::binary);
    mo << m.dump(2) << '\n';
    res.files.push_back(manifest);
    if (res.violations) throw GuardFailed(std::to_string(res.violations) + " envelope violations in " + main_csv);
    return res;
}

NoiseSweep noise_scaling_sweep(const ExperimentConfig& c) {
    validate(c);
    NoiseSweep s;
    std::vector<double> xs, ys;
    for (double sigma2 : c.sigma2_grid) {
        if (sigma2 < 1.0) {
            for (int d : c.d_grid) {
                MleDemoRow m = mle_value_query_demo(d, sigma2 * d, c.trials, derive_seed(*c.seed, {0x6d6c65}), 20);
                s.rows.push_back({"small-noise", sigma2, d, 0.0, m.separation, m.var_times_d});
            }
            continue;
        }
        ExperimentConfig base = c;
        base.sigma2 = sigma2;
        base.transcripts = false;
        std::vector<SummaryRow> sum = summarize(run_trials(base));
        for (int d : c.d_grid) {
            NoiseRow row{"sq", sigma2, d, 0.0, 0.0, 0.0};
            for (const SummaryRow& r : sum)
                if (r.d == d && r.success_rate >= 0.5) {
                    row.n_star = r.n;
                    break;
                }
            if (row.n_star > 0.0) {
                xs.push_back(std::log(sigma2));
                ys.push_back(std::log(row.n_star));
            }
            s.rows.push_back(row);
        }
    }
    std::set<double> distinct(xs.begin(), xs.end());
    if (distinct.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
        mx /= xs.size();
        my /= ys.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        s.slope = sxy / sxx;
    }
    return s;
}

void write_noise_csv(const NoiseSweep& s, std::ostream& out) {
    out << "kind,sigma2,d,n_star,separation,var_times_d\n";
    for (const NoiseRow& r : s.rows)
        out << r.kind << ',' << fmt(r.sigma2) << ',' << r.d << ',' << fmt(r.n_star) << ',' << fmt(r.separation) << ','
            << fmt(r.var_times_d) << '\n';
}

std::vector<VerifyLine> verify_suite(std::uint64_t seed) {
    std::vector<VerifyLine> out;
    auto add = [&](std::string name, double value, double tol, bool pass) {
        out.push_back({std::move(name), value, tol, pass});
    };
    auto le = [&](std::string name, double value, double tol) { add(std::move(name), value, tol, value <= tol); };

    le("hermite_orthonormality_1d", hermite_orthonormality_residual(1, 8), 1e-10);
    le("hermite_orthonormality_2d", hermite_orthonormality_residual(2, 4), 1e-10);
    le("hermite_orthonormality_3d", hermite_orthonormality_residual(3, 2), 1e-10);

    Rng rng(derive_seed(seed, {0x7631}));
    double worst_shift = 0.0;
    for (int t = 0; t < 50; ++t) {
        std::vector<double> mu(3);
        std::vector<int> c(3);
        for (int i = 0; i < 3; ++i) {
            mu[i] = 2.0 * rng.uniform() - 1.0;
            c[i] = static_cast<int>(rng.below(5));
        }
        worst_shift = std::max(worst_shift, hermite_shift_identity_check(mu, c));
    }
    le("hermite_shift_identity", worst_shift, 1e-10);

    {
        LabelingFunction lf = parse_labeling("1-1-2");
        const int d = 3;
        auto f = random_hypercube_factors(lf.K, d, derive_seed(seed, {0x7632}));
        CountTensor c(d, lf.k);
        for (int t = 0; t < 3; ++t) c.add(rng.below(entry_count(d, lf.k)), 1);
        SpikedHermiteCheck h = spiked_hermite_mean_check(lf, f, c, 200000, derive_seed(seed, {0x7633}));
        add("spiked_hermite_mean", h.residual, 3.0 * h.standard_error, h.pass);
    }

    std::size_t cases = 0, violations = 0;
    double worst = 0.0;
    for (int d = 1; d <= 4; ++d)
        for (int q : {4, 6}) {
            HypercontractivityReport r = hypercontractivity_check(d, q, 125, seed);
            cases += r.cases + r.parseval_failures;
            violations += r.violations + r.parseval_failures;
            worst = std::max(worst, r.worst_ratio);
        }
    add("hypercontractivity_violations_of_" + std::to_string(cases), static_cast<double>(violations), 0.0,
        violations == 0);
    add("hypercontractivity_worst_ratio", worst, 1.0, worst <= 1.0 + 1e-12);

    {
        LabelingFunction sym = parse_labeling("1-1"), asym = parse_labeling("1-2");
        const double e1 = std::exp(-1.0);
        le("p_symmetric_d1_zero", std::fabs(p_pi_series(sym, 1, {0}).value - (1.0 - e1)), 1e-10);
        le("p_asymmetric_d1_ones", std::fabs(p_pi_series(asym, 1, {1, 1}).value - e1 * std::sinh(1.0)), 1e-10);
        le("p_asymmetric_d1_zero", std::fabs(p_pi_series(asym, 1, {0, 0}).value - e1 * (std::cosh(1.0) - 1.0)), 1e-10);
    }

    {
        bool ok = true;
        for (int d = 1; d <= 6; ++d)
            for (int s = 0; s <= 4; ++s)
                for (int l = 0; l <= std::min(d, 4); ++l)
                    ok = ok && rademacher_moment(d, s, l) == rademacher_moment_bruteforce(d, s, l);
        add("rademacher_moment_vs_enumeration", ok ? 0.0 : 1.0, 0.0, ok);
    }

    le("poisson_conditional_exact", exact_conditional_check(2, 2, 3), 1e-12);
    return out;
}

}  // namespace tpca
