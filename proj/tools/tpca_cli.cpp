// Command-line front end. Every subcommand that produces a table goes through
// the harness so that it also leaves a manifest next to its CSV.
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tpca/errors.hpp"
#include "tpca/harness.hpp"
#include "tpca/labeling.hpp"
#include "tpca/model.hpp"
#include "tpca/sq_algorithms.hpp"

using namespace tpca;

namespace {

struct Common {
    std::string lf = "1-1";
    std::vector<int> d{8};
    std::vector<double> n;
    double sigma2 = 1.0;
    std::string strategy = "exact";
    int trials = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string output;
    bool transcripts = false;
    int threads = 1;
};

void add_common(CLI::App* app, Common& c, bool with_n, bool with_strategy) {
    app->add_option("--lf", c.lf, "labelling, e.g. 1-1 or 1-1-2");
    app->add_option("-d,--d", c.d, "dimension grid")->expected(1, -1);
    if (with_n) app->add_option("-n,--n", c.n, "effective sample size grid")->expected(1, -1);
    app->add_option("--sigma2", c.sigma2, "noise variance");
    if (with_strategy) {
        app->add_option("--strategy", c.strategy, "exact, empirical, maxshift, nullmimic, signalcancel or graph");
        app->add_flag("--transcripts", c.transcripts, "write JSON-lines oracle transcripts per trial");
    }
    app->add_option("--trials", c.trials, "trials per (d, n)");
    app->add_option("--seed", c.seed, "master seed")->required();
    app->add_option("-o,--output", c.output, "output path prefix")->required();
    app->add_option("--threads", c.threads, "worker threads");
}

ExperimentConfig to_config(const Common& c, const std::string& task) {
    ExperimentConfig cfg;
    cfg.labelling = c.lf;
    cfg.d_grid = c.d;
    cfg.n_grid = c.n;
    cfg.sigma2 = c.sigma2;
    cfg.strategy = parse_strategy(c.strategy);
    cfg.trials = c.trials;
    cfg.seed = c.seed;
    cfg.output = c.output;
    cfg.task = task;
    cfg.transcripts = c.transcripts;
    cfg.threads = c.threads;
    return cfg;
}

void print_summary(const RunResult& r) {
    if (!r.rows.empty()) {
        std::cout << "d,n,trials,success_rate,mean_error,violations\n";
        for (const SummaryRow& s : summarize(r.rows))
            std::cout << s.d << ',' << s.n << ',' << s.trials << ',' << s.success_rate << ',' << s.mean_error << ','
                      << s.violations << '\n';
    }
    for (const std::string& f : r.files) std::cerr << "wrote " << f << '\n';
}

void print_csv_file(const std::string& path) {
    std::ifstream in(path);
    std::cout << in.rdbuf();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tensor PCA statistical-query lab"};
    app.require_subcommand(1);

    // gen
    std::string gen_lf = "1-1", gen_out, gen_variant = "spiked", gen_format = "binary";
    int gen_d = 8;
    std::size_t gen_n = 1;
    double gen_sigma2 = 1.0;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("gen", "draw samples from D_0 or D_V");
    gen->add_option("--lf", gen_lf);
    gen->add_option("-d,--d", gen_d);
    gen->add_option("-n,--n", gen_n);
    gen->add_option("--sigma2", gen_sigma2);
    gen->add_option("--variant", gen_variant)->check(CLI::IsMember({"null", "spiked"}));
    gen->add_option("--format", gen_format)->check(CLI::IsMember({"binary", "csv"}));
    gen->add_option("--seed", gen_seed)->required();
    gen->add_option("-o,--output", gen_out)->required();

    Common test_c, est_c, coeff_c, stat_c, base_c, adv_c;
    auto* sq_test = app.add_subcommand("sq-test", "SQ hypothesis test sweep (alternates null and spiked trials)");
    add_common(sq_test, test_c, true, true);
    auto* sq_est = app.add_subcommand("sq-estimate", "SQ estimation sweep");
    add_common(sq_est, est_c, true, true);
    auto* coeffs = app.add_subcommand("coeffs", "coefficient table: lf, d, pattern, method, value, bound");
    add_common(coeffs, coeff_c, false, false);
    auto* statdim = app.add_subcommand("statdim", "statistical dimension lower bounds");
    add_common(statdim, stat_c, true, false);
    auto* baseline = app.add_subcommand("baseline", "flattening spectral baseline on real samples");
    add_common(baseline, base_c, true, false);
    auto* adversary = app.add_subcommand("adversary-demo", "graph adversary against the sq_estimate transcript");
    add_common(adversary, adv_c, true, false);

    std::uint64_t verify_seed = 1;
    std::string verify_out;
    auto* verify = app.add_subcommand("verify", "analytic identity suite");
    verify->add_option("--seed", verify_seed);
    verify->add_option("-o,--output", verify_out, "also write CSV and manifest with this prefix");

    std::string sweep_config, sweep_out, sweep_task, sweep_strategy;
    std::vector<double> sweep_sigma2;
    std::optional<std::uint64_t> sweep_seed;
    std::optional<int> sweep_trials;
    bool sweep_noise = false;
    auto* sweep = app.add_subcommand("sweep", "run a JSON config; flags override its fields");
    sweep->add_option("config", sweep_config, "config or manifest JSON")->required();
    sweep->add_option("-o,--output", sweep_out);
    sweep->add_option("--task", sweep_task);
    sweep->add_option("--strategy", sweep_strategy);
    sweep->add_option("--seed", sweep_seed);
    sweep->add_option("--trials", sweep_trials);
    sweep->add_option("--sigma2-grid", sweep_sigma2)->expected(1, -1);
    sweep->add_flag("--noise", sweep_noise, "noise scaling sweep over sigma2_grid");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            LabelingFunction lf = parse_labeling(gen_lf);
            DistributionSpec spec =
                gen_variant == "null"
                    ? DistributionSpec::null(gen_d, lf.k, gen_sigma2)
                    : DistributionSpec::spiked(lf, random_hypercube_factors(lf.K, gen_d, derive_seed(gen_seed, {1})),
                                               gen_sigma2);
            SampleSet s = sample(spec, gen_n, derive_seed(gen_seed, {2}));
            std::ofstream out(gen_out, std::ios::binary);
            if (gen_format == "csv")
                write_csv(s, out);
            else
                write_binary(s, out);
            std::cerr << "wrote " << gen_n << " samples to " << gen_out << '\n';
        } else if (*sq_test) {
            print_summary(run(to_config(test_c, "test")));
        } else if (*sq_est) {
            print_summary(run(to_config(est_c, "estimate")));
        } else if (*baseline) {
            print_summary(run(to_config(base_c, "baseline")));
        } else if (*coeffs || *statdim || *adversary) {
            const Common& c = *coeffs ? coeff_c : *statdim ? stat_c : adv_c;
            std::string task = *coeffs ? "coeffs" : *statdim ? "statdim" : "adversary-demo";
            RunResult r = run(to_config(c, task));
            print_csv_file(r.files.front());
        } else if (*verify) {
            std::vector<VerifyLine> lines;
            if (!verify_out.empty()) {
                ExperimentConfig cfg;
                cfg.task = "verify";
                cfg.seed = verify_seed;
                cfg.output = verify_out;
                run(cfg);
            }
            lines = verify_suite(verify_seed);
            bool all = true;
            for (const VerifyLine& l : lines) {
                std::cout << std::left << std::setw(44) << l.name << ' ' << (l.pass ? "PASS" : "FAIL") << "  value "
                          << std::setprecision(6) << l.value << "  tol " << l.tolerance << '\n';
                all = all && l.pass;
            }
            return all ? 0 : 1;
        } else if (*sweep) {
            ExperimentConfig cfg = load_config(sweep_config);
            if (!sweep_out.empty()) cfg.output = sweep_out;
            if (!sweep_task.empty()) cfg.task = sweep_task;
            if (!sweep_strategy.empty()) cfg.strategy = parse_strategy(sweep_strategy);
            if (sweep_seed) cfg.seed = *sweep_seed;
            if (sweep_trials) cfg.trials = *sweep_trials;
            if (!sweep_sigma2.empty()) cfg.sigma2_grid = sweep_sigma2;
            validate(cfg);
            if (sweep_noise) {
                NoiseSweep s = noise_scaling_sweep(cfg);
                std::ofstream out(cfg.output + ".noise.csv", std::ios::binary);
                write_noise_csv(s, out);
                write_noise_csv(s, std::cout);
                if (s.slope) std::cout << "slope," << *s.slope << '\n';
            } else {
                RunResult r = run(cfg);
                if (r.rows.empty())
                    print_csv_file(r.files.front());
                else
                    print_summary(r);
            }
        }
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    return 0;
}
