#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tpca/oracle.hpp"

namespace tpca {

std::string build_version();

// Tasks: test, estimate, coeffs, statdim, verify, adversary-demo, baseline.
struct ExperimentConfig {
    std::string labelling = "1-1";
    std::vector<int> d_grid;
    std::vector<double> n_grid;
    double sigma2 = 1.0;
    std::vector<double> sigma2_grid;  // noise_scaling_sweep only
    Strategy strategy = Strategy::Exact;
    int trials = 1;
    std::optional<std::uint64_t> seed;
    std::string output = "tpca_run";
    std::string task = "estimate";
    bool transcripts = false;  // write one JSON-lines transcript per trial
    int threads = 1;
};

// Field-level ConfigError on unknown keys, wrong types or failed invariants.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
// Accepts a config document or a manifest written by run().
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& c);

struct TrialRow {
    int d = 0;
    double n = 0.0;
    int trial = 0;
    std::string variant;   // null or spiked
    std::string decision;  // test task: null or spiked; estimate: empty
    double error = 0.0;    // estimate: |V-hat - E T|; baseline: |cos|
    bool success = false;
    std::size_t queries_used = 0;
    std::size_t violations = 0;
    double wall_seconds = 0.0;
};

// Rows for the test / estimate / baseline tasks, sorted by (d, n, trial).
std::vector<TrialRow> run_trials(const ExperimentConfig& c);

struct SummaryRow {
    int d = 0;
    double n = 0.0;
    int trials = 0;
    double success_rate = 0.0;
    double mean_error = 0.0;
    std::size_t violations = 0;
};
std::vector<SummaryRow> summarize(const std::vector<TrialRow>& rows);

struct RunResult {
    std::vector<std::string> files;  // written paths, manifest last
    std::vector<TrialRow> rows;      // empty for table tasks
    std::size_t violations = 0;
};

// Writes <output>.csv, plus <output>.summary.csv and <output>.timing.csv for
// sweep tasks, then <output>.manifest.json. Throws GuardFailed after writing
// if any response was outside its envelope.
RunResult run(const ExperimentConfig& c);

struct NoiseRow {
    std::string kind;  // sq or small-noise
    double sigma2 = 0.0;
    int d = 0;
    double n_star = 0.0;        // first grid n with success rate >= 1/2, 0 if none
    double separation = 0.0;    // small-noise rows
    double var_times_d = 0.0;   // small-noise rows
};

struct NoiseSweep {
    std::vector<NoiseRow> rows;
    std::optional<double> slope;  // fitted d log n* / d log sigma2 over sq rows
};

// sigma2 >= 1 rows rerun the base sweep at that noise level; sigma2 < 1
// rows are read as c/d and handed to the small-noise value-query demo.
NoiseSweep noise_scaling_sweep(const ExperimentConfig& c);
void write_noise_csv(const NoiseSweep& s, std::ostream& out);

// One line per identity of the fourier and combinatorics suites.
struct VerifyLine {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};
std::vector<VerifyLine> verify_suite(std::uint64_t seed);

}  // namespace tpca
