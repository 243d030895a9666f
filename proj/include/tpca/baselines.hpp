#pragma once

#include <cstdint>
#include <vector>

#include "tpca/labeling.hpp"
#include "tpca/model.hpp"
#include "tpca/tensor.hpp"

namespace tpca {

Tensor empirical_mean(const SampleSet& samples);

struct SpectralResult {
    std::vector<double> left;   // length d^ceil(k/2), unit
    std::vector<double> right;  // length d^floor(k/2), unit
    double sigma1 = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Top singular pair of the d^ceil(k/2) x d^floor(k/2) flattening (leading
// modes as rows) by power iteration on M^T M from a seeded start.
// Throws NoConvergence if the cap is hit and `strict` is set.
SpectralResult flatten_spectral(const Tensor& tbar, const LabelingFunction& lf, double tol = 1e-8,
                                int max_iter = 1000, std::uint64_t seed = 1, bool strict = true);

// Top singular pair of a matrix, same iteration.
SpectralResult top_singular_pair(const Matrix& m, double tol = 1e-8, int max_iter = 1000, std::uint64_t seed = 1,
                                 bool strict = true);

// |<right, v (x) ... (x) v>| / d^{m/2} with m = floor(k/2) copies of v;
// the right singular vector estimates the spike of the trailing modes.
double spectral_alignment(const SpectralResult& r, const std::vector<double>& v);

// T(x, ..., x) for a tensor of any order.
double multilinear_form(const Tensor& t, const std::vector<double>& x);

struct PowerIterationResult {
    std::vector<double> x;
    double objective = 0.0;
    int iterations = 0;
};

// Shifted higher-order power iteration: x <- (g + alpha x)/|.| with g the
// symmetrized contraction T(., x, ..., x). The shift doubles whenever a step
// would lower the objective, so T(x, ..., x) never decreases.
PowerIterationResult tensor_power_iteration(const Tensor& tbar, std::vector<double> init, int iters,
                                            double tol = 1e-12);

// Best of `restarts` runs from seeded Gaussian starts.
PowerIterationResult tensor_power_multistart(const Tensor& tbar, int restarts, int iters, std::uint64_t seed);

struct MleDemoRow {
    int d = 0;
    double c = 0.0;
    double sigma2 = 0.0;
    int trials = 0;
    double mean_spiked = 0.0;
    double mean_null = 0.0;
    double separation = 0.0;
    double var_spiked = 0.0;
    double var_null = 0.0;
    double var_times_d = 0.0;  // the reported C in Var <= C/d
    bool pass = false;         // separation >= 0.5
};

// Small-noise demo for k = 3 symmetric: q(T) = max_{|x|=1} T(x,x,x),
// approximated by 50-start power iteration, sampled under D_V(c/d) and
// D_0(c/d). Values are approximate.
MleDemoRow mle_value_query_demo(int d, double c, int trials, std::uint64_t seed, int restarts = 50);

}  // namespace tpca
