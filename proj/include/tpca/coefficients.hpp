#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tpca/labeling.hpp"

namespace tpca {

using Pattern = std::vector<int>;  // l_1..l_K

enum class CoeffMethod { Series, Enumeration, MonteCarlo };
std::string to_string(CoeffMethod m);

// |value - truth| <= bound. For MonteCarlo the bound is five standard
// errors plus the stratification tail, so it holds with high probability.
struct CoeffResult {
    double value = 0.0;
    double bound = 0.0;
    CoeffMethod method = CoeffMethod::Series;
};

// C has i.i.d. Pois(1/d^k) entries, so |C|_1 ~ Pois(1). Both coefficients
// are probabilities of |C|_1 >= 1 together with the labelled parity vector of
// C equal to (1 on the first l_i coordinates, 0 elsewhere) for every label;
// p_bar additionally requires C to vanish on supp(prior_mean_tensor).

// (1/e) sum_{a<=A} (1/a!) prod_i E[Xbar^{a s_i} X_1..X_{l_i}], minus 1/e for
// the zero pattern. Bound e/(A+1)!.
CoeffResult p_pi_series(const LabelingFunction& lf, int d, const Pattern& l, int A = 12);

// Exact sum over count tensors with |c|_1 <= M. Bound P(Pois(1) > M).
CoeffResult p_pi_enumeration(const LabelingFunction& lf, int d, const Pattern& l, int M = 8);

// Enumeration restricted to count tensors disjoint from supp(V-bar). At the
// zero pattern the closed form is evaluated too and must agree.
CoeffResult p_bar_pi(const LabelingFunction& lf, int d, const Pattern& l, int M = 8);

// Closed form for every pattern: every cell of supp(V-bar) leaves all
// parities unchanged, so with mu = E[W], W = prod_i Xbar_i^{s_i},
//   p_bar(l) = e^{-mu} p(l)                          for l != 0,
//   p_bar(0) = (1/e) sum_{a=2..A} E[(W - mu)^a] / a!  (+ tail bound).
CoeffResult p_bar_pi_series(const LabelingFunction& lf, int d, const Pattern& l, int A = 12);

struct MonteCarloTable {
    std::vector<Pattern> patterns;
    std::vector<CoeffResult> results;
    std::size_t samples = 0;
};

// Stratified by m = |C|_1 = 1..max_m with Poisson weights; given m the cells
// are i.i.d. uniform, so one set of draws covers every pattern.
MonteCarloTable p_pi_monte_carlo(const LabelingFunction& lf, int d, const std::vector<Pattern>& patterns,
                                 std::size_t samples, std::uint64_t seed, int max_m = 12);

// Patterns with l_i <= cap_i and sum <= total.
std::vector<Pattern> patterns_up_to(const LabelingFunction& lf, int max_entry, int max_total);

// Exponent from the case table for p_pi(l) as d grows.
double predicted_exponent(const LabelingFunction& lf, const Pattern& l);

struct ScalingFit {
    std::vector<int> d_grid;
    std::vector<double> values;
    double slope = 0.0;
    double predicted = 0.0;
    double deviation = 0.0;
};

ScalingFit verify_scaling(const LabelingFunction& lf, const Pattern& l, const std::vector<int>& d_grid, int A = 12);

// P(Pois(1) > M).
double poisson_tail(int M);

}  // namespace tpca
