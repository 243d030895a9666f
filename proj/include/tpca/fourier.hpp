#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tpca/labeling.hpp"
#include "tpca/tensor.hpp"

namespace tpca {

inline constexpr int kHermiteDegreeCap = 8;

// Orthonormal (probabilists') Hermite polynomial of degree n <= 8.
double hermite1(int n, double x);

// prod_i hermite1(c_i, x_i).
double hermite(const std::vector<int>& c, const std::vector<double>& x);

// Nodes and weights for E f(Z), Z ~ N(0, 1); weights sum to 1.
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};
const GaussRule& gauss_hermite_rule();  // 64 points

// E f(Z) for Z ~ N(0, I_m), m <= 3, on the tensorized rule.
double gauss_expectation(const std::function<double(const std::vector<double>&)>& f, int m);

// max |E[H_a H_b] - delta_ab| over multi-indices in dimension m with |a|,|b| <= total.
double hermite_orthonormality_residual(int m, int total);

// |E H_c(mu + Z) - mu^c / sqrt(c!)|; at most three nonzero c_i.
double hermite_shift_identity_check(const std::vector<double>& mu, const std::vector<int>& c);

struct SpikedHermiteCheck {
    double monte_carlo = 0.0;
    double standard_error = 0.0;
    double closed_form = 0.0;   // prod_i v_i^{labelled sums} / sqrt(d^{k|c|} c!)
    double cellwise = 0.0;      // prod over cells of mean^c / sqrt(c!)
    double residual = 0.0;      // |monte_carlo - closed_form|
    bool pass = false;          // residual <= 3 SE and the two exact forms agree
};

SpikedHermiteCheck spiked_hermite_mean_check(const LabelingFunction& lf, const std::vector<std::vector<double>>& factors,
                                             const CountTensor& c, std::size_t draws, std::uint64_t seed);

struct HypercontractivityReport {
    int d = 0;
    int q = 0;
    std::size_t cases = 0;
    std::size_t violations = 0;
    std::size_t parseval_failures = 0;
    double worst_ratio = 0.0;  // max LHS / RHS
};

// E[(T f)^q] <= (E f^2)^{q/2} on {-1,1}^d for random f with coefficients in
// {-1, 0, 1}, where T scales the monomial z^r by (q-1)^{-|r|/2}. Both sides
// are exact elements of Q(sqrt(q-1)) and are compared exactly.
HypercontractivityReport hypercontractivity_check(int d, int q, std::size_t trials, std::uint64_t seed);

// Exact comparison for one coefficient vector indexed by monomial bitmask.
// Returns LHS/RHS as a double and sets `holds`.
double hypercontractivity_ratio(int d, int q, const std::vector<int>& coeffs, bool& holds);

}  // namespace tpca
