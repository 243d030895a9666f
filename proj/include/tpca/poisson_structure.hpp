#pragma once

#include <cstdint>
#include <vector>

namespace tpca {

struct StratumCheck {
    int m = 0;
    std::size_t count = 0;
    double tv = 0.0;         // empirical joint of partial sums vs product of Mult(m, d)
    double tolerance = 0.0;  // 4 / sqrt(count)
};

struct PoissonReport {
    std::size_t trials = 0;
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 0.0;
    double p0_hat = 0.0;  // empirical P(|C|_1 = 0)
    double p0_se = 0.0;
    std::vector<StratumCheck> strata;  // m = 1..4 when observed
};

// C has d^k i.i.d. Pois(1/d^k) cells, drawn cell by cell. Checks
// |C|_1 ~ Pois(1) by chi-square and, given |C|_1 = m, that the k mode-wise
// partial-sum vectors are independent Mult(m, uniform on [d]).
PoissonReport poisson_structure_check(int d, int k, std::size_t trials, std::uint64_t seed);

// Exact version on count tensors with |c|_1 <= max_m: the largest absolute
// difference between the conditional law of the partial sums given m and
// the product of multinomials, both computed in rationals.
double exact_conditional_check(int d, int k, int max_m);

}  // namespace tpca
