#pragma once

#include <cstddef>

#include "tpca/oracle.hpp"
#include "tpca/query.hpp"

namespace tpca {

struct MeanEstimate {
    double estimate = 0.0;
    std::size_t queries_used = 0;
};

// Estimates E q for a Bounded query (E q^2 <= B) from unit queries only.
//
// A bisection on indicator queries locates a rough centre m0, then
//   E q = m0 + int_0^inf P(q - m0 > t) dt - int_0^inf P(q - m0 < -t) dt
// is integrated over geometric slabs [a, 2a], a = xi/4 * 2^j, each slab
// being a single ramp query whose mean is that slab's share of the integral.
// The query count is fixed by (n, B, xi); it does not adapt to responses.
MeanEstimate estimate_mean(Oracle& oracle, const Query& q, double xi);

// Number of queries estimate_mean makes for these parameters.
std::size_t estimate_mean_query_count(double n, double B, double xi);

// 8 log(n) sqrt(var/n) + xi.
double fact1_error_bound(double n, double var, double xi);

// VSTAT(D2, n2) built on top of VSTAT(D1, n1) with sigma2_2 = S sigma2_1 and
// n2 = S n1 / (256 log^2 n1). Each outer query q is answered by estimating
// the mean of Q(T) = E_G q(T + sqrt(sigma2_2 - sigma2_1) G) through the
// inner oracle.
class DownscaledOracle : public Oracle {
public:
    DownscaledOracle(Oracle& inner, int S);
    DownscaledOracle(Oracle& inner, const DistributionSpec& d2, int S);

    double respond(const Query& q) override;
    double n() const override { return n2_; }
    const DistributionSpec& target() const override { return target_; }
    std::size_t queries_used() const override { return count_; }

    std::size_t inner_queries_max() const { return inner_max_; }
    std::size_t violations() const { return violations_; }

private:
    Oracle& inner_;
    int S_;
    double n2_;
    DistributionSpec target_;
    std::size_t count_ = 0;
    std::size_t inner_max_ = 0;
    std::size_t violations_ = 0;
};

}  // namespace tpca
