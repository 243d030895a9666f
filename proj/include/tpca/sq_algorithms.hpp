#pragma once

#include <optional>
#include <vector>

#include "tpca/labeling.hpp"
#include "tpca/model.hpp"
#include "tpca/oracle.hpp"
#include "tpca/query.hpp"

namespace tpca {

struct SqResult {
    std::optional<Variant> decision;
    std::optional<Tensor> estimate;  // unit norm, original mode order
    std::size_t queries_used = 0;
    double statistic = 0.0;          // trace estimate or |O-hat|
    double odd_norm = 1.0;           // |O-hat|, 1 when o = 0
    std::vector<double> factor_norms;
};

// Sum of T over cells whose standard-form indices repeat in pairs.
Query trace_query(const LabelingFunction& lf, int d, double sigma2 = 1.0);

SqResult even_symmetric_test(Oracle& oracle, const LabelingFunction& lf);

// Entrywise estimate of O = (x) v_i / sqrt(d^o) over the odd labels, as an
// order-o tensor indexed in standard-form order.
Tensor estimate_odd_part(Oracle& oracle, const LabelingFunction& lf, std::size_t* queries = nullptr);

// Estimate of (<O, O-hat>/|O-hat|) E_slot, slot is 1-based.
Matrix estimate_even_factor(Oracle& oracle, const LabelingFunction& lf, int slot, const Tensor* odd_hat,
                            std::size_t* queries = nullptr);

SqResult sq_estimate(Oracle& oracle, const LabelingFunction& lf);
SqResult sq_test_general(Oracle& oracle, const LabelingFunction& lf);

// Power iteration for k = 2 symmetric where each coordinate of T x is an
// SQ mean estimate. Returns x x^T as the estimate.
SqResult sq_power_iteration(Oracle& oracle, int iterations, std::uint64_t seed);

// Default xi used for every mean estimation.
inline double default_xi(double n) { return 1.0 / (4.0 * n); }

}  // namespace tpca
