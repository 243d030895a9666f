#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "tpca/labeling.hpp"
#include "tpca/tensor.hpp"

namespace tpca {

enum class Variant { Null, Spiked };

// D_0(sigma2) or D_V(sigma2) with V = v_{pi(1)} x ... x v_{pi(k)} and mean
// V / d^{k/2}. The mean tensor is built once and shared between copies.
class DistributionSpec {
public:
    static DistributionSpec null(int d, int k, double sigma2);
    static DistributionSpec spiked(const LabelingFunction& lf, std::vector<std::vector<double>> factors,
                                   double sigma2);

    Variant variant() const { return variant_; }
    bool is_null() const { return variant_ == Variant::Null; }
    int d() const { return d_; }
    int k() const { return k_; }
    double sigma2() const { return sigma2_; }
    double sigma() const;
    const LabelingFunction& lf() const { return lf_; }
    const std::vector<std::vector<double>>& factors() const { return factors_; }
    const Tensor& mean() const { return *mean_; }

    // Same mean, different noise level.
    DistributionSpec with_sigma2(double sigma2) const;
    // Mean scaled by `factor` (used by the signal-cancelling adversary).
    DistributionSpec with_scaled_mean(double factor) const;
    DistributionSpec null_counterpart() const { return null(d_, k_, sigma2_); }

private:
    Variant variant_ = Variant::Null;
    int d_ = 0;
    int k_ = 0;
    double sigma2_ = 1.0;
    LabelingFunction lf_;
    std::vector<std::vector<double>> factors_;
    std::shared_ptr<const Tensor> mean_;
};

// K i.i.d. uniform vectors in {-1,+1}^d.
std::vector<std::vector<double>> random_hypercube_factors(int K, int d, std::uint64_t seed);

struct SampleSet {
    int d = 0;
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<Tensor> samples;

    std::size_t n() const { return samples.size(); }
};

// Cell (i, j) of sample set `trial` is drawn from the stream keyed by
// (seed, trial, i) at counter j.
SampleSet sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed, std::uint64_t trial = 0);

// E over hypercube factors of rank_one(factors, lf): 1 where every label's
// index multiset has only even multiplicities, else 0.
Tensor prior_mean_tensor(const LabelingFunction& lf, int d);

// Exactly rounded average (sums are accumulated without rounding error).
Tensor reduce_to_sufficient(const SampleSet& samples);

// T_i = tbar + (G_i - mean(G)), G_i i.i.d. N(0, sigma2). The last sample
// absorbs the rounding residue so that reduce_to_sufficient returns tbar.
SampleSet expand_from_sufficient(const Tensor& tbar, std::size_t n, double sigma2, std::uint64_t seed);

// Binary layout: "TPCASMP1", then int32 d, int32 k, uint64 n, uint64 seed,
// followed by n*d^k little-endian float64 values.
void write_binary(const SampleSet& s, std::ostream& out);
SampleSet read_binary(std::istream& in);
void write_csv(const SampleSet& s, std::ostream& out);

}  // namespace tpca
