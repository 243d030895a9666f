#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "tpca/baselines.hpp"
#include "tpca/errors.hpp"
#include "tpca/labeling.hpp"
#include "tpca/model.hpp"
#include "tpca/rng.hpp"

using namespace tpca;

namespace {

// Draws the sufficient statistic directly: its law is N(mean, sigma2/n).
Tensor draw_tbar(const DistributionSpec& spec, double n, std::uint64_t seed) {
    Tensor t = spec.mean();
    const double s = spec.sigma() / std::sqrt(n);
    for (std::size_t j = 0; j < t.size(); ++j) t[j] += s * gaussian_at(seed, j);
    return t;
}

double median(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    return x[x.size() / 2];
}

}  // namespace

TEST_CASE("empirical mean examples") {
    auto spec = DistributionSpec::null(3, 2, 1.0);
    SampleSet one = sample(spec, 1, 4);
    CHECK(empirical_mean(one).data() == one.samples[0].data());
    auto zero = DistributionSpec::spiked(make_labeling({1, 1}), random_hypercube_factors(1, 3, 1), 0.0);
    CHECK(empirical_mean(sample(zero, 4, 2)).data() == zero.mean().data());
    SampleSet s = sample(spec, 5, 9), s2 = s;
    for (Tensor& t : s2.samples) t *= 2.0;
    Tensor a = empirical_mean(s), b = empirical_mean(s2);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == 2.0 * a[i]);
}

TEST_CASE("noiseless rank one: exact spectral recovery") {
    for (const char* name : {"1-1", "1-1-1", "1-2-1", "1-1-1-1"}) {
        auto lf = parse_labeling(name);
        const int d = 5;
        auto spec = DistributionSpec::spiked(lf, random_hypercube_factors(lf.K, d, 2), 0.0);
        SpectralResult r = flatten_spectral(spec.mean(), lf);
        CHECK(r.converged);
        CHECK(spectral_alignment(r, spec.factors()[lf.assignment[lf.k - 1] - 1]) == doctest::Approx(1.0));
        // sigma_1 equals the flattening norm and the rank-one residual vanishes.
        std::vector<int> rows;
        for (int m = 1; m <= (lf.k + 1) / 2; ++m) rows.push_back(m);
        Matrix M = flatten(spec.mean(), rows);
        CHECK(r.sigma1 == doctest::Approx(M.frobenius()).epsilon(1e-12));
        double res = 0.0;
        for (std::size_t i = 0; i < M.rows; ++i)
            for (std::size_t j = 0; j < M.cols; ++j) res += std::pow(M(i, j) - r.sigma1 * r.left[i] * r.right[j], 2);
        CHECK(std::sqrt(res) <= 1e-8);
    }
}

TEST_CASE("k=3 spectral recovery at n = 100 d^{3/2}") {
    const int d = 16;
    auto lf = make_labeling({1, 1, 1});
    const double n = 100.0 * std::pow(d, 1.5);
    int good = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        auto spec = DistributionSpec::spiked(lf, random_hypercube_factors(1, d, t), 1.0);
        SpectralResult r = flatten_spectral(draw_tbar(spec, n, derive_seed(7, {std::uint64_t(t)})), lf);
        good += spectral_alignment(r, spec.factors()[0]) >= 0.9;
    }
    CHECK(good >= 90);
}

TEST_CASE("null input gives no alignment") {
    const int d = 32;
    auto lf = make_labeling({1, 1});
    std::vector<double> cosines;
    for (int t = 0; t < 31; ++t) {
        auto ref = random_hypercube_factors(1, d, 1000 + t);
        SpectralResult r = flatten_spectral(draw_tbar(DistributionSpec::null(d, 2, 1.0), 1.0, t), lf);
        cosines.push_back(spectral_alignment(r, ref[0]));
    }
    CHECK(median(cosines) <= 3.0 / std::sqrt(static_cast<double>(d)));
}

TEST_CASE("tensor power iteration") {
    auto lf = make_labeling({1, 1, 1});
    const int d = 6;
    auto spec = DistributionSpec::spiked(lf, random_hypercube_factors(1, d, 4), 0.0);
    std::vector<double> init(d);
    Rng rng(1);
    for (double& x : init) x = rng.normal();
    PowerIterationResult r = tensor_power_iteration(spec.mean(), init, 1);
    double c = 0.0;
    for (int i = 0; i < d; ++i) c += r.x[i] * spec.factors()[0][i] / std::sqrt(static_cast<double>(d));
    CHECK(std::abs(c) == doctest::Approx(1.0).epsilon(1e-12));

    // k = 2 agrees with the top singular vector of a symmetric input.
    auto lf2 = make_labeling({1, 1});
    const int d2 = 8;
    auto spec2 = DistributionSpec::spiked(lf2, random_hypercube_factors(1, d2, 5), 1.0);
    Tensor t = draw_tbar(spec2, 400.0, 3);
    Tensor sym = t;
    for (int i = 0; i < d2; ++i)
        for (int j = 0; j < d2; ++j) sym.at({i, j}) = 0.5 * (t.at({i, j}) + t.at({j, i}));
    PowerIterationResult p = tensor_power_iteration(sym, std::vector<double>(d2, 1.0), 500);
    SpectralResult s = flatten_spectral(sym, lf2);
    double dot = 0.0;
    for (int i = 0; i < d2; ++i) dot += p.x[i] * s.right[i];
    CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("power iteration objective never decreases on noisy input") {
    auto lf = make_labeling({1, 1, 1});
    const int d = 8;
    for (int t = 0; t < 10; ++t) {
        Tensor tbar = draw_tbar(DistributionSpec::null(d, 3, 1.0), 1.0, 50 + t);
        std::vector<double> init(d);
        Rng rng(t);
        for (double& x : init) x = rng.normal();
        double prev = -INFINITY;
        for (int it = 1; it <= 30; it += 5) {
            PowerIterationResult r = tensor_power_iteration(tbar, init, it);
            CHECK(r.objective >= prev - 1e-12);
            prev = r.objective;
        }
    }
}

TEST_CASE("small-noise value query: noiseless separation") {
    MleDemoRow r = mle_value_query_demo(6, 0.0, 4, 1, 10);
    CHECK(r.mean_spiked == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.separation > 0.5);
    CHECK(r.pass);
}

TEST_CASE("small-noise value query: separation shrinks as c grows") {
    const int d = 8;
    std::vector<double> sep;
    for (double c : {0.01, 0.1, 1.0}) sep.push_back(mle_value_query_demo(d, c, 30, 3, 10).separation);
    CHECK(sep[0] >= sep[1] - 0.02);
    CHECK(sep[1] >= sep[2] - 0.02);
    CHECK(sep[0] > sep[2]);
}

TEST_CASE("small-noise value query: variance falls like 1/d (approximate)") {
    std::vector<double> xs, ys;
    // 150 trials put the slope's standard error near 0.14.
    for (int d : {4, 6, 8, 12}) {
        MleDemoRow r = mle_value_query_demo(d, 0.1, 150, 11, 5);
        xs.push_back(std::log(d));
        ys.push_back(std::log(r.var_spiked));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / xs.size(), my += ys[i] / ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
    MESSAGE("fitted slope of log Var vs log d: " << sxy / sxx);
    CHECK(std::abs(sxy / sxx + 1.0) <= 0.5);
}
