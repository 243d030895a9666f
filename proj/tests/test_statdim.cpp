#include <cmath>

#include "doctest.h"
#include "tpca/coefficients.hpp"
#include "tpca/errors.hpp"
#include "tpca/labeling.hpp"
#include "tpca/statdim.hpp"

using namespace tpca;

namespace {

std::vector<double> geometric(double lo, double hi, int steps) {
    std::vector<double> g;
    for (int i = 0; i <= steps; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / steps));
    return g;
}

}  // namespace

TEST_CASE("tail bound vanishes as epsilon grows") {
    auto sym = make_labeling({1, 1});
    double prev = 1.0;
    for (double eps : {1.0, 1e2, 1e4, 1e8}) {
        TailBound t = prop1_tail_bound(sym, 16, eps, 4, Reference::D0);
        CHECK(t.value >= 0.0);
        CHECK(t.value <= prev);
        prev = t.value;
    }
    CHECK(prev <= 1e-20);
}

TEST_CASE("u = 2 reduces to e/eps^2 times the largest coefficient") {
    auto sym = make_labeling({1, 1});
    const int d = 4;
    const double eps = 50.0;
    double best = 0.0;
    for (int l = 0; l <= d; ++l) {
        CoeffResult c = p_pi_series(sym, d, {l});
        best = std::max(best, c.value + c.bound);
    }
    TailBound t = prop1_tail_bound(sym, d, eps, 2, Reference::D0);
    CHECK(t.log_value == doctest::Approx(std::log(std::exp(1.0) / (eps * eps) * best)).epsilon(1e-12));
    CHECK(t.value == doctest::Approx(std::exp(t.log_value)).epsilon(1e-12));
    REQUIRE(t.argmax.size() == 1);
    CHECK(p_pi_series(sym, d, t.argmax).value + p_pi_series(sym, d, t.argmax).bound == doctest::Approx(best));
}

TEST_CASE("uncertified searches are flagged, or rejected when strict") {
    auto sym = make_labeling({1, 1});
    TailBound t = prop1_tail_bound(sym, 4, 1.0, 5, Reference::D0);
    CHECK(!t.certified);
    CHECK_THROWS_AS(prop1_tail_bound(sym, 4, 1.0, 5, Reference::D0, true), GuardFailed);
    CHECK(prop1_tail_bound(sym, 64, 1.0, 3, Reference::D0, true).certified);
}

TEST_CASE("SDN bound takes the best u") {
    auto lf = make_labeling({1, 2, 1});
    const int d = 16;
    const double n = 40.0;
    SdnBound b = sdn_lower_bound(lf, d, n, Reference::D0, Task::Testing, 12);
    const double eps = 1.0 / std::sqrt(3.0 * n);
    double best = 0.0;
    for (int u = 2; u <= 12; ++u) best = std::min(best, prop1_tail_bound(lf, d, eps / 2, u, Reference::D0).log_value);
    CHECK(b.log10_bound == doctest::Approx((std::log(eps / 4) - best) / std::log(10.0)).epsilon(1e-12));
    CHECK(b.u_star >= 2);
    CHECK(b.u_star <= 12);
    CHECK(b.bound > 0.0);
    SdnBound e = sdn_lower_bound(lf, d, n, Reference::D0, Task::Estimation, 12);
    CHECK(e.log10_bound == doctest::Approx(b.log10_bound + std::log10(0.5)).epsilon(1e-12));
}

TEST_CASE("SDN bound is non-increasing in n and non-decreasing in d") {
    for (const auto& lf : {make_labeling({1, 1}), make_labeling({1, 2}), make_labeling({1, 1, 1})}) {
        double prev = INFINITY;
        for (double n : geometric(4.0, 4096.0, 24)) {
            SdnBound b = sdn_lower_bound(lf, 32, n, Reference::D0, Task::Testing);
            CHECK(b.log10_bound <= prev + 1e-12);
            prev = b.log10_bound;
        }
        prev = -INFINITY;
        for (int d : {8, 16, 32, 64}) {
            SdnBound b = sdn_lower_bound(lf, d, 50.0, Reference::D0, Task::Testing);
            CHECK(b.log10_bound >= prev - 1e-12);
            prev = b.log10_bound;
        }
    }
}

TEST_CASE("estimation against the prior beats testing at d = 64") {
    auto sym = make_labeling({1, 1});
    const int d = 64;
    double gap = -INFINITY, at = 0.0;
    for (double n : geometric(d * 1.01, d * d * 0.99, 60)) {
        double est = sdn_lower_bound(sym, d, n, Reference::Prior, Task::Estimation).log10_bound;
        double test = sdn_lower_bound(sym, d, n, Reference::D0, Task::Testing).log10_bound;
        if (est - test > gap) gap = est - test, at = n;
    }
    MESSAGE("largest log10 gap " << gap << " at n = " << at);
    CHECK(gap > 0.0);
}

TEST_CASE("asymmetric k = 2 at n = d = 64 (recorded value)") {
    SdnBound b = sdn_lower_bound(make_labeling({1, 2}), 64, 64.0, Reference::D0, Task::Testing);
    MESSAGE("log10 bound " << b.log10_bound << " at u* = " << b.u_star);
    CHECK(b.certified);
    CHECK(b.log10_bound == doctest::Approx(-1.016868).epsilon(1e-5));
}

TEST_CASE("query bound hypothesis and C0") {
    auto sym = make_labeling({1, 1});
    CHECK_THROWS_AS(theorem1_query_bound(sym, 64, 100.0, 1, 0.5, 1.0), HypothesisViolated);
    Theorem1Bound a = theorem1_query_bound(sym, 64, 2.0, 1, 0.5, 1.0);
    Theorem1Bound b = theorem1_query_bound(sym, 64, 2.0, 1, 0.5, 2.0);
    CHECK(a.log10_bound == b.log10_bound);
    CHECK(a.u_literal == 3);
    CHECK(a.u_corrected == 6);
    CHECK(a.log10_bound == std::max(a.log10_literal, a.log10_corrected));
}

TEST_CASE("query bound over d^L grows along the d grid") {
    auto sym = make_labeling({1, 1});
    double prev = -INFINITY;
    Theorem1Bound last;
    for (int d : {64, 128, 256, 512, 1024}) {
        last = theorem1_query_bound(sym, d, 2.0, 1, 0.5, 1.0);
        double ratio = last.log10_bound - last.log10_dL;
        CHECK(ratio > prev);
        prev = ratio;
    }
    CHECK(last.exceeds_dL);
}
