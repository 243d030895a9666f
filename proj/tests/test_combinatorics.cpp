#include <cmath>
#include <functional>

#include "doctest.h"
#include "tpca/coefficients.hpp"
#include "tpca/errors.hpp"
#include "tpca/labeling.hpp"
#include "tpca/model.hpp"
#include "tpca/poisson_structure.hpp"
#include "tpca/rademacher.hpp"
#include "tpca/tensor.hpp"

using namespace tpca;

namespace {

// Direct Poisson sum over every count tensor with |c|_1 <= M. Shares nothing
// with the library paths except labeled_parity.
double direct_coefficient(const LabelingFunction& lf, int d, const Pattern& l, int M, bool disjoint) {
    CountTensor c(d, lf.k);
    const double lambda = std::pow(static_cast<double>(d), -lf.k);
    Tensor prior = prior_mean_tensor(lf, d);
    double total = 0.0;
    std::function<void(std::size_t, int, double)> rec = [&](std::size_t cell, int left, double w) {
        if (cell == c.size()) {
            if (c.l1() == 0) return;
            for (int i = 1; i <= lf.K; ++i) {
                auto p = labeled_parity(c, lf, i);
                for (int j = 0; j < d; ++j)
                    if (p[j] != (j < l[i - 1] ? 1 : 0)) return;
            }
            total += w;
            return;
        }
        double term = std::exp(-lambda);
        for (int m = 0; m <= left; ++m) {
            if (m > 0 && disjoint && prior[cell] != 0.0) break;
            c.set(cell, m);
            rec(cell + 1, left - m, w * term);
            term *= lambda / (m + 1);
        }
        c.set(cell, 0);
    };
    rec(0, M, 1.0);
    return total;
}

}  // namespace

TEST_CASE("rademacher_moment examples") {
    for (int d : {1, 3, 7}) {
        CHECK(rademacher_moment(d, 2, 1) == 0);
        CHECK(rademacher_moment(d, 1, 1) == Rational(1, d));
    }
    CHECK(rademacher_moment(2, 2, 2) == Rational(1, 2));
    CHECK(rademacher_moment(5, 0, 0) == 1);
}

TEST_CASE("rademacher_moment: exact zeros, sign, and agreement with enumeration") {
    for (int d = 1; d <= 12; ++d)
        for (int s = 0; s <= 6; ++s)
            for (int l = 0; l <= std::min(6, d); ++l) {
                Rational r = rademacher_moment(d, s, l);
                CHECK(r == rademacher_moment_bruteforce(d, s, l));
                if (l > s || (l + s) % 2 == 1)
                    CHECK(r == 0);
                else
                    CHECK(r >= 0);
            }
}

TEST_CASE("closed-form spot values") {
    const double e1 = std::exp(-1.0);
    auto sym = make_labeling({1, 1});
    auto asym = make_labeling({1, 2});
    struct Case {
        LabelingFunction lf;
        Pattern l;
        double truth;
    };
    for (const Case& c : {Case{sym, {0}, 1.0 - e1}, Case{asym, {1, 1}, e1 * std::sinh(1.0)},
                          Case{asym, {0, 0}, e1 * (std::cosh(1.0) - 1.0)}}) {
        CoeffResult s = p_pi_series(c.lf, 1, c.l);
        CoeffResult e = p_pi_enumeration(c.lf, 1, c.l, 14);
        CHECK(std::abs(s.value - c.truth) <= 1e-10);
        CHECK(std::abs(e.value - c.truth) <= e.bound + 1e-12);
        CHECK(s.bound <= 5e-10);
    }
}

TEST_CASE("unsatisfiable parity and empty enumeration") {
    auto sym = make_labeling({1, 1});
    CHECK(p_pi_enumeration(sym, 1, {1}).value == 0.0);
    CHECK(std::abs(p_pi_series(sym, 1, {1}).value) <= 1e-12);
    CoeffResult z = p_pi_enumeration(sym, 2, {0}, 0);
    CHECK(z.value == 0.0);
    CHECK(z.bound == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(p_pi_series(sym, 2, {3}), PatternTooWide);
    CHECK_THROWS_AS(p_pi_series(sym, 2, {0, 0}), DimensionMismatch);
    CHECK_THROWS_AS(p_pi_enumeration(make_labeling({1, 2, 3}), 8, {0, 0, 0}), TooLarge);
}

TEST_CASE("series and enumeration agree with direct Poisson summation") {
    for (int k = 2; k <= 3; ++k)
        for (const auto& lf : all_labelings(k))
            for (int d = 1; d <= (k == 2 ? 3 : 2); ++d)
                for (const Pattern& l : patterns_up_to(lf, d, 4)) {
                    const int M = 7;
                    double direct = direct_coefficient(lf, d, l, M, false);
                    CoeffResult e = p_pi_enumeration(lf, d, l, M);
                    CoeffResult s = p_pi_series(lf, d, l);
                    CHECK(std::abs(e.value - direct) <= 1e-13);
                    CHECK(std::abs(s.value - direct) <= s.bound + e.bound + 1e-10);
                    CHECK(s.value >= -s.bound);
                    CHECK(s.value <= 1.0 + s.bound);

                    double direct_bar = direct_coefficient(lf, d, l, M, true);
                    CoeffResult b = p_bar_pi(lf, d, l, M);
                    CHECK(std::abs(b.value - direct_bar) <= 1e-13);
                    CoeffResult bs = p_bar_pi_series(lf, d, l);
                    CHECK(std::abs(bs.value - direct_bar) <= bs.bound + b.bound + 1e-10);
                    CHECK(b.value <= e.value + 1e-15);
                    if (lf.o >= 1) CHECK(b.value == e.value);
                }
}

TEST_CASE("p_bar examples") {
    auto sym = make_labeling({1, 1});
    CHECK(p_bar_pi(sym, 1, {0}).value == 0.0);
    CHECK(std::abs(p_bar_pi_series(sym, 1, {0}).value) <= 1e-10);
    auto odd = make_labeling({1, 2, 3});
    for (const Pattern& l : patterns_up_to(odd, 2, 3))
        CHECK(p_bar_pi_series(odd, 2, l).value == doctest::Approx(p_pi_series(odd, 2, l).value).epsilon(1e-14));
}

TEST_CASE("stratified Monte Carlo agrees within its bound") {
    for (const auto& lf : {make_labeling({1, 1}), make_labeling({1, 2, 1})}) {
        const int d = 3;
        auto pats = patterns_up_to(lf, d, 3);
        MonteCarloTable mc = p_pi_monte_carlo(lf, d, pats, 200000, 17);
        REQUIRE(mc.results.size() == pats.size());
        for (std::size_t i = 0; i < pats.size(); ++i) {
            CoeffResult s = p_pi_series(lf, d, pats[i]);
            CHECK(std::abs(mc.results[i].value - s.value) <= mc.results[i].bound + s.bound);
        }
    }
}

TEST_CASE("relabelling labels of equal multiplicity leaves p unchanged") {
    auto lf = make_labeling({1, 2});
    auto lf4 = make_labeling({1, 1, 2, 2});
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; b <= 3; ++b) {
            CHECK(p_pi_series(lf, 4, {a, b}).value == doctest::Approx(p_pi_series(lf, 4, {b, a}).value).epsilon(1e-14));
            CHECK(p_pi_series(lf4, 4, {a, b}).value ==
                  doctest::Approx(p_pi_series(lf4, 4, {b, a}).value).epsilon(1e-14));
        }
    // Swapping which positions carry a label does not change the law of C.
    auto x = make_labeling({1, 2, 1}), y = make_labeling({1, 1, 2});
    for (const Pattern& l : patterns_up_to(x, 3, 4))
        CHECK(p_pi_series(x, 3, l).value == doctest::Approx(p_pi_series(y, 3, l).value).epsilon(1e-14));
}

TEST_CASE("scaling exponents follow the case table") {
    const std::vector<int> grid{8, 16, 32, 64, 128};
    struct Case {
        LabelingFunction lf;
        Pattern l;
        double expect;
    };
    for (const Case& c : {Case{make_labeling({1, 1}), {0}, -1.0}, Case{make_labeling({1, 2, 3}), {0, 0, 0}, -3.0},
                          Case{make_labeling({1, 1}), {2}, -2.0}}) {
        ScalingFit f = verify_scaling(c.lf, c.l, grid);
        CHECK(f.predicted == c.expect);
        MESSAGE(to_string(c.lf) << " slope " << f.slope);
        CHECK(f.deviation <= 0.25);
    }
}

TEST_CASE("Poisson structure") {
    PoissonReport r = poisson_structure_check(2, 2, 100000, 5);
    CHECK(r.p_value >= 1e-3);
    CHECK(std::abs(r.p0_hat - std::exp(-1.0)) <= 3.0 * r.p0_se);
    CHECK(!r.strata.empty());
    for (const StratumCheck& s : r.strata) CHECK(s.tv <= s.tolerance);
    CHECK(exact_conditional_check(2, 2, 3) <= 1e-12);
    CHECK(exact_conditional_check(3, 2, 2) <= 1e-12);
}

TEST_CASE("poisson_tail") {
    CHECK(poisson_tail(0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    CHECK(poisson_tail(8) < 1e-5);
    CHECK(poisson_tail(8) > 0.0);
}
