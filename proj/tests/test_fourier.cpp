#include <cmath>

#include "doctest.h"
#include "tpca/errors.hpp"
#include "tpca/fourier.hpp"
#include "tpca/labeling.hpp"
#include "tpca/model.hpp"
#include "tpca/rng.hpp"

using namespace tpca;

TEST_CASE("univariate Hermite values") {
    for (double x : {-2.0, 0.0, 0.7, 3.0}) {
        CHECK(hermite1(0, x) == 1.0);
        CHECK(hermite1(1, x) == x);
        CHECK(hermite1(2, x) == doctest::Approx((x * x - 1.0) / std::sqrt(2.0)).epsilon(1e-14));
        CHECK(hermite1(3, x) == doctest::Approx((x * x * x - 3.0 * x) / std::sqrt(6.0)).epsilon(1e-14).scale(1.0));
    }
    CHECK_THROWS_AS(hermite1(9, 0.0), DegreeCap);
    CHECK_THROWS_AS(hermite({1, 9}, {0.0, 0.0}), DegreeCap);
    CHECK(hermite({2, 1}, {1.5, -0.5}) == doctest::Approx(hermite1(2, 1.5) * hermite1(1, -0.5)));
}

TEST_CASE("quadrature rule") {
    const GaussRule& g = gauss_hermite_rule();
    CHECK(g.x.size() == 64);
    double w = 0.0, m2 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        w += g.w[i];
        m2 += g.w[i] * g.x[i] * g.x[i];
        m4 += g.w[i] * std::pow(g.x[i], 4);
    }
    CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(gauss_expectation([](const std::vector<double>& z) { return hermite1(2, z[0]) * hermite1(1, z[1]); }, 2) ==
          doctest::Approx(0.0).scale(1e-12));
}

TEST_CASE("Hermite orthonormality in one to three dimensions") {
    CHECK(hermite_orthonormality_residual(1, 8) <= 1e-8);
    CHECK(hermite_orthonormality_residual(2, 6) <= 1e-8);
    CHECK(hermite_orthonormality_residual(3, 4) <= 1e-8);
}

TEST_CASE("shift identity") {
    CHECK(hermite_shift_identity_check({0.0}, {3}) <= 1e-12);
    CHECK(hermite_shift_identity_check({2.0}, {2}) <= 1e-10);
    CHECK(gauss_expectation([](const std::vector<double>& z) { return hermite1(2, 2.0 + z[0]); }, 1) ==
          doctest::Approx(4.0 / std::sqrt(2.0)).epsilon(1e-12));
    Rng rng(3);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int m = 1 + static_cast<int>(rng.below(3));
        std::vector<double> mu(m);
        std::vector<int> c(m);
        int budget = 4;
        for (int i = 0; i < m; ++i) {
            mu[i] = 2.0 * rng.normal();
            c[i] = static_cast<int>(rng.below(budget + 1));
            budget -= c[i];
        }
        worst = std::max(worst, hermite_shift_identity_check(mu, c));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("spiked Hermite means") {
    auto sym = make_labeling({1, 1});
    auto f = random_hypercube_factors(1, 2, 9);
    SpikedHermiteCheck zero = spiked_hermite_mean_check(sym, f, CountTensor(2, 2), 1000, 1);
    CHECK(zero.closed_form == 1.0);
    CHECK(zero.monte_carlo == 1.0);
    CHECK(zero.pass);

    CountTensor unit(2, 2);
    unit.set(0, 1);
    SpikedHermiteCheck u = spiked_hermite_mean_check(sym, f, unit, 100000, 2);
    CHECK(u.closed_form == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(u.pass);

    Rng rng(11);
    int passed = 0;
    const int cases = 10;
    for (int t = 0; t < cases; ++t) {
        auto lfs = all_labelings(2 + static_cast<int>(rng.below(2)));
        const auto& lf = lfs[rng.below(lfs.size())];
        auto factors = random_hypercube_factors(lf.K, 2, 100 + t);
        CountTensor c(2, lf.k);
        for (int m = 0; m < 4; ++m) c.add(rng.below(c.size()), 1);
        SpikedHermiteCheck r = spiked_hermite_mean_check(lf, factors, c, 1000000, 200 + t);
        CHECK(std::abs(r.closed_form - r.cellwise) <= 1e-12);
        passed += r.pass;
    }
    // Each check fails with probability about 0.3% when the identity holds.
    CHECK(passed >= cases - 1);
}

TEST_CASE("hypercontractivity examples") {
    bool holds = false;
    std::vector<int> constant(4, 0);
    constant[0] = 1;
    CHECK(hypercontractivity_ratio(2, 4, constant, holds) == 1.0);
    CHECK(holds);

    std::vector<int> z1z2(4, 0);
    z1z2[3] = 1;
    double r = hypercontractivity_ratio(2, 4, z1z2, holds);
    CHECK(r == doctest::Approx(1.0 / 81.0).epsilon(1e-14));
    CHECK(holds);

    // q = 2 makes T the identity, so both sides equal E f^2.
    std::vector<int> mix{1, -1, 0, 1, 1, 0, -1, 1};
    CHECK(hypercontractivity_ratio(3, 2, mix, holds) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(holds);
}

TEST_CASE("hypercontractivity holds on random Boolean polynomials") {
    for (int q : {4, 6, 8}) {
        HypercontractivityReport rep = hypercontractivity_check(4, q, 1000, 7 + q);
        CHECK(rep.cases == 1000);
        CHECK(rep.violations == 0);
        CHECK(rep.parseval_failures == 0);
        CHECK(rep.worst_ratio <= 1.0);
    }
    CHECK_THROWS_AS(hypercontractivity_check(4, 3, 10, 1), ConfigError);
}
