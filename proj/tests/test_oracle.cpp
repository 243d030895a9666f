#include <cmath>
#include <sstream>

#include "doctest.h"
#include "tpca/adversary.hpp"
#include "tpca/errors.hpp"
#include "tpca/labeling.hpp"
#include "tpca/mean_estimation.hpp"
#include "tpca/model.hpp"
#include "tpca/oracle.hpp"
#include "tpca/query.hpp"
#include "tpca/rng.hpp"
#include "tpca/sq_algorithms.hpp"

using namespace tpca;

namespace {

// Indicator L(T) > t with L a single cell, or a constant when `cells` is empty.
Query cell_indicator(std::vector<std::size_t> cells, double t, double offset = 0.0) {
    LinearFunctional L;
    for (auto c : cells) L.terms.push_back({c, 1.0});
    L.offset = offset;
    return derive_unit(Query::linear(L, 1.0, "lin"), ScalarMap::gt(t), "ind", 1);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("envelope examples") {
    CHECK(vstat_envelope(0.5, 100) == doctest::Approx(0.05));
    CHECK(vstat_envelope(1.0, 100) == doctest::Approx(0.01));
    CHECK(vstat_envelope(0.01, 1e4) == doctest::Approx(std::sqrt(0.0099 / 1e4)));
    CHECK(vstat_envelope(0.01, 1e4) == doctest::Approx(9.95e-4).epsilon(1e-3));
}

TEST_CASE("responses stay inside the envelope for the canonical examples") {
    auto null = DistributionSpec::null(3, 2, 1.0);
    for (Strategy s : {Strategy::Exact, Strategy::MaxShift, Strategy::EmpiricalClamped, Strategy::NullMimic,
                       Strategy::SignalCancel}) {
        OracleOptions opt;
        opt.strategy = s;
        opt.n = 100;
        opt.seed = 3;
        VstatOracle o(null, opt);
        double half = o.respond(cell_indicator({0}, 0.0));
        CHECK(half >= 0.45 - 1e-15);
        CHECK(half <= 0.55 + 1e-15);
        double one = o.respond(cell_indicator({}, 0.0, 5.0));
        CHECK(one >= 1.0 - 1.0 / 100 - 1e-15);
        CHECK(one <= 1.0 + 1.0 / 100 + 1e-15);
        CHECK(o.violations() == 0);
    }
}

TEST_CASE("query cap and unit checks") {
    OracleOptions opt;
    opt.n = 10;
    opt.query_cap = 2;
    VstatOracle o(DistributionSpec::null(2, 2, 1.0), opt);
    o.respond(cell_indicator({0}, 0.0));
    o.respond(cell_indicator({1}, 0.0));
    CHECK_THROWS_AS(o.respond(cell_indicator({2}, 0.0)), BudgetExceeded);
    CHECK(o.queries_used() == 2);
    LinearFunctional L;
    L.terms.push_back({0, 1.0});
    VstatOracle o2(DistributionSpec::null(2, 2, 1.0), OracleOptions{});
    CHECK_THROWS_AS(o2.respond(Query::linear(L, 2.0, "raw")), NotUnitQuery);
}

TEST_CASE("closed-form means agree with quadrature and Monte Carlo") {
    auto spec = DistributionSpec::spiked(make_labeling({1, 1}), random_hypercube_factors(1, 3, 2), 1.0);
    LinearFunctional L;
    L.terms = {{0, 1.0}, {4, -0.5}, {8, 2.0}};
    L.offset = 0.3;
    GaussLaw law = law_of(L, spec);
    CHECK(law.sd == doctest::Approx(std::sqrt(1.0 + 0.25 + 4.0)));
    Query base = Query::linear(L, 10.0, "q");
    // Ramps are continuous, so quadrature is a sharp oracle for them.
    for (const ScalarMap& m : {ScalarMap::slab(0.1, 0.9), ScalarMap::neg_slab(-1.0, 0.5)}) {
        Query q = derive_unit(base, m, "u", 1);
        double closed = q.mean(spec);
        double quad = gaussian_expectation([&](double x) { return q.value_at(x); }, law.mean, law.sd);
        CHECK(closed == doctest::Approx(quad).epsilon(1e-9));
    }
    Query ind = derive_unit(base, ScalarMap::gt(0.2), "u", 1);
    CHECK(ind.mean(spec) == doctest::Approx(1.0 - normal_cdf((0.2 - law.mean) / law.sd)).epsilon(1e-12));
    Query lt = derive_unit(base, ScalarMap::lt(-0.4), "u", 1);
    CHECK(lt.mean(spec) == doctest::Approx(normal_cdf((-0.4 - law.mean) / law.sd)).epsilon(1e-12));
    Rng rng(9);
    double s = 0.0;
    const int draws = 200000;
    Query sl = derive_unit(base, ScalarMap::slab(0.1, 0.9), "u", 1);
    for (int i = 0; i < draws; ++i) s += sl.value_at(law.mean + law.sd * rng.normal());
    CHECK(std::abs(s / draws - sl.mean(spec)) <= 5.0 * 0.5 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("transcripts round trip through JSON lines") {
    OracleOptions opt;
    opt.n = 50;
    opt.record = true;
    opt.strategy = Strategy::MaxShift;
    VstatOracle o(DistributionSpec::null(2, 2, 1.0), opt);
    for (std::size_t c = 0; c < 4; ++c) o.respond(cell_indicator({c}, 0.1 * c));
    std::stringstream buf;
    write_transcript_jsonl(o.transcript(), buf);
    CHECK(buf.str().find("\"query_tag\"") != std::string::npos);
    auto back = read_transcript_jsonl(buf);
    REQUIRE(back.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(back[i].response == o.transcript()[i].response);
        CHECK(back[i].envelope == o.transcript()[i].envelope);
        CHECK(back[i].true_mean == o.transcript()[i].true_mean);
        CHECK(back[i].tag == o.transcript()[i].tag);
    }
}

TEST_CASE("transcripts replay deterministically and counts never decrease") {
    auto spec = DistributionSpec::spiked(make_labeling({1, 1}), random_hypercube_factors(1, 4, 1), 1.0);
    auto run = [&] {
        OracleOptions opt;
        opt.n = 1000;
        opt.seed = 17;
        opt.shift_sign = 0;
        opt.strategy = Strategy::MaxShift;
        opt.record = true;
        VstatOracle o(spec, opt);
        std::size_t last = 0;
        for (std::size_t c = 0; c < 16; ++c) {
            o.respond(cell_indicator({c}, 0.0));
            CHECK(o.queries_used() > last);
            last = o.queries_used();
        }
        std::vector<double> r;
        for (const auto& e : o.transcript()) r.push_back(e.response);
        return r;
    };
    CHECK(run() == run());
}

TEST_CASE("estimate_mean on a constant query") {
    LinearFunctional L;
    L.offset = 0.3;
    OracleOptions opt;
    opt.n = 1000;
    opt.strategy = Strategy::MaxShift;
    VstatOracle o(DistributionSpec::null(2, 2, 1.0), opt);
    double xi = 1e-3;
    MeanEstimate m = estimate_mean(o, Query::linear(L, 1.0, "c"), xi);
    CHECK(std::abs(m.estimate - 0.3) <= xi);
    CHECK(m.queries_used == estimate_mean_query_count(1000, 1.0, xi));
}

TEST_CASE("estimate_mean recovers the trace under MaxShift") {
    const int d = 16;
    auto lf = make_labeling({1, 1});
    auto spec = DistributionSpec::spiked(lf, random_hypercube_factors(1, d, 4), 1.0);
    double n = 1e6;  // well above d log^2 n
    for (int sign : {1, -1}) {
        OracleOptions opt;
        opt.n = n;
        opt.strategy = Strategy::MaxShift;
        opt.shift_sign = sign;
        VstatOracle o(spec, opt);
        MeanEstimate m = estimate_mean(o, trace_query(lf, d), default_xi(n));
        CHECK(std::abs(m.estimate - 1.0) <= 0.1);
    }
}

TEST_CASE("estimate_mean on a clipped indicator with mean 1/4") {
    // P(Z > z) = 1/4 for the 75% quantile.
    const double z75 = 0.6744897501960817;
    LinearFunctional L;
    L.terms.push_back({0, 1.0});
    Query q = derive_unit(Query::linear(L, 1.0, "l"), ScalarMap::gt(z75), "clip", 1);
    q.codomain = Codomain::Bounded;
    q.B = 1.0;
    const double n = 1e6, xi = default_xi(n);
    for (Strategy s : {Strategy::Exact, Strategy::MaxShift, Strategy::EmpiricalClamped}) {
        OracleOptions opt;
        opt.n = n;
        opt.strategy = s;
        opt.seed = 5;
        VstatOracle o(DistributionSpec::null(2, 2, 1.0), opt);
        MeanEstimate m = estimate_mean(o, q, xi);
        CHECK(std::abs(m.estimate - 0.25) <= 8.0 * std::log(n) / 2000.0 + xi);
        CHECK(o.violations() == 0);
    }
}

TEST_CASE("estimate_mean rejects a second-moment bound that is too small") {
    LinearFunctional L;
    L.offset = 50.0;
    OracleOptions opt;
    opt.n = 1e4;
    VstatOracle o(DistributionSpec::null(2, 2, 1.0), opt);
    CHECK_THROWS_AS(estimate_mean(o, Query::linear(L, 1.0, "big"), 1e-3), BadBound);
}

TEST_CASE("downscaled oracle") {
    auto lf = make_labeling({1, 1});
    const int d = 4;
    auto spec = DistributionSpec::spiked(lf, random_hypercube_factors(1, d, 6), 1.0);
    const double n1 = 1e8;
    OracleOptions opt;
    opt.n = n1;
    opt.strategy = Strategy::MaxShift;
    opt.shift_sign = 0;
    opt.seed = 2;
    VstatOracle inner(spec, opt);
    DownscaledOracle s1(inner, 1);
    CHECK(s1.n() == doctest::Approx(n1 / (256.0 * std::log(n1) * std::log(n1))));
    CHECK(s1.target().sigma2() == 1.0);

    // Constant queries pass through within xi.
    Query c = cell_indicator({}, 0.0, 1.0);
    CHECK(std::abs(s1.respond(c) - 1.0) <= 1.0 / (2.0 * s1.n()) + vstat_envelope(1.0, s1.n()));

    DownscaledOracle s4(inner, 4);
    CHECK(s4.target().sigma2() == 4.0);
    Query tr = trace_query(lf, d, 4.0);
    for (const ScalarMap& m : {ScalarMap::gt(0.5), ScalarMap::gt(1.5), ScalarMap::lt(0.0)}) {
        Query u = derive_unit(tr, m, "t", 1);
        double p = u.mean(s4.target());
        double r = s4.respond(u);
        CHECK(std::abs(r - p) <= vstat_envelope(p, s4.n()));
    }
    CHECK(s1.violations() == 0);
    CHECK(s4.violations() == 0);
    CHECK_THROWS_AS(DownscaledOracle(inner, DistributionSpec::null(d, 2, 0.5), 1), IncompatibleSpecs);
}

TEST_CASE("downscaled trace responses stay in the n2 envelope over many trials") {
    auto lf = make_labeling({1, 1});
    const int d = 3;
    std::size_t bad = 0;
    for (int t = 0; t < 40; ++t) {
        auto spec = t % 2 ? DistributionSpec::spiked(lf, random_hypercube_factors(1, d, t), 1.0)
                          : DistributionSpec::null(d, 2, 1.0);
        OracleOptions opt;
        opt.n = 1e7;
        opt.strategy = Strategy::MaxShift;
        opt.shift_sign = 0;
        opt.seed = 100 + t;
        VstatOracle inner(spec, opt);
        DownscaledOracle s(inner, 2);
        Query u = derive_unit(trace_query(lf, d, 2.0), ScalarMap::gt(0.5), "t", 1);
        double p = u.mean(s.target());
        if (std::abs(s.respond(u) - p) > vstat_envelope(p, s.n())) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("NullMimic is legal for both hypotheses when means are within the envelope") {
    const int d = 32;
    auto lf = make_labeling({1, 1});
    auto spiked = DistributionSpec::spiked(lf, random_hypercube_factors(1, d, 8), 1.0);
    const double n = d / 4.0;
    for (const auto& target : {spiked, spiked.null_counterpart()}) {
        OracleOptions opt;
        opt.n = n;
        opt.strategy = Strategy::NullMimic;
        opt.record = true;
        VstatOracle o(target, opt);
        even_symmetric_test(o, lf);
        CHECK(o.violations() == 0);
        for (const auto& e : o.transcript()) {
            double p_null = e.query->mean(spiked.null_counterpart());
            double p_spiked = e.query->mean(spiked);
            CHECK(std::abs(e.response - p_null) <= vstat_envelope(p_null, n) * (1 + 1e-12));
            CHECK(std::abs(e.response - p_spiked) <= vstat_envelope(p_spiked, n) * (1 + 1e-12));
        }
    }
}

TEST_CASE("graph adversary certificate examples") {
    auto lf = make_labeling({1, 1});
    auto empty = graph_adversary_certificate({}, lf, 4, 10.0);
    REQUIRE(empty.has_value());
    CHECK(empty->mean_distance >= 1.0);
    CHECK(empty->survivors == 16);

    // Every entry queried at huge n pins the spike down to its sign.
    const int d = 4;
    OracleOptions opt;
    opt.n = 1e12;
    opt.record = true;
    opt.strategy = Strategy::GraphAdversary;
    VstatOracle o(DistributionSpec::null(d, 2, 1.0), opt);
    for (std::size_t c = 0; c < 16; ++c) {
        LinearFunctional L;
        L.terms.push_back({c, 1.0});
        o.respond(derive_unit(Query::linear(L, 1.0, "e"), ScalarMap::gt(0.0), "e", 1));
    }
    CHECK_FALSE(graph_adversary_certificate(o.transcript(), lf, d, opt.n).has_value());
    CHECK_THROWS_AS(graph_adversary_certificate({}, lf, 17, 10.0), TooLarge);
}

TEST_CASE("graph adversary against the partial-trace estimator at n = d/4") {
    const int d = 8;
    auto lf = make_labeling({1, 1});
    OracleOptions opt;
    opt.n = d / 4.0;
    opt.record = true;
    opt.strategy = Strategy::GraphAdversary;
    VstatOracle o(DistributionSpec::null(d, 2, 1.0), opt);
    sq_estimate(o, lf);
    CHECK(o.violations() == 0);
    auto cert = graph_adversary_certificate(o.transcript(), lf, d, opt.n);
    REQUIRE(cert.has_value());
    CHECK(cert->mean_distance >= 1.0);
    CHECK(cert->worst_ratio_first <= 1.0 + 1e-12);
    CHECK(cert->worst_ratio_second <= 1.0 + 1e-12);
    // Independent recheck of both sides.
    for (const auto& e : o.transcript()) {
        for (const auto* spec : {&cert->first, &cert->second}) {
            double p = e.query->mean(*spec);
            CHECK(std::abs(e.response - p) <= vstat_envelope(p, opt.n) * (1 + 1e-12));
        }
    }
}

TEST_CASE("every strategy is envelope-legal on random Gaussian queries") {
    Rng rng(31);
    std::size_t before = global_envelope_violations();
    for (int t = 0; t < 300; ++t) {
        int d = 2 + static_cast<int>(rng.below(3));
        auto lf = make_labeling({1, 1});
        auto spec = DistributionSpec::spiked(lf, random_hypercube_factors(1, d, t), 1.0 + rng.below(3));
        OracleOptions opt;
        opt.strategy = static_cast<Strategy>(rng.below(5));
        opt.n = std::pow(10.0, 1.0 + 6.0 * rng.uniform());
        opt.seed = t;
        opt.shift_sign = 0;
        VstatOracle o(spec, opt);
        LinearFunctional L;
        for (std::size_t c = 0; c < spec.mean().size(); ++c)
            if (rng.below(2)) L.terms.push_back({c, rng.normal()});
        L.offset = rng.normal();
        double a = rng.normal(), b = a + 2.0 * rng.uniform();
        ScalarMap maps[] = {ScalarMap::gt(a), ScalarMap::lt(a), ScalarMap::slab(a, b), ScalarMap::neg_slab(a, b)};
        o.respond(derive_unit(Query::linear(L, 1.0, "r"), maps[rng.below(4)], "r", rng.below(2) ? 1 : -1));
        CHECK(o.violations() == 0);
    }
    CHECK(global_envelope_violations() == before);
}
