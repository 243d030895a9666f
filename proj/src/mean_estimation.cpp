#include "tpca/mean_estimation.hpp"

#include <algorithm>
#include <cmath>

#include "tpca/errors.hpp"

namespace tpca {

namespace {

struct Plan {
    double radius;  // 2 sqrt(B)
    double t0;
    int bisections;
    int slabs;
};

Plan make_plan(double n, double B, double xi) {
    Plan p;
    p.radius = 2.0 * std::sqrt(B);
    p.t0 = xi / 4.0;
    double width = 2.0 * p.radius;
    p.bisections = 0;
    while (width > xi / 2.0) {
        width /= 2.0;
        ++p.bisections;
    }
    double top = 4.0 * std::sqrt(n * B) + 4.0 * std::sqrt(B);
    p.slabs = std::max(1, static_cast<int>(std::ceil(std::log2(top / p.t0))));
    return p;
}

}  // namespace

std::size_t estimate_mean_query_count(double n, double B, double xi) {
    Plan p = make_plan(n, B, xi);
    return 2 + static_cast<std::size_t>(p.bisections) + 2 * static_cast<std::size_t>(p.slabs);
}

double fact1_error_bound(double n, double var, double xi) {
    return 8.0 * std::log(n) * std::sqrt(std::max(var, 0.0) / n) + xi;
}

MeanEstimate estimate_mean(Oracle& oracle, const Query& q, double xi) {
    if (!(xi > 0.0)) throw ConfigError("xi must be positive");
    if (!(q.B > 0.0)) throw BadBound("B must be positive");
    const double n = oracle.n();
    Plan plan = make_plan(n, q.B, xi);
    MeanEstimate out;
    auto ask = [&](const ScalarMap& m, const char* tag, int polarity) {
        ++out.queries_used;
        return oracle.respond(derive_unit(q, m, q.tag + "/" + tag, polarity));
    };

    // Chebyshev: each tail beyond 2 sqrt(B) has mass at most 1/4.
    double slack = std::max(1.0 / n, std::sqrt(3.0 / 16.0 / n));
    double up = ask(ScalarMap::gt(plan.radius), "tail+", 1);
    double down = ask(ScalarMap::lt(-plan.radius), "tail-", 1);
    if (up > 0.25 + slack || down > 0.25 + slack)
        throw BadBound("responses put more than 1/4 mass beyond 2 sqrt(B) for '" + q.tag + "'");

    double lo = -plan.radius, hi = plan.radius;
    for (int i = 0; i < plan.bisections; ++i) {
        double mid = 0.5 * (lo + hi);
        if (ask(ScalarMap::gt(mid), "split", 1) > 0.5)
            lo = mid;
        else
            hi = mid;
    }
    double m0 = 0.5 * (lo + hi);

    auto denoise = [n](double r) {
        r = std::clamp(r, 0.0, 1.0);
        return r <= 2.0 / n ? 0.0 : r;
    };
    double est = m0;
    double a = plan.t0;
    for (int j = 0; j < plan.slabs; ++j, a *= 2.0) {
        double b = 2.0 * a;
        double rp = denoise(ask(ScalarMap::slab(m0 + a, m0 + b), "slab+", 1));
        double rn = denoise(ask(ScalarMap::neg_slab(m0 - b, m0 - a), "slab-", -1));
        est += (b - a) * (rp - rn);
    }
    out.estimate = est;
    return out;
}

DownscaledOracle::DownscaledOracle(Oracle& inner, int S)
    : DownscaledOracle(inner, inner.target().with_sigma2(inner.target().sigma2() * S), S) {}

DownscaledOracle::DownscaledOracle(Oracle& inner, const DistributionSpec& d2, int S)
    : inner_(inner), S_(S), n2_(0.0), target_(d2) {
    const DistributionSpec& d1 = inner.target();
    if (S < 1) throw IncompatibleSpecs("S must be a positive integer");
    if (d1.d() != d2.d() || d1.k() != d2.k()) throw IncompatibleSpecs("shapes differ");
    if (std::fabs(d2.sigma2() - S * d1.sigma2()) > 1e-12 * std::max(1.0, d2.sigma2()))
        throw IncompatibleSpecs("sigma2 of the target must be S times the source's");
    for (std::size_t j = 0; j < d1.mean().size(); ++j)
        if (d1.mean()[j] != d2.mean()[j]) throw IncompatibleSpecs("mean tensors differ");
    double l = std::log(inner.n());
    n2_ = S * inner.n() / (256.0 * l * l);
    if (!(n2_ > 0.0) || !std::isfinite(n2_)) throw IncompatibleSpecs("n1 too small for a downscaled oracle");
}

double DownscaledOracle::respond(const Query& q) {
    if (q.codomain != Codomain::Unit) throw NotUnitQuery("query '" + q.tag + "' is not [0,1]-valued");
    if (q.post) throw IncompatibleSpecs("composite queries cannot be downscaled");
    ++count_;
    double extra = inner_.target().sigma2() * (S_ - 1);
    Query Q;
    Q.L = q.L;
    Q.inner = q.inner;
    Q.inner.tau = std::hypot(q.inner.tau, std::sqrt(extra * q.L.weight_norm2()));
    Q.codomain = Codomain::Bounded;
    Q.B = 1.0;
    Q.tag = q.tag + "/smoothed";
    MeanEstimate e = estimate_mean(inner_, Q, 1.0 / (2.0 * n2_));
    inner_max_ = std::max(inner_max_, e.queries_used);
    double p = q.mean(target_);
    if (!(std::fabs(e.estimate - p) <= vstat_envelope(p, n2_) * (1.0 + 1e-12))) ++violations_;
    return e.estimate;
}

}  // namespace tpca
