#include "tpca/query.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "tpca/errors.hpp"

namespace tpca {

double LinearFunctional::eval(const Tensor& t) const {
    double s = offset;
    for (const auto& [j, w] : terms) s += w * t[j];
    return s;
}

double LinearFunctional::mean(const Tensor& mu) const { return eval(mu); }

double LinearFunctional::weight_norm2() const {
    double s = 0.0;
    for (const auto& [j, w] : terms) s += w * w;
    return s;
}

GaussLaw law_of(const LinearFunctional& L, const DistributionSpec& spec) {
    return {L.mean(spec.mean()), spec.sigma() * std::sqrt(L.weight_norm2())};
}

namespace {

double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// E (X - a)^+ for X ~ N(m, s^2).
double positive_part_mean(double m, double s, double a) {
    if (s == 0.0) return std::max(m - a, 0.0);
    double z = (m - a) / s;
    return s * phi(z) + (m - a) * Phi(z);
}

double ramp_mean(double m, double s, double lo, double hi) {
    if (s == 0.0) return std::clamp((m - lo) / (hi - lo), 0.0, 1.0);
    double r = (positive_part_mean(m, s, lo) - positive_part_mean(m, s, hi)) / (hi - lo);
    return std::clamp(r, 0.0, 1.0);
}

}  // namespace

double gaussian_expectation(const std::function<double(double)>& g, double m, double s) {
    if (s == 0.0) return g(m);
    auto f = [&](double z) { return g(m + s * z) * phi(z); };
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -12.0, 12.0, 20, 1e-12, &err);
}

double ScalarMap::gauss_mean(double m, double s) const {
    double st = std::hypot(s, tau);
    switch (kind) {
        case MapKind::Identity:
            return m;
        case MapKind::IndicatorGt:
            return st == 0.0 ? (m > lo ? 1.0 : 0.0) : Phi((m - lo) / st);
        case MapKind::IndicatorLt:
            return st == 0.0 ? (m < lo ? 1.0 : 0.0) : Phi((lo - m) / st);
        case MapKind::Slab:
            return ramp_mean(m, st, lo, hi);
        case MapKind::NegSlab:
            return 1.0 - ramp_mean(m, st, lo, hi);
        case MapKind::Custom:
            return gaussian_expectation(custom, m, st);
    }
    return 0.0;
}

double ScalarMap::operator()(double x) const {
    if (tau == 0.0 && kind == MapKind::Custom) return custom(x);
    return gauss_mean(x, 0.0);
}

int ScalarMap::monotone() const {
    switch (kind) {
        case MapKind::Identity:
        case MapKind::IndicatorGt:
        case MapKind::Slab:
            return 1;
        case MapKind::IndicatorLt:
        case MapKind::NegSlab:
            return -1;
        case MapKind::Custom:
            return 0;
    }
    return 0;
}

double Query::value_at(double x) const {
    double y = inner(x);
    return post ? (*post)(y) : y;
}

double Query::eval(const Tensor& t) const {
    double v = value_at(L.eval(t));
    if (codomain == Codomain::Unit && !(v >= 0.0 && v <= 1.0))
        throw NotUnitQuery("query '" + tag + "' evaluated outside [0,1]");
    return v;
}

double Query::mean(const DistributionSpec& spec) const { return mean(law_of(L, spec)); }

double Query::mean(const GaussLaw& law) const {
    if (!post) return inner.gauss_mean(law.mean, law.sd);
    if (law.sd == 0.0) return value_at(law.mean);
    const ScalarMap& p = *post;
    int dir = inner.monotone();
    bool indicator = p.kind == MapKind::IndicatorGt || p.kind == MapKind::IndicatorLt;
    if (indicator && p.tau == 0.0 && dir != 0) {
        // {inner(x) > t} is a half line; locate its end point by bisection.
        double t = p.lo;
        double a, b;
        if (inner.kind == MapKind::Identity) {
            a = b = t;
        } else {
            double pad = 40.0 * inner.tau + 1.0;
            a = std::min(inner.lo, inner.hi) - pad;
            b = std::max(inner.lo, inner.hi) + pad;
            auto above = [&](double x) { return inner(x) > t; };
            // 'above' is monotone in x; find the switching point.
            bool left = above(a), right = above(b);
            if (left == right) {
                bool all = left;
                double frac_gt = all ? 1.0 : 0.0;
                return p.kind == MapKind::IndicatorGt ? frac_gt : 1.0 - frac_gt;
            }
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::fabs(a)); ++it) {
                double mid = 0.5 * (a + b);
                (above(mid) == left ? a : b) = mid;
            }
        }
        double x = 0.5 * (a + b);
        double p_right = Phi((law.mean - x) / law.sd);  // P(L > x)
        double p_gt = dir > 0 ? p_right : 1.0 - p_right;
        return p.kind == MapKind::IndicatorGt ? p_gt : 1.0 - p_gt;
    }
    return gaussian_expectation([this](double x) { return value_at(x); }, law.mean, law.sd);
}

double Query::second_moment(const GaussLaw& law) const {
    bool indicator = !post && inner.tau == 0.0 &&
                     (inner.kind == MapKind::IndicatorGt || inner.kind == MapKind::IndicatorLt);
    if (indicator) return mean(law);
    if (!post && inner.kind == MapKind::Identity) return law.mean * law.mean + law.sd * law.sd;
    return gaussian_expectation(
        [this](double x) {
            double v = value_at(x);
            return v * v;
        },
        law.mean, law.sd);
}

Query Query::linear(LinearFunctional L, double B, std::string tag) {
    Query q;
    q.L = std::move(L);
    q.codomain = Codomain::Bounded;
    q.B = B;
    q.tag = std::move(tag);
    return q;
}

Query derive_unit(const Query& q, const ScalarMap& map, std::string tag, int polarity) {
    Query u;
    u.L = q.L;
    u.codomain = Codomain::Unit;
    u.B = 1.0;
    u.tag = std::move(tag);
    u.polarity = polarity;
    if (q.post) throw IncompatibleSpecs("cannot compose more than two scalar maps");
    if (q.inner.kind == MapKind::Identity) {
        u.inner = map;
    } else {
        u.inner = q.inner;
        u.post = map;
    }
    return u;
}

}  // namespace tpca
