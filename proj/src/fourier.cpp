#include "tpca/fourier.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "tpca/errors.hpp"
#include "tpca/exact.hpp"
#include "tpca/rng.hpp"

namespace tpca {

double hermite1(int n, double x) {
    if (n < 0 || n > kHermiteDegreeCap) throw DegreeCap("Hermite degree " + std::to_string(n) + " above 8");
    // h_{j+1} = (x h_j - sqrt(j) h_{j-1}) / sqrt(j+1), normalized as we go.
    double prev = 0.0, cur = 1.0;
    for (int j = 0; j < n; ++j) {
        double next = (x * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(j + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double hermite(const std::vector<int>& c, const std::vector<double>& x) {
    if (c.size() != x.size()) throw DimensionMismatch("multi-index and point differ in length");
    double p = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i) p *= hermite1(c[i], x[i]);
    return p;
}

const GaussRule& gauss_hermite_rule() {
    static const GaussRule rule = [] {
        // Newton iteration on the physicists' rule, then rescaled.
        const int n = 64;
        const double pim4 = 0.7511255444649425;
        std::vector<double> x(n), w(n);
        double z = 0.0, pp = 0.0;
        for (int i = 1; i <= (n + 1) / 2; ++i) {
            if (i == 1)
                z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
            else if (i == 2)
                z -= 1.14 * std::pow(n, 0.426) / z;
            else if (i == 3)
                z = 1.86 * z - 0.86 * x[0];
            else if (i == 4)
                z = 1.91 * z - 0.91 * x[1];
            else
                z = 2.0 * z - x[i - 3];
            for (int it = 0; it < 100; ++it) {
                double p1 = pim4, p2 = 0.0;
                for (int j = 1; j <= n; ++j) {
                    double p3 = p2;
                    p2 = p1;
                    p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
                }
                pp = std::sqrt(2.0 * n) * p2;
                double z1 = z;
                z = z1 - p1 / pp;
                if (std::fabs(z - z1) <= 1e-15 * std::max(1.0, std::fabs(z))) break;
            }
            x[i - 1] = z;
            x[n - i] = -z;
            w[i - 1] = w[n - i] = 2.0 / (pp * pp);
        }
        GaussRule r;
        for (int i = 0; i < n; ++i) {
            r.x.push_back(std::numbers::sqrt2 * x[i]);
            r.w.push_back(w[i] / std::sqrt(std::numbers::pi));
        }
        return r;
    }();
    return rule;
}

double gauss_expectation(const std::function<double(const std::vector<double>&)>& f, int m) {
    if (m < 0 || m > 3) throw TooLarge("tensorized rule limited to 3 axes");
    const GaussRule& g = gauss_hermite_rule();
    const std::size_t n = g.x.size();
    std::size_t total = 1;
    for (int i = 0; i < m; ++i) total *= n;
    std::vector<double> z(m);
    double s = 0.0;
    for (std::size_t f_idx = 0; f_idx < total; ++f_idx) {
        std::size_t rest = f_idx;
        double w = 1.0;
        for (int i = 0; i < m; ++i) {
            z[i] = g.x[rest % n];
            w *= g.w[rest % n];
            rest /= n;
        }
        s += w * f(z);
    }
    return s;
}

namespace {

void multi_indices(int m, int total, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == m) {
        out.push_back(cur);
        return;
    }
    for (int c = 0; c <= total; ++c) {
        cur.push_back(c);
        multi_indices(m, total - c, cur, out);
        cur.pop_back();
    }
}

}  // namespace

double hermite_orthonormality_residual(int m, int total) {
    std::vector<std::vector<int>> idx;
    std::vector<int> cur;
    multi_indices(m, total, cur, idx);
    double worst = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a; b < idx.size(); ++b) {
            double e = gauss_expectation([&](const std::vector<double>& z) { return hermite(idx[a], z) * hermite(idx[b], z); }, m);
            worst = std::max(worst, std::fabs(e - (a == b ? 1.0 : 0.0)));
        }
    }
    return worst;
}

double hermite_shift_identity_check(const std::vector<double>& mu, const std::vector<int>& c) {
    if (mu.size() != c.size()) throw DimensionMismatch("mu and c differ in length");
    std::vector<int> active_c;
    std::vector<double> active_mu;
    double target = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        hermite1(c[i], 0.0);  // degree check
        if (c[i] == 0) continue;
        active_c.push_back(c[i]);
        active_mu.push_back(mu[i]);
        target *= std::pow(mu[i], c[i]) / std::sqrt(std::tgamma(c[i] + 1.0));
    }
    if (active_c.size() > 3) throw TooLarge("at most three active axes");
    const int m = static_cast<int>(active_c.size());
    double value = gauss_expectation(
        [&](const std::vector<double>& z) {
            std::vector<double> x(m);
            for (int i = 0; i < m; ++i) x[i] = active_mu[i] + z[i];
            return hermite(active_c, x);
        },
        m);
    return std::fabs(value - target);
}

SpikedHermiteCheck spiked_hermite_mean_check(const LabelingFunction& lf, const std::vector<std::vector<double>>& factors,
                                             const CountTensor& c, std::size_t draws, std::uint64_t seed) {
    const int d = c.d(), k = c.k();
    if (k != lf.k || static_cast<int>(factors.size()) != lf.K) throw DimensionMismatch("labelling and inputs differ");
    const double scale = std::pow(static_cast<double>(d), -0.5 * k);
    std::vector<std::size_t> cells = c.support();
    std::vector<double> mean(cells.size());
    std::vector<int> idx(k);
    SpikedHermiteCheck r;
    r.cellwise = 1.0;
    for (std::size_t t = 0; t < cells.size(); ++t) {
        unflat_index(cells[t], d, k, idx.data());
        double v = scale;
        for (int l = 0; l < k; ++l) v *= factors[lf.label0(l)][idx[l]];
        mean[t] = v;
        int ct = static_cast<int>(c[cells[t]]);
        r.cellwise *= std::pow(v, ct) / std::sqrt(std::tgamma(ct + 1.0));
    }
    // Labelled-sum form: prod_i prod_j v_ij^{Sigma(c, i)_j} / sqrt(d^{k|c|} c!).
    double log_den = k * c.l1() * std::log(static_cast<double>(d));
    for (std::size_t f : cells) log_den += std::lgamma(c[f] + 1.0);
    double num = 1.0;
    for (int i = 1; i <= lf.K; ++i) {
        std::vector<std::int64_t> sums = labeled_sum(c, lf, i);
        for (int j = 0; j < d; ++j) num *= std::pow(factors[i - 1][j], static_cast<double>(sums[j]));
    }
    r.closed_form = num * std::exp(-0.5 * log_den);

    Rng rng(derive_seed(seed, {0x6865ULL}));
    double s = 0.0, s2 = 0.0;
    for (std::size_t t = 0; t < draws; ++t) {
        double h = 1.0;
        for (std::size_t j = 0; j < cells.size(); ++j) h *= hermite1(static_cast<int>(c[cells[j]]), mean[j] + rng.normal());
        s += h;
        s2 += h * h;
    }
    r.monte_carlo = s / draws;
    r.standard_error = std::sqrt(std::max(s2 / draws - r.monte_carlo * r.monte_carlo, 0.0) / draws);
    r.residual = std::fabs(r.monte_carlo - r.closed_form);
    r.pass = r.residual <= 3.0 * r.standard_error + 1e-12 &&
             std::fabs(r.closed_form - r.cellwise) <= 1e-12 * std::max(1.0, std::fabs(r.cellwise));
    return r;
}

namespace {

// a + b sqrt(s) with rational a, b.
struct QuadSurd {
    Rational a, b;
};

QuadSurd mul(const QuadSurd& x, const QuadSurd& y, const Rational& s) {
    return {x.a * y.a + x.b * y.b * s, x.a * y.b + x.b * y.a};
}

}  // namespace

double hypercontractivity_ratio(int d, int q, const std::vector<int>& coeffs, bool& holds) {
    if (d < 1 || d > 4) throw TooLarge("hypercontractivity check enumerates d <= 4");
    if (q % 2 != 0 || q < 2) throw ConfigError("q must be even");
    const std::size_t monomials = std::size_t{1} << d;
    if (coeffs.size() != monomials) throw DimensionMismatch("one coefficient per monomial");
    const Rational s(q - 1);
    // Scale of monomial r: s^{-|r|/2} = s^{-j} (|r| = 2j) or s^{-j-1} sqrt(s) (|r| = 2j+1).
    std::vector<QuadSurd> scale(monomials);
    for (std::size_t r = 0; r < monomials; ++r) {
        int w = std::popcount(r);
        Rational p = 1;
        for (int j = 0; j < w / 2; ++j) p /= s;
        scale[r] = w % 2 == 0 ? QuadSurd{p, 0} : QuadSurd{0, p / s};
    }
    QuadSurd lhs{0, 0};
    Rational f2_enum = 0;
    for (std::size_t z = 0; z < monomials; ++z) {  // bit set means z_i = -1
        QuadSurd tf{0, 0};
        Rational f = 0;
        for (std::size_t r = 0; r < monomials; ++r) {
            if (!coeffs[r]) continue;
            int chi = std::popcount(r & z) % 2 ? -1 : 1;
            int c = chi * coeffs[r];
            tf.a += c * scale[r].a;
            tf.b += c * scale[r].b;
            f += c;
        }
        QuadSurd pw{1, 0};
        for (int i = 0; i < q; ++i) pw = mul(pw, tf, s);
        lhs.a += pw.a;
        lhs.b += pw.b;
        f2_enum += f * f;
    }
    lhs.a /= static_cast<long>(monomials);
    lhs.b /= static_cast<long>(monomials);
    f2_enum /= static_cast<long>(monomials);
    Rational f2 = 0;
    for (int c : coeffs) f2 += c * c;
    if (f2 != f2_enum) throw Error("Parseval identity failed");
    Rational rhs = 1;
    for (int i = 0; i < q / 2; ++i) rhs *= f2;
    // lhs.a + lhs.b sqrt(s) <= rhs  <=>  X >= Y sqrt(s) with X = rhs - lhs.a, Y = lhs.b.
    Rational X = rhs - lhs.a, Y = lhs.b;
    if (Y <= 0)
        holds = X >= 0 || X * X <= Y * Y * s;
    else
        holds = X >= 0 && X * X >= Y * Y * s;
    double l = round_to_double(lhs.a) + round_to_double(lhs.b) * std::sqrt(static_cast<double>(q - 1));
    double rr = round_to_double(rhs);
    return rr == 0.0 ? (l == 0.0 ? 1.0 : INFINITY) : l / rr;
}

HypercontractivityReport hypercontractivity_check(int d, int q, std::size_t trials, std::uint64_t seed) {
    HypercontractivityReport rep;
    rep.d = d;
    rep.q = q;
    if (d < 1 || d > 4) throw TooLarge("hypercontractivity check enumerates d <= 4");
    if (q % 2 != 0 || q < 2) throw ConfigError("q must be even");
    Rng rng(derive_seed(seed, {0x6879ULL, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(q)}));
    const std::size_t monomials = std::size_t{1} << d;
    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<int> coeffs(monomials);
        for (int& c : coeffs) c = static_cast<int>(rng.below(3)) - 1;
        bool holds = true;
        double ratio = 0.0;
        try {
            ratio = hypercontractivity_ratio(d, q, coeffs, holds);
        } catch (const Error&) {
            ++rep.parseval_failures;
            continue;
        }
        ++rep.cases;
        if (!holds) ++rep.violations;
        rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    }
    return rep;
}

}  // namespace tpca
