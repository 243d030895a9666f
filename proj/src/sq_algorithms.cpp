#include "tpca/sq_algorithms.hpp"

#include <cmath>

#include "tpca/errors.hpp"
#include "tpca/mean_estimation.hpp"

namespace tpca {

namespace {

// Index bookkeeping for the standard-form view of the original tensor.
struct Layout {
    StandardForm sf;
    int d = 0;
    int k = 0;
    int l = 0;  // number of pairs
    int o = 0;
    std::vector<int> orig;  // scratch, original-order index

    Layout(const LabelingFunction& lf, int d_) : sf(standard_form(lf)), d(d_), k(lf.k), orig(lf.k) {
        o = lf.o;
        l = (k - o) / 2;
    }

    // jp is the standard-form multi-index.
    std::size_t flat(const std::vector<int>& jp) {
        for (int p = 0; p < k; ++p) orig[sf.perm[p] - 1] = jp[p];
        return flat_index(orig, d);
    }
};

std::size_t power(int d, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(d);
    return r;
}

MeanEstimate estimate(Oracle& oracle, const Query& q, std::size_t* counter) {
    MeanEstimate e = estimate_mean(oracle, q, default_xi(oracle.n()));
    if (counter) *counter += e.queries_used;
    return e;
}

}  // namespace

Query trace_query(const LabelingFunction& lf, int d, double sigma2) {
    if (lf.k % 2 != 0) throw OddOrder("trace query needs even k");
    Layout lay(lf, d);
    int half = lf.k / 2;
    LinearFunctional L;
    std::vector<int> jp(lf.k), pairs(half);
    for (std::size_t f = 0; f < power(d, half); ++f) {
        unflat_index(f, d, half, pairs.data());
        for (int s = 0; s < half; ++s) jp[2 * s] = jp[2 * s + 1] = pairs[s];
        L.terms.emplace_back(lay.flat(jp), 1.0);
    }
    return Query::linear(std::move(L), sigma2 * static_cast<double>(power(d, half)) + 1.0, "trace");
}

SqResult even_symmetric_test(Oracle& oracle, const LabelingFunction& lf) {
    if (lf.o != 0) throw ConfigError("the trace test needs a labelling with o = 0");
    SqResult r;
    MeanEstimate e = estimate(oracle, trace_query(lf, oracle.target().d(), oracle.target().sigma2()), &r.queries_used);
    r.statistic = e.estimate;
    r.decision = e.estimate > 0.5 ? Variant::Spiked : Variant::Null;
    return r;
}

Tensor estimate_odd_part(Oracle& oracle, const LabelingFunction& lf, std::size_t* queries) {
    if (lf.o == 0) throw NoOddPart("labelling has no odd label");
    const int d = oracle.target().d();
    Layout lay(lf, d);
    const double sigma2 = oracle.target().sigma2();
    Tensor out(d, lay.o);
    std::vector<int> jp(lay.k), odd(lay.o), pairs(std::max(lay.l, 1));
    for (std::size_t fi = 0; fi < out.size(); ++fi) {
        unflat_index(fi, d, lay.o, odd.data());
        for (int t = 0; t < lay.o; ++t) jp[2 * lay.l + t] = odd[t];
        LinearFunctional L;
        for (std::size_t fj = 0; fj < power(d, lay.l); ++fj) {
            if (lay.l > 0) unflat_index(fj, d, lay.l, pairs.data());
            for (int s = 0; s < lay.l; ++s) jp[2 * s] = jp[2 * s + 1] = pairs[s];
            L.terms.emplace_back(lay.flat(jp), 1.0);
        }
        Query q = Query::linear(std::move(L), sigma2 * static_cast<double>(power(d, lay.l)) + 1.0,
                                "odd" + std::to_string(fi));
        out[fi] = estimate(oracle, q, queries).estimate;
    }
    return out;
}

Matrix estimate_even_factor(Oracle& oracle, const LabelingFunction& lf, int slot, const Tensor* odd_hat,
                            std::size_t* queries) {
    const int d = oracle.target().d();
    Layout lay(lf, d);
    if (slot < 1 || slot > lay.l) throw ModeOutOfRange("slot out of range");
    const double sigma2 = oracle.target().sigma2();
    std::vector<double> w(1, 1.0);
    if (lay.o > 0) {
        if (!odd_hat) throw NoOddPart("odd part estimate required when o >= 1");
        double nrm = odd_hat->norm();
        w.assign(odd_hat->data().begin(), odd_hat->data().end());
        if (nrm > 0.0)
            for (double& x : w) x /= nrm;
        else
            w.assign(w.size(), 0.0), w[0] = 1.0;
    }
    Matrix E(d, d);
    std::vector<int> jp(lay.k), others(std::max(lay.l - 1, 1)), odd(std::max(lay.o, 1));
    const std::size_t n_others = power(d, lay.l - 1), n_odd = power(d, lay.o);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            LinearFunctional L;
            jp[2 * (slot - 1)] = a;
            jp[2 * (slot - 1) + 1] = b;
            for (std::size_t fo = 0; fo < n_others; ++fo) {
                if (lay.l > 1) unflat_index(fo, d, lay.l - 1, others.data());
                for (int s = 0, t = 0; s < lay.l; ++s) {
                    if (s == slot - 1) continue;
                    jp[2 * s] = jp[2 * s + 1] = others[t++];
                }
                for (std::size_t fi = 0; fi < n_odd; ++fi) {
                    if (w[fi] == 0.0) continue;
                    if (lay.o > 0) unflat_index(fi, d, lay.o, odd.data());
                    for (int t = 0; t < lay.o; ++t) jp[2 * lay.l + t] = odd[t];
                    L.terms.emplace_back(lay.flat(jp), w[fi]);
                }
            }
            Query q = Query::linear(std::move(L), sigma2 * static_cast<double>(n_others) + 1.0,
                                    "even" + std::to_string(slot) + ":" + std::to_string(a) + "," + std::to_string(b));
            E(a, b) = estimate(oracle, q, queries).estimate;
        }
    }
    return E;
}

SqResult sq_estimate(Oracle& oracle, const LabelingFunction& lf) {
    const int d = oracle.target().d();
    Layout lay(lf, d);
    SqResult r;
    Tensor odd_hat;
    std::vector<double> w(1, 1.0);
    if (lay.o > 0) {
        odd_hat = estimate_odd_part(oracle, lf, &r.queries_used);
        r.odd_norm = odd_hat.norm();
        w.assign(odd_hat.data().begin(), odd_hat.data().end());
        if (r.odd_norm > 0.0)
            for (double& x : w) x /= r.odd_norm;
        else
            w.assign(w.size(), 0.0), w[0] = 1.0;
    }
    std::vector<Matrix> factors;
    for (int s = 1; s <= lay.l; ++s) {
        Matrix E = estimate_even_factor(oracle, lf, s, lay.o > 0 ? &odd_hat : nullptr, &r.queries_used);
        double nrm = E.frobenius();
        r.factor_norms.push_back(nrm);
        if (nrm > 0.0)
            for (double& x : E.a) x /= nrm;
        else
            E.a[0] = 1.0;
        factors.push_back(std::move(E));
    }
    Tensor std_form(d, lay.k);
    std::vector<int> jp(lay.k);
    for (std::size_t f = 0; f < std_form.size(); ++f) {
        unflat_index(f, d, lay.k, jp.data());
        double v = 1.0;
        for (int s = 0; s < lay.l && v != 0.0; ++s) v *= factors[s](jp[2 * s], jp[2 * s + 1]);
        std::size_t fi = 0;
        for (int t = 0; t < lay.o; ++t) fi = fi * d + jp[2 * lay.l + t];
        std_form[f] = v * w[fi];
    }
    r.estimate = unpermute_modes(std_form, lay.sf.perm);
    return r;
}

SqResult sq_test_general(Oracle& oracle, const LabelingFunction& lf) {
    if (lf.o == 0) return even_symmetric_test(oracle, lf);
    SqResult r;
    Tensor odd_hat = estimate_odd_part(oracle, lf, &r.queries_used);
    r.odd_norm = r.statistic = odd_hat.norm();
    r.decision = r.statistic > 0.5 ? Variant::Spiked : Variant::Null;
    return r;
}

SqResult sq_power_iteration(Oracle& oracle, int iterations, std::uint64_t seed) {
    const DistributionSpec& spec = oracle.target();
    if (spec.k() != 2) throw BadOrder("SQ power iteration is implemented for k = 2");
    const int d = spec.d();
    Rng rng(derive_seed(seed, {0x7069ULL}));
    std::vector<double> x(d);
    double nrm = 0.0;
    for (double& v : x) {
        v = rng.normal();
        nrm += v * v;
    }
    for (double& v : x) v /= std::sqrt(nrm);
    SqResult r;
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> y(d);
        for (int a = 0; a < d; ++a) {
            LinearFunctional L;
            for (int b = 0; b < d; ++b) L.terms.emplace_back(static_cast<std::size_t>(a) * d + b, x[b]);
            Query q = Query::linear(std::move(L), spec.sigma2() + 1.0, "grad" + std::to_string(a));
            y[a] = estimate(oracle, q, &r.queries_used).estimate;
        }
        double ny = 0.0;
        for (double v : y) ny += v * v;
        ny = std::sqrt(ny);
        if (ny == 0.0) break;
        for (int a = 0; a < d; ++a) x[a] = y[a] / ny;
    }
    Tensor est(d, 2);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) est[static_cast<std::size_t>(a) * d + b] = x[a] * x[b];
    r.estimate = std::move(est);
    return r;
}

}  // namespace tpca
