#include "tpca/baselines.hpp"

#include <cmath>
#include <numeric>

#include "tpca/errors.hpp"
#include "tpca/rng.hpp"

namespace tpca {

Tensor empirical_mean(const SampleSet& samples) { return reduce_to_sufficient(samples); }

namespace {

double norm2(const std::vector<double>& x) { return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0)); }

void normalize(std::vector<double>& x) {
    double n = norm2(x);
    if (n == 0.0) throw ZeroIterate("iterate vanished");
    for (double& v : x) v /= n;
}

}  // namespace

SpectralResult top_singular_pair(const Matrix& m, double tol, int max_iter, std::uint64_t seed, bool strict) {
    SpectralResult r;
    Rng rng(derive_seed(seed, {0x737663ULL}));
    std::vector<double> x(m.cols), y(m.rows), z(m.cols);
    for (double& v : x) v = rng.normal();
    normalize(x);
    for (int it = 1; it <= max_iter; ++it) {
        for (std::size_t i = 0; i < m.rows; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
            y[i] = s;
        }
        std::fill(z.begin(), z.end(), 0.0);
        for (std::size_t i = 0; i < m.rows; ++i)
            for (std::size_t j = 0; j < m.cols; ++j) z[j] += m(i, j) * y[i];
        double nz = norm2(z);
        if (nz == 0.0) {
            // M x = 0: x is already a (zero) singular direction.
            r.iterations = it;
            r.converged = true;
            break;
        }
        double diff = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) {
            z[j] /= nz;
            diff += (z[j] - x[j]) * (z[j] - x[j]);
        }
        x.swap(z);
        r.iterations = it;
        if (std::sqrt(diff) <= tol) {
            r.converged = true;
            break;
        }
    }
    if (!r.converged && strict)
        throw NoConvergence("power iteration hit " + std::to_string(max_iter) + " iterations");
    for (std::size_t i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    r.sigma1 = norm2(y);
    if (r.sigma1 > 0.0)
        for (double& v : y) v /= r.sigma1;
    r.left = std::move(y);
    r.right = std::move(x);
    return r;
}

SpectralResult flatten_spectral(const Tensor& tbar, const LabelingFunction& lf, double tol, int max_iter,
                                std::uint64_t seed, bool strict) {
    if (lf.k < 2 || tbar.k() != lf.k) throw BadOrder("flattening needs k >= 2 matching the tensor");
    std::vector<int> rows((lf.k + 1) / 2);
    std::iota(rows.begin(), rows.end(), 1);
    return top_singular_pair(flatten(tbar, rows), tol, max_iter, seed, strict);
}

double spectral_alignment(const SpectralResult& r, const std::vector<double>& v) {
    const std::size_t d = v.size();
    std::size_t m = 0, len = 1;
    while (len < r.right.size()) len *= d, ++m;
    if (len != r.right.size()) throw DimensionMismatch("right vector length is not a power of d");
    double dot = 0.0;
    std::vector<int> idx(m);
    for (std::size_t f = 0; f < len; ++f) {
        unflat_index(f, static_cast<int>(d), static_cast<int>(m), idx.data());
        double p = 1.0;
        for (int j : idx) p *= v[j];
        dot += p * r.right[f];
    }
    return std::fabs(dot) / std::pow(norm2(v), static_cast<double>(m));
}

double multilinear_form(const Tensor& t, const std::vector<double>& x) {
    const int d = t.d();
    std::vector<double> cur(t.data());
    for (int m = t.k(); m > 0; --m) {
        std::vector<double> next(cur.size() / d, 0.0);
        for (std::size_t i = 0; i < next.size(); ++i) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) s += cur[i * d + j] * x[j];
            next[i] = s;
        }
        cur.swap(next);
    }
    return cur[0];
}

namespace {

// (1/k) sum over modes of T with x in every other mode.
std::vector<double> symmetric_gradient(const Tensor& t, const std::vector<double>& x) {
    const int d = t.d(), k = t.k();
    std::vector<double> g(d, 0.0), prefix(k + 1), suffix(k + 1);
    std::vector<int> idx(k);
    for (std::size_t f = 0; f < t.size(); ++f) {
        double val = t[f];
        if (val == 0.0) continue;
        unflat_index(f, d, k, idx.data());
        prefix[0] = 1.0;
        for (int m = 0; m < k; ++m) prefix[m + 1] = prefix[m] * x[idx[m]];
        suffix[k] = 1.0;
        for (int m = k - 1; m >= 0; --m) suffix[m] = suffix[m + 1] * x[idx[m]];
        for (int m = 0; m < k; ++m) g[idx[m]] += val * prefix[m] * suffix[m + 1];
    }
    for (double& v : g) v /= k;
    return g;
}

}  // namespace

PowerIterationResult tensor_power_iteration(const Tensor& tbar, std::vector<double> init, int iters, double tol) {
    if (static_cast<int>(init.size()) != tbar.d()) throw DimensionMismatch("start vector length");
    normalize(init);
    PowerIterationResult r;
    r.x = std::move(init);
    r.objective = multilinear_form(tbar, r.x);
    double alpha = 0.0;
    const double scale = tbar.norm();
    if (scale == 0.0) return r;  // every direction is stationary
    for (int it = 0; it < iters; ++it) {
        std::vector<double> g = symmetric_gradient(tbar, r.x);
        std::vector<double> y;
        double fy = 0.0;
        for (int attempt = 0;; ++attempt) {
            y = g;
            for (std::size_t j = 0; j < y.size(); ++j) y[j] += alpha * r.x[j];
            normalize(y);
            fy = multilinear_form(tbar, y);
            if (fy >= r.objective - 1e-14 * std::max(1.0, std::fabs(r.objective))) break;
            if (attempt > 80) {
                y = r.x;
                fy = r.objective;
                break;
            }
            alpha = alpha == 0.0 ? std::max(scale, 1e-300) : 2.0 * alpha;
        }
        if (fy < r.objective - 1e-12 * std::max(1.0, std::fabs(r.objective)))
            throw Error("power iteration objective decreased");
        double diff = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) diff += (y[j] - r.x[j]) * (y[j] - r.x[j]);
        r.x.swap(y);
        r.objective = std::max(fy, r.objective);
        r.iterations = it + 1;
        if (std::sqrt(diff) <= tol) break;
    }
    return r;
}

PowerIterationResult tensor_power_multistart(const Tensor& tbar, int restarts, int iters, std::uint64_t seed) {
    PowerIterationResult best;
    best.objective = -INFINITY;
    for (int s = 0; s < restarts; ++s) {
        Rng rng(derive_seed(seed, {0x6d73ULL, static_cast<std::uint64_t>(s)}));
        std::vector<double> x(tbar.d());
        for (double& v : x) v = rng.normal();
        PowerIterationResult r = tensor_power_iteration(tbar, std::move(x), iters, 1e-10);
        if (r.objective > best.objective) best = std::move(r);
    }
    return best;
}

MleDemoRow mle_value_query_demo(int d, double c, int trials, std::uint64_t seed, int restarts) {
    MleDemoRow row;
    row.d = d;
    row.c = c;
    row.sigma2 = c / d;
    row.trials = trials;
    LabelingFunction lf = make_labeling({1, 1, 1});
    std::vector<double> qs(trials), q0(trials);
    for (int t = 0; t < trials; ++t) {
        auto ut = static_cast<std::uint64_t>(t);
        auto spiked = DistributionSpec::spiked(lf, random_hypercube_factors(1, d, derive_seed(seed, {1, ut})), row.sigma2);
        auto null = spiked.null_counterpart();
        Tensor ts = sample(spiked, 1, derive_seed(seed, {2, ut})).samples[0];
        Tensor tn = sample(null, 1, derive_seed(seed, {3, ut})).samples[0];
        qs[t] = tensor_power_multistart(ts, restarts, 100, derive_seed(seed, {4, ut})).objective;
        q0[t] = tensor_power_multistart(tn, restarts, 100, derive_seed(seed, {5, ut})).objective;
    }
    auto moments = [](const std::vector<double>& v, double& mean, double& var) {
        mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= std::max<std::size_t>(v.size() - 1, 1);
    };
    moments(qs, row.mean_spiked, row.var_spiked);
    moments(q0, row.mean_null, row.var_null);
    row.separation = std::fabs(row.mean_spiked - row.mean_null);
    row.var_times_d = row.var_spiked * d;
    row.pass = row.separation >= 0.5;
    return row;
}

}  // namespace tpca
