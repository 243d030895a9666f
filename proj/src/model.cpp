#include "tpca/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "tpca/errors.hpp"
#include "tpca/exact.hpp"
#include "tpca/rng.hpp"

namespace tpca {

namespace {

std::shared_ptr<const Tensor> zero_mean(int d, int k) { return std::make_shared<const Tensor>(d, k, 0.0); }

}  // namespace

DistributionSpec DistributionSpec::null(int d, int k, double sigma2) {
    if (k < 2) throw BadOrder("k must be at least 2");
    if (!(sigma2 >= 0.0)) throw ConfigError("sigma2 must be nonnegative");
    DistributionSpec s;
    s.variant_ = Variant::Null;
    s.d_ = d;
    s.k_ = k;
    s.sigma2_ = sigma2;
    s.mean_ = zero_mean(d, k);
    return s;
}

DistributionSpec DistributionSpec::spiked(const LabelingFunction& lf, std::vector<std::vector<double>> factors,
                                          double sigma2) {
    if (static_cast<int>(factors.size()) != lf.K)
        throw DimensionMismatch("expected " + std::to_string(lf.K) + " factors");
    if (!(sigma2 >= 0.0)) throw ConfigError("sigma2 must be nonnegative");
    int d = static_cast<int>(factors.front().size());
    for (const auto& v : factors) {
        if (static_cast<int>(v.size()) != d) throw DimensionMismatch("factors differ in length");
        double n2 = 0.0;
        for (double x : v) n2 += x * x;
        if (std::fabs(n2 - d) > 1e-9 * d) throw DimensionMismatch("factor norm must be sqrt(d)");
    }
    DistributionSpec s;
    s.variant_ = Variant::Spiked;
    s.d_ = d;
    s.k_ = lf.k;
    s.sigma2_ = sigma2;
    s.lf_ = lf;
    Tensor m = rank_one(factors, lf);
    m *= std::pow(static_cast<double>(d), -0.5 * lf.k);
    s.factors_ = std::move(factors);
    s.mean_ = std::make_shared<const Tensor>(std::move(m));
    return s;
}

double DistributionSpec::sigma() const { return std::sqrt(sigma2_); }

DistributionSpec DistributionSpec::with_sigma2(double sigma2) const {
    DistributionSpec s = *this;
    s.sigma2_ = sigma2;
    return s;
}

DistributionSpec DistributionSpec::with_scaled_mean(double factor) const {
    DistributionSpec s = *this;
    Tensor m = *mean_;
    m *= factor;
    s.mean_ = std::make_shared<const Tensor>(std::move(m));
    return s;
}

std::vector<std::vector<double>> random_hypercube_factors(int K, int d, std::uint64_t seed) {
    Rng rng(derive_seed(seed, {0x6661637473ULL}));
    std::vector<std::vector<double>> f(K, std::vector<double>(d));
    for (auto& v : f)
        for (double& x : v) x = rng.rademacher();
    return f;
}

SampleSet sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed, std::uint64_t trial) {
    if (n < 1) throw ConfigError("n must be at least 1");
    SampleSet out;
    out.d = spec.d();
    out.k = spec.k();
    out.seed = seed;
    out.samples.reserve(n);
    const Tensor& mu = spec.mean();
    double sigma = spec.sigma();
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t key = derive_seed(seed, {trial, i});
        Tensor t(spec.d(), spec.k());
        for (std::size_t j = 0; j < t.size(); ++j) t[j] = mu[j] + (sigma == 0.0 ? 0.0 : sigma * gaussian_at(key, j));
        out.samples.push_back(std::move(t));
    }
    return out;
}

Tensor prior_mean_tensor(const LabelingFunction& lf, int d) {
    Tensor t(d, lf.k, 0.0);
    std::vector<int> idx(lf.k);
    std::vector<int> count(static_cast<std::size_t>(lf.K) * d);
    for (std::size_t f = 0; f < t.size(); ++f) {
        unflat_index(f, d, lf.k, idx.data());
        std::fill(count.begin(), count.end(), 0);
        for (int l = 0; l < lf.k; ++l) count[static_cast<std::size_t>(lf.label0(l)) * d + idx[l]] ^= 1;
        bool even = true;
        for (int c : count) even = even && c == 0;
        t[f] = even ? 1.0 : 0.0;
    }
    return t;
}

Tensor reduce_to_sufficient(const SampleSet& s) {
    if (s.n() == 0) throw ConfigError("empty sample set");
    Tensor out(s.d, s.k);
    if (s.n() == 1) return s.samples.front();
    Rational inv_n(1, static_cast<long>(s.n()));
    for (std::size_t j = 0; j < out.size(); ++j) {
        ExactSum acc;
        for (const Tensor& t : s.samples) acc.add(t[j]);
        out[j] = round_to_double(acc.value() * inv_n);
    }
    return out;
}

SampleSet expand_from_sufficient(const Tensor& tbar, std::size_t n, double sigma2, std::uint64_t seed) {
    if (n < 1) throw ConfigError("n must be at least 1");
    SampleSet out;
    out.d = tbar.d();
    out.k = tbar.k();
    out.seed = seed;
    if (n == 1) {
        out.samples.push_back(tbar);
        return out;
    }
    double sigma = std::sqrt(sigma2);
    out.samples.assign(n, tbar);
    std::vector<double> g(n);
    for (std::size_t j = 0; j < tbar.size(); ++j) {
        double gbar = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = sigma * gaussian_at(derive_seed(seed, {0x657870ULL, i}), j);
            gbar += g[i];
        }
        gbar /= static_cast<double>(n);
        std::size_t smallest = 0;
        for (std::size_t i = 0; i < n; ++i) {
            out.samples[i][j] = tbar[j] + (g[i] - gbar);
            if (std::fabs(out.samples[i][j]) < std::fabs(out.samples[smallest][j])) smallest = i;
        }
        // The smallest-magnitude sample absorbs the residue n*tbar - sum, then
        // a few ulp nudges settle the rounded average onto tbar.
        ExactSum acc;
        for (std::size_t i = 0; i < n; ++i)
            if (i != smallest) acc.add(out.samples[i][j]);
        Rational target = Rational(tbar[j]) * static_cast<long>(n) - acc.value();
        double& x = out.samples[smallest][j];
        x = round_to_double(target);
        Rational inv_n(1, static_cast<long>(n));
        for (int step = 0; step < 64; ++step) {
            Rational avg = (acc.value() + Rational(x)) * inv_n;
            double r = round_to_double(avg);
            if (r == tbar[j]) break;
            x = std::nextafter(x, r < tbar[j] ? INFINITY : -INFINITY);
        }
    }
    return out;
}

namespace {

const char kMagic[8] = {'T', 'P', 'C', 'A', 'S', 'M', 'P', '1'};

template <class T>
void put_le(std::ostream& out, T v) {
    unsigned char b[sizeof(T)];
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
    unsigned char b[sizeof(T)];
    in.read(reinterpret_cast<char*>(b), sizeof(T));
    if (!in) throw ConfigError("truncated sample file");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    T v;
    std::memcpy(&v, &bits, sizeof(T));
    return v;
}

}  // namespace

void write_binary(const SampleSet& s, std::ostream& out) {
    out.write(kMagic, 8);
    put_le<std::int32_t>(out, s.d);
    put_le<std::int32_t>(out, s.k);
    put_le<std::uint64_t>(out, s.n());
    put_le<std::uint64_t>(out, s.seed);
    for (const Tensor& t : s.samples)
        for (double x : t.data()) put_le<double>(out, x);
}

SampleSet read_binary(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) throw ConfigError("not a sample file");
    SampleSet s;
    s.d = get_le<std::int32_t>(in);
    s.k = get_le<std::int32_t>(in);
    std::uint64_t n = get_le<std::uint64_t>(in);
    s.seed = get_le<std::uint64_t>(in);
    s.samples.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Tensor t(s.d, s.k);
        for (double& x : t.data()) x = get_le<double>(in);
        s.samples.push_back(std::move(t));
    }
    return s;
}

void write_csv(const SampleSet& s, std::ostream& out) {
    out << "sample";
    std::vector<int> idx(s.k);
    std::size_t cells = entry_count(s.d, s.k);
    for (std::size_t f = 0; f < cells; ++f) {
        unflat_index(f, s.d, s.k, idx.data());
        out << ",T";
        for (int l = 0; l < s.k; ++l) out << (l ? "_" : "") << idx[l] + 1;
    }
    out << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < s.n(); ++i) {
        out << i;
        for (double x : s.samples[i].data()) out << ',' << x;
        out << '\n';
    }
}

}  // namespace tpca
