#include "tpca/coefficients.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "tpca/errors.hpp"
#include "tpca/exact.hpp"
#include "tpca/rademacher.hpp"
#include "tpca/rng.hpp"
#include "tpca/tensor.hpp"

namespace tpca {

std::string to_string(CoeffMethod m) {
    switch (m) {
        case CoeffMethod::Series: return "series";
        case CoeffMethod::Enumeration: return "enumeration";
        case CoeffMethod::MonteCarlo: return "montecarlo";
    }
    return "?";
}

double poisson_tail(int M) {
    double p = std::exp(-1.0), cdf = 0.0;
    for (int m = 0; m <= M; ++m) {
        cdf += p;
        p /= (m + 1);
    }
    // Sum the tail directly to avoid 1 - cdf cancellation.
    double tail = 0.0;
    for (int m = M + 1; m < M + 60; ++m, p /= m) tail += p;
    return M < 0 ? 1.0 : tail;
}

namespace {

const double kInvE = std::exp(-1.0);

void check_pattern(const LabelingFunction& lf, int d, const Pattern& l) {
    if (static_cast<int>(l.size()) != lf.K) throw DimensionMismatch("pattern needs one entry per label");
    for (int x : l) {
        if (x < 0) throw ConfigError("pattern entries must be nonnegative");
        if (x > d) throw PatternTooWide("pattern entry " + std::to_string(x) + " exceeds d = " + std::to_string(d));
    }
}

bool all_zero(const Pattern& l) {
    for (int x : l)
        if (x) return false;
    return true;
}

double factorial_d(int n) { return std::tgamma(n + 1.0); }

// Parity masks: bit (label * d + j) flips when a cell has index j in a mode
// carrying that label.
std::vector<std::uint32_t> cell_masks(const LabelingFunction& lf, int d) {
    std::size_t cells = entry_count(d, lf.k);
    std::vector<std::uint32_t> masks(cells);
    std::vector<int> idx(lf.k);
    for (std::size_t f = 0; f < cells; ++f) {
        unflat_index(f, d, lf.k, idx.data());
        std::uint32_t m = 0;
        for (int l = 0; l < lf.k; ++l) m ^= 1u << (lf.label0(l) * d + idx[l]);
        masks[f] = m;
    }
    return masks;
}

std::uint32_t pattern_state(const LabelingFunction& lf, int d, const Pattern& l) {
    std::uint32_t s = 0;
    for (int i = 0; i < lf.K; ++i)
        for (int j = 0; j < l[i]; ++j) s |= 1u << (i * d + j);
    return s;
}

constexpr int kMaxStateBits = 22;

// Per state, numerator over the common denominator M! (d^k)^M of
//   sum_{m=1..M} (#ordered m-sequences of cells reaching the state) / (m! (d^k)^m).
// Grouping ordered sequences is exact: sum over multisets c of 1/c! equals
// (#ordered sequences)/m!.
struct ParityTable {
    std::vector<unsigned __int128> numer;
    BigInt denom;
};

std::mutex g_table_mutex;
std::map<std::string, std::shared_ptr<const ParityTable>> g_tables;

std::shared_ptr<const ParityTable> parity_table(const LabelingFunction& lf, int d, int M, bool exclude_prior) {
    if (lf.K * d > kMaxStateBits) throw TooLarge("K*d = " + std::to_string(lf.K * d) + " parity bits");
    std::string key = to_string(lf) + "|" + std::to_string(d) + "|" + std::to_string(M) + "|" +
                      (exclude_prior ? "bar" : "all");
    {
        std::lock_guard<std::mutex> lock(g_table_mutex);
        auto it = g_tables.find(key);
        if (it != g_tables.end()) return it->second;
    }
    const double N = static_cast<double>(entry_count(d, lf.k));
    // Largest term is M! N^M; keep (M+1) of them under 2^127.
    if (std::lgamma(M + 1.0) / std::log(2.0) + M * std::log2(N) + std::log2(M + 1.0) > 126.0)
        throw TooLarge("enumeration counts overflow 128 bits");

    std::map<std::uint32_t, unsigned __int128> groups;
    for (std::uint32_t m : cell_masks(lf, d))
        if (!(exclude_prior && m == 0)) groups[m] += 1;

    const std::size_t states = std::size_t{1} << (lf.K * d);
    std::vector<unsigned __int128> cur(states, 0), next(states, 0);
    auto table = std::make_shared<ParityTable>();
    table->numer.assign(states, 0);
    cur[0] = 1;
    unsigned __int128 NM = 1;
    for (int i = 0; i < M; ++i) NM *= static_cast<unsigned __int128>(N);
    unsigned __int128 fact_ratio = 1;  // M!/m! built downwards
    std::vector<unsigned __int128> scale(M + 1);
    for (int m = M; m >= 0; --m) {
        scale[m] = fact_ratio;
        fact_ratio *= static_cast<unsigned __int128>(m == 0 ? 1 : m);
    }
    std::vector<unsigned __int128> npows(M + 1);  // N^{M-m}
    npows[0] = NM;
    for (int m = 1; m <= M; ++m) npows[m] = npows[m - 1] / static_cast<unsigned __int128>(N);
    for (int m = 1; m <= M; ++m) {
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t s = 0; s < states; ++s) {
            if (!cur[s]) continue;
            for (const auto& [mask, mult] : groups) next[s ^ mask] += cur[s] * mult;
        }
        cur.swap(next);
        const unsigned __int128 w = scale[m] * npows[m];
        for (std::size_t s = 0; s < states; ++s) table->numer[s] += cur[s] * w;
    }
    BigInt denom = factorial(M);
    for (int i = 0; i < M; ++i) denom *= BigInt(static_cast<unsigned long>(N));
    table->denom = denom;
    std::lock_guard<std::mutex> lock(g_table_mutex);
    return g_tables.emplace(key, table).first->second;
}

BigInt to_big(unsigned __int128 x) {
    BigInt r = static_cast<unsigned long>(x >> 64);
    r <<= 64;
    r += static_cast<unsigned long>(x & 0xffffffffffffffffULL);
    return r;
}

CoeffResult enumerate(const LabelingFunction& lf, int d, const Pattern& l, int M, bool exclude_prior) {
    check_pattern(lf, d, l);
    CoeffResult r;
    r.method = CoeffMethod::Enumeration;
    r.bound = poisson_tail(M);
    if (M <= 0) return r;
    auto table = parity_table(lf, d, M, exclude_prior);
    Rational q(to_big(table->numer[pattern_state(lf, d, l)]), table->denom);
    r.value = round_to_double(q) * kInvE;
    return r;
}

}  // namespace

CoeffResult p_pi_series(const LabelingFunction& lf, int d, const Pattern& l, int A) {
    check_pattern(lf, d, l);
    if (A < 2) throw ConfigError("series order A must be at least 2");
    Rational sum = 0;
    BigInt fact = 1;
    for (int a = 0; a <= A; ++a) {
        if (a > 0) fact *= a;
        if (a == 0 && all_zero(l)) continue;  // cancels the P(|C|_1 = 0) correction exactly
        Rational prod = 1;
        for (int i = 0; i < lf.K && prod != 0; ++i) prod *= rademacher_moment(d, a * lf.s[i], l[i]);
        sum += prod / Rational(fact);
    }
    CoeffResult r;
    r.method = CoeffMethod::Series;
    r.value = round_to_double(sum) * kInvE;
    // The parity of label i's weight is s_i |c|_1, so an even s_i with odd
    // l_i is unreachable and every term vanishes exactly.
    for (int i = 0; i < lf.K; ++i)
        if (lf.s[i] % 2 == 0 && l[i] % 2 == 1) {
            r.bound = 0.0;
            return r;
        }
    // Omitted terms have a > A and a s_i >= l_i for all i. Each product is at
    // most prod_i E[Xbar^{2 floor(a0 s_i / 2)}] in magnitude (|Xbar| <= 1).
    int a0 = A + 1;
    for (int i = 0; i < lf.K; ++i) a0 = std::max(a0, (l[i] + lf.s[i] - 1) / lf.s[i]);
    double tail_sum = 0.0;
    for (int a = a0; a < a0 + 40; ++a) tail_sum += std::exp(-std::lgamma(a + 1.0));
    Rational cap = 1;
    for (int i = 0; i < lf.K; ++i) cap *= rademacher_moment(d, 2 * ((a0 * lf.s[i]) / 2), 0);
    r.bound = std::min(std::exp(1.0) / factorial_d(A + 1), kInvE * tail_sum * round_to_double(cap) * (1.0 + 1e-12));
    return r;
}

CoeffResult p_pi_enumeration(const LabelingFunction& lf, int d, const Pattern& l, int M) {
    return enumerate(lf, d, l, M, false);
}

CoeffResult p_bar_pi_series(const LabelingFunction& lf, int d, const Pattern& l, int A) {
    check_pattern(lf, d, l);
    // E[W^j] = prod_i E[Xbar^{j s_i}].
    auto w_moment = [&](int j) {
        Rational p = 1;
        for (int i = 0; i < lf.K; ++i) p *= rademacher_moment(d, j * lf.s[i], 0);
        return p;
    };
    Rational mu = w_moment(1);
    CoeffResult r;
    r.method = CoeffMethod::Series;
    if (!all_zero(l)) {
        CoeffResult p = p_pi_series(lf, d, l, A);
        double f = std::exp(-round_to_double(mu));
        r.value = f * p.value;
        r.bound = f * p.bound;
        return r;
    }
    std::vector<Rational> raw(A + 1);
    for (int j = 0; j <= A; ++j) raw[j] = w_moment(j);
    Rational sum = 0;
    BigInt fact = 1;
    for (int a = 1; a <= A; ++a) {
        fact *= a;
        if (a < 2) continue;
        Rational central = 0;
        // E[(W - mu)^a] = sum_j C(a, j) E[W^j] (-mu)^{a-j}
        std::vector<Rational> negmu(a + 1);
        negmu[0] = 1;
        for (int j = 1; j <= a; ++j) negmu[j] = negmu[j - 1] * (-mu);
        for (int j = 0; j <= a; ++j) central += Rational(binomial(a, j)) * raw[j] * negmu[a - j];
        sum += central / Rational(fact);
    }
    double var = round_to_double(raw[2] - mu * mu);
    double tail = 0.0;
    for (int a = A + 1; a < A + 80; ++a) tail += std::pow(2.0, a - 2) / factorial_d(a);
    r.value = round_to_double(sum) * kInvE;
    r.bound = kInvE * var * tail;
    return r;
}

CoeffResult p_bar_pi(const LabelingFunction& lf, int d, const Pattern& l, int M) {
    CoeffResult r = enumerate(lf, d, l, M, true);
    if (all_zero(l)) {
        CoeffResult closed = p_bar_pi_series(lf, d, l);
        if (std::fabs(closed.value - r.value) > closed.bound + r.bound + 1e-10)
            throw Error("p_bar closed form " + std::to_string(closed.value) + " disagrees with enumeration " +
                        std::to_string(r.value));
    }
    return r;
}

MonteCarloTable p_pi_monte_carlo(const LabelingFunction& lf, int d, const std::vector<Pattern>& patterns,
                                 std::size_t samples, std::uint64_t seed, int max_m) {
    if (lf.K * d > kMaxStateBits) throw TooLarge("K*d parity bits");
    for (const auto& l : patterns) check_pattern(lf, d, l);
    const std::vector<std::uint32_t> masks = cell_masks(lf, d);
    const std::size_t states = std::size_t{1} << (lf.K * d);
    std::vector<double> weight(max_m + 1);
    double wsum = 0.0;
    for (int m = 1; m <= max_m; ++m) wsum += (weight[m] = kInvE / factorial_d(m));

    MonteCarloTable out;
    out.patterns = patterns;
    out.results.assign(patterns.size(), CoeffResult{0.0, 0.0, CoeffMethod::MonteCarlo});
    std::vector<double> var(patterns.size(), 0.0);
    std::vector<std::uint64_t> count(states);
    for (int m = 1; m <= max_m; ++m) {
        std::size_t n_m = std::max<std::size_t>(1000, static_cast<std::size_t>(samples * weight[m] / wsum));
        Rng rng(derive_seed(seed, {0x6d63ULL, static_cast<std::uint64_t>(m)}));
        std::fill(count.begin(), count.end(), 0);
        for (std::size_t t = 0; t < n_m; ++t) {
            std::uint32_t s = 0;
            for (int c = 0; c < m; ++c) s ^= masks[rng.below(masks.size())];
            ++count[s];
        }
        out.samples += n_m;
        for (std::size_t p = 0; p < patterns.size(); ++p) {
            double f = static_cast<double>(count[pattern_state(lf, d, patterns[p])]) / n_m;
            out.results[p].value += weight[m] * f;
            double v = std::max(f * (1.0 - f), 1.0 / n_m);
            var[p] += weight[m] * weight[m] * v / n_m;
        }
    }
    double tail = poisson_tail(max_m);
    for (std::size_t p = 0; p < patterns.size(); ++p) out.results[p].bound = 5.0 * std::sqrt(var[p]) + tail;
    return out;
}

std::vector<Pattern> patterns_up_to(const LabelingFunction& lf, int max_entry, int max_total) {
    std::vector<Pattern> out;
    Pattern cur(lf.K, 0);
    for (;;) {
        int total = std::accumulate(cur.begin(), cur.end(), 0);
        if (total <= max_total) out.push_back(cur);
        int i = 0;
        while (i < lf.K && cur[i] == max_entry) cur[i++] = 0;
        if (i == lf.K) break;
        ++cur[i];
    }
    return out;
}

double predicted_exponent(const LabelingFunction& lf, const Pattern& l) {
    const double k = lf.k;
    int sum = 0, mx = 0;
    bool paired = true;
    for (int i = 0; i < lf.K; ++i) {
        sum += l[i];
        mx = std::max(mx, l[i]);
        paired = paired && l[i] <= lf.s[i] && (l[i] + lf.s[i]) % 2 == 0;
    }
    if (sum == 0) return lf.o == 0 ? -k / 2.0 : -k;
    if (paired) return -(k + sum) / 2.0;
    if (mx >= 2 * lf.k) return -mx / 2.0;
    return -k;
}

ScalingFit verify_scaling(const LabelingFunction& lf, const Pattern& l, const std::vector<int>& d_grid, int A) {
    ScalingFit fit;
    fit.d_grid = d_grid;
    fit.predicted = predicted_exponent(lf, l);
    std::vector<double> x, y;
    for (int d : d_grid) {
        double v = p_pi_series(lf, d, l, A).value;
        fit.values.push_back(v);
        x.push_back(std::log(static_cast<double>(d)));
        y.push_back(std::log(v));
    }
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    fit.slope = sxy / sxx;
    fit.deviation = std::fabs(fit.slope - fit.predicted);
    return fit;
}

}  // namespace tpca
