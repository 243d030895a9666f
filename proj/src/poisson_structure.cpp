#include "tpca/poisson_structure.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>

#include "tpca/errors.hpp"
#include "tpca/exact.hpp"
#include "tpca/rng.hpp"
#include "tpca/tensor.hpp"

namespace tpca {

namespace {

using Key = std::vector<int>;  // k blocks of d partial sums

// prod over modes of Mult(m, uniform on d) at the key's partial sums.
Rational multinomial_product(const Key& key, int d, int k, int m) {
    Rational p = 1;
    for (int l = 0; l < k; ++l) {
        BigInt num = factorial(m), den = 1;
        for (int j = 0; j < d; ++j) den *= factorial(key[l * d + j]);
        for (int i = 0; i < m; ++i) den *= d;
        p *= Rational(num, den);
    }
    return p;
}

Key partial_sums(const std::vector<int>& cells, int d, int k) {
    Key key(static_cast<std::size_t>(k) * d, 0);
    std::vector<int> idx(k);
    for (std::size_t f = 0; f < cells.size(); ++f) {
        if (!cells[f]) continue;
        unflat_index(f, d, k, idx.data());
        for (int l = 0; l < k; ++l) key[l * d + idx[l]] += cells[f];
    }
    return key;
}

}  // namespace

PoissonReport poisson_structure_check(int d, int k, std::size_t trials, std::uint64_t seed) {
    const std::size_t N = entry_count(d, k);
    const double lambda = 1.0 / static_cast<double>(N);
    Rng rng(derive_seed(seed, {0x706fULL}));
    std::vector<std::size_t> hist(7, 0);  // 0..5 and >= 6
    std::map<int, std::map<Key, std::size_t>> joint;
    std::vector<int> cells(N);
    for (std::size_t t = 0; t < trials; ++t) {
        int m = 0;
        for (std::size_t f = 0; f < N; ++f) m += (cells[f] = static_cast<int>(rng.poisson(lambda)));
        ++hist[std::min(m, 6)];
        if (m >= 1 && m <= 4) ++joint[m][partial_sums(cells, d, k)];
    }

    PoissonReport r;
    r.trials = trials;
    double p = std::exp(-1.0), rest = 1.0;
    for (int b = 0; b < 7; ++b) {
        double expected_p = b < 6 ? p : rest;
        double e = expected_p * trials;
        r.chi2 += (hist[b] - e) * (hist[b] - e) / e;
        rest -= p;
        p /= (b + 1);
    }
    r.dof = 6;
    boost::math::chi_squared dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.chi2));
    r.p0_hat = static_cast<double>(hist[0]) / trials;
    r.p0_se = std::sqrt(std::exp(-1.0) * (1.0 - std::exp(-1.0)) / trials);

    for (auto& [m, table] : joint) {
        StratumCheck s;
        s.m = m;
        double covered = 0.0, diff = 0.0;
        for (auto& [key, c] : table) s.count += c;
        for (auto& [key, c] : table) {
            double exact = round_to_double(multinomial_product(key, d, k, m));
            covered += exact;
            diff += std::fabs(static_cast<double>(c) / s.count - exact);
        }
        s.tv = 0.5 * (diff + std::max(0.0, 1.0 - covered));
        s.tolerance = 4.0 / std::sqrt(static_cast<double>(s.count));
        r.strata.push_back(s);
    }
    return r;
}

double exact_conditional_check(int d, int k, int max_m) {
    const std::size_t N = entry_count(d, k);
    if (N > 16) throw TooLarge("exact check needs d^k <= 16");
    double worst = 0.0;
    for (int m = 1; m <= max_m; ++m) {
        // P(c | m) = m! / (c! N^m) over all compositions of m into N cells.
        std::map<Key, Rational> law;
        std::vector<int> cells(N, 0);
        BigInt Nm = 1;
        for (int i = 0; i < m; ++i) Nm *= static_cast<unsigned long>(N);
        auto visit = [&](auto&& self, std::size_t f, int left) -> void {
            if (f + 1 == N) {
                cells[f] = left;
                BigInt den = Nm;
                for (int c : cells) den *= factorial(c);
                law[partial_sums(cells, d, k)] += Rational(factorial(m), den);
                return;
            }
            for (int c = 0; c <= left; ++c) {
                cells[f] = c;
                self(self, f + 1, left - c);
            }
        };
        visit(visit, 0, m);
        Rational total = 0, product_total = 0;
        for (auto& [key, p] : law) {
            total += p;
            Rational q = multinomial_product(key, d, k, m);
            product_total += q;
            Rational diff = p - q;
            worst = std::max(worst, std::fabs(round_to_double(diff)));
        }
        // Both laws must also exhaust their mass on the same keys.
        worst = std::max(worst, std::fabs(round_to_double(total - 1)));
        worst = std::max(worst, std::fabs(round_to_double(product_total - 1)));
    }
    return worst;
}

}  // namespace tpca
