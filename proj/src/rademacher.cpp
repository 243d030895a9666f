#include "tpca/rademacher.hpp"

#include <bit>
#include <map>
#include <mutex>
#include <tuple>

#include "tpca/errors.hpp"

namespace tpca {

namespace {

std::mutex g_mutex;
std::map<std::tuple<int, int, int>, Rational> g_moments;
std::map<std::pair<int, int>, Rational> g_mean_moments;  // E[Ybar^m] with N summands
std::map<std::pair<int, int>, Rational> g_signed_moments;  // E[Z^t X_1..X_l]

BigInt ipow(long base, unsigned e) {
    BigInt r = 1, b = base;
    for (; e; e >>= 1, b *= b)
        if (e & 1u) r *= b;
    return r;
}

// E[Ybar^m], Ybar the mean of N independent signs. Caller holds the lock.
const Rational& mean_moment(int N, int m) {
    auto key = std::make_pair(N, m);
    auto it = g_mean_moments.find(key);
    if (it != g_mean_moments.end()) return it->second;
    Rational r;
    if (m == 0) {
        r = 1;
    } else if (N == 0 || m % 2 == 1) {
        r = 0;
    } else {
        BigInt num = 0;
        for (int j = 0; j <= N; ++j) num += binomial(N, j) * ipow(2 * j - N, m);
        r = Rational(num, ipow(2, N) * ipow(N, m));
    }
    return g_mean_moments.emplace(key, r).first->second;
}

// E[Z^t X_1 ... X_l], grouped by the number j of +1 signs.
const Rational& signed_moment(int l, int t) {
    auto key = std::make_pair(l, t);
    auto it = g_signed_moments.find(key);
    if (it != g_signed_moments.end()) return it->second;
    BigInt num = 0;
    for (int j = 0; j <= l; ++j) {
        BigInt term = binomial(l, j) * ipow(2 * j - l, t);
        if ((l - j) % 2) num -= term; else num += term;
    }
    Rational r(num, ipow(2, l));
    return g_signed_moments.emplace(key, r).first->second;
}

}  // namespace

Rational rademacher_moment(int d, int s, int l) {
    if (d < 1 || s < 0 || l < 0 || l > d) throw ConfigError("rademacher_moment needs d >= 1, s, l >= 0, l <= d");
    if (l > s || (l + s) % 2 == 1) return Rational(0);
    std::lock_guard<std::mutex> lock(g_mutex);
    auto key = std::make_tuple(d, s, l);
    auto it = g_moments.find(key);
    if (it != g_moments.end()) return it->second;
    const int N = d - l;
    Rational total = 0;
    for (int t = l; t <= s; ++t) {
        if (N == 0 && t < s) continue;
        Rational term = Rational(binomial(s, t)) * Rational(ipow(N, s - t), ipow(d, s));
        term *= signed_moment(l, t);
        term *= mean_moment(N, s - t);
        total += term;
    }
    g_moments.emplace(key, total);
    return total;
}

Rational rademacher_moment_bruteforce(int d, int s, int l) {
    if (d < 1 || d > 20 || l > d) throw TooLarge("brute force needs 1 <= d <= 20 and l <= d");
    BigInt num = 0;
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
        int plus = d - std::popcount(mask);  // bit set means -1
        int sum = 2 * plus - d;
        int neg_head = std::popcount(mask & ((1u << l) - 1u));
        BigInt term = ipow(sum, s);
        if (neg_head % 2) num -= term; else num += term;
    }
    return Rational(num, ipow(2, d) * ipow(d, s));
}

}  // namespace tpca
