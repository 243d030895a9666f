#include "tpca/rng.hpp"

#include <cmath>
#include <numbers>

namespace tpca {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
    for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

namespace {

double to_open_unit(std::uint64_t bits) {
    // 53 random bits, shifted off zero.
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double uniform_at(std::uint64_t key, std::uint64_t counter) {
    return to_open_unit(splitmix64(key ^ splitmix64(counter)));
}

double gaussian_at(std::uint64_t key, std::uint64_t counter) {
    std::uint64_t base = splitmix64(key ^ splitmix64(counter));
    double u1 = to_open_unit(base);
    double u2 = to_open_unit(splitmix64(base));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::uniform() { return to_open_unit(eng_()); }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    // Lemire-style rejection keeps the draw unbiased.
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t x = eng_();
        unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
        if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
    }
}

std::int64_t Rng::poisson(double lambda) {
    // Inversion; callers only use small rates.
    double u = uniform();
    double p = std::exp(-lambda), cdf = p;
    std::int64_t x = 0;
    while (u > cdf && x < 1000) {
        ++x;
        p *= lambda / static_cast<double>(x);
        cdf += p;
    }
    return x;
}

}  // namespace tpca
