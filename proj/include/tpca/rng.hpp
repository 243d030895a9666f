#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tpca {

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic child key from a parent seed and a path of tags. Distinct
// paths give statistically independent streams.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

// Counter-based standard normal: the value depends only on (key, counter),
// so sampling order and thread schedule never change results.
double gaussian_at(std::uint64_t key, std::uint64_t counter);
double uniform_at(std::uint64_t key, std::uint64_t counter);

// Sequential stream built on mt19937_64 with a portable normal transform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    std::uint64_t next_u64() { return eng_(); }
    double uniform();  // in (0, 1)
    double normal();
    int rademacher() { return (eng_() >> 63) ? 1 : -1; }
    std::uint64_t below(std::uint64_t bound);  // uniform in [0, bound)
    std::int64_t poisson(double lambda);
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace tpca
