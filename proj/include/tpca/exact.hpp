#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <vector>

namespace tpca {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

// Nearest double to r, ties to even.
double round_to_double(const Rational& r);

// Exact running sum of doubles kept as non-overlapping partials.
class ExactSum {
public:
    void add(double x);
    Rational value() const;
    double rounded() const { return round_to_double(value()); }

private:
    std::vector<double> partials_;
};

BigInt binomial(unsigned n, unsigned k);
BigInt factorial(unsigned n);

}  // namespace tpca
