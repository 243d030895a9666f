#include "tpca/exact.hpp"

#include <cmath>
#include <limits>

namespace tpca {

double round_to_double(const Rational& r) {
    if (r == 0) return 0.0;
    double x = r.convert_to<double>();
    if (!std::isfinite(x)) return x;
    double best = x;
    Rational best_err = abs(r - Rational(x));
    for (double c : {std::nextafter(x, -std::numeric_limits<double>::infinity()),
                     std::nextafter(x, std::numeric_limits<double>::infinity())}) {
        if (!std::isfinite(c)) continue;
        Rational err = abs(r - Rational(c));
        if (err < best_err) {
            best = c;
            best_err = err;
        } else if (err == best_err) {
            int eb = 0, ec = 0;
            double mb = std::frexp(best, &eb), mc = std::frexp(c, &ec);
            auto even = [](double m) {
                return static_cast<long long>(std::ldexp(m, 53)) % 2 == 0;
            };
            if (!even(mb) && even(mc)) best = c;
        }
    }
    return best;
}

void ExactSum::add(double x) {
    // Shewchuk's grow-expansion: partials stay non-overlapping and exact.
    std::size_t i = 0;
    for (double y : partials_) {
        if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
        double hi = x + y;
        double lo = y - (hi - x);
        if (lo != 0.0) partials_[i++] = lo;
        x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
}

Rational ExactSum::value() const {
    Rational s = 0;
    for (double p : partials_) s += Rational(p);
    return s;
}

BigInt binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    BigInt r;
    mpz_bin_uiui(r.backend().data(), n, k);
    return r;
}

BigInt factorial(unsigned n) {
    BigInt r;
    mpz_fac_ui(r.backend().data(), n);
    return r;
}

}  // namespace tpca
