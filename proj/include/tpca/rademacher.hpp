#pragma once

#include "tpca/exact.hpp"

namespace tpca {

// E[Xbar^s X_1 ... X_l] for X uniform on {-1,+1}^d, Xbar the coordinate
// mean. Splitting Xbar = Z/d + ((d-l)/d) Ybar with Z = X_1 + ... + X_l gives a
// finite sum over t in [l, s]. Exactly zero when l > s or l + s is odd.
// Results are memoized.
Rational rademacher_moment(int d, int s, int l);

// Same quantity by summing over all 2^d sign vectors; d <= 20.
Rational rademacher_moment_bruteforce(int d, int s, int l);

}  // namespace tpca
