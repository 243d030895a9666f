#pragma once

#include <map>
#include <memory>
#include <string>

#include "tpca/coefficients.hpp"
#include "tpca/labeling.hpp"

namespace tpca {

// D0 uses p_pi; Prior (the V-bar centred reference) uses p_bar_pi.
enum class Reference { D0, Prior };
std::string to_string(Reference r);

// Certified upper values (value + truncation bound) of the coefficients for
// one (lf, d, reference), filled lazily and shared.
class CoeffTable {
public:
    CoeffTable(LabelingFunction lf, int d, Reference ref) : lf_(std::move(lf)), d_(d), ref_(ref) {}
    double upper(const Pattern& l);
    int d() const { return d_; }
    const LabelingFunction& lf() const { return lf_; }

private:
    LabelingFunction lf_;
    int d_;
    Reference ref_;
    std::map<Pattern, double> cache_;
};

std::shared_ptr<CoeffTable> coeff_table(const LabelingFunction& lf, int d, Reference ref);

struct TailBound {
    double value = 0.0;      // clamped to [0, 1]
    double log_value = 0.0;  // natural log before clamping
    int box = 0;             // final box limit L_box
    Pattern argmax;
    bool certified = false;  // d >= (u - 1)^{2k}
};

// (e/eps^2 * max_l (u-1)^{sum l} p(l))^{u/2} over l in the box
// {l_i <= min(d, L_box)}, starting from L_box = 2k and growing while the
// maximiser sits on the boundary. `strict` throws GuardFailed instead of
// flagging an uncertified result.
TailBound prop1_tail_bound(const LabelingFunction& lf, int d, double epsilon, int u, Reference ref,
                           bool strict = false);

enum class Task { Testing, Estimation };

struct SdnBound {
    double log10_bound = 0.0;  // bounds overflow doubles easily
    double bound = 0.0;        // 10^log10_bound, may be inf
    int u_star = 0;
    double tail = 0.0;
    bool certified = false;
};

// eps = 1/sqrt(3n); SDN >= (eps/4) / tail(eps/2), minimised tail over
// u in [2, u_max]. Estimation applies the extra factor 1/2.
SdnBound sdn_lower_bound(const LabelingFunction& lf, int d, double n, Reference ref, Task task, int u_max = 32);

struct Theorem1Bound {
    int u_literal = 0;    // ceil((L + (k+o)/4) / eps)
    int u_corrected = 0;  // twice that, matching the u/2 exponent
    double log10_literal = 0.0;
    double log10_corrected = 0.0;
    double log10_bound = 0.0;  // the better of the two
    double log10_dL = 0.0;
    bool exceeds_dL = false;
};

// Query lower bound at the prescribed u values. Requires
// n <= C0 d^{(k+o)/2 - eps}; throws HypothesisViolated otherwise.
Theorem1Bound theorem1_query_bound(const LabelingFunction& lf, int d, double n, int L, double eps, double C0);

}  // namespace tpca
