#include "tpca/statdim.hpp"

#include <cmath>
#include <limits>
#include <mutex>

#include "tpca/errors.hpp"

namespace tpca {

std::string to_string(Reference r) { return r == Reference::D0 ? "D0" : "prior"; }

double CoeffTable::upper(const Pattern& l) {
    auto it = cache_.find(l);
    if (it != cache_.end()) return it->second;
    CoeffResult c = ref_ == Reference::D0 ? p_pi_series(lf_, d_, l) : p_bar_pi_series(lf_, d_, l);
    double v = c.value + c.bound;
    cache_.emplace(l, v);
    return v;
}

namespace {

std::mutex g_mutex;
std::map<std::string, std::shared_ptr<CoeffTable>> g_tables;

}  // namespace

std::shared_ptr<CoeffTable> coeff_table(const LabelingFunction& lf, int d, Reference ref) {
    std::string key = to_string(lf) + "|" + std::to_string(d) + "|" + to_string(ref);
    std::lock_guard<std::mutex> lock(g_mutex);
    auto it = g_tables.find(key);
    if (it != g_tables.end()) return it->second;
    return g_tables.emplace(key, std::make_shared<CoeffTable>(lf, d, ref)).first->second;
}

TailBound prop1_tail_bound(const LabelingFunction& lf, int d, double epsilon, int u, Reference ref, bool strict) {
    if (u < 2) throw ConfigError("u must be at least 2");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    TailBound r;
    r.certified = std::log(static_cast<double>(d)) >= 2.0 * lf.k * std::log(u - 1.0);
    if (!r.certified && strict)
        throw GuardFailed("d = " + std::to_string(d) + " is below (u-1)^{2k} for u = " + std::to_string(u));
    auto table = coeff_table(lf, d, ref);
    const double log_u1 = std::log(u - 1.0);
    int L = 2 * lf.k;
    double best = -std::numeric_limits<double>::infinity();
    for (;;) {
        int lim = std::min(d, L);
        best = -std::numeric_limits<double>::infinity();
        bool on_boundary = false;
        for (const Pattern& l : patterns_up_to(lf, lim, lf.K * lim)) {
            double p = table->upper(l);
            if (p <= 0.0) continue;
            int sum = 0;
            for (int x : l) sum += x;
            double v = sum * log_u1 + std::log(p);
            if (v > best) {
                best = v;
                r.argmax = l;
            }
        }
        for (int x : r.argmax) on_boundary = on_boundary || x == lim;
        r.box = lim;
        if (!on_boundary || lim >= d) break;
        L += lf.k;
    }
    if (best == -std::numeric_limits<double>::infinity()) {
        r.log_value = best;
        r.value = 0.0;
        return r;
    }
    double log_x = 1.0 - 2.0 * std::log(epsilon) + best;
    r.log_value = 0.5 * u * log_x;
    r.value = std::exp(std::min(0.0, r.log_value));
    return r;
}

SdnBound sdn_lower_bound(const LabelingFunction& lf, int d, double n, Reference ref, Task task, int u_max) {
    if (!(n > 0.0)) throw ConfigError("n must be positive");
    const double eps = 1.0 / std::sqrt(3.0 * n);
    SdnBound r;
    double best_log_tail = std::numeric_limits<double>::infinity();
    for (int u = 2; u <= u_max; ++u) {
        TailBound t = prop1_tail_bound(lf, d, eps / 2.0, u, ref);
        double lt = std::min(0.0, t.log_value);
        if (lt < best_log_tail) {
            best_log_tail = lt;
            r.u_star = u;
            r.certified = t.certified;
        }
    }
    r.tail = std::exp(best_log_tail);
    double log_sdn = std::log(eps / 4.0) - best_log_tail;
    if (task == Task::Estimation) log_sdn += std::log(0.5);
    r.log10_bound = log_sdn / std::log(10.0);
    r.bound = std::pow(10.0, r.log10_bound);
    return r;
}

Theorem1Bound theorem1_query_bound(const LabelingFunction& lf, int d, double n, int L, double eps, double C0) {
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    const double limit = C0 * std::pow(static_cast<double>(d), 0.5 * (lf.k + lf.o) - eps);
    if (n > limit)
        throw HypothesisViolated("n = " + std::to_string(n) + " exceeds C0 d^{(k+o)/2 - eps} = " + std::to_string(limit));
    Theorem1Bound r;
    r.u_literal = std::max(2, static_cast<int>(std::ceil((L + 0.25 * (lf.k + lf.o)) / eps - 1e-12)));
    r.u_corrected = 2 * r.u_literal;
    const double e = 1.0 / std::sqrt(3.0 * n);
    auto log10_sdn = [&](int u) {
        TailBound t = prop1_tail_bound(lf, d, e / 2.0, u, Reference::D0);
        return (std::log(e / 4.0) - std::min(0.0, t.log_value)) / std::log(10.0);
    };
    r.log10_literal = log10_sdn(r.u_literal);
    r.log10_corrected = log10_sdn(r.u_corrected);
    r.log10_bound = std::max(r.log10_literal, r.log10_corrected);
    r.log10_dL = L * std::log10(static_cast<double>(d));
    r.exceeds_dL = r.log10_bound >= r.log10_dL;
    return r;
}

}  // namespace tpca
