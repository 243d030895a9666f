#include "tpca/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>

#include "json.hpp"
#include "tpca/errors.hpp"

namespace tpca {

namespace {

std::atomic<std::size_t> g_violations{0};

}  // namespace

double vstat_envelope(double p, double n) {
    double v = std::max(p * (1.0 - p), 0.0);
    return std::max(1.0 / n, std::sqrt(v / n));
}

std::size_t global_envelope_violations() { return g_violations.load(); }

Strategy parse_strategy(const std::string& name) {
    if (name == "exact") return Strategy::Exact;
    if (name == "empirical") return Strategy::EmpiricalClamped;
    if (name == "maxshift") return Strategy::MaxShift;
    if (name == "nullmimic") return Strategy::NullMimic;
    if (name == "signalcancel") return Strategy::SignalCancel;
    if (name == "graph") return Strategy::GraphAdversary;
    throw ConfigError("unknown strategy '" + name + "'");
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::Exact: return "exact";
        case Strategy::EmpiricalClamped: return "empirical";
        case Strategy::MaxShift: return "maxshift";
        case Strategy::NullMimic: return "nullmimic";
        case Strategy::SignalCancel: return "signalcancel";
        case Strategy::GraphAdversary: return "graph";
    }
    return "?";
}

VstatOracle::VstatOracle(DistributionSpec target, OracleOptions opt)
    : target_(std::move(target)),
      reference_(opt.reference ? *opt.reference : target_.null_counterpart()),
      opt_(std::move(opt)),
      rng_(derive_seed(opt_.seed, {0x6f7261636c65ULL})) {
    if (!(opt_.n > 0.0)) throw ConfigError("effective sample size must be positive");
}

double VstatOracle::respond(const Query& q) {
    if (q.codomain != Codomain::Unit) throw NotUnitQuery("query '" + q.tag + "' is not [0,1]-valued");
    if (opt_.query_cap != 0 && count_ >= opt_.query_cap)
        throw BudgetExceeded("query cap " + std::to_string(opt_.query_cap) + " reached");
    ++count_;
    GaussLaw law = law_of(q.L, target_);
    double p = q.mean(law);
    double env = vstat_envelope(p, opt_.n);
    double r = answer(q, law, p, env);
    if (!(std::fabs(r - p) <= env * (1.0 + 1e-12) + 1e-15)) {
        ++violations_;
        ++g_violations;
    }
    if (opt_.record) transcript_.push_back({q.tag, r, env, p, std::make_shared<const Query>(q)});
    return r;
}

double VstatOracle::answer(const Query& q, const GaussLaw& law, double p, double env) {
    auto project = [&](double x) { return std::clamp(x, p - env, p + env); };
    switch (opt_.strategy) {
        case Strategy::Exact:
            return p;
        case Strategy::MaxShift: {
            int sign = opt_.shift_sign;
            if (sign == 0) sign = rng_.rademacher();
            return p + sign * q.polarity * env;
        }
        case Strategy::NullMimic:
            return project(q.mean(reference_));
        case Strategy::GraphAdversary:
            return q.mean(reference_);
        case Strategy::SignalCancel: {
            // Shrink the spike by (1 - lambda); keep the largest legal lambda.
            double off = q.L.offset;
            auto mean_at = [&](double lambda) {
                return q.mean(GaussLaw{off + (1.0 - lambda) * (law.mean - off), law.sd});
            };
            double full = mean_at(1.0);
            if (std::fabs(full - p) <= env) return full;
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                (std::fabs(mean_at(mid) - p) <= env ? lo : hi) = mid;
            }
            return project(mean_at(lo));
        }
        case Strategy::EmpiricalClamped: {
            bool plain_indicator = !q.post && q.inner.tau == 0.0 &&
                                   (q.inner.kind == MapKind::IndicatorGt || q.inner.kind == MapKind::IndicatorLt);
            double est;
            if (plain_indicator && opt_.n <= 9.0e15) {
                std::binomial_distribution<std::int64_t> bin(static_cast<std::int64_t>(std::llround(opt_.n)),
                                                             std::clamp(p, 0.0, 1.0));
                est = static_cast<double>(bin(rng_.engine())) / opt_.n;
            } else if (opt_.n <= 1e5) {
                // q depends on T only through L(T), so drawing L exactly is
                // equivalent to drawing whole tensors.
                std::size_t m = static_cast<std::size_t>(std::llround(opt_.n));
                double s = 0.0;
                for (std::size_t i = 0; i < m; ++i) s += q.value_at(law.mean + law.sd * rng_.normal());
                est = s / static_cast<double>(m);
            } else {
                double var = std::max(q.second_moment(law) - p * p, 0.0);
                est = p + std::sqrt(var / opt_.n) * rng_.normal();
            }
            return project(est);
        }
    }
    return p;
}

void write_transcript_jsonl(const std::vector<TranscriptEntry>& t, std::ostream& out) {
    for (const auto& e : t) {
        nlohmann::json j = {{"query_tag", e.tag},
                            {"response", e.response},
                            {"envelope", e.envelope},
                            {"true_mean", e.true_mean}};
        out << j.dump() << '\n';
    }
}

std::vector<TranscriptEntry> read_transcript_jsonl(std::istream& in) {
    std::vector<TranscriptEntry> t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        TranscriptEntry e;
        e.tag = j.at("query_tag").get<std::string>();
        e.response = j.at("response").get<double>();
        e.envelope = j.at("envelope").get<double>();
        e.true_mean = j.at("true_mean").get<double>();
        t.push_back(std::move(e));
    }
    return t;
}

}  // namespace tpca
