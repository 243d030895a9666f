#include "tpca/adversary.hpp"

#include <bit>
#include <cmath>

#include "tpca/errors.hpp"

namespace tpca {

namespace {

std::vector<std::vector<double>> vertex_factors(std::uint32_t bits, int K, int d) {
    std::vector<std::vector<double>> f(K, std::vector<double>(d));
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < d; ++j) f[i][j] = (bits >> (i * d + j)) & 1u ? -1.0 : 1.0;
    return f;
}

double worst_ratio(const std::vector<TranscriptEntry>& transcript, const DistributionSpec& spec, double n) {
    double worst = 0.0;
    for (const auto& e : transcript) {
        double p = e.query->mean(spec);
        worst = std::max(worst, std::fabs(e.response - p) / vstat_envelope(p, n));
    }
    return worst;
}

}  // namespace

std::optional<AdversaryCertificate> graph_adversary_certificate(const std::vector<TranscriptEntry>& transcript,
                                                                const LabelingFunction& lf, int d, double n,
                                                                double sigma2) {
    if (d * lf.K > 16) throw TooLarge("d*K = " + std::to_string(d * lf.K) + " exceeds 16");
    for (const auto& e : transcript)
        if (!e.query) throw ConfigError("transcript entry '" + e.tag + "' carries no query");

    const std::uint32_t count = 1u << (d * lf.K);
    std::vector<std::uint32_t> alive;
    for (std::uint32_t v = 0; v < count; ++v) {
        auto spec = DistributionSpec::spiked(lf, vertex_factors(v, lf.K, d), sigma2);
        bool ok = true;
        for (const auto& e : transcript) {
            double p = e.query->mean(spec);
            if (std::fabs(e.response - p) > vstat_envelope(p, n)) {
                ok = false;
                break;
            }
        }
        if (ok) alive.push_back(v);
    }

    const double limit = std::pow(2.0, -1.0 / lf.k) * d;
    auto adjacent = [&](std::uint32_t u, std::uint32_t v) {
        for (int i = 0; i < lf.K; ++i) {
            std::uint32_t diff = ((u ^ v) >> (i * d)) & ((1u << d) - 1u);
            int ip = d - 2 * std::popcount(diff);
            if (std::abs(ip) > limit) return false;
        }
        return true;
    };
    for (std::size_t a = 0; a < alive.size(); ++a) {
        for (std::size_t b = a + 1; b < alive.size(); ++b) {
            if (!adjacent(alive[a], alive[b])) continue;
            AdversaryCertificate c{DistributionSpec::spiked(lf, vertex_factors(alive[a], lf.K, d), sigma2),
                                   DistributionSpec::spiked(lf, vertex_factors(alive[b], lf.K, d), sigma2)};
            c.mean_distance = (c.first.mean() - c.second.mean()).norm();
            c.worst_ratio_first = worst_ratio(transcript, c.first, n);
            c.worst_ratio_second = worst_ratio(transcript, c.second, n);
            c.survivors = alive.size();
            c.vertices = count;
            return c;
        }
    }
    return std::nullopt;
}

}  // namespace tpca
