#pragma once

#include <optional>
#include <vector>

#include "tpca/labeling.hpp"
#include "tpca/model.hpp"
#include "tpca/oracle.hpp"

namespace tpca {

struct AdversaryCertificate {
    DistributionSpec first;
    DistributionSpec second;
    double mean_distance = 0.0;
    // max over the transcript of |response - E_D q| / envelope, per side
    double worst_ratio_first = 0.0;
    double worst_ratio_second = 0.0;
    std::size_t survivors = 0;
    std::size_t vertices = 0;
};

// Enumerates every hypercube choice of the K factors, keeps those for which
// all recorded responses are envelope-legal, and looks for two survivors u, v
// with |<u_i, v_i>| <= 2^{-1/k} d for every label i. Such a pair has mean
// distance at least 1. Requires d*K <= 16 and transcript entries that carry
// their queries.
std::optional<AdversaryCertificate> graph_adversary_certificate(const std::vector<TranscriptEntry>& transcript,
                                                                const LabelingFunction& lf, int d, double n,
                                                                double sigma2 = 1.0);

}  // namespace tpca
